// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance [--criterion N] [--seed S]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hypowiener/criteria.hpp"
#include "hypowiener/error.hpp"
#include "hypowiener/meanvalue.hpp"
#include "hypowiener/random.hpp"
#include "hypowiener/shells.hpp"
#include "hypowiener/zoo.hpp"

using namespace hypowiener;

namespace {

std::uint64_t g_seed = 7;

struct Check {
  bool ok = true;
  std::vector<std::string> lines;

  void expect(bool cond, const std::string& what) {
    ok = ok && cond;
    lines.push_back(std::string(cond ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

BoundConstants h1_bounds() {
  std::ifstream in(std::string(HYPOWIENER_DATA_DIR) + "/bounds_heisenberg.json");
  if (!in) throw ConfigError("bounds_heisenberg.json not found");
  return BoundConstants::from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

ZooFixture fixture(const std::string& name) {
  for (auto& f : zoo_fixtures(h1_bounds()))
    if (f.name == name) return f;
  throw ConfigError("no fixture " + name);
}

// ---------------------------------------------------------------------------
// 1. kernel identities

Check criterion1() {
  Check c;
  CounterRng rng(g_seed, 1);
  auto uni = [&](double a, double b) { return a + (b - a) * rng.uniform(); };

  for (int n : {1, 2}) {
    const auto t0 = std::chrono::steady_clock::now();
    const HeatKernel K(GroupModel::euclidean(n));
    double worst_norm = 0.0, worst_ck = 0.0;
    for (int i = 0; i < 20; ++i) {
      Point x = Point::zeros(n), y = Point::zeros(n);
      for (int d = 0; d < n; ++d) {
        x[d] = uni(-2, 2);
        y[d] = uni(-2, 2);
      }
      const double t = uni(0.2, 2.0), tau = uni(-1.0, 0.0), s = uni(0.05, 0.95);
      const auto e = normalization_check(K, x, t, tau, {});
      worst_norm = std::max(worst_norm, std::abs(e.value - 1.0));
      const auto ck = chapman_kolmogorov_check(K, {x, t}, tau + s * (t - tau), {y, tau}, {});
      worst_ck = std::max(worst_ck, ck.value);
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(worst_norm <= 1e-8, fmt("euclidean%d normalization max |int - 1| = %.2e (<= 1e-8)", n, worst_norm));
    c.expect(worst_ck <= 1e-5, fmt("euclidean%d Chapman-Kolmogorov max residual = %.2e (<= 1e-5) over 20", n, worst_ck));
    c.expect(sec < 10.0, fmt("euclidean%d runtime %.2f s (< 10 s)", n, sec));
  }

  const GroupModel H = GroupModel::heisenberg();
  const HeatKernel KH(H);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_h = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SpaceTimePoint z{{uni(-1, 1), uni(-1, 1), uni(-1, 1)}, uni(0.1, 1.0)};
    const SpaceTimePoint zeta{{uni(-1, 1), uni(-1, 1), uni(-1, 1)}, z.t - uni(0.05, 1.0)};
    const double lam = std::exp(uni(std::log(0.2), std::log(5.0)));
    const double a = KH(H.dilate(lam, z), H.dilate(lam, zeta));
    const double b = std::pow(lam, -4.0) * KH(z, zeta);
    worst_h = std::max(worst_h, std::abs(a - b) / b);
  }
  const double tol_h = 2.0 * QuadratureConfig{}.accept_tol;
  c.expect(worst_h <= tol_h, fmt("heisenberg homogeneity max rel err = %.2e (<= %.0e) over 100 pairs", worst_h, tol_h));
  IntegrationBudget b;
  b.mc_samples = 10000000;
  b.seed = g_seed;
  const auto nh = normalization_check(KH, {0.3, -0.2, 0.1}, 1.0, 0.5, b);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(std::abs(nh.value - 1.0) <= 1e-2,
           fmt("heisenberg normalization (1e7 MC) = %.5f +- %.5f (within 1e-2)", nh.value, nh.error));
  c.expect(sec < 300.0, fmt("heisenberg runtime %.1f s (< 300 s)", sec));

  for (int n : {1, 2}) {
    const auto fit = fit_gaussian_bounds(HeatKernel(GroupModel::euclidean(n)), SampleSpec{});
    const auto ex = euclidean_bound_constants(n);
    const double omega = GroupModel::euclidean(n).unit_ball_volume();
    const double four_pi = std::pow(4.0 * std::numbers::pi, n / 2.0);
    const double lam = std::max(omega / four_pi, four_pi / omega);
    const double err = std::max({std::abs(fit.a0 - 0.25), std::abs(fit.b0 - 0.25), std::abs(fit.lambda - lam) / lam,
                                 std::abs(ex.lambda - lam) / lam});
    c.expect(err <= 1e-10, fmt("euclidean%d fitted a0=%.15f b0=%.15f Lambda=%.15f, max err %.1e (<= 1e-10)", n, fit.a0,
                               fit.b0, fit.lambda, err));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 2. mean-value suite on Euclidean(1)

Check criterion2() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const GroupModel E = GroupModel::euclidean(1);
  const HeatKernel K(E);
  const auto bc = euclidean_bound_constants(1);
  const IntegrationBudget b{1e-10, 0, 1};
  struct Fn {
    const char* name;
    SpaceTimeFunction u, Hu;
    bool caloric;
  };
  const std::vector<Fn> fns{
      {"1", [](const SpaceTimePoint&) { return 1.0; }, [](const SpaceTimePoint&) { return 0.0; }, true},
      {"x^2 + 2t", [](const SpaceTimePoint& p) { return p.x[0] * p.x[0] + 2.0 * p.t; },
       [](const SpaceTimePoint&) { return 0.0; }, true},
      {"exp(x + t)", [](const SpaceTimePoint& p) { return std::exp(p.x[0] + p.t); },
       [](const SpaceTimePoint&) { return 0.0; }, true},
      {"x^2", [](const SpaceTimePoint& p) { return p.x[0] * p.x[0]; }, [](const SpaceTimePoint&) { return 2.0; },
       false},
      {"sin(x) e^t", [](const SpaceTimePoint& p) { return std::sin(p.x[0]) * std::exp(p.t); },
       [](const SpaceTimePoint& p) { return -2.0 * std::sin(p.x[0]) * std::exp(p.t); }, false},
      {"x^4 + t^2", [](const SpaceTimePoint& p) { return std::pow(p.x[0], 4) + p.t * p.t; },
       [](const SpaceTimePoint& p) { return 12.0 * p.x[0] * p.x[0] - 2.0 * p.t; }, false},
  };
  for (const auto& f : fns) {
    double worst = 0.0;
    for (const SpaceTimePoint& z : {SpaceTimePoint{{0.0}, 0.0}, SpaceTimePoint{{0.5}, 1.0}, SpaceTimePoint{{-1.0}, -0.3}})
      for (double r : {0.5, 1.0, 4.0}) {
        const double M = mean_value_M(K, f.u, z, r, bc, b).value;
        const double R = f.caloric ? 0.0 : mean_value_remainder(K, f.Hu, z, r, bc, b).value;
        worst = std::max(worst, std::abs(M - R - f.u(z)));
      }
    const double tol = f.caloric ? 1e-3 : 5e-3;
    c.expect(worst <= tol, fmt("%s u = %-12s max residual over 3x3 (z, r) = %.2e (<= %.0e)",
                               f.caloric ? "caloric    " : "non-caloric", f.name, worst, tol));
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(sec < 120.0, fmt("runtime %.1f s (< 120 s)", sec));
  return c;
}

// ---------------------------------------------------------------------------
// 3. shell machinery

Check criterion3() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const BoundConstants hb = h1_bounds();
  struct M {
    const char* name;
    HeatKernel kernel;
    BoundConstants bc;
  };
  const std::vector<M> models{{"euclidean1", HeatKernel(GroupModel::euclidean(1)), euclidean_bound_constants(1)},
                              {"heisenberg", HeatKernel(GroupModel::heisenberg()), hb}};
  for (const auto& m : models) {
    const double Q = m.kernel.model().homogeneous_dimension();
    const auto pc = proof_constants(0.5, 0.5, Q, m.bc.c_d, m.bc.lambda, m.bc.a0);
    int good = 0;
    for (int k = 1; k <= 50; ++k) {
      try {
        const TStar ts = find_t_star(k, pc, m.bc, m.kernel);
        good += ts.log_ball >= ts.log_lower - 1e-12 * std::abs(ts.log_lower) && ts.log_ball <= ts.log_upper &&
                ts.log_t_star < ts.log_T;
      } catch (const NumericalError&) {
      }
    }
    c.expect(good == 50, fmt("%s T* bracket and T* < T_{kq+i}: %d/50", m.name, good));
    const auto ord = split_ordering(pc, m.bc, m.kernel, 8, 400, g_seed);
    c.expect(ord.holds, fmt("%s F_k below F_h for h > k (k = 1..8, 400 offsets): %s", m.name,
                            ord.holds ? "holds" : "violated"));
  }
  const auto pc4 = proof_constants(0.5, 0.5, 4.0, 16.0, 13.0, 0.15);
  c.expect(pc4.Q_beta == 18.0, fmt("Q_beta(Q=4, beta=1/2) = %.17g (== 18)", pc4.Q_beta));

  int chain_ok = 0, points = 0;
  for (double beta : {0.2, 0.4, 0.5, 0.6, 0.8})
    for (double lambda : {0.1, 0.3, 0.5, 0.7}) {
      ++points;
      const double Q = 4.0;
      const auto pc = proof_constants(beta, lambda, Q, 16.0, 13.0, 0.15);
      const double qb = pc.q / pc.Q_beta;
      bool ok = pc.q - 1 < pc.q0 && pc.q0 <= pc.q && qb <= pc.p && pc.p <= 1 + qb &&
                1 + qb < pc.q / (Q / beta + 1.0) && pc.Q_beta == 2.0 * (Q / beta + 1.0);
      for (int k = 1; k <= 50 && ok; ++k) ok = oneforall_holds(pc, k, 16.0, 13.0);
      chain_ok += ok;
    }
  c.expect(chain_ok == points, fmt("q, p chain on a %d-point (beta, lambda) grid: %d/%d", points, chain_ok, points));
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(sec < 60.0, fmt("runtime %.1f s (< 60 s)", sec));
  return c;
}

// ---------------------------------------------------------------------------
// 4. verdict matrix

ZooConfig zoo_config(std::uint64_t seed) {
  ZooConfig z;
  z.seed = seed;
  z.h1_bounds = h1_bounds();
  return z;
}

Check criterion4() {
  Check c;
  const ZooReport r = run_zoo(zoo_config(g_seed));
  for (const auto& cell : r.cells)
    c.expect(cell.agrees, fmt("%-22s %-18s %-15s expected %-15s seed %llu", cell.fixture.c_str(),
                              cell.criterion.c_str(), verdict_name(cell.verdict.kind).c_str(),
                              cell.expected ? verdict_name(*cell.expected).c_str() : "-",
                              static_cast<unsigned long long>(cell.seed)));
  c.expect(r.seconds < 1800.0, fmt("runtime %.1f s (< 1800 s)", r.seconds));
  if (const char* out = std::getenv("HYPOWIENER_ZOO_OUT")) std::ofstream(out) << r.to_json(true);
  return c;
}

// ---------------------------------------------------------------------------
// 5. decay exponent of the measure series on the regular log-log fixture

Check criterion5() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const ZooFixture f = fixture("loglog_h1_halfCstar");
  const BoundConstants hb = h1_bounds();
  const HeatKernel K(f.domain.model());
  SeriesConfig cfg;
  cfg.K = 40;
  cfg.seed = mix64(g_seed ^ hash_string(f.name));
  cfg.classifier.k_min = 5;
  cfg.classifier.k_max = 40;
  const SeriesReport rep = series_measure_q(f.domain, K, hb, cfg);
  const DecayFit fit = fit_decay(rep.terms, cfg.classifier);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.lines.push_back(fmt("  fit a_k ~ c alpha(k+1)^-s over k in [5, 40]: s = %.4f +- %.4f (se), n = %d, chi2_red = %.2f",
                        fit.s, fit.s_se, fit.n_used, fit.chi2_red));
  for (std::size_t i = 0; i < rep.terms.size(); i += 5)
    c.lines.push_back(fmt("    k = %2d  a_k = %.4e +- %.1e", rep.terms[i].k, rep.terms[i].value, rep.terms[i].uncertainty));
  c.expect(fit.finite && std::abs(fit.s - 1.0) <= 0.2, fmt("|s - 1| = %.3f (<= 0.2)", std::abs(fit.s - 1.0)));
  c.expect(sec < 900.0, fmt("runtime %.1f s (< 900 s)", sec));
  return c;
}

// ---------------------------------------------------------------------------
// 6. endpoint density of the simulated diffusion against Gamma

std::vector<Point> endpoints(const GroupModel& m, double s, double dt, std::size_t n, std::uint64_t seed) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.substeps = 1;
  cfg.n_paths = n;
  cfg.seed = seed;
  const auto steps = static_cast<std::size_t>(std::llround(s / dt));
  cfg.max_steps = steps + 1;
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t taken = 0;
    Point end;
    walk_path(m, {m.identity(), 0.0}, cfg, i, [&](const SpaceTimePoint&, const SpaceTimePoint& cur) {
      if (++taken < steps) return false;
      end = cur.x;
      return true;
    });
    out.push_back(end);
  }
  return out;
}

// Product-Gaussian KDE with Silverman bandwidths, sup-norm error against Gamma on `grid`.
double kde_sup_error(const std::vector<Point>& pts, const std::vector<Point>& grid,
                     const std::function<double(const Point&)>& exact) {
  const std::size_t d = pts.front().size(), n = pts.size();
  std::vector<double> h(d);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0, q = 0;
    for (const auto& p : pts) m += p[j];
    m /= n;
    for (const auto& p : pts) q += (p[j] - m) * (p[j] - m);
    h[j] = std::sqrt(q / (n - 1)) * std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) * std::pow(double(n), -1.0 / (d + 4.0));
  }
  std::vector<Point> sorted = pts;
  std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a[0] < b[0]; });
  double norm = std::pow(2.0 * std::numbers::pi, -0.5 * d) / n;
  for (double v : h) norm /= v;
  double worst = 0.0;
  for (const auto& g : grid) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), g[0] - 8.0 * h[0],
                               [](const Point& p, double v) { return p[0] < v; });
    double acc = 0.0;
    for (auto it = lo; it != sorted.end() && (*it)[0] <= g[0] + 8.0 * h[0]; ++it) {
      double e = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double u = ((*it)[j] - g[j]) / h[j];
        e += u * u;
      }
      if (e < 64.0) acc += std::exp(-0.5 * e);
    }
    worst = std::max(worst, std::abs(acc * norm - exact(g)));
  }
  return worst;
}

Check criterion6() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const double s = 0.25;
  for (const GroupModel& m : {GroupModel::euclidean(1), GroupModel::heisenberg()}) {
    const HeatKernel K(m);
    std::vector<Point> grid;
    if (m.kind() == GroupKind::Euclidean) {
      for (int i = 0; i <= 80; ++i) grid.push_back({-2.0 + 0.05 * i});
    } else {
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
          for (int k = 0; k < 9; ++k) grid.push_back({-1.5 + 0.375 * i, -1.5 + 0.375 * j, -0.5 + 0.125 * k});
    }
    auto exact = [&](const Point& x) { return K({m.identity(), 0.0}, {x, -s}); };
    double errs[2];
    const double dts[2] = {1e-3, 2.5e-4};
    const std::size_t ns[2] = {100000, 400000};
    for (int r = 0; r < 2; ++r) {
      const auto pts = endpoints(m, s, dts[r], ns[r], g_seed + r);
      errs[r] = kde_sup_error(pts, grid, exact);
    }
    double peak = 0.0;
    for (const auto& g : grid) peak = std::max(peak, exact(g));
    c.expect(errs[1] < errs[0], fmt("%s sup|kde - Gamma| at s = 0.25: %.4e (dt 1e-3, 1e5) -> %.4e (dt 2.5e-4, 4e5), "
                                    "peak %.3f",
                                    m.name().c_str(), errs[0], errs[1], peak));
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(sec < 600.0, fmt("runtime %.1f s (< 600 s)", sec));
  return c;
}

// ---------------------------------------------------------------------------
// 7. reproducibility

Check criterion7() {
  Check c;
  const ZooReport a = run_zoo(zoo_config(g_seed));
  const ZooReport b = run_zoo(zoo_config(g_seed));
  bool same = a.fingerprint() == b.fingerprint() && a.cells.size() == b.cells.size();
  for (std::size_t i = 0; same && i < a.cells.size(); ++i) same = a.cells[i].detail == b.cells[i].detail;
  c.expect(same, fmt("zoo seed %llu twice: fingerprints %016llx / %016llx", static_cast<unsigned long long>(g_seed),
                     static_cast<unsigned long long>(a.fingerprint()), static_cast<unsigned long long>(b.fingerprint())));
  const ZooReport d = run_zoo(zoo_config(g_seed + 1000));
  int diff = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) diff += a.cells[i].verdict.kind != d.cells[i].verdict.kind;
  c.expect(diff == 0 && a.fingerprint() != d.fingerprint(),
           fmt("zoo seed %llu: %d verdict changes, fingerprint %016llx", static_cast<unsigned long long>(g_seed + 1000),
               diff, static_cast<unsigned long long>(d.fingerprint())));

  // Remaining randomized pieces: MC normalization, H^1 mean value, endpoints, hitting.
  const GroupModel H = GroupModel::heisenberg();
  const HeatKernel KH(H);
  IntegrationBudget nb;
  nb.mc_samples = 100000;
  nb.seed = g_seed;
  const auto n1 = normalization_check(KH, {0.0, 0.0, 0.0}, 1.0, 0.0, nb);
  const auto n2 = normalization_check(KH, {0.0, 0.0, 0.0}, 1.0, 0.0, nb);
  c.expect(n1.value == n2.value && n1.error == n2.error, fmt("H1 normalization MC repeat: %.17g", n1.value));

  IntegrationBudget mb{1e-6, 2000, g_seed};
  const auto hb = h1_bounds();
  auto one = [](const SpaceTimePoint&) { return 1.0; };
  const auto m1 = mean_value_M(KH, one, {{0.0, 0.0, 0.0}, 0.0}, 1.0, hb, mb);
  const auto m2 = mean_value_M(KH, one, {{0.0, 0.0, 0.0}, 0.0}, 1.0, hb, mb);
  c.expect(m1.value == m2.value, fmt("H1 mean value MC repeat: %.17g", m1.value));

  const auto e1 = endpoints(H, 0.25, 1e-3, 2000, g_seed);
  const auto e2 = endpoints(H, 0.25, 1e-3, 2000, g_seed);
  c.expect(e1 == e2, "H1 endpoint sample repeat");

  SimConfig hc;
  hc.n_paths = 2000;
  hc.seed = g_seed;
  auto F = [](const SpaceTimePoint& z) { return z.x[0] > 0.4; };
  set_worker_count(1);
  const auto h1 = hitting_probability(H, F, {H.identity(), 0.0}, -0.2, hc);
  set_worker_count(4);
  const auto h2 = hitting_probability(H, F, {H.identity(), 0.0}, -0.2, hc);
  set_worker_count(0);
  c.expect(h1.hits == h2.hits, fmt("hitting repeat with 1 and 4 workers: %zu / %zu hits", h1.hits, h2.hits));
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) {
      g_seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion 1..7] [--seed N]\n");
      return 2;
    }
  }
  const std::vector<std::pair<const char*, Check (*)()>> all{
      {"kernel identities", criterion1},    {"mean-value suite", criterion2}, {"shell machinery", criterion3},
      {"verdict matrix", criterion4},       {"divergence shape", criterion5}, {"oracle consistency", criterion6},
      {"reproducibility", criterion7}};
  bool ok = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = all[i].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& l : c.lines) std::printf("%s\n", l.c_str());
    std::printf("criterion %zu: %s  %s (seed %llu, %.1f s)\n", i + 1, c.ok ? "PASS" : "FAIL", all[i].first,
                static_cast<unsigned long long>(g_seed), sec);
    std::fflush(stdout);
    ok = ok && c.ok;
  }
  return ok ? 0 : 1;
}
