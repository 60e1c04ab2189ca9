#include "hypowiener/shells.hpp"

#include <cmath>
#include <numbers>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

double alpha_or_default(const AlphaFn& f, int k) { return f ? f(k) : alpha(k); }

}  // namespace

double alpha(int k) {
  require(k >= 1, "alpha needs k >= 1");
  return k * std::log(static_cast<double>(k));
}

double ShellSpec::alpha_of(int j) const { return alpha_or_default(alpha_fn, j); }

double ShellSpec::log_level(int j) const { return -alpha_of(j) * std::log(lambda); }

SpaceTimePoint ShellSpec::z0() const {
  if (domain) return domain->z0();
  return {kernel->model().identity(), 0.0};
}

void ShellSpec::check() const {
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  require(k >= 1, "shell index must be >= 1");
  require(kernel != nullptr, "shell needs a kernel");
  if (domain) require(domain->model() == kernel->model(), "domain and kernel use different models");
}

std::pair<double, double> band_log_depths(const ShellSpec& spec, double log_p1) {
  const double Q = spec.kernel->model().homogeneous_dimension();
  return {(2.0 / Q) * (log_p1 - spec.log_level(spec.k + 1)), (2.0 / Q) * (log_p1 - spec.log_level(spec.k))};
}

bool shell_local_membership(const Point& g, double s, const ShellSpec& spec) {
  const GroupModel& model = spec.kernel->model();
  if (s == 0.0 && g == model.identity()) return true;
  if (!(s > 0.0)) return false;
  if (spec.domain && spec.domain->local_contains(g, s)) return false;
  const double lg = spec.kernel->log_local(g, s);
  return lg >= spec.log_level(spec.k) && lg <= spec.log_level(spec.k + 1);
}

bool shell_membership(const SpaceTimePoint& z, const ShellSpec& spec) {
  const SpaceTimePoint z0 = spec.z0();
  return shell_local_membership(spec.kernel->model().local_offset(z0.x, z.x), z0.t - z.t, spec);
}

bool ek_membership(const SpaceTimePoint& z, const ShellSpec& spec) {
  const SpaceTimePoint z0 = spec.z0();
  const GroupModel& model = spec.kernel->model();
  const Point g = model.local_offset(z0.x, z.x);
  const double s = z0.t - z.t;
  if (s == 0.0 && g == model.identity()) return true;
  if (!(s > 0.0)) return false;
  return spec.kernel->log_local(g, s) >= spec.log_level(spec.k);
}

double log_compute_Tk(const HeatKernel& kernel, double lambda, int k, const AlphaFn& alpha_fn) {
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  const GroupModel& model = kernel.model();
  const double Q = model.homogeneous_dimension();
  const double level = -alpha_or_default(alpha_fn, k) * std::log(lambda);
  if (model.kind() == GroupKind::Euclidean) {
    // (4 pi s)^{-N/2} = lambda^{-alpha}.
    return -(2.0 / Q) * level - std::log(4.0 * std::numbers::pi);
  }
  // p_s(0) = s^{-Q/2} p_1(0) is decreasing in s; bisect on x = log s.
  const double log_p0 = kernel.log_profile(model.identity());
  auto on_diag = [&](double x) { return -0.5 * Q * x + log_p0; };
  double lo = -1.0, hi = 1.0;
  while (on_diag(lo) < level) lo *= 2.0;
  while (on_diag(hi) > level) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (on_diag(mid) > level ? lo : hi) = mid;
  }
  if (!(std::abs(on_diag(0.5 * (lo + hi)) - level) < 1e-9 * std::max(1.0, std::abs(level))))
    throw NumericalError("T_k bisection did not converge");
  return 0.5 * (lo + hi);
}

double compute_Tk(const ShellSpec& spec) {
  spec.check();
  return std::exp(log_compute_Tk(*spec.kernel, spec.lambda, spec.k, spec.alpha_fn));
}

std::string ProofConstants::to_json() const {
  return nlohmann::json{{"beta", beta}, {"Q_beta", Q_beta}, {"m", m}, {"q0", q0},
                        {"q", q},       {"p", p},           {"i", i}, {"lambda", lambda}}
      .dump();
}

ProofConstants proof_constants(double beta, double lambda, double Q, double c_d, double Lambda, double a0, int i) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  require(Q > 0.0 && c_d > 1.0 && Lambda >= 1.0 && a0 > 0.0, "invalid structural constants");
  ProofConstants pc;
  pc.beta = beta;
  pc.lambda = lambda;
  pc.Q_beta = 2.0 * (Q / beta + 1.0);
  const double Qb = pc.Q_beta;
  const double l1 = std::log(1.0 + 1.0 / Qb);
  const double l2 = std::log(2.0 * Qb / (Qb + 2.0));
  const double e = std::numbers::e;
  pc.m = std::max({Qb + 1.0, std::log(4.0 * c_d * c_d * Lambda * Lambda) / l1,
                   std::log(2.0 * c_d * std::exp(Q / 2.0)) / l1, std::log(2.0 * c_d * std::exp(a0 / 2.0)) / l1,
                   std::log(c_d * std::pow(20.0, Q / 2.0)) / l2,
                   std::log(c_d * std::pow(10.0 * Q / (e * a0), Q / 2.0)) / l2});
  pc.q0 = Qb + pc.m / std::log(1.0 / lambda);
  pc.q = static_cast<int>(std::ceil(pc.q0));
  pc.p = 1 + static_cast<int>(std::floor(pc.q / Qb));
  require(i >= 0 && i < pc.q, "i must lie in [0, q-1]");
  pc.i = i;
  return pc;
}

bool oneforall_holds(const ProofConstants& pc, int k, double c_d, double Lambda, const AlphaFn& alpha_fn) {
  const int j = k * pc.q + pc.i;
  const double gap = alpha_or_default(alpha_fn, j + pc.p) - alpha_or_default(alpha_fn, j);
  return -gap * std::log(pc.lambda) > std::log(4.0 * c_d * c_d * Lambda * Lambda);
}

TStar find_t_star(int k, const ProofConstants& pc, const BoundConstants& bc, const HeatKernel& kernel,
                  const AlphaFn& alpha_fn) {
  require(k >= 1, "k must be >= 1");
  const GroupModel& model = kernel.model();
  const double Q = model.homogeneous_dimension();
  const double log_omega = std::log(model.unit_ball_volume());
  TStar ts;
  ts.shell_index = k * pc.q + pc.i;
  ts.index = ts.shell_index + pc.p;
  ts.log_lower = std::log(bc.lambda) + alpha_or_default(alpha_fn, ts.index) * std::log(pc.lambda);
  ts.log_upper = std::log(2.0 * bc.c_d) + ts.log_lower;
  ts.log_t_star = (2.0 / Q) * (ts.log_lower - log_omega);
  ts.log_ball = log_omega + 0.5 * Q * ts.log_t_star;
  ts.log_T = log_compute_Tk(kernel, pc.lambda, ts.shell_index, alpha_fn);
  const double slack = 1e-12 * std::max(1.0, std::abs(ts.log_lower));
  if (!(ts.log_ball >= ts.log_lower - slack && ts.log_ball <= ts.log_upper + slack))
    throw NumericalError("T* misses the volume bracket");
  if (!(ts.log_t_star < ts.log_T)) throw NumericalError("T* is not below T_{kq+i}; constants are inconsistent");
  return ts;
}

double log_t_star_bisection(int k, const ProofConstants& pc, const BoundConstants& bc, const GroupModel& model,
                            const AlphaFn& alpha_fn) {
  const int j = k * pc.q + pc.i + pc.p;
  const double sigma = std::log(bc.lambda) + alpha_or_default(alpha_fn, j) * std::log(pc.lambda);
  const double Q = model.homogeneous_dimension();
  const double log_omega = std::log(model.ball_volume(1.0));
  // rho(sigma) = sup{r : |B(x0, r)| <= sigma}, in x = log r.
  auto log_vol = [&](double x) { return log_omega + Q * x; };
  double lo = -1.0, hi = 1.0;
  while (log_vol(lo) > sigma) lo *= 2.0;
  while (log_vol(hi) <= sigma) hi *= 2.0;
  for (int it = 0; it < 300 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_vol(mid) <= sigma ? lo : hi) = mid;
  }
  return 2.0 * lo;
}

ShellSplit split_shell(const ShellSpec& spec, double t_star) {
  require(t_star > 0.0, "T* must be positive");
  const double t0 = spec.z0().t;
  ShellSplit out;
  out.F0 = [spec, t_star, t0](const SpaceTimePoint& z) {
    return z.t >= t0 - t_star && shell_membership(z, spec);
  };
  out.F = [spec, t_star, t0](const SpaceTimePoint& z) {
    return z.t <= t0 - t_star && shell_membership(z, spec);
  };
  return out;
}

double ShellEnvelope::radius(double s) const {
  if (!(s > 0.0) || s > T) return 0.0;
  const double v = (s / a0) * (log_K - 0.5 * Q * std::log(s));
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

ShellEnvelope shell_envelope(const ShellSpec& spec, const BoundConstants& bc) {
  spec.check();
  const GroupModel& model = spec.kernel->model();
  ShellEnvelope env;
  env.Q = model.homogeneous_dimension();
  env.a0 = bc.a0;
  env.log_K = std::log(bc.lambda) + spec.alpha_of(spec.k) * std::log(spec.lambda) - std::log(model.unit_ball_volume());
  env.T = compute_Tk(spec);
  // (s/a0)(log K - (Q/2) log s) peaks at s = K^{2/Q} / e.
  const double s_peak = std::exp((2.0 / env.Q) * env.log_K - 1.0);
  env.max_radius = env.radius(std::min(s_peak, env.T));
  env.r_k = std::pow(std::pow(env.max_radius, 4) + env.T * env.T, 0.25);
  return env;
}

}  // namespace hypowiener

namespace hypowiener {

std::string OrderingReport::to_json() const {
  nlohmann::json j;
  j["holds"] = holds;
  j["shell_index"] = shell_index;
  for (const auto& [lo, hi] : log_depth_ranges) j["log_depth_ranges"].push_back({lo, hi});
  return j.dump();
}

OrderingReport split_ordering(const ProofConstants& pc, const BoundConstants& bc, const HeatKernel& kernel, int K,
                              std::size_t offsets, std::uint64_t seed, const AlphaFn& alpha_fn) {
  require(K >= 2, "need at least two shells to compare");
  const GroupModel& model = kernel.model();
  // Normalized offsets xi = delta_{1/sqrt(s)} g; xi = 0 gives the deepest members.
  std::vector<double> log_p1{kernel.log_profile(model.identity())};
  CounterRng rng(seed, 0x5eed);
  for (std::size_t n = 0; n < offsets; ++n) {
    Point u = model.identity();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0 * rng.uniform() - 1.0;
    const double d = model.gauge(u);
    if (!(d > 0.0)) continue;
    log_p1.push_back(kernel.log_profile(model.dilate(6.0 * rng.uniform() / d, u)));
  }
  OrderingReport rep;
  rep.holds = true;
  for (int k = 1; k <= K; ++k) {
    const TStar ts = find_t_star(k, pc, bc, kernel, alpha_fn);
    ShellSpec spec{pc.lambda, ts.shell_index, nullptr, &kernel, alpha_fn};
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (double lp : log_p1) {
      const auto [a, b] = band_log_depths(spec, lp);
      if (b < ts.log_t_star) continue;
      lo = std::min(lo, std::max(a, ts.log_t_star));
      hi = std::max(hi, b);
    }
    if (!(lo <= hi)) rep.holds = false;  // empty F_k
    rep.shell_index.push_back(ts.shell_index);
    rep.log_depth_ranges.push_back({lo, hi});
  }
  for (std::size_t k = 0; k < rep.log_depth_ranges.size(); ++k)
    for (std::size_t h = k + 1; h < rep.log_depth_ranges.size(); ++h)
      if (!(rep.log_depth_ranges[k].first > rep.log_depth_ranges[h].second)) rep.holds = false;
  return rep;
}

}  // namespace hypowiener
