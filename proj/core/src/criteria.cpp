#include "hypowiener/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

double alpha_of(const AlphaFn& f, int k) { return f ? f(k) : alpha(k); }

void finish(SeriesReport& rep, const SeriesConfig& cfg) {
  double acc = 0.0;
  rep.partial_sums.clear();
  for (const SeriesTerm& t : rep.terms) {
    acc += std::max(0.0, t.value);
    rep.partial_sums.push_back(acc);
  }
  rep.verdict = classify_divergence(rep.terms, cfg.classifier, &rep.fit, cfg.alpha_fn);
}

SeriesReport base_report(Criterion c, const Domain& domain, const SeriesConfig& cfg, int k_hi) {
  SeriesReport rep;
  rep.criterion = c;
  rep.k_lo = 1;
  rep.k_hi = k_hi;
  rep.lambda = cfg.lambda;
  rep.domain_hash = domain.hash();
  rep.seed = cfg.seed;
  return rep;
}

nlohmann::json report_json(const SeriesReport& r) {
  nlohmann::json terms = nlohmann::json::array();
  for (const SeriesTerm& t : r.terms) terms.push_back({{"k", t.k}, {"value", t.value}, {"uncertainty", t.uncertainty}});
  nlohmann::json j{{"criterion", criterion_name(r.criterion)},
                   {"terms", terms},
                   {"partial_sums", r.partial_sums},
                   {"fitted_decay",
                    {{"c", r.fit.c},
                     {"s", r.fit.s},
                     {"s_se", r.fit.s_se},
                     {"chi2_red", r.fit.chi2_red},
                     {"n_used", r.fit.n_used},
                     {"finite", r.fit.finite}}},
                   {"verdict", nlohmann::json::parse(r.verdict.to_json())},
                   {"k_range", {r.k_lo, r.k_hi}},
                   {"lambda", r.lambda},
                   {"domain_hash", r.domain_hash},
                   {"seed", r.seed}};
  if (!r.bracket.empty()) j["bracket"] = r.bracket;
  if (!r.brackets.empty()) {
    j["brackets"] = nlohmann::json::array();
    for (const SeriesReport& b : r.brackets) j["brackets"].push_back(report_json(b));
  }
  return j;
}

// Checks that every sampled point of {threshold(s) <= d^2, 0 < s < window} lies
// outside the domain. Returns the number of violations.
std::size_t exterior_violations(const Domain& domain, const std::function<double(double)>& threshold, double window,
                                std::size_t samples, std::uint64_t seed) {
  const GroupModel& model = domain.model();
  const int n = model.topological_dimension();
  const SpaceTimePoint z0 = domain.z0();
  CounterRng rng(seed, 0x5eed);
  std::size_t bad = 0;
  const std::size_t n_s = 40;
  const double factors[] = {1.0, 1.0 + 1e-9, 1.01, 1.1, 2.0, 4.0};
  for (std::size_t i = 0; i < samples; ++i) {
    // Depths log-spaced over twelve decades below the window.
    const double s = window * std::pow(10.0, -12.0 * static_cast<double>(i % n_s) / n_s) * (1.0 - 1e-9);
    Point u = model.identity();
    for (int c = 0; c < n; ++c) u[c] = rng.normal();
    const double du = model.gauge(u);
    if (!(du > 0.0)) continue;
    const double r = std::sqrt(threshold(s)) * factors[i % std::size(factors)] * (1.0 + 1e-12);
    const Point g = model.dilate(r / du, u);
    if (domain.contains({model.compose(z0.x, g), z0.t - s})) ++bad;
  }
  return bad;
}

}  // namespace

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::BalayageMC:
      return "balayage-mc";
    case Criterion::CapacityProxy:
      return "capacity";
    case Criterion::MeasureTk:
      return "measure-tk";
    case Criterion::MeasureQ:
      return "measure-q";
  }
  return "measure-q";
}

Criterion criterion_from_name(const std::string& name) {
  if (name == "measure-q") return Criterion::MeasureQ;
  if (name == "measure-tk") return Criterion::MeasureTk;
  if (name == "capacity") return Criterion::CapacityProxy;
  if (name == "balayage-mc") return Criterion::BalayageMC;
  throw ConfigError("unknown criterion: " + name);
}

std::string SeriesReport::to_json() const { return report_json(*this).dump(2); }

DecayFit fit_decay(const std::vector<SeriesTerm>& terms, const ClassifierConfig& cfg, const AlphaFn& alpha_fn) {
  DecayFit fit;
  double sw = 0, sx = 0, sy = 0;
  std::vector<double> xs, ys, ws;
  for (const SeriesTerm& t : terms) {
    if (t.k < cfg.k_min || (cfg.k_max > 0 && t.k > cfg.k_max)) continue;
    if (!(t.value > cfg.floor)) continue;
    const double se = t.uncertainty / 1.96;
    // Terms whose interval reaches zero get a censored (weak) weight.
    const double sigma = se >= t.value ? 1.0 : std::max(se / t.value, 1e-3);
    xs.push_back(std::log(alpha_of(alpha_fn, t.k + 1)));
    ys.push_back(std::log(t.value));
    ws.push_back(1.0 / (sigma * sigma));
  }
  fit.n_used = static_cast<int>(xs.size());
  if (fit.n_used < 3) return fit;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - xm) * (xs[i] - xm);
    sxy += ws[i] * (xs[i] - xm) * (ys[i] - ym);
  }
  if (!(sxx > 0.0)) return fit;
  const double slope = sxy / sxx;
  const double icept = ym - slope * xm;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - icept - slope * xs[i];
    chi2 += ws[i] * r * r;
  }
  fit.chi2_red = chi2 / (fit.n_used - 2);
  const double scale = std::max(1.0, fit.chi2_red);
  fit.s = -slope;
  fit.c = std::exp(icept);
  fit.s_se = std::sqrt(scale / sxx);
  fit.log_c_se = std::sqrt(scale * (1.0 / sw + xm * xm / sxx));
  fit.finite = std::isfinite(fit.s) && std::isfinite(fit.s_se);
  return fit;
}

Verdict classify_divergence(const std::vector<SeriesTerm>& terms, const ClassifierConfig& cfg, DecayFit* fit_out,
                            const AlphaFn& alpha_fn) {
  std::vector<SeriesTerm> usable;
  for (const SeriesTerm& t : terms)
    if (t.k >= cfg.k_min && (cfg.k_max <= 0 || t.k <= cfg.k_max)) usable.push_back(t);
  if (static_cast<int>(usable.size()) < cfg.min_terms)
    throw ConfigError("classification needs at least " + std::to_string(cfg.min_terms) + " terms with k >= " +
                      std::to_string(cfg.k_min));
  const DecayFit fit = fit_decay(terms, cfg, alpha_fn);
  if (fit_out) *fit_out = fit;

  Verdict v;
  v.numbers["n_terms"] = static_cast<double>(usable.size());
  v.numbers["n_fit"] = fit.n_used;
  v.numbers["threshold"] = 1.0 + cfg.eps_s;
  std::size_t zeros = 0;
  for (const SeriesTerm& t : usable) zeros += !(t.value > cfg.floor);
  v.numbers["zero_terms"] = static_cast<double>(zeros);
  if (zeros == usable.size()) {
    v.kind = VerdictKind::IrregularLikely;
    v.evidence = "every term vanishes";
    return v;
  }
  bool trailing = static_cast<int>(usable.size()) >= cfg.trailing_zeros && cfg.trailing_zeros > 0;
  for (int i = 0; trailing && i < cfg.trailing_zeros; ++i)
    trailing = !(usable[usable.size() - 1 - i].value > cfg.floor);
  if (trailing) {
    v.kind = VerdictKind::IrregularLikely;
    v.evidence = "the last terms vanish (super-polynomial decay)";
    return v;
  }
  if (!fit.finite) {
    v.kind = VerdictKind::Inconclusive;
    v.evidence = "decay fit unavailable";
    return v;
  }
  v.numbers["s"] = fit.s;
  v.numbers["s_se"] = fit.s_se;
  v.numbers["c"] = fit.c;
  const double thr = 1.0 + cfg.eps_s;
  if (std::abs(fit.s - thr) <= cfg.z * fit.s_se) {
    v.kind = VerdictKind::Inconclusive;
    v.evidence = "fitted exponent within " + std::to_string(cfg.z) + " standard errors of 1 + eps_s";
  } else if (fit.s < thr) {
    v.kind = VerdictKind::RegularLikely;
    v.evidence = "terms decay no faster than alpha(k+1)^-(1+eps_s): divergent shape";
  } else {
    v.kind = VerdictKind::IrregularLikely;
    v.evidence = "terms decay faster than alpha(k+1)^-(1+eps_s): summable shape";
  }
  return v;
}

std::vector<VolumeEstimate> measure_volumes(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                                            const SeriesConfig& cfg) {
  require(cfg.K >= 2, "K must be >= 2");
  ShellSpec spec{cfg.lambda, 1, &domain, &kernel, cfg.alpha_fn};
  spec.check();
  std::vector<int> ks;
  for (int k = 1; k <= cfg.K; ++k) ks.push_back(k);
  return shell_volumes(spec, ks, bc, cfg.volume, cfg.seed);
}

SeriesReport series_measure_q(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                              const SeriesConfig& cfg, const std::vector<VolumeEstimate>* volumes) {
  const std::vector<VolumeEstimate> own = volumes ? std::vector<VolumeEstimate>{} : measure_volumes(domain, kernel, bc, cfg);
  const auto& vols = volumes ? *volumes : own;
  SeriesReport rep = base_report(Criterion::MeasureQ, domain, cfg, cfg.K);
  const double Q = kernel.model().homogeneous_dimension();
  for (int k = 1; k <= cfg.K; ++k) {
    const double f = std::exp(-((Q + 2.0) / Q) * alpha_of(cfg.alpha_fn, k) * std::log(cfg.lambda));
    rep.terms.push_back({k, vols[k - 1].mean * f, vols[k - 1].ci_halfwidth * f});
  }
  finish(rep, cfg);
  return rep;
}

SeriesReport series_measure_Tk(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                               const SeriesConfig& cfg, const std::vector<VolumeEstimate>* volumes) {
  const std::vector<VolumeEstimate> own = volumes ? std::vector<VolumeEstimate>{} : measure_volumes(domain, kernel, bc, cfg);
  const auto& vols = volumes ? *volumes : own;
  SeriesReport rep = base_report(Criterion::MeasureTk, domain, cfg, cfg.K);
  for (int k = 1; k <= cfg.K; ++k) {
    const double log_T = log_compute_Tk(kernel, cfg.lambda, k, cfg.alpha_fn);
    const double f = std::exp(-log_T - alpha_of(cfg.alpha_fn, k) * std::log(cfg.lambda));
    rep.terms.push_back({k, vols[k - 1].mean * f, vols[k - 1].ci_halfwidth * f});
  }
  finish(rep, cfg);
  return rep;
}

SeriesReport series_capacity_proxy(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                                   const SeriesConfig& cfg, const std::vector<VolumeEstimate>* volumes) {
  const std::vector<VolumeEstimate> own = volumes ? std::vector<VolumeEstimate>{} : measure_volumes(domain, kernel, bc, cfg);
  const auto& vols = volumes ? *volumes : own;
  SeriesReport rep = base_report(Criterion::CapacityProxy, domain, cfg, cfg.K);
  SeriesReport lower = rep, upper = rep;
  lower.bracket = "lower";
  upper.bracket = "upper";
  for (int k = 1; k <= cfg.K; ++k) {
    const double log_T = log_compute_Tk(kernel, cfg.lambda, k, cfg.alpha_fn);
    const CapacityProxy cp = capacity_bracket(vols[k - 1], std::exp(log_T));
    const double fl = std::exp(-alpha_of(cfg.alpha_fn, k) * std::log(cfg.lambda));
    const double fu = std::exp(-alpha_of(cfg.alpha_fn, k + 1) * std::log(cfg.lambda));
    lower.terms.push_back({k, cp.value * fl, cp.ci_halfwidth * fl});
    upper.terms.push_back({k, cp.value * fu, cp.ci_halfwidth * fu});
  }
  finish(lower, cfg);
  finish(upper, cfg);
  rep.terms = lower.terms;
  rep.partial_sums = lower.partial_sums;
  rep.fit = lower.fit;
  if (lower.verdict.kind == upper.verdict.kind) {
    rep.verdict = lower.verdict;
    rep.verdict.evidence = "both brackets agree: " + lower.verdict.evidence;
  } else {
    rep.verdict.kind = VerdictKind::Inconclusive;
    rep.verdict.evidence = "lower bracket " + verdict_name(lower.verdict.kind) + ", upper bracket " +
                           verdict_name(upper.verdict.kind);
  }
  rep.verdict.numbers["lower_s"] = lower.fit.s;
  rep.verdict.numbers["upper_s"] = upper.fit.s;
  rep.brackets = {lower, upper};
  return rep;
}

SeriesReport series_balayage_mc(const Domain& domain, const HeatKernel& kernel, const SeriesConfig& cfg) {
  const int K = cfg.balayage_K;
  require(K >= 2, "balayage K must be >= 2");
  require(cfg.lambda > 0.0 && cfg.lambda < 1.0, "lambda must lie in (0, 1)");
  require(domain.model() == kernel.model(), "domain and kernel use different models");
  cfg.sim.check();
  const GroupModel& model = domain.model();
  const SpaceTimePoint z0 = domain.z0();
  std::vector<double> levels(static_cast<std::size_t>(K + 2));
  for (int j = 1; j <= K + 1; ++j) levels[j] = -alpha_of(cfg.alpha_fn, j) * std::log(cfg.lambda);
  const double T1 = std::exp(log_compute_Tk(kernel, cfg.lambda, 1, cfg.alpha_fn));
  const double s_start = cfg.start_fraction * std::exp(log_compute_Tk(kernel, cfg.lambda, K + 1, cfg.alpha_fn));

  SimConfig sim = cfg.sim;
  sim.seed = cfg.seed;
  sim.t_origin = z0.t;
  sim.t_floor = z0.t - 2.0 * T1;
  sim.dt = std::min(sim.dt, T1);
  const SpaceTimePoint start{z0.x, z0.t - s_start};

  using Hits = std::vector<std::size_t>;
  const auto blocks = map_blocks<Hits>(sim.n_paths, 64, [&](std::size_t, std::size_t begin, std::size_t end) {
    Hits hits(static_cast<std::size_t>(K + 1), 0);
    for (std::size_t i = begin; i < end; ++i) {
      std::vector<char> seen(static_cast<std::size_t>(K + 1), 0);
      walk_path(model, start, sim, i, [&](const SpaceTimePoint&, const SpaceTimePoint& cur) {
        const double s = z0.t - cur.t;
        if (s > T1) return true;
        const Point g = model.local_offset(z0.x, cur.x);
        if (domain.local_contains(g, s)) return false;
        const double lg = kernel.log_local(g, s);
        if (lg < levels[1] || lg > levels[K + 1]) return false;
        const auto it = std::upper_bound(levels.begin() + 1, levels.end(), lg);
        const int j = static_cast<int>(it - levels.begin()) - 1;
        if (j >= 1 && j <= K) seen[j] = 1;
        if (j - 1 >= 1 && lg == levels[j]) seen[j - 1] = 1;
        return false;
      });
      for (int k = 1; k <= K; ++k) hits[k] += seen[k];
    }
    return hits;
  });
  SeriesReport rep = base_report(Criterion::BalayageMC, domain, cfg, K);
  const double n = static_cast<double>(sim.n_paths);
  for (int k = 1; k <= K; ++k) {
    std::size_t h = 0;
    for (const Hits& b : blocks) h += b[k];
    const double x = static_cast<double>(h);
    const double z = 1.96;
    const double half = z / (n + z * z) * std::sqrt(x * (n - x) / n + 0.25 * z * z);
    rep.terms.push_back({k, x / n, x > 0.0 ? half : 0.0});
  }
  finish(rep, cfg);
  rep.verdict.evidence += " (hitting probabilities of the diffusion oracle)";
  return rep;
}

double critical_C(const BoundConstants& bc) {
  require(bc.b0 > 0.0 && bc.Q > 0.0, "bound constants need b0 > 0 and Q > 0");
  return bc.Q / ((bc.Q + 4.0) * bc.b0);
}

Verdict paraboloid_test(const Domain& domain, const BoundConstants& bc, std::size_t samples, std::uint64_t seed) {
  Verdict v;
  v.kind = VerdictKind::Inconclusive;
  const double Cs = critical_C(bc);
  v.numbers["C_star"] = Cs;
  v.numbers["b0"] = bc.b0;
  const auto ll = domain.declared_loglog();
  if (!ll) {
    v.evidence = "no exterior log-log condition declared";
    return v;
  }
  v.numbers["C"] = ll->C;
  if (!(ll->C > 0.0 && ll->C < Cs)) {
    v.evidence = "C outside (0, C*): the test is one-sided and says nothing";
    return v;
  }
  const double window = std::min(ll->r0 * ll->r0, 1.0 / std::numbers::e);
  const std::size_t bad = exterior_violations(
      domain, [&](double s) { return ll->C * s * loglog_inv(s); }, window, samples, seed);
  v.numbers["violations"] = static_cast<double>(bad);
  if (bad > 0) {
    v.evidence = "sampled exterior log-log inclusion fails";
    return v;
  }
  v.kind = VerdictKind::RegularLikely;
  v.evidence = "exterior log-log paraboloid with C < C* = Q/((Q+4) b0)";
  return v;
}

Verdict cone_test(const Domain& domain, std::size_t samples, std::uint64_t seed) {
  Verdict v;
  v.kind = VerdictKind::Inconclusive;
  const auto cone = domain.declared_cone();
  if (!cone) {
    v.evidence = "no exterior parabolic cone declared";
    return v;
  }
  v.numbers["M"] = cone->M;
  const std::size_t bad = exterior_violations(
      domain, [&](double s) { return cone->M * s; }, cone->r0 * cone->r0, samples, seed);
  v.numbers["violations"] = static_cast<double>(bad);
  if (bad > 0) {
    v.evidence = "sampled exterior cone inclusion fails";
    return v;
  }
  v.kind = VerdictKind::RegularLikely;
  v.evidence = "exterior parabolic cone d^2 >= M (t0 - t)";
  return v;
}

}  // namespace hypowiener
