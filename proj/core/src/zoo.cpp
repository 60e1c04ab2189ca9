#include "hypowiener/zoo.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <functional>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

constexpr VerdictKind kReg = VerdictKind::RegularLikely;
constexpr VerdictKind kIrr = VerdictKind::IrregularLikely;
constexpr VerdictKind kInc = VerdictKind::Inconclusive;

const std::vector<std::string> kAllCells{"measure-q", "measure-tk", "capacity", "balayage-mc",
                                         "paraboloid", "cone",       "probe"};

ZooFixture make(std::string name, Domain d, std::map<std::string, VerdictKind> expected,
                std::vector<std::string> cells = kAllCells) {
  return ZooFixture{std::move(name), std::move(d), std::move(expected), std::move(cells)};
}

// Terms a_k alpha(k+1) for k in [5, K]: the divergent 1/alpha(k+1) shape needs them bounded below.
Verdict shape_check(const SeriesReport& rep) {
  Verdict v;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const SeriesTerm& t : rep.terms) {
    if (t.k < 5) continue;
    const double w = t.value * alpha(t.k + 1);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  v.numbers["min_scaled"] = lo;
  v.numbers["max_scaled"] = hi;
  v.numbers["s"] = rep.fit.s;
  if (lo > 0.0 && rep.verdict.kind == kReg) {
    v.kind = kReg;
    v.evidence = "a_k alpha(k+1) stays above a positive constant and the decay fit is divergent";
  } else if (!(lo > 0.0)) {
    v.kind = kInc;
    v.evidence = "some term vanishes";
  } else {
    v.kind = kInc;
    v.evidence = "terms positive but the decay fit is not divergent";
  }
  return v;
}

}  // namespace

std::string ZooConfig::to_json() const {
  nlohmann::json j{{"seed", seed},
                   {"lambda", lambda},
                   {"K", K},
                   {"volume_samples", volume_samples},
                   {"geometric_samples", geometric_samples},
                   {"balayage_paths", balayage_paths},
                   {"balayage_paths_h1", balayage_paths_h1},
                   {"balayage_K", balayage_K},
                   {"probe_sim", nlohmann::json::parse(probe_sim.to_json())},
                   {"probe", {{"eps_reg", probe.eps_reg}, {"eps_irr", probe.eps_irr}, {"levels", probe.levels}}},
                   {"h1_bounds", nlohmann::json::parse(h1_bounds.to_json())},
                   {"only", only}};
  return j.dump();
}

bool ZooReport::all_agree() const {
  for (const ZooCell& c : cells)
    if (!c.agrees) return false;
  return true;
}

std::uint64_t ZooReport::fingerprint() const {
  std::uint64_t h = 0;
  for (const ZooCell& c : cells)
    h = mix64(h ^ hash_string(c.fixture + "/" + c.criterion + "/" + verdict_name(c.verdict.kind)) ^ c.fingerprint);
  return h;
}

std::string ZooReport::to_json(bool with_detail) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const ZooCell& c : cells) {
    nlohmann::json j{{"fixture", c.fixture},
                     {"criterion", c.criterion},
                     {"verdict", verdict_name(c.verdict.kind)},
                     {"evidence", c.verdict.evidence},
                     {"numbers", c.verdict.numbers},
                     {"expected", c.expected ? nlohmann::json(verdict_name(*c.expected)) : nlohmann::json(nullptr)},
                     {"agrees", c.agrees},
                     {"seed", c.seed},
                     {"seconds", c.seconds},
                     {"fingerprint", c.fingerprint}};
    if (with_detail && !c.detail.empty()) j["detail"] = nlohmann::json::parse(c.detail);
    arr.push_back(j);
  }
  nlohmann::json j{{"cells", arr},
                   {"domain_hashes", domain_hashes},
                   {"all_agree", all_agree()},
                   {"seed", seed},
                   {"seconds", seconds},
                   {"fingerprint", fingerprint()}};
  return j.dump(2);
}

std::vector<ZooFixture> zoo_fixtures(const BoundConstants& h1_bounds) {
  const GroupModel e1 = GroupModel::euclidean(1);
  const GroupModel h1 = GroupModel::heisenberg();
  const SpaceTimePoint o1{e1.identity(), 0.0};
  const SpaceTimePoint o3{h1.identity(), 0.0};
  const LocalBox b1 = Domain::default_box(e1, 2.0, 2.0, 1.0);
  const LocalBox b3 = Domain::default_box(h1, 2.0, 2.0, 1.0);
  const double c_star = critical_C(h1_bounds);

  std::vector<ZooFixture> z;
  // Geometric tests are one-sided: they can only certify regularity.
  z.push_back(make("punctured_slab_e1", Domain::punctured_slab(e1, o1, b1),
                   {{"measure-q", kIrr},
                    {"measure-tk", kIrr},
                    {"capacity", kIrr},
                    {"balayage-mc", kIrr},
                    {"paraboloid", kInc},
                    {"cone", kInc},
                    {"probe", kIrr}}));
  z.push_back(make("half_space_e1", Domain::half_space_complement(e1, o1, b1),
                   {{"measure-q", kReg}, {"measure-tk", kReg}, {"capacity", kReg}, {"balayage-mc", kReg}, {"probe", kReg}}));
  z.push_back(make("cone_e1", Domain::cone_exterior(e1, o1, 1.0, 1.0, b1),
                   {{"cone", kReg}, {"measure-q", kReg}, {"measure-tk", kReg}, {"capacity", kReg}, {"probe", kReg}}));
  z.push_back(make("cone_h1", Domain::cone_exterior(h1, o3, 1.0, 1.0, b3),
                   {{"cone", kReg}, {"measure-q", kReg}, {"measure-tk", kReg}, {"capacity", kReg}, {"probe", kReg}}));
  z.push_back(make("loglog_h1_halfCstar", Domain::loglog_exterior(h1, o3, 0.5 * c_star, 1.0, b3),
                   {{"paraboloid", kReg}, {"measure-q", kReg}, {"measure-q-shape", kReg}, {"probe", kReg}},
                   {"measure-q", "measure-q-shape", "measure-tk", "capacity", "balayage-mc", "paraboloid", "cone",
                    "probe"}));
  // C halfway into (C*, 1/b0), where no verdict is known: recorded, never checked.
  z.push_back(make("loglog_h1_gap", Domain::loglog_exterior(h1, o3, 0.5 * (c_star + 1.0 / h1_bounds.b0), 1.0, b3), {},
                   {"measure-q", "measure-tk", "paraboloid", "probe"}));
  z.push_back(make("loglog_interior_e1_C8", Domain::loglog_interior(e1, o1, 8.0, 1.0, b1),
                   {{"probe", kIrr}, {"measure-q", kIrr}}));
  return z;
}

ZooReport run_zoo(const ZooConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_all = clock::now();
  require(cfg.h1_bounds.Q == 4.0 && cfg.h1_bounds.b0 > 0.0, "zoo needs fitted Heisenberg bound constants");
  ZooReport rep;
  rep.seed = cfg.seed;
  for (const ZooFixture& fx : zoo_fixtures(cfg.h1_bounds)) {
    if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), fx.name) == cfg.only.end()) continue;
    const Domain& dom = fx.domain;
    const GroupModel& model = dom.model();
    const bool heis = model.kind() == GroupKind::Heisenberg1;
    const HeatKernel kernel(model);
    const BoundConstants bc = heis ? cfg.h1_bounds : euclidean_bound_constants(model.topological_dimension());
    rep.domain_hashes[fx.name] = dom.hash();
    const std::uint64_t fseed = mix64(cfg.seed ^ hash_string(fx.name));

    SeriesConfig sc;
    sc.lambda = cfg.lambda;
    sc.K = cfg.K;
    sc.seed = fseed;
    sc.volume = VolumeBudget{cfg.volume_samples, true};
    sc.balayage_K = cfg.balayage_K;
    sc.sim.n_paths = heis ? cfg.balayage_paths_h1 : cfg.balayage_paths;

    std::optional<std::vector<VolumeEstimate>> vols;
    std::optional<SeriesReport> mq;
    auto volumes = [&]() -> const std::vector<VolumeEstimate>* {
      if (!vols) vols = measure_volumes(dom, kernel, bc, sc);
      return &*vols;
    };

    for (const std::string& cell : fx.cells) {
      const auto t0 = clock::now();
      ZooCell c;
      c.fixture = fx.name;
      c.criterion = cell;
      c.seed = fseed;
      if (cell == "measure-q") {
        mq = series_measure_q(dom, kernel, bc, sc, volumes());
        c.verdict = mq->verdict;
        c.detail = mq->to_json();
      } else if (cell == "measure-q-shape") {
        if (!mq) mq = series_measure_q(dom, kernel, bc, sc, volumes());
        c.verdict = shape_check(*mq);
        c.detail = c.verdict.to_json();
      } else if (cell == "measure-tk") {
        const SeriesReport r = series_measure_Tk(dom, kernel, bc, sc, volumes());
        c.verdict = r.verdict;
        c.detail = r.to_json();
      } else if (cell == "capacity") {
        const SeriesReport r = series_capacity_proxy(dom, kernel, bc, sc, volumes());
        c.verdict = r.verdict;
        c.detail = r.to_json();
      } else if (cell == "balayage-mc") {
        const SeriesReport r = series_balayage_mc(dom, kernel, sc);
        c.verdict = r.verdict;
        c.detail = r.to_json();
      } else if (cell == "paraboloid") {
        c.verdict = paraboloid_test(dom, bc, cfg.geometric_samples, fseed);
        c.detail = c.verdict.to_json();
      } else if (cell == "cone") {
        c.verdict = cone_test(dom, cfg.geometric_samples, fseed);
        c.detail = c.verdict.to_json();
      } else if (cell == "probe") {
        SimConfig sim = cfg.probe_sim;
        sim.seed = fseed;
        const ProbeResult r = regularity_probe(dom, sim, cfg.probe);
        c.verdict = r.verdict;
        c.detail = r.to_json();
      } else {
        throw ConfigError("unknown zoo cell " + cell);
      }
      c.fingerprint = hash_string(c.detail);
      const auto it = fx.expected.find(cell);
      if (it != fx.expected.end()) {
        c.expected = it->second;
        c.agrees = c.verdict.kind == it->second;
      }
      c.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      rep.cells.push_back(std::move(c));
    }
  }
  rep.seconds = std::chrono::duration<double>(clock::now() - t_all).count();
  return rep;
}

}  // namespace hypowiener
