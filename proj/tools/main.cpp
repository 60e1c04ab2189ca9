// hypowiener: command-line front end for the regularity toolkit.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hypowiener/criteria.hpp"
#include "hypowiener/error.hpp"
#include "hypowiener/meanvalue.hpp"
#include "hypowiener/zoo.hpp"
#include "json.hpp"

namespace hw = hypowiener;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Manifest {
  std::string command;
  std::string model;
  std::optional<std::uint64_t> domain_hash;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::uint64_t> config_hashes;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json to_json() const {
    json j{{"command", command},
           {"model", model},
           {"seeds", seeds},
           {"config_hashes", config_hashes},
           {"version", HYPOWIENER_VERSION},
           {"wall_time", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    j["domain_hash"] = domain_hash ? json(*domain_hash) : json(nullptr);
    return j;
  }
};

struct Globals {
  bool pretty = false;
  unsigned jobs = 0;
  std::optional<std::uint64_t> seed;
};

Globals g;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw hw::ConfigError("not a number list: " + text);
    }
  }
  return out;
}

// "x1,...,xN,t" for the model's dimension N.
hw::SpaceTimePoint parse_spacetime(const hw::GroupModel& model, const std::string& text) {
  const auto v = parse_list(text);
  const auto n = static_cast<std::size_t>(model.topological_dimension());
  hw::require(v.size() == n + 1, "expected " + std::to_string(n + 1) + " comma-separated values, got '" + text + "'");
  return {hw::Point(std::span<const double>(v.data(), n)), v[n]};
}

hw::Point parse_point(const hw::GroupModel& model, const std::string& text) {
  const auto v = parse_list(text);
  hw::require(v.size() == static_cast<std::size_t>(model.topological_dimension()), "point has the wrong dimension: " + text);
  return hw::Point(std::span<const double>(v.data(), v.size()));
}

std::string data_dir() {
  if (const char* d = std::getenv("HYPOWIENER_DATA")) return d;
  return HYPOWIENER_DATA_DIR;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hw::ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

hw::Domain resolve_domain(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return hw::Domain::load(name);
  const fs::path alt = fs::path(data_dir()) / "domains" / name;
  if (fs::exists(alt)) return hw::Domain::load(alt.string());
  throw hw::ConfigError("domain file not found: " + name);
}

hw::BoundConstants load_bounds(const hw::GroupModel& model, const std::string& path) {
  if (model.kind() == hw::GroupKind::Euclidean) {
    if (path.empty()) return hw::euclidean_bound_constants(model.topological_dimension());
    return hw::BoundConstants::from_json(read_file(path));
  }
  const std::string p = path.empty() ? data_dir() + "/bounds_heisenberg.json" : path;
  if (!std::filesystem::exists(p))
    throw hw::ConfigError("no Heisenberg bound constants at " + p + "; run `kernel fit-bounds --model heisenberg --out " +
                          p + "`");
  return hw::BoundConstants::from_json(read_file(p));
}

std::uint64_t need_seed(Manifest& m) {
  if (!g.seed) throw hw::ConfigError("--seed is required for randomized commands");
  m.seeds.push_back(*g.seed);
  return *g.seed;
}

// Kernel memo shared through HYPOWIENER_CACHE.
std::string memo_path() {
  const char* dir = std::getenv("HYPOWIENER_CACHE");
  if (!dir || !*dir) return {};
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / "heisenberg_kernel_memo.json").string();
}

hw::QuadratureConfig quadrature() {
  hw::QuadratureConfig q;
  q.memoize = !memo_path().empty();
  return q;
}

void print_pretty(const json& j, const std::string& indent = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    if (v.is_object()) {
      std::cout << indent << it.key() << ":\n";
      print_pretty(v, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      std::cout << indent << it.key() << ":\n";
      // Table with the union of scalar columns.
      std::vector<std::string> cols;
      for (const auto& row : v)
        for (auto c = row.begin(); c != row.end(); ++c)
          if (!c.value().is_structured() && std::find(cols.begin(), cols.end(), c.key()) == cols.end())
            cols.push_back(c.key());
      // Numbers print in full; only long text is shortened.
      auto cell = [](const json& row, const std::string& c) {
        if (!row.contains(c)) return std::string();
        if (!row[c].is_string()) return row[c].dump();
        std::string s = row[c].get<std::string>();
        return s.size() > 40 ? s.substr(0, 37) + "..." : s;
      };
      std::vector<std::size_t> width;
      for (const auto& c : cols) {
        std::size_t w = c.size();
        for (const auto& row : v) w = std::max(w, cell(row, c).size());
        width.push_back(w + 2);
      }
      std::cout << indent;
      for (std::size_t i = 0; i < cols.size(); ++i) std::cout << std::setw(static_cast<int>(width[i])) << cols[i];
      std::cout << "\n";
      for (const auto& row : v) {
        std::cout << indent;
        for (std::size_t i = 0; i < cols.size(); ++i)
          std::cout << std::setw(static_cast<int>(width[i])) << cell(row, cols[i]);
        std::cout << "\n";
      }
    } else {
      std::cout << indent << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

void emit(const Manifest& m, const json& result) {
  const json doc{{"manifest", m.to_json()}, {"result", result}};
  if (g.pretty)
    print_pretty(doc);
  else
    std::cout << doc.dump(2) << "\n";
}

json series_csv_free(const hw::SeriesReport& r) { return json::parse(r.to_json()); }

void print_terms_csv(const std::vector<hw::SeriesTerm>& terms, const std::vector<double>& partial) {
  std::cout << "k,value,uncertainty,partial_sum\n" << std::setprecision(17);
  for (std::size_t i = 0; i < terms.size(); ++i)
    std::cout << terms[i].k << "," << terms[i].value << "," << terms[i].uncertainty << ","
              << (i < partial.size() ? partial[i] : 0.0) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypowiener: boundary regularity for heat operators on Carnot groups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for randomized commands")->group("Global");
  app.add_flag("--pretty", g.pretty, "Human-readable output")->group("Global");
  app.add_option("--jobs", g.jobs, "Worker thread cap (0: all cores)")->group("Global");

  Manifest man;
  std::function<json()> action;

  // kernel ------------------------------------------------------------------
  auto* kernel = app.add_subcommand("kernel", "Heat kernel evaluation and checks");
  kernel->require_subcommand(1);
  std::string model_name = "euclidean1", z_text, zeta_text, x_text, eta_text, out_path, bounds_path, u_kind = "one";
  double t = 1.0, tau = 0.0, r = 1.0, tol = 1e-10;
  std::size_t samples = 100000;

  auto* k_eval = kernel->add_subcommand("eval", "Gamma(z, zeta)");
  k_eval->add_option("--model", model_name)->required();
  k_eval->add_option("--z", z_text, "x1,..,xN,t")->required();
  k_eval->add_option("--zeta", zeta_text, "xi1,..,xiN,tau")->required();
  k_eval->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      const hw::HeatKernel K(model, quadrature());
      const auto z = parse_spacetime(model, z_text), zeta = parse_spacetime(model, zeta_text);
      return json{{"value", K(z, zeta)}, {"log_value", K.log_gamma(z, zeta)}};
    };
  });

  auto* k_norm = kernel->add_subcommand("check-normalization", "int Gamma(x, t, xi, tau) dxi = 1");
  k_norm->add_option("--model", model_name)->required();
  k_norm->add_option("--x", x_text, "x1,..,xN (default origin)");
  k_norm->add_option("--t", t);
  k_norm->add_option("--tau", tau);
  k_norm->add_option("--tol", tol);
  k_norm->add_option("--samples", samples, "Monte Carlo samples (Heisenberg)");
  k_norm->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      hw::IntegrationBudget b{tol, samples, 1};
      if (model.kind() == hw::GroupKind::Heisenberg1) b.seed = need_seed(man);
      const hw::HeatKernel K(model, quadrature());
      const hw::Point x = x_text.empty() ? model.identity() : parse_point(model, x_text);
      const auto e = hw::normalization_check(K, x, t, tau, b);
      return json{{"integral", e.value}, {"error", e.error}, {"evaluations", e.evaluations},
                  {"deviation", std::abs(e.value - 1.0)}};
    };
  });

  auto* k_ck = kernel->add_subcommand("check-chapman", "Chapman-Kolmogorov residual");
  k_ck->add_option("--model", model_name)->required();
  k_ck->add_option("--z", z_text)->required();
  k_ck->add_option("--tau", tau, "intermediate time")->required();
  k_ck->add_option("--eta", eta_text)->required();
  k_ck->add_option("--tol", tol);
  k_ck->add_option("--samples", samples);
  k_ck->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      hw::IntegrationBudget b{tol, samples, 1};
      if (model.kind() == hw::GroupKind::Heisenberg1) b.seed = need_seed(man);
      const hw::HeatKernel K(model, quadrature());
      const auto e = hw::chapman_kolmogorov_check(K, parse_spacetime(model, z_text), tau,
                                                  parse_spacetime(model, eta_text), b);
      return json{{"relative_residual", e.value}, {"error", e.error}, {"evaluations", e.evaluations}};
    };
  });

  hw::SampleSpec fit_spec;
  auto* k_fit = kernel->add_subcommand("fit-bounds", "Fit the Gaussian two-sided bound constants");
  k_fit->add_option("--model", model_name)->required();
  k_fit->add_option("--lag-count", fit_spec.lag_count);
  k_fit->add_option("--ratio-count", fit_spec.ratio_count);
  k_fit->add_option("--directions", fit_spec.direction_count);
  k_fit->add_option("--ratio-max", fit_spec.ratio_max);
  k_fit->add_option("--lambda-slack", fit_spec.lambda_slack);
  k_fit->add_option("--out", out_path, "Also write the constants to this file");
  k_fit->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      man.config_hashes["sample_spec"] = fit_spec.hash();
      const hw::HeatKernel K(model, quadrature());
      const auto bc = hw::fit_gaussian_bounds(K, fit_spec);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw hw::ConfigError("cannot write " + out_path);
        out << bc.to_json() << "\n";
      }
      json j = json::parse(bc.to_json());
      if (model.kind() == hw::GroupKind::Euclidean) {
        const auto exact = hw::euclidean_bound_constants(model.topological_dimension());
        j["exact"] = json::parse(exact.to_json());
      }
      j["C_star"] = hw::critical_C(bc);
      return j;
    };
  });

  auto* k_mv = kernel->add_subcommand("meanvalue-check", "M_r u(z) against u(z)");
  k_mv->add_option("--model", model_name)->required();
  k_mv->add_option("--z", z_text)->required();
  k_mv->add_option("--r", r)->required();
  k_mv->add_option("--u", u_kind, "one | caloric | square")->check(CLI::IsMember({"one", "caloric", "square"}));
  k_mv->add_option("--bounds", bounds_path);
  k_mv->add_option("--tol", tol);
  k_mv->add_option("--samples", samples);
  k_mv->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      const bool heis = model.kind() == hw::GroupKind::Heisenberg1;
      hw::IntegrationBudget b{std::max(tol, 1e-8), samples, 1};
      if (heis) b.seed = need_seed(man);
      const auto bc = load_bounds(model, bounds_path);
      const hw::HeatKernel K(model, quadrature());
      const auto z = parse_spacetime(model, z_text);
      const int n = model.topological_dimension();
      const int nh = heis ? 2 : n;
      // Horizontal |x|^2 has sub-Laplacian 2 * nh.
      auto sq = [nh](const hw::SpaceTimePoint& p) {
        double s = 0.0;
        for (int i = 0; i < nh; ++i) s += p.x[i] * p.x[i];
        return s;
      };
      hw::SpaceTimeFunction u, Hu;
      if (u_kind == "one") {
        u = [](const hw::SpaceTimePoint&) { return 1.0; };
        Hu = [](const hw::SpaceTimePoint&) { return 0.0; };
      } else if (u_kind == "caloric") {
        u = [=](const hw::SpaceTimePoint& p) { return sq(p) + 2.0 * nh * p.t; };
        Hu = [](const hw::SpaceTimePoint&) { return 0.0; };
      } else {
        u = sq;
        Hu = [nh](const hw::SpaceTimePoint&) { return 2.0 * nh; };
      }
      const auto M = hw::mean_value_M(K, u, z, r, bc, b);
      const auto R = hw::mean_value_remainder(K, Hu, z, r, bc, b);
      const double exact = u(z);
      return json{{"M_r_u", M.value},     {"M_error", M.error},         {"remainder", R.value},
                  {"remainder_error", R.error}, {"u_z", exact},
                  {"residual", std::abs(M.value - R.value - exact)}};
    };
  });

  // shell -------------------------------------------------------------------
  auto* shell = app.add_subcommand("shell", "Level shells of the fundamental solution");
  shell->require_subcommand(1);
  double lambda = 0.5, beta = 0.5;
  int k = 1, K_max = 40, idx_i = 0;
  std::string domain_name;
  bool stratified = false, csv = false;

  auto* s_env = shell->add_subcommand("envelope", "Spatial envelope and T_k of shell k");
  s_env->add_option("--model", model_name)->required();
  s_env->add_option("--lambda", lambda);
  s_env->add_option("--k", k);
  s_env->add_option("--bounds", bounds_path);
  s_env->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      const auto bc = load_bounds(model, bounds_path);
      const hw::HeatKernel Kr(model, quadrature());
      hw::ShellSpec spec{lambda, k, nullptr, &Kr, {}};
      spec.check();
      const auto env = hw::shell_envelope(spec, bc);
      json prof = json::array();
      for (int j = 1; j <= 16; ++j) {
        const double s = env.T * j / 16.0;
        prof.push_back({{"s", s}, {"radius", env.radius(s)}});
      }
      return json{{"T_k", env.T}, {"max_radius", env.max_radius}, {"r_k", env.r_k}, {"log_K", env.log_K},
                  {"profile", prof}};
    };
  });

  auto* s_ts = shell->add_subcommand("tstar", "T* bracket for index kq + p + i");
  s_ts->add_option("--model", model_name)->required();
  s_ts->add_option("--lambda", lambda);
  s_ts->add_option("--k", k);
  s_ts->add_option("--beta", beta);
  s_ts->add_option("--i", idx_i);
  s_ts->add_option("--bounds", bounds_path);
  s_ts->callback([&] {
    action = [&] {
      const auto model = hw::GroupModel::from_name(model_name);
      man.model = model.name();
      const auto bc = load_bounds(model, bounds_path);
      const hw::HeatKernel Kr(model, quadrature());
      const auto pc = hw::proof_constants(beta, lambda, bc.Q, bc.c_d, bc.lambda, bc.a0, idx_i);
      const auto ts = hw::find_t_star(k, pc, bc, Kr);
      return json{{"index", ts.index},       {"shell_index", ts.shell_index}, {"T_star", std::exp(ts.log_t_star)},
                  {"log_T_star", ts.log_t_star}, {"log_ball", ts.log_ball},   {"log_lower", ts.log_lower},
                  {"log_upper", ts.log_upper},   {"log_T", ts.log_T},
                  {"bracket_holds", ts.log_lower <= ts.log_ball && ts.log_ball <= ts.log_upper && ts.log_t_star < ts.log_T},
                  {"constants", json::parse(pc.to_json())}};
    };
  });

  double Q_in = 0.0, c_d = 2.0, Lambda_in = 0.0, a0_in = 0.0;
  auto* s_c = shell->add_subcommand("constants", "Q_beta, m, q0, q, p");
  s_c->add_option("--model", model_name, "Take Q, c_d, Lambda, a0 from the model's bound constants");
  s_c->add_option("--beta", beta);
  s_c->add_option("--lambda", lambda);
  s_c->add_option("--Q", Q_in);
  s_c->add_option("--c-d", c_d);
  s_c->add_option("--Lambda", Lambda_in);
  s_c->add_option("--a0", a0_in);
  s_c->add_option("--i", idx_i);
  s_c->add_option("--bounds", bounds_path);
  s_c->callback([&] {
    action = [&] {
      double Q = Q_in, Lam = Lambda_in, a0 = a0_in, cd = c_d;
      if (Q <= 0.0 || Lam <= 0.0 || a0 <= 0.0) {
        const auto model = hw::GroupModel::from_name(model_name);
        man.model = model.name();
        const auto bc = load_bounds(model, bounds_path);
        if (Q <= 0.0) Q = bc.Q;
        if (Lam <= 0.0) Lam = bc.lambda;
        if (a0 <= 0.0) a0 = bc.a0;
        cd = bc.c_d;
      }
      return json::parse(hw::proof_constants(beta, lambda, Q, cd, Lam, a0, idx_i).to_json());
    };
  });

  auto* s_vol = shell->add_subcommand("volume", "Monte Carlo volume of Omega_k^c");
  s_vol->add_option("--domain", domain_name)->required();
  s_vol->add_option("--lambda", lambda);
  s_vol->add_option("--k", k);
  s_vol->add_option("--K", K_max, "With --all: shells 1..K");
  bool all_shells = false;
  s_vol->add_flag("--all", all_shells);
  s_vol->add_option("--samples", samples);
  s_vol->add_flag("--stratified", stratified);
  s_vol->add_option("--bounds", bounds_path);
  s_vol->add_flag("--csv", csv);
  s_vol->callback([&] {
    action = [&]() -> json {
      const auto dom = resolve_domain(domain_name);
      man.model = dom.model().name();
      man.domain_hash = dom.hash();
      const auto seed = need_seed(man);
      const auto bc = load_bounds(dom.model(), bounds_path);
      const hw::HeatKernel Kr(dom.model(), quadrature());
      hw::ShellSpec spec{lambda, k, &dom, &Kr, {}};
      spec.check();
      std::vector<int> ks;
      if (all_shells)
        for (int j = 1; j <= K_max; ++j) ks.push_back(j);
      else
        ks.push_back(k);
      const auto vols = hw::shell_volumes(spec, ks, bc, hw::VolumeBudget{samples, stratified}, seed);
      json rows = json::array();
      for (std::size_t j = 0; j < ks.size(); ++j)
        rows.push_back({{"k", ks[j]},
                        {"volume", vols[j].mean},
                        {"ci_halfwidth", vols[j].ci_halfwidth},
                        {"hits", vols[j].hits},
                        {"n_samples", vols[j].n_samples},
                        {"T_k", std::exp(hw::log_compute_Tk(Kr, lambda, ks[j]))}});
      if (csv) {
        std::cout << "k,volume,ci_halfwidth,hits,n_samples\n" << std::setprecision(17);
        for (const auto& row : rows)
          std::cout << row["k"] << "," << row["volume"] << "," << row["ci_halfwidth"] << "," << row["hits"] << ","
                    << row["n_samples"] << "\n";
        return nullptr;
      }
      return json{{"volumes", rows}, {"stratified", stratified}};
    };
  });

  // series ------------------------------------------------------------------
  auto* series = app.add_subcommand("series", "Regularity series");
  series->require_subcommand(1);
  std::string criterion = "measure-q";
  hw::SeriesConfig sc;
  auto* se_run = series->add_subcommand("run", "Terms, partial sums, decay fit and verdict");
  se_run->add_option("--domain", domain_name)->required();
  se_run->add_option("--criterion", criterion)
      ->check(CLI::IsMember({"measure-q", "measure-tk", "capacity", "balayage-mc"}));
  se_run->add_option("--lambda", sc.lambda);
  se_run->add_option("--K,--k-max", sc.K, "Last shell index");
  se_run->add_option("--samples", sc.volume.n_samples);
  se_run->add_option("--paths", sc.sim.n_paths, "Balayage paths");
  se_run->add_option("--balayage-K", sc.balayage_K);
  se_run->add_option("--k-min", sc.classifier.k_min);
  se_run->add_option("--eps-s", sc.classifier.eps_s);
  se_run->add_option("--bounds", bounds_path);
  bool plain = false;
  se_run->add_flag("--plain", plain, "Plain rejection sampling for the shell volumes");
  se_run->add_flag("--csv", csv);
  se_run->callback([&] {
    action = [&]() -> json {
      const auto dom = resolve_domain(domain_name);
      man.model = dom.model().name();
      man.domain_hash = dom.hash();
      sc.seed = need_seed(man);
      sc.volume.stratified = !plain;
      const auto bc = load_bounds(dom.model(), bounds_path);
      const hw::HeatKernel Kr(dom.model(), quadrature());
      hw::SeriesReport rep;
      switch (hw::criterion_from_name(criterion)) {
        case hw::Criterion::MeasureQ:
          rep = hw::series_measure_q(dom, Kr, bc, sc);
          break;
        case hw::Criterion::MeasureTk:
          rep = hw::series_measure_Tk(dom, Kr, bc, sc);
          break;
        case hw::Criterion::CapacityProxy:
          rep = hw::series_capacity_proxy(dom, Kr, bc, sc);
          break;
        case hw::Criterion::BalayageMC:
          rep = hw::series_balayage_mc(dom, Kr, sc);
          break;
      }
      man.config_hashes["sim"] = sc.sim.hash();
      if (csv) {
        print_terms_csv(rep.terms, rep.partial_sums);
        return nullptr;
      }
      return series_csv_free(rep);
    };
  });

  // test --------------------------------------------------------------------
  auto* test = app.add_subcommand("test", "Geometric sufficient conditions");
  test->require_subcommand(1);
  std::size_t grid = 4000;
  auto* t_par = test->add_subcommand("paraboloid", "Exterior log-log paraboloid with C < C*");
  t_par->add_option("--domain", domain_name)->required();
  t_par->add_option("--bounds", bounds_path);
  t_par->add_option("--grid", grid, "Inclusion check points");
  t_par->callback([&] {
    action = [&] {
      const auto dom = resolve_domain(domain_name);
      man.model = dom.model().name();
      man.domain_hash = dom.hash();
      const auto bc = load_bounds(dom.model(), bounds_path);
      const auto v = hw::paraboloid_test(dom, bc, grid, 1);
      return json::parse(v.to_json());
    };
  });
  auto* t_cone = test->add_subcommand("cone", "Exterior parabolic cone");
  t_cone->add_option("--domain", domain_name)->required();
  t_cone->add_option("--grid", grid);
  t_cone->callback([&] {
    action = [&] {
      const auto dom = resolve_domain(domain_name);
      man.model = dom.model().name();
      man.domain_hash = dom.hash();
      return json::parse(hw::cone_test(dom, grid, 1).to_json());
    };
  });

  // simulate ----------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Monte Carlo diffusion oracle");
  sim->require_subcommand(1);
  hw::SimConfig sim_cfg;
  std::string target = "complement";
  double t_min = std::numeric_limits<double>::quiet_NaN(), rho = 0.0;
  auto add_sim_flags = [&](CLI::App* c) {
    c->add_option("--dt", sim_cfg.dt);
    c->add_option("--paths", sim_cfg.n_paths);
    c->add_option("--dt-relative", sim_cfg.dt_relative);
    c->add_option("--substeps", sim_cfg.substeps);
    c->add_option("--max-steps", sim_cfg.max_steps);
  };
  auto* si_hit = sim->add_subcommand("hitting", "P(path from z enters F before t_min)");
  si_hit->add_option("--domain", domain_name)->required();
  si_hit->add_option("--z", z_text, "start x1,..,xN,t (default: z0 shifted down by 1e-3)");
  si_hit->add_option("--target", target, "complement | shell")->check(CLI::IsMember({"complement", "shell"}));
  si_hit->add_option("--k", k);
  si_hit->add_option("--lambda", lambda);
  si_hit->add_option("--t-min", t_min, "stop time (default t0 - 1)");
  add_sim_flags(si_hit);
  si_hit->callback([&] {
    action = [&] {
      const auto dom = resolve_domain(domain_name);
      const auto& model = dom.model();
      man.model = model.name();
      man.domain_hash = dom.hash();
      sim_cfg.seed = need_seed(man);
      man.config_hashes["sim"] = sim_cfg.hash();
      const hw::HeatKernel Kr(model, quadrature());
      const auto z0 = dom.z0();
      const auto start = z_text.empty() ? hw::SpaceTimePoint{z0.x, z0.t - 1e-3} : parse_spacetime(model, z_text);
      const double tm = std::isnan(t_min) ? z0.t - 1.0 : t_min;
      hw::ShellSpec spec{lambda, k, &dom, &Kr, {}};
      hw::SpaceTimePredicate F;
      if (target == "shell") {
        spec.check();
        F = [&](const hw::SpaceTimePoint& p) { return hw::shell_membership(p, spec); };
      } else {
        F = [&](const hw::SpaceTimePoint& p) { return !dom.contains(p); };
      }
      const auto h = hw::hitting_probability(model, F, start, tm, sim_cfg);
      return json{{"p_hat", h.p_hat}, {"ci_halfwidth", h.ci_halfwidth}, {"ci_lo", h.ci_lo}, {"ci_hi", h.ci_hi},
                  {"hits", h.hits},   {"n_paths", h.n_paths},           {"seed", h.seed}};
    };
  });

  auto* si_per = sim->add_subcommand("perron", "Perron-Wiener solution of min(1, dist(., z0)/rho)");
  si_per->add_option("--domain", domain_name)->required();
  si_per->add_option("--z", z_text)->required();
  si_per->add_option("--rho", rho, "datum scale (default scale/4)");
  add_sim_flags(si_per);
  si_per->callback([&] {
    action = [&] {
      const auto dom = resolve_domain(domain_name);
      const auto& model = dom.model();
      man.model = model.name();
      man.domain_hash = dom.hash();
      sim_cfg.seed = need_seed(man);
      man.config_hashes["sim"] = sim_cfg.hash();
      const double r0 = rho > 0.0 ? rho : dom.scale() / 4.0;
      const auto z0 = dom.z0();
      const auto e = hw::perron_estimate(
          dom, [&](const hw::SpaceTimePoint& p) { return std::min(1.0, model.parabolic_distance(p, z0) / r0); },
          parse_spacetime(model, z_text), sim_cfg, "min(1, dist/rho)");
      return json{{"value", e.value},       {"ci_halfwidth", e.ci_halfwidth}, {"n_paths", e.n_paths},
                  {"censored", e.censored}, {"flagged", e.flagged},           {"rho", r0}};
    };
  });

  hw::ProbeConfig probe;
  auto* si_probe = sim->add_subcommand("probe", "Regularity probe approaching z0");
  si_probe->add_option("--domain", domain_name)->required();
  si_probe->add_option("--levels", probe.levels);
  si_probe->add_option("--eps-reg", probe.eps_reg);
  si_probe->add_option("--eps-irr", probe.eps_irr);
  add_sim_flags(si_probe);
  si_probe->callback([&] {
    action = [&] {
      const auto dom = resolve_domain(domain_name);
      man.model = dom.model().name();
      man.domain_hash = dom.hash();
      if (sim_cfg.dt_relative == 0.0) {
        const auto d = hw::ZooConfig::probe_defaults();
        sim_cfg.dt = std::max(sim_cfg.dt, d.dt);
        sim_cfg.dt_relative = d.dt_relative;
        sim_cfg.dt_min = d.dt_min;
      }
      sim_cfg.seed = need_seed(man);
      man.config_hashes["sim"] = sim_cfg.hash();
      return json::parse(hw::regularity_probe(dom, sim_cfg, probe).to_json());
    };
  });

  // zoo ---------------------------------------------------------------------
  auto* zoo = app.add_subcommand("zoo", "Verdict matrix over the fixture zoo");
  zoo->require_subcommand(1);
  hw::ZooConfig zc;
  bool detail = false;
  auto* z_run = zoo->add_subcommand("run-all", "Run every criterion on every fixture");
  z_run->add_option("--bounds", bounds_path, "Heisenberg bound constants");
  z_run->add_option("--samples", zc.volume_samples);
  z_run->add_option("--paths", zc.probe_sim.n_paths, "Probe paths per level");
  z_run->add_option("--balayage-paths", zc.balayage_paths);
  z_run->add_option("--only", zc.only, "Fixture names");
  z_run->add_option("--out", out_path, "Also write the matrix to this file");
  z_run->add_flag("--detail", detail, "Embed the per-cell reports");
  z_run->callback([&] {
    action = [&] {
      zc.seed = need_seed(man);
      zc.h1_bounds = load_bounds(hw::GroupModel::heisenberg(), bounds_path);
      man.model = "euclidean1+heisenberg";
      man.config_hashes["zoo"] = hw::hash_string(zc.to_json());
      const auto rep = hw::run_zoo(zc);
      json j = json::parse(rep.to_json(detail));
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw hw::ConfigError("cannot write " + out_path);
        out << json{{"manifest", man.to_json()}, {"result", j}}.dump(2) << "\n";
      }
      return j;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;
  hw::set_worker_count(g.jobs);

  std::vector<std::string> path;
  for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
    a = a->get_subcommands().front();
    path.push_back(a->get_name());
  }
  for (std::size_t i = 0; i < path.size(); ++i) man.command += (i ? " " : "") + path[i];

  const std::string memo = memo_path();
  try {
    if (!memo.empty()) hw::shared_kernel_memo()->load(memo);
    if (!action) throw hw::ConfigError("no command given");
    const json result = action();
    if (!result.is_null()) emit(man, result);
    if (!memo.empty()) hw::shared_kernel_memo()->save(memo);
  } catch (const hw::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hw::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
