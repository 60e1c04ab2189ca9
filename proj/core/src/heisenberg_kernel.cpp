#include <bit>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

#include "hypowiener/error.hpp"
#include "hypowiener/kernel.hpp"
#include "hypowiener/random.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

using cplx = std::complex<double>;

// (theta - sin cos) / sin^2, increasing from 0 (theta = 0) to +inf (theta -> pi).
double saddle_slope(double theta) {
  if (theta < 1e-4) return 2.0 * theta / 3.0;
  const double s = std::sin(theta);
  return (theta - s * std::cos(theta)) / (s * s);
}

// theta cot theta with its limit 1 at 0.
double theta_cot(double theta) {
  if (theta < 1e-6) return 1.0 - theta * theta / 3.0;
  return theta / std::tan(theta);
}

// Height of the integration line: the saddle point of -A u coth u + i B u on
// the imaginary axis, kept a distance 1/(1+B) away from the pole at i*pi.
double contour_height(double A, double B) {
  if (B <= 0.0) return 0.0;
  const double cap = std::numbers::pi - 1.0 / (1.0 + B);
  if (A <= 0.0 || A * saddle_slope(cap) <= B) return cap;
  double lo = 0.0, hi = cap;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (A * saddle_slope(mid) < B) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// u / sinh u and u coth u for Re u >= 0, written with exp(-2u) to stay finite.
void hyperbolic_factors(cplx u, cplx& u_over_sinh, cplx& u_coth) {
  if (std::abs(u) < 1e-3) {
    const cplx u2 = u * u;
    u_over_sinh = 1.0 - u2 / 6.0 + 7.0 * u2 * u2 / 360.0;
    u_coth = 1.0 + u2 / 3.0 - u2 * u2 / 45.0;
    return;
  }
  const cplx e = std::exp(-2.0 * u);
  const cplx one_minus = 1.0 - e;
  u_over_sinh = 2.0 * u * std::exp(-u) / one_minus;
  u_coth = u * (1.0 + e) / one_minus;
}

}  // namespace

KernelValue heisenberg_log_p1(double horizontal_sq, double vertical, const QuadratureConfig& cfg) {
  require(horizontal_sq >= 0.0 && std::isfinite(horizontal_sq) && std::isfinite(vertical),
          "Heisenberg kernel needs finite arguments and a non-negative |w|^2");
  const double A = 0.25 * horizontal_sq;
  const double B = std::abs(vertical);
  const double theta = contour_height(A, B);
  const double peak = -A * theta_cot(theta) - B * theta;

  // On the line u = x + i theta, exp(-u) = exp(-x) * c with a fixed phase c.
  const cplx c(std::cos(theta), -std::sin(theta));
  const cplx c2 = c * c;
  auto integrand = [&](double x) -> double {
    if (x > 700.0) return 0.0;
    const cplx u(x, theta);
    cplx ratio, ucoth;
    if (std::abs(u) < 1e-3) {
      hyperbolic_factors(u, ratio, ucoth);
    } else {
      const double ex = std::exp(-x);
      const cplx e = (ex * ex) * c2;
      const cplx inv = 1.0 / (1.0 - e);
      ratio = 2.0 * ex * (u * c) * inv;
      ucoth = u * (1.0 + e) * inv;
    }
    const double re = -A * ucoth.real() - B * theta - peak;
    if (re < -745.0) return 0.0;
    const double im = -A * ucoth.imag() + B * x;
    return std::exp(re) * (ratio.real() * std::cos(im) - ratio.imag() * std::sin(im));
  };

  double err = 0.0;
  double l1 = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), cfg.max_depth, cfg.rel_tol, &err, &l1);
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw NumericalError("Heisenberg kernel quadrature produced a non-positive value at |w|^2=" +
                         std::to_string(horizontal_sq) + ", z=" + std::to_string(vertical));
  KernelValue v;
  v.rel_error = err / integral;
  if (v.rel_error > cfg.accept_tol)
    throw NumericalError("Heisenberg kernel quadrature did not converge (relative error " +
                         std::to_string(v.rel_error) + ")");
  v.log_value = std::log(integral) + peak - std::log(4.0 * std::numbers::pi * std::numbers::pi);
  return v;
}

double gamma_heisenberg(const SpaceTimePoint& z, const SpaceTimePoint& zeta, const QuadratureConfig& cfg) {
  return HeatKernel(GroupModel::heisenberg(), cfg)(z, zeta);
}

// ---------------------------------------------------------------------------

struct KernelMemo::Impl {
  struct Key {
    std::uint64_t a, b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return mix64(k.a ^ mix64(k.b)); }
  };
  mutable std::shared_mutex mutex;
  std::unordered_map<Key, double, KeyHash> table;
};

KernelMemo::KernelMemo() : impl_(std::make_unique<Impl>()) {}
KernelMemo::~KernelMemo() = default;

bool KernelMemo::lookup(double horizontal_sq, double vertical, double& log_value) const {
  const Impl::Key key{std::bit_cast<std::uint64_t>(horizontal_sq), std::bit_cast<std::uint64_t>(std::abs(vertical))};
  std::shared_lock lock(impl_->mutex);
  auto it = impl_->table.find(key);
  if (it == impl_->table.end()) return false;
  log_value = it->second;
  return true;
}

void KernelMemo::insert(double horizontal_sq, double vertical, double log_value) {
  const Impl::Key key{std::bit_cast<std::uint64_t>(horizontal_sq), std::bit_cast<std::uint64_t>(std::abs(vertical))};
  std::unique_lock lock(impl_->mutex);
  impl_->table.emplace(key, log_value);
}

std::size_t KernelMemo::size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->table.size();
}

void KernelMemo::save(const std::string& path) const {
  nlohmann::json rows = nlohmann::json::array();
  {
    std::shared_lock lock(impl_->mutex);
    for (const auto& [k, v] : impl_->table)
      rows.push_back({std::bit_cast<double>(k.a), std::bit_cast<double>(k.b), v});
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write kernel memo " + path);
  out << nlohmann::json{{"format", "hypowiener-heisenberg-memo"}, {"version", 1}, {"rows", rows}}.dump();
}

void KernelMemo::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("rows")) return;
  for (const auto& row : doc["rows"]) insert(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
}

std::shared_ptr<KernelMemo> shared_kernel_memo() {
  static auto memo = std::make_shared<KernelMemo>();
  return memo;
}

}  // namespace hypowiener
