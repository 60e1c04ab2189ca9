#pragma once

#include <functional>

#include "hypowiener/kernel.hpp"

namespace hypowiener {

using SpaceTimeFunction = std::function<double(const SpaceTimePoint&)>;

/// Space-time box containing the heat ball P(z, r) = {zeta : Gamma(z, zeta) > 1/r}:
/// times in [t - depth, t) and gauge distance from x below radius.
struct HeatBallBox {
  SpaceTimePoint center;
  double r = 0.0;
  double depth = 0.0;
  double radius = 0.0;

  bool contains(const GroupModel& model, const SpaceTimePoint& zeta) const;
};

/// Bounding box derived from Gamma <= Lambda G_a0.
HeatBallBox heat_ball_bounds(const GroupModel& model, const SpaceTimePoint& z, double r,
                             const BoundConstants& constants);

bool heat_ball_contains(const HeatKernel& kernel, const SpaceTimePoint& z, double r, const SpaceTimePoint& zeta);

/// E^1_r(z, zeta) = r^{-1} Gamma^{-2} <A grad_xi Gamma, grad_xi Gamma>, with A the
/// identity on the horizontal layer. Analytic for Euclidean models, central
/// differences along the left-invariant fields for H^1.
double mean_value_weight(const HeatKernel& kernel, const SpaceTimePoint& z, double r, const SpaceTimePoint& zeta);

/// M_r u(z). Euclidean models use nested deterministic quadrature over exact
/// slices of the heat ball; H^1 uses Monte Carlo in self-similar coordinates.
IntegralEstimate mean_value_M(const HeatKernel& kernel, const SpaceTimeFunction& u, const SpaceTimePoint& z,
                              double r, const BoundConstants& constants, const IntegrationBudget& budget);

/// (1/r) int_0^r int_{P(z,rho)} (Gamma - 1/rho) Hu, computed as
/// (1/r) int_{P(z,r)} (r Gamma - 1 - log(r Gamma)) Hu. With it
/// u(z) = M_r u(z) - remainder.
IntegralEstimate mean_value_remainder(const HeatKernel& kernel, const SpaceTimeFunction& Hu, const SpaceTimePoint& z,
                                      double r, const BoundConstants& constants, const IntegrationBudget& budget);

}  // namespace hypowiener
