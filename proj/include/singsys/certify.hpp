#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "singsys/subsup.hpp"

namespace singsys {

struct CertifyOptions {
  double residual_tol = 1e-6;
  double sandwich_tol = 1e-8;
  double ratio_cap = 1e3;
  /// Boundary window: nodes with d < window_fraction * smallest extent.
  double window_fraction = 0.1;
};

struct Certificate {
  double residual_u = 0.0, residual_v = 0.0;
  double min_u = 0.0, min_v = 0.0;
  double sandwich_margin = 0.0;
  double r_low_u = 0.0, r_high_u = 0.0, r_low_v = 0.0, r_high_v = 0.0;
  double hardy_u = 0.0, hardy_v = 0.0;
  /// Log-log slope of gradient increments under refinement; estimate only.
  std::optional<double> gamma_hat;
  std::map<std::string, bool> passes;

  bool passed() const;
};

/// sum over interior nodes of h^dim d(x)^alpha w(x), -1 < alpha < 0.
double hardy_integral(const Mesh& m, const Field& w, double alpha);

/// (min, max) of w/d over interior nodes with d < fraction * smallest extent.
std::pair<double, double> boundary_ratios(const Mesh& m, const Field& w, double fraction = 0.1);

/// sup over neighbouring faces (same axis) of |Dw(face') - Dw(face)|.
double gradient_increment(const Mesh& m, const Field& w);

/// Least-squares slope of log gradient_increment against log h over a
/// refinement sequence (at least two levels).
double holder_exponent_estimate(const std::vector<std::pair<Mesh, Field>>& levels);

Certificate certify_solution(const Field& u, const Field& v, const BarrierSet& bs,
                             const ProblemParams& pp, const CertifyOptions& opts = {},
                             std::optional<double> gamma_hat = std::nullopt);

}  // namespace singsys
