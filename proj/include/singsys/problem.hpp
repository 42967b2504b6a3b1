#pragma once

#include <string>

namespace singsys {

/// Coefficients of the coupled system
///   -Delta_p u = lambda u^alpha1 + v^beta1,
///   -Delta_q v = u^alpha2 + lambda v^beta2,   u, v > 0, zero on the boundary.
/// Construction through make() enforces
///   h1: -1 < alpha1, beta2 < 0   (singular terms)
///   h2: alpha2 > q - 1, beta1 > p - 1   (superlinear coupling).
struct ProblemParams {
  double p = 2.0;
  double q = 2.0;
  double alpha1 = -0.5;
  double alpha2 = 1.5;
  double beta1 = 1.5;
  double beta2 = -0.5;
  double lambda = 0.0;

  static ProblemParams make(double p, double q, double alpha1, double alpha2, double beta1,
                            double beta2, double lambda);

  /// Throws Error(HypothesisViolation) naming the failed hypothesis.
  void validate() const;

  bool satisfies_h1() const;
  bool satisfies_h2() const;
};

std::string describe(const ProblemParams& pp);

}  // namespace singsys
