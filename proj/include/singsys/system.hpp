#pragma once

#include <functional>
#include <vector>

#include "singsys/subsup.hpp"

namespace singsys {

/// Nodewise min(max(z, lower), upper). Throws InvalidBarriers if lower > upper
/// anywhere.
Field truncate(const Field& z, const Field& lower, const Field& upper);

enum class Equation { First, Second };

/// lambda u^alpha1 + v^beta1 (first) or u^alpha2 + lambda v^beta2 (second) at
/// interior nodes; zero on the boundary.
Field eval_rhs(const Mesh& m, const ProblemParams& pp, Equation which, const Field& u,
               const Field& v);

struct SystemState {
  Field z1, z2;
  int iteration = 0;
  double change = 0.0;  // max of the sup-changes of both components
  /// Largest amount the post-solve truncation moved any node in the last step.
  double safeguard = 0.0;
};

/// One application of the truncated solution operator.
SystemState apply_T(const SystemState& st, const BarrierSet& bs, const ProblemParams& pp,
                    const SolveOptions& opts = {});

struct SystemOptions {
  double tol_outer = 1e-8;
  int max_outer = 500;
  /// Called with every new iterate (the symmetry check listens here).
  std::function<void(const SystemState&)> observer;
};

struct TraceRow {
  int iteration = 0;
  double change = 0.0;
  double residual_u = 0.0;
  double residual_v = 0.0;
  double safeguard = 0.0;
};

struct SystemSolution {
  Field u, v;
  std::vector<TraceRow> trace;
  double residual_u = 0.0;
  double residual_v = 0.0;
  bool safeguard_active = false;  // at the final iterate
};

class NonconvergenceFailure : public Error {
 public:
  NonconvergenceFailure(const std::string& what, std::vector<TraceRow> trace)
      : Error(ErrorKind::Nonconvergence, what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

/// Picard iteration z <- T(z) from the subsolution pair, stopped once the
/// sup-change is below tol_outer and both equation residuals are below ten
/// times the inner tolerance (relative to the right-hand side).
SystemSolution solve_system(const BarrierSet& bs, const ProblemParams& pp,
                            const SolveOptions& opts = {}, const SystemOptions& sys = {});

/// Tunes the barriers first, then iterates.
SystemSolution solve_system(const Mesh& m, const ProblemParams& pp, const BuilderConfig& cfg,
                            const SolveOptions& opts = {}, const SystemOptions& sys = {});

/// Witnessed constants of |f| <= k1 d^alpha, |g| <= k2 d^beta over the four
/// corner pairs of the barrier box.
struct SingularBound {
  double k1 = 0.0, k2 = 0.0;
  double alpha = 0.0, beta = 0.0;
};

SingularBound verify_h5(const BarrierSet& bs, const ProblemParams& pp);

}  // namespace singsys
