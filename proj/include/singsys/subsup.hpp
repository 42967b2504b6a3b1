#pragma once

#include <string>
#include <utility>
#include <vector>

#include "singsys/eigenpair.hpp"
#include "singsys/mesh.hpp"
#include "singsys/plap.hpp"
#include "singsys/problem.hpp"

namespace singsys {

/// Knobs of the barrier construction. The strip width and the (negative)
/// scaling exponent of the supersolution are independent parameters.
struct BuilderConfig {
  double delta_strip = 0.1;
  double theta1 = -0.25;  // in (alpha1, 0)
  double theta2 = -0.25;  // in (beta2, 0)
  double delta_exp = -8.0;  // < min(1/theta1, 1/theta2)
  double margin = 0.25;     // dilation of the supersolution domain
  double C = 2.0;           // first value tried by the doubling search
  double C_cap = 1099511627776.0;  // 2^40

  /// theta = alpha1/2, beta2/2; delta_exp = 2 min(1/theta1, 1/theta2);
  /// strip = 0.1 and margin = 0.25 of the smallest extent.
  static BuilderConfig defaults(const ProblemParams& pp, const Mesh& m);

  /// Throws Error(InvalidConfig) if the exponent constraints or C > 1 fail.
  void validate(const ProblemParams& pp) const;
};

struct CheckEntry {
  std::string name;
  double worst_margin = 0.0;
  Eigen::Index worst_node = -1;
  Eigen::Index checked = 0;
  double slack = 0.0;       // accepted when worst_margin >= -slack
  bool diagnostic = false;  // reported but not gating
  bool passed() const { return checked == 0 || worst_margin >= -slack; }
};

struct CheckReport {
  std::vector<CheckEntry> entries;

  bool passed() const;
  const CheckEntry* find(const std::string& name) const;
  void append(const CheckReport& other);
};

/// Everything that does not depend on C: meshes, strip, eigenpairs, the
/// autonomous singular solutions y1, y2 and the constants extracted from them.
struct BarrierBasis {
  Mesh mesh;
  Mesh dilated;
  StripMask strip;
  EigenPair phi_p, phi_q, phit_p, phit_q;
  Field y1, y2;
  BarrierConstants constants;
};

BarrierBasis prepare_basis(const Mesh& m, const ProblemParams& pp, const BuilderConfig& cfg,
                           const SolveOptions& opts = {});

struct TuneStep {
  double C = 0.0;
  bool passed = false;
  double worst_margin = 0.0;
  std::string failed_check;  // first failing entry or construction error
};

struct BarrierSet {
  Mesh mesh;
  Mesh dilated;
  BuilderConfig config;  // config.C is the value the barriers were built with
  SolveOptions opts;
  StripMask strip;
  EigenPair phi_p, phi_q, phit_p, phit_q;
  Field y1, y2;
  Field u_low, v_low, u_high, v_high;  // on mesh
  Field xi1, xi2;                      // on dilated
  BarrierConstants constants;

  CheckReport sub_report, super_report, order_report;
  std::vector<TuneStep> history;
};

/// Subsolution pair: -Delta_p u = +C y1^alpha1 off the strip and -C y1^alpha1
/// inside it (same for v with q, y2, beta2). Throws BarrierFailure if a
/// barrier is not positive at every interior node.
std::pair<Field, Field> build_subsolution(const BarrierBasis& basis, const ProblemParams& pp,
                                          double C, const SolveOptions& opts = {});
std::pair<Field, Field> build_subsolution(const Mesh& m, const ProblemParams& pp,
                                          const BuilderConfig& cfg, const SolveOptions& opts = {});

struct SuperBarrier {
  Field u_high, v_high;  // restrictions of C^{-delta} xi to the mesh
  Field xi1, xi2;        // on the dilated mesh
};

/// xi solves -Delta_p xi = C^{delta(p-1)} xi^theta on the dilated mesh.
SuperBarrier build_supersolution(const Mesh& m, const Mesh& dilated, const ProblemParams& pp,
                                 const BuilderConfig& cfg, const SolveOptions& opts = {});

/// Builds both pairs at cfg.C and runs all checks; no search.
BarrierSet build_barriers(const BarrierBasis& basis, const ProblemParams& pp,
                          const BuilderConfig& cfg, const SolveOptions& opts = {});

CheckReport check_sub_inequalities(const BarrierSet& bs, const ProblemParams& pp);
CheckReport check_super_inequalities(const BarrierSet& bs, const ProblemParams& pp);
CheckReport check_ordering(const BarrierSet& bs);

class TuningFailure : public Error {
 public:
  TuningFailure(const std::string& what, std::vector<TuneStep> history, CheckReport last)
      : Error(ErrorKind::TuningFailure, what), history_(std::move(history)), last_(std::move(last)) {}
  const std::vector<TuneStep>& history() const { return history_; }
  const CheckReport& last_report() const { return last_; }

 private:
  std::vector<TuneStep> history_;
  CheckReport last_;
};

/// Doubling search C = cfg.C, 2 cfg.C, 4 cfg.C, ... up to cfg.C_cap; returns
/// the first barrier set passing every gating check.
BarrierSet auto_tune_C(const Mesh& m, const ProblemParams& pp, const BuilderConfig& cfg,
                       const SolveOptions& opts = {});
BarrierSet auto_tune_C(const BarrierBasis& basis, const ProblemParams& pp,
                       const BuilderConfig& cfg, const SolveOptions& opts = {});

}  // namespace singsys
