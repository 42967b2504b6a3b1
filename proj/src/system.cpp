#include "singsys/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace singsys {

Field truncate(const Field& z, const Field& lower, const Field& upper) {
  if (z.size() != lower.size() || z.size() != upper.size())
    throw Error(ErrorKind::InvalidBarriers, "truncation fields have different sizes");
  Field out(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (lower[k] > upper[k]) {
      std::ostringstream os;
      os << "lower barrier exceeds upper barrier at node " << k << " (" << lower[k] << " > "
         << upper[k] << ")";
      throw Error(ErrorKind::InvalidBarriers, os.str());
    }
    out[k] = std::min(std::max(z[k], lower[k]), upper[k]);
  }
  return out;
}

Field eval_rhs(const Mesh& m, const ProblemParams& pp, Equation which, const Field& u,
               const Field& v) {
  Field f = Field::Zero(m.size());
  for (Eigen::Index k : m.interior_nodes()) {
    if (!(u[k] > 0.0) || !(v[k] > 0.0)) {
      std::ostringstream os;
      os << "right-hand side needs positive arguments; node " << k << " has u = " << u[k]
         << ", v = " << v[k];
      throw Error(ErrorKind::DomainError, os.str());
    }
    f[k] = which == Equation::First ? pp.lambda * std::pow(u[k], pp.alpha1) + std::pow(v[k], pp.beta1)
                                    : std::pow(u[k], pp.alpha2) + pp.lambda * std::pow(v[k], pp.beta2);
  }
  return f;
}

namespace {

double clip_amount(const Mesh& m, const Field& before, const Field& after) {
  return sup_norm(m, before - after);
}

struct Residuals {
  double u = 0.0, v = 0.0;
  double scale_u = 0.0, scale_v = 0.0;
};

Residuals system_residuals(const Mesh& m, const ProblemParams& pp, const SolveOptions& opts,
                           const Field& u, const Field& v) {
  const Field f = eval_rhs(m, pp, Equation::First, u, v);
  const Field g = eval_rhs(m, pp, Equation::Second, u, v);
  Residuals r;
  r.u = residual_sup(m, pp.p, u, f, opts.epsilon, opts.regularize_p2);
  r.v = residual_sup(m, pp.q, v, g, opts.epsilon, opts.regularize_p2);
  r.scale_u = sup_norm(m, f);
  r.scale_v = sup_norm(m, g);
  return r;
}

}  // namespace

SystemState apply_T(const SystemState& st, const BarrierSet& bs, const ProblemParams& pp,
                    const SolveOptions& opts) {
  const Mesh& m = bs.mesh;
  const Field z1 = truncate(st.z1, bs.u_low, bs.u_high);
  const Field z2 = truncate(st.z2, bs.v_low, bs.v_high);
  const Field f = eval_rhs(m, pp, Equation::First, z1, z2);
  const Field g = eval_rhs(m, pp, Equation::Second, z1, z2);
  // The two solves are independent of each other.
  const Field u = solve_dirichlet(m, pp.p, f, opts, z1);
  const Field v = solve_dirichlet(m, pp.q, g, opts, z2);

  SystemState next;
  next.z1 = truncate(u, bs.u_low, bs.u_high);
  next.z2 = truncate(v, bs.v_low, bs.v_high);
  next.iteration = st.iteration + 1;
  next.change = std::max(sup_norm(m, next.z1 - st.z1), sup_norm(m, next.z2 - st.z2));
  next.safeguard = std::max(clip_amount(m, u, next.z1), clip_amount(m, v, next.z2));
  return next;
}

SystemSolution solve_system(const BarrierSet& bs, const ProblemParams& pp, const SolveOptions& opts,
                            const SystemOptions& sys) {
  const Mesh& m = bs.mesh;
  SystemState st;
  st.z1 = bs.u_low;
  st.z2 = bs.v_low;
  if (sys.observer) sys.observer(st);

  SystemSolution sol;
  for (int it = 0; it < sys.max_outer; ++it) {
    st = apply_T(st, bs, pp, opts);
    if (sys.observer) sys.observer(st);
    const Residuals r = system_residuals(m, pp, opts, st.z1, st.z2);
    sol.trace.push_back(TraceRow{st.iteration, st.change, r.u, r.v, st.safeguard});
    const bool small_change = st.change <= sys.tol_outer;
    const bool small_residual = r.u <= 10.0 * opts.tolerance * std::max(r.scale_u, 1.0) &&
                                r.v <= 10.0 * opts.tolerance * std::max(r.scale_v, 1.0);
    if (small_change && small_residual) {
      sol.u = st.z1;
      sol.v = st.z2;
      sol.residual_u = r.u;
      sol.residual_v = r.v;
      sol.safeguard_active = st.safeguard > 0.0;
      return sol;
    }
  }
  std::ostringstream os;
  os << "Picard iteration did not converge in " << sys.max_outer << " steps (last change "
     << (sol.trace.empty() ? 0.0 : sol.trace.back().change) << ")";
  throw NonconvergenceFailure(os.str(), std::move(sol.trace));
}

SystemSolution solve_system(const Mesh& m, const ProblemParams& pp, const BuilderConfig& cfg,
                            const SolveOptions& opts, const SystemOptions& sys) {
  const BarrierSet bs = auto_tune_C(m, pp, cfg, opts);
  return solve_system(bs, pp, opts, sys);
}

SingularBound verify_h5(const BarrierSet& bs, const ProblemParams& pp) {
  const Mesh& m = bs.mesh;
  const Field d = distance_field(m);
  SingularBound b;
  b.alpha = pp.alpha1;
  b.beta = pp.beta2;
  const Field* us[] = {&bs.u_low, &bs.u_high};
  const Field* vs[] = {&bs.v_low, &bs.v_high};
  for (const Field* u : us) {
    for (const Field* v : vs) {
      const Field f = eval_rhs(m, pp, Equation::First, *u, *v);
      const Field g = eval_rhs(m, pp, Equation::Second, *u, *v);
      for (Eigen::Index k : m.interior_nodes()) {
        b.k1 = std::max(b.k1, std::abs(f[k]) * std::pow(d[k], -b.alpha));
        b.k2 = std::max(b.k2, std::abs(g[k]) * std::pow(d[k], -b.beta));
      }
    }
  }
  return b;
}

}  // namespace singsys
