#include "singsys/subsup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace singsys {

namespace {

constexpr double kEigenTol = 1e-9;

// Running minimum of a margin over a node set.
class MarginScan {
 public:
  MarginScan(std::string name, bool diagnostic = false, double slack = 0.0) {
    entry_.name = std::move(name);
    entry_.diagnostic = diagnostic;
    entry_.slack = slack;
    entry_.worst_margin = std::numeric_limits<double>::infinity();
  }
  void add(Eigen::Index node, double margin) {
    ++entry_.checked;
    // NaN counts as a violation.
    if (!(margin >= entry_.worst_margin) || std::isnan(margin)) {
      if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
      entry_.worst_margin = margin;
      entry_.worst_node = node;
    }
  }
  CheckEntry done() const {
    CheckEntry e = entry_;
    if (e.checked == 0) e.worst_margin = 0.0;
    return e;
  }

 private:
  CheckEntry entry_;
};

double operator_slack(const Mesh& m, const Field& applied, double tol) {
  return 10.0 * tol * std::max(sup_norm(m, applied), std::numeric_limits<double>::min());
}

}  // namespace

BuilderConfig BuilderConfig::defaults(const ProblemParams& pp, const Mesh& m) {
  BuilderConfig c;
  c.theta1 = pp.alpha1 / 2.0;
  c.theta2 = pp.beta2 / 2.0;
  c.delta_exp = 2.0 * std::min(1.0 / c.theta1, 1.0 / c.theta2);
  c.delta_strip = 0.1 * m.min_extent();
  c.margin = 0.25 * m.min_extent();
  return c;
}

void BuilderConfig::validate(const ProblemParams& pp) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
  if (!(theta1 > pp.alpha1 && theta1 < 0.0)) fail("theta1 must lie in (alpha1, 0)");
  if (!(theta2 > pp.beta2 && theta2 < 0.0)) fail("theta2 must lie in (beta2, 0)");
  if (!(delta_exp < std::min(1.0 / theta1, 1.0 / theta2)))
    fail("delta_exp must satisfy delta_exp < min(1/theta1, 1/theta2)");
  if (!(C > 1.0) || !std::isfinite(C)) fail("C must be a finite number > 1");
  if (!(C_cap >= C)) fail("C cap must be at least the initial C");
  if (!(delta_strip > 0.0)) fail("delta_strip must be positive");
  if (!(margin > 0.0)) fail("dilation margin must be positive");
}

bool CheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const CheckEntry& e) { return e.diagnostic || e.passed(); });
}

const CheckEntry* CheckReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

void CheckReport::append(const CheckReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

BarrierBasis prepare_basis(const Mesh& m, const ProblemParams& pp, const BuilderConfig& cfg,
                           const SolveOptions& opts) {
  pp.validate();
  cfg.validate(pp);
  BarrierBasis b;
  b.mesh = m;
  b.dilated = dilate(m, cfg.margin);
  b.strip = strip_mask(m, cfg.delta_strip);
  b.y1 = solve_autonomous_singular(m, pp.p, pp.alpha1, 1.0, opts);
  b.y2 = pp.q == pp.p && pp.beta2 == pp.alpha1 ? b.y1
                                                : solve_autonomous_singular(m, pp.q, pp.beta2, 1.0, opts);
  b.phi_p = first_eigenpair(m, pp.p, kEigenTol, opts);
  b.phi_q = pp.q == pp.p ? b.phi_p : first_eigenpair(m, pp.q, kEigenTol, opts);
  b.phit_p = first_eigenpair(b.dilated, pp.p, kEigenTol, opts);
  b.phit_q = pp.q == pp.p ? b.phit_p : first_eigenpair(b.dilated, pp.q, kEigenTol, opts);
  b.constants = extract_constants(m, b.dilated, b.phi_p, b.phi_q, b.y1, b.y2, b.strip, b.phit_p,
                                  b.phit_q);
  return b;
}

namespace {

Field signed_strip_load(const Mesh& m, const StripMask& strip, const Field& y, double exponent,
                        double C) {
  Field g = Field::Zero(m.size());
  for (Eigen::Index k : m.interior_nodes()) {
    const double v = C * std::pow(y[k], exponent);
    g[k] = strip[k] ? -v : v;
  }
  return g;
}

void require_positive(const Mesh& m, const Field& f, const char* what) {
  for (Eigen::Index k : m.interior_nodes()) {
    if (!(f[k] > 0.0)) {
      std::ostringstream os;
      os << what << " is not positive at node " << k << " (value " << f[k]
         << "); the boundary strip is likely too wide";
      throw Error(ErrorKind::BarrierFailure, os.str());
    }
  }
}

}  // namespace

std::pair<Field, Field> build_subsolution(const BarrierBasis& basis, const ProblemParams& pp,
                                          double C, const SolveOptions& opts) {
  const Mesh& m = basis.mesh;
  Field u = solve_dirichlet(m, pp.p, signed_strip_load(m, basis.strip, basis.y1, pp.alpha1, C), opts);
  Field v = solve_dirichlet(m, pp.q, signed_strip_load(m, basis.strip, basis.y2, pp.beta2, C), opts);
  require_positive(m, u, "subsolution u_low");
  require_positive(m, v, "subsolution v_low");
  return {std::move(u), std::move(v)};
}

std::pair<Field, Field> build_subsolution(const Mesh& m, const ProblemParams& pp,
                                          const BuilderConfig& cfg, const SolveOptions& opts) {
  pp.validate();
  cfg.validate(pp);
  BarrierBasis b;
  b.mesh = m;
  b.strip = strip_mask(m, cfg.delta_strip);
  b.y1 = solve_autonomous_singular(m, pp.p, pp.alpha1, 1.0, opts);
  b.y2 = solve_autonomous_singular(m, pp.q, pp.beta2, 1.0, opts);
  return build_subsolution(b, pp, cfg.C, opts);
}

namespace {

// Natural logs of the factors turning the c = 1 solution into xi and into
// u_high = C^{-delta} xi.
struct ScaleLogs {
  double xi = 0.0, high = 0.0;
};

ScaleLogs scale_logs(double p, double theta, const BuilderConfig& cfg) {
  const double log_c = cfg.delta_exp * (p - 1.0) * std::log(cfg.C);
  ScaleLogs s;
  s.xi = log_c / (p - 1.0 - theta);
  s.high = s.xi - cfg.delta_exp * std::log(cfg.C);
  return s;
}

// Leaves room for the powers taken in the checks.
bool supersolution_representable(const ProblemParams& pp, const BuilderConfig& cfg) {
  constexpr double kMaxLog = 200.0;
  for (const ScaleLogs s : {scale_logs(pp.p, cfg.theta1, cfg), scale_logs(pp.q, cfg.theta2, cfg)})
    if (std::abs(s.xi) > kMaxLog || std::abs(s.high) > kMaxLog) return false;
  return true;
}

}  // namespace

SuperBarrier build_supersolution(const Mesh& m, const Mesh& dilated, const ProblemParams& pp,
                                 const BuilderConfig& cfg, const SolveOptions& opts) {
  pp.validate();
  cfg.validate(pp);
  SuperBarrier s;
  // -Delta_p xi = c xi^theta is solved with c = 1 and rescaled by
  // c^{1/(p-1-theta)}: for large C the coefficient C^{delta(p-1)} underflows and
  // the gradients of a direct solve would sit below the regularisation.
  if (!supersolution_representable(pp, cfg)) {
    std::ostringstream os;
    os << "supersolution scale at C = " << cfg.C << " leaves the double range";
    throw Error(ErrorKind::BarrierFailure, os.str());
  }
  auto build = [&](double p, double theta, Field& xi, Field& high) {
    const ScaleLogs s = scale_logs(p, theta, cfg);
    xi = solve_autonomous_singular(dilated, p, theta, 1.0, opts);
    high = std::exp(s.high) * restrict_to(m, dilated, xi);
    xi *= std::exp(s.xi);
  };
  build(pp.p, cfg.theta1, s.xi1, s.u_high);
  build(pp.q, cfg.theta2, s.xi2, s.v_high);
  return s;
}

CheckReport check_sub_inequalities(const BarrierSet& bs, const ProblemParams& pp) {
  const Mesh& m = bs.mesh;
  const double C = bs.config.C;
  const double lam = pp.lambda;
  CheckReport rep;

  MarginScan pos_u("sub_positive_u"), pos_v("sub_positive_v");
  MarginScan strip1("sub_strip_first"), strip2("sub_strip_second");
  MarginScan off1("sub_interior_first"), off2("sub_interior_second");
  for (Eigen::Index k : m.interior_nodes()) {
    const double ul = bs.u_low[k];
    const double vl = bs.v_low[k];
    pos_u.add(k, ul);
    pos_v.add(k, vl);
    const double s1 = C * std::pow(bs.y1[k], pp.alpha1);
    const double s2 = C * std::pow(bs.y2[k], pp.beta2);
    if (bs.strip[k]) {
      // -C y1^a1 - lam u^a1 <= 0 <= v^b1 (the right part holds by positivity).
      strip1.add(k, s1 + lam * std::pow(ul, pp.alpha1));
      strip2.add(k, s2 + lam * std::pow(vl, pp.beta2));
    } else {
      off1.add(k, lam * std::pow(ul, pp.alpha1) + std::pow(vl, pp.beta1) - s1);
      off2.add(k, std::pow(ul, pp.alpha2) + lam * std::pow(vl, pp.beta2) - s2);
    }
  }
  for (const auto& s : {pos_u, pos_v, strip1, strip2, off1, off2}) rep.entries.push_back(s.done());

  // Discrete operator form against both extremes of the other component.
  const Field au = apply_plap(m, pp.p, bs.u_low, bs.opts.epsilon, bs.opts.regularize_p2);
  const Field av = apply_plap(m, pp.q, bs.v_low, bs.opts.epsilon, bs.opts.regularize_p2);
  const double su = operator_slack(m, au, bs.opts.tolerance);
  const double sv = operator_slack(m, av, bs.opts.tolerance);
  MarginScan op1l("sub_operator_first_at_v_low", false, su), op1h("sub_operator_first_at_v_high", false, su);
  MarginScan op2l("sub_operator_second_at_u_low", false, sv), op2h("sub_operator_second_at_u_high", false, sv);
  for (Eigen::Index k : m.interior_nodes()) {
    const double ua = lam * std::pow(bs.u_low[k], pp.alpha1);
    op1l.add(k, ua + std::pow(bs.v_low[k], pp.beta1) - au[k]);
    op1h.add(k, ua + std::pow(bs.v_high[k], pp.beta1) - au[k]);
    const double vb = lam * std::pow(bs.v_low[k], pp.beta2);
    op2l.add(k, std::pow(bs.u_low[k], pp.alpha2) + vb - av[k]);
    op2h.add(k, std::pow(bs.u_high[k], pp.alpha2) + vb - av[k]);
  }
  for (const auto& s : {op1l, op1h, op2l, op2h}) rep.entries.push_back(s.done());

  // Two-sided comparison of the subsolution with the scaled eigenfunctions.
  const auto& k = bs.constants;
  const double cu = std::pow(C, 1.0 / (pp.p - 1.0));
  const double cv = std::pow(C, 1.0 / (pp.q - 1.0));
  MarginScan lo_u("sub_eigen_sandwich_u_lower", true), hi_u("sub_eigen_sandwich_u_upper", true);
  MarginScan lo_v("sub_eigen_sandwich_v_lower", true), hi_v("sub_eigen_sandwich_v_upper", true);
  for (Eigen::Index n : m.interior_nodes()) {
    lo_u.add(n, bs.u_low[n] - 0.5 * k.c1 * cu * bs.phi_p.phi[n]);
    hi_u.add(n, k.c2 * cu * bs.phi_p.phi[n] - bs.u_low[n]);
    lo_v.add(n, bs.v_low[n] - 0.5 * k.c3 * cv * bs.phi_q.phi[n]);
    hi_v.add(n, k.c4 * cv * bs.phi_q.phi[n] - bs.v_low[n]);
  }
  for (const auto& s : {lo_u, hi_u, lo_v, hi_v}) rep.entries.push_back(s.done());
  return rep;
}

CheckReport check_super_inequalities(const BarrierSet& bs, const ProblemParams& pp) {
  const Mesh& m = bs.mesh;
  const double lam = pp.lambda;
  const Field xi1 = restrict_to(m, bs.dilated, bs.xi1);
  const Field xi2 = restrict_to(m, bs.dilated, bs.xi2);
  CheckReport rep;

  MarginScan pos_u("super_positive_u"), pos_v("super_positive_v");
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    pos_u.add(k, bs.u_high[k]);
    pos_v.add(k, bs.v_high[k]);
  }
  MarginScan first("super_first"), second("super_second");
  for (Eigen::Index k : m.interior_nodes()) {
    const double uh = bs.u_high[k];
    const double vh = bs.v_high[k];
    first.add(k, std::pow(xi1[k], bs.config.theta1) - (lam * std::pow(uh, pp.alpha1) + std::pow(vh, pp.beta1)));
    second.add(k, std::pow(xi2[k], bs.config.theta2) - (std::pow(uh, pp.alpha2) + lam * std::pow(vh, pp.beta2)));
  }
  for (const auto& s : {pos_u, pos_v, first, second}) rep.entries.push_back(s.done());

  const Field au = apply_plap(m, pp.p, bs.u_high, bs.opts.epsilon, bs.opts.regularize_p2);
  const Field av = apply_plap(m, pp.q, bs.v_high, bs.opts.epsilon, bs.opts.regularize_p2);
  const double su = operator_slack(m, au, bs.opts.tolerance);
  const double sv = operator_slack(m, av, bs.opts.tolerance);
  MarginScan op1l("super_operator_first_at_v_low", false, su), op1h("super_operator_first_at_v_high", false, su);
  MarginScan op2l("super_operator_second_at_u_low", false, sv), op2h("super_operator_second_at_u_high", false, sv);
  for (Eigen::Index k : m.interior_nodes()) {
    const double ua = lam * std::pow(bs.u_high[k], pp.alpha1);
    op1l.add(k, au[k] - (ua + std::pow(bs.v_low[k], pp.beta1)));
    op1h.add(k, au[k] - (ua + std::pow(bs.v_high[k], pp.beta1)));
    const double vb = lam * std::pow(bs.v_high[k], pp.beta2);
    op2l.add(k, av[k] - (std::pow(bs.u_low[k], pp.alpha2) + vb));
    op2h.add(k, av[k] - (std::pow(bs.u_high[k], pp.alpha2) + vb));
  }
  for (const auto& s : {op1l, op1h, op2l, op2h}) rep.entries.push_back(s.done());

  // Diagnostics: the constant-level middle of the chains and the two-sided
  // comparison of xi with the dilated eigenfunctions.
  const auto& c = bs.constants;
  const double C = bs.config.C;
  const double d = bs.config.delta_exp;
  MarginScan chain1("super_first_constant_chain", true), chain2("super_second_constant_chain", true);
  chain1.add(-1, std::pow(C, d * bs.config.theta1) * std::pow(c.c * c.R_tilde, bs.config.theta1) -
                     (lam * std::pow(c.c0 * c.rho, pp.alpha1) + std::pow(c.c_prime * c.R_tilde, pp.beta1)));
  chain2.add(-1, std::pow(C, d * bs.config.theta2) * std::pow(c.c_prime * c.R_tilde, bs.config.theta2) -
                     (std::pow(c.c * c.R_tilde, pp.alpha2) + lam * std::pow(c.c0_prime * c.rho, pp.beta2)));
  rep.entries.push_back(chain1.done());
  rep.entries.push_back(chain2.done());

  const double cd = std::pow(C, d);
  MarginScan x1lo("super_xi1_sandwich_lower", true), x1hi("super_xi1_sandwich_upper", true);
  MarginScan x2lo("super_xi2_sandwich_lower", true), x2hi("super_xi2_sandwich_upper", true);
  for (Eigen::Index k : bs.dilated.interior_nodes()) {
    // Relative margins: xi can be many orders of magnitude from 1.
    const double a = cd * bs.phit_p.phi[k];
    const double b = cd * bs.phit_q.phi[k];
    x1lo.add(k, bs.xi1[k] / a - c.c0);
    x1hi.add(k, c.c - bs.xi1[k] / a);
    x2lo.add(k, bs.xi2[k] / b - c.c0_prime);
    x2hi.add(k, c.c_prime - bs.xi2[k] / b);
  }
  for (const auto& s : {x1lo, x1hi, x2lo, x2hi}) rep.entries.push_back(s.done());
  return rep;
}

CheckReport check_ordering(const BarrierSet& bs) {
  MarginScan ou("order_u"), ov("order_v");
  for (Eigen::Index k = 0; k < bs.mesh.size(); ++k) {
    ou.add(k, bs.u_high[k] - bs.u_low[k]);
    ov.add(k, bs.v_high[k] - bs.v_low[k]);
  }
  CheckReport rep;
  rep.entries = {ou.done(), ov.done()};
  return rep;
}

BarrierSet build_barriers(const BarrierBasis& basis, const ProblemParams& pp,
                          const BuilderConfig& cfg, const SolveOptions& opts) {
  cfg.validate(pp);
  BarrierSet bs;
  bs.mesh = basis.mesh;
  bs.dilated = basis.dilated;
  bs.config = cfg;
  bs.opts = opts;
  bs.strip = basis.strip;
  bs.phi_p = basis.phi_p;
  bs.phi_q = basis.phi_q;
  bs.phit_p = basis.phit_p;
  bs.phit_q = basis.phit_q;
  bs.y1 = basis.y1;
  bs.y2 = basis.y2;
  bs.constants = basis.constants;

  auto [ul, vl] = build_subsolution(basis, pp, cfg.C, opts);
  bs.u_low = std::move(ul);
  bs.v_low = std::move(vl);
  SuperBarrier sup = build_supersolution(basis.mesh, basis.dilated, pp, cfg, opts);
  bs.u_high = std::move(sup.u_high);
  bs.v_high = std::move(sup.v_high);
  bs.xi1 = std::move(sup.xi1);
  bs.xi2 = std::move(sup.xi2);
  extract_xi_constants(bs.constants, bs.dilated, bs.phit_p, bs.phit_q, bs.xi1, bs.xi2, cfg.C,
                       cfg.delta_exp);

  bs.sub_report = check_sub_inequalities(bs, pp);
  bs.super_report = check_super_inequalities(bs, pp);
  bs.order_report = check_ordering(bs);
  return bs;
}

namespace {

TuneStep summarize(double C, const CheckReport& all) {
  TuneStep s;
  s.C = C;
  s.passed = all.passed();
  s.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& e : all.entries) {
    if (e.diagnostic) continue;
    s.worst_margin = std::min(s.worst_margin, e.worst_margin);
    if (!e.passed() && s.failed_check.empty()) s.failed_check = e.name;
  }
  return s;
}

}  // namespace

BarrierSet auto_tune_C(const Mesh& m, const ProblemParams& pp, const BuilderConfig& cfg,
                       const SolveOptions& opts) {
  return auto_tune_C(prepare_basis(m, pp, cfg, opts), pp, cfg, opts);
}

BarrierSet auto_tune_C(const BarrierBasis& basis, const ProblemParams& pp,
                       const BuilderConfig& cfg, const SolveOptions& opts) {
  cfg.validate(pp);
  std::vector<TuneStep> history;
  CheckReport last;
  BuilderConfig trial = cfg;
  // The cap is inclusive; the tiny factor absorbs rounding in C * 2^k.
  for (double C = cfg.C; C <= cfg.C_cap * (1.0 + 1e-12); C *= 2.0) {
    trial.C = C;
    if (!supersolution_representable(pp, trial)) {
      // The scale only grows with C, so no larger C can be represented either.
      TuneStep s;
      s.C = C;
      s.worst_margin = -std::numeric_limits<double>::infinity();
      s.failed_check = "supersolution scale leaves the double range; search stopped";
      history.push_back(s);
      break;
    }
    try {
      BarrierSet bs = build_barriers(basis, pp, trial, opts);
      CheckReport all = bs.sub_report;
      all.append(bs.super_report);
      all.append(bs.order_report);
      history.push_back(summarize(C, all));
      last = std::move(all);
      if (history.back().passed) {
        bs.history = std::move(history);
        return bs;
      }
    } catch (const Error& e) {
      TuneStep s;
      s.C = C;
      s.worst_margin = -std::numeric_limits<double>::infinity();
      s.failed_check = std::string(to_string(e.kind())) + ": " + e.what();
      history.push_back(s);
    }
  }
  std::ostringstream os;
  os << "no C in [" << cfg.C << ", " << cfg.C_cap << "] passed every barrier check";
  if (!history.empty()) os << " (last failure: " << history.back().failed_check << ")";
  throw TuningFailure(os.str(), std::move(history), std::move(last));
}

}  // namespace singsys
