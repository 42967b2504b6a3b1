#include "singsys/eigenpair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace singsys {

double lp_norm(const Mesh& m, const Field& w, double p) {
  double s = 0.0;
  for (Eigen::Index k : m.interior_nodes()) s += std::pow(std::abs(w[k]), p);
  return std::pow(m.cell_measure() * s, 1.0 / p);
}

double rayleigh_quotient(const Mesh& m, double p, const Field& w, double eps) {
  const Field a = apply_plap(m, p, w, eps);
  double num = 0.0;
  for (Eigen::Index k : m.interior_nodes()) num += a[k] * w[k];
  return m.cell_measure() * num / std::pow(lp_norm(m, w, p), p);
}

double eigen_residual(const Mesh& m, double p, double lambda, const Field& phi, double eps) {
  const Field a = apply_plap(m, p, phi, eps);
  double r = 0.0;
  for (Eigen::Index k : m.interior_nodes()) {
    const double target = lambda * std::pow(std::abs(phi[k]), p - 2.0) * phi[k];
    r = std::max(r, std::abs(a[k] - target));
  }
  return r;
}

EigenPair first_eigenpair(const Mesh& m, double p, double tol, const SolveOptions& opts) {
  check_exponent(p);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "eigen tolerance must be positive");

  SolveOptions inner = opts;
  inner.tolerance = std::min(opts.tolerance, 1e-3 * tol);

  Field w = solve_dirichlet(m, p, interior_constant(m, 1.0), inner);
  w /= lp_norm(m, w, p);
  double lambda = rayleigh_quotient(m, p, w, opts.epsilon);
  double residual = std::numeric_limits<double>::infinity();
  Field g = Field::Zero(m.size());
  const int max_it = std::max(opts.max_picard, 1000);
  for (int it = 1; it <= max_it; ++it) {
    for (Eigen::Index k : m.interior_nodes()) g[k] = std::pow(std::max(w[k], 0.0), p - 1.0);
    w = solve_dirichlet(m, p, g, inner, w);
    w /= lp_norm(m, w, p);
    const double next = rayleigh_quotient(m, p, w, opts.epsilon);
    residual = eigen_residual(m, p, next, w, opts.epsilon);
    const double change = std::abs(next - lambda);
    lambda = next;
    // Residual relative to the size of the terms, lambda sup phi^{p-1}.
    const double size = std::max(1.0, lambda * std::pow(sup_norm(m, w), p - 1.0));
    if (change <= tol && residual <= tol * size) return EigenPair{p, lambda, w, it, residual};
  }
  throw SolverFailure("inverse power iteration did not converge", residual);
}

namespace {

struct MinMax {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

}  // namespace

BarrierConstants extract_constants(const Mesh& m, const Mesh& dilated, const EigenPair& phi_p,
                                   const EigenPair& phi_q, const Field& y1, const Field& y2,
                                   const StripMask& strip, const EigenPair& phit_p,
                                   const EigenPair& phit_q) {
  const Field d = distance_field(m);
  BarrierConstants k;
  MinMax l, mu, r, c12, c34;
  Eigen::Index outside = 0;
  for (Eigen::Index n : m.interior_nodes()) {
    const double a = phi_p.phi[n];
    const double b = phi_q.phi[n];
    l.add(std::min(a, b) / d[n]);
    r.add(std::max(a, b));
    c12.add(y1[n] / a);
    c34.add(y2[n] / b);
    if (!strip[n]) {
      mu.add(std::min(a, b));
      ++outside;
    }
  }
  if (outside == 0) throw Error(ErrorKind::InvalidStrip, "no interior node outside the strip");

  const Field tp = restrict_to(m, dilated, phit_p.phi);
  const Field tq = restrict_to(m, dilated, phit_q.phi);
  MinMax tilde;
  for (Eigen::Index n = 0; n < m.size(); ++n) {
    tilde.add(tp[n]);
    tilde.add(tq[n]);
  }
  k.l = l.lo;
  k.mu = mu.lo;
  k.R = r.hi;
  k.rho = tilde.lo;
  k.R_tilde = tilde.hi;
  k.c1 = c12.lo;
  k.c2 = c12.hi;
  k.c3 = c34.lo;
  k.c4 = c34.hi;
  return k;
}

void extract_xi_constants(BarrierConstants& k, const Mesh& dilated, const EigenPair& phit_p,
                          const EigenPair& phit_q, const Field& xi1, const Field& xi2, double C,
                          double delta_exp) {
  const double scale = std::pow(C, delta_exp);
  MinMax a, b;
  for (Eigen::Index n : dilated.interior_nodes()) {
    a.add(xi1[n] / (scale * phit_p.phi[n]));
    b.add(xi2[n] / (scale * phit_q.phi[n]));
  }
  k.c0 = a.lo;
  k.c = a.hi;
  k.c0_prime = b.lo;
  k.c_prime = b.hi;
}

}  // namespace singsys
