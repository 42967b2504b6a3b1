#include "singsys/plap.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace singsys {

double residual_sup(const Mesh& m, double p, const Field& u, const Field& g, double eps,
                    bool regularize_p2) {
  const Field r = apply_plap(m, p, u, eps, regularize_p2);
  double s = 0.0;
  for (Eigen::Index k : m.interior_nodes()) s = std::max(s, std::abs(r[k] - g[k]));
  return s;
}

Eigen::SparseMatrix<double> plap_jacobian(const Mesh& m, double p, const Field& u, double eps,
                                          bool regularize_p2) {
  check_exponent(p);
  const bool plain = detail::plain_laplacian(p, eps, regularize_p2);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.faces().size() * 12);

  auto add = [&](Eigen::Index row_node, Eigen::Index col_node, double v) {
    const Eigen::Index r = m.interior_index(row_node);
    const Eigen::Index c = m.interior_index(col_node);
    if (r >= 0 && c >= 0) trip.emplace_back(r, c, v);
  };

  for (const Face& f : m.faces()) {
    const double dn = detail::normal_diff<double>(f, u);
    double d_dn = 1.0;
    double d_dt = 0.0;
    if (!plain) {
      const double dt = detail::transverse_diff<double>(f, u);
      const double s = dn * dn + dt * dt + eps * eps;
      const double w = std::pow(s, (p - 2.0) / 2.0);
      const double w4 = (p - 2.0) * std::pow(s, (p - 4.0) / 2.0);
      d_dn = w + w4 * dn * dn;
      d_dt = w4 * dn * dt;
    }
    // Flux derivative with respect to each stencil node, then scatter into
    // the two rows the face touches (lo gets -flux/h, hi gets +flux/h).
    const double cn = d_dn / f.h;
    for (Eigen::Index row : {f.lo, f.hi}) {
      const double sign = row == f.lo ? -1.0 : 1.0;
      add(row, f.hi, sign * cn / f.h);
      add(row, f.lo, -sign * cn / f.h);
      if (d_dt != 0.0) {
        const double ct = d_dt / (4.0 * f.h_transverse) / f.h;
        add(row, f.transverse[0], sign * ct);
        add(row, f.transverse[1], -sign * ct);
        add(row, f.transverse[2], sign * ct);
        add(row, f.transverse[3], -sign * ct);
      }
    }
  }
  Eigen::SparseMatrix<double> jac(m.interior_count(), m.interior_count());
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

namespace {

Eigen::VectorXd interior_part(const Mesh& m, const Field& f) {
  Eigen::VectorXd v(m.interior_count());
  for (Eigen::Index k : m.interior_nodes()) v[m.interior_index(k)] = f[k];
  return v;
}

Field residual(const Mesh& m, double p, const Field& u, const Field& g, const SolveOptions& o) {
  Field r = apply_plap(m, p, u, o.epsilon, o.regularize_p2);
  for (Eigen::Index k : m.interior_nodes()) r[k] -= g[k];
  return r;
}

Field linear_solve(const Mesh& m, const Field& g) {
  // The p = 2 operator is linear: one Newton step from zero is exact.
  const Field zero = Field::Zero(m.size());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(plap_jacobian(m, 2.0, zero, 0.0, false));
  if (lu.info() != Eigen::Success)
    throw SolverFailure("factorization of the discrete Laplacian failed", 0.0);
  const Eigen::VectorXd x = lu.solve(interior_part(m, g));
  Field u = Field::Zero(m.size());
  for (Eigen::Index k : m.interior_nodes()) u[k] = x[m.interior_index(k)];
  return u;
}

// Residual level below which cancellation in the differences dominates:
// machine epsilon times the largest |J_kk u_k|, with a safety factor.
double roundoff_floor(const Mesh& m, const Eigen::SparseMatrix<double>& jac, const Field& u) {
  double s = 0.0;
  for (Eigen::Index k : m.interior_nodes()) {
    const Eigen::Index i = m.interior_index(k);
    s = std::max(s, std::abs(jac.coeff(i, i) * u[k]));
  }
  return 64.0 * std::numeric_limits<double>::epsilon() * s;
}

Field newton(const Mesh& m, double p, const Field& g, const SolveOptions& o, Field u) {
  const double scale = sup_norm(m, g);
  if (scale == 0.0) return Field::Zero(m.size());
  const double target = o.tolerance * scale;
  const double h_dim = m.cell_measure();

  Field r = residual(m, p, u, g, o);
  double rsup = sup_norm(m, r);
  for (int it = 0; it <= o.max_newton; ++it) {
    const Eigen::SparseMatrix<double> jac = plap_jacobian(m, p, u, o.epsilon, o.regularize_p2);
    if (rsup <= std::max(target, roundoff_floor(m, jac, u))) return u;
    if (it == o.max_newton) break;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(jac);
    if (lu.info() != Eigen::Success)
      throw SolverFailure("Newton: singular Jacobian", rsup);
    const Eigen::VectorXd step = lu.solve(-interior_part(m, r));
    Field du = Field::Zero(m.size());
    for (Eigen::Index k : m.interior_nodes()) du[k] = step[m.interior_index(k)];

    // Backtracking on the energy; the residual norm is accepted as a second
    // merit since the 2-D transverse average makes the residual only an
    // approximate energy gradient.
    const double j0 = energy(m, p, u, g, o.epsilon, o.regularize_p2);
    const double slope = h_dim * interior_part(m, r).dot(step);
    const double rnorm0 = interior_part(m, r).norm();
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= o.backtrack) {
      Field cand = u + t * du;
      Field rc = residual(m, p, cand, g, o);
      const double jc = energy(m, p, cand, g, o.epsilon, o.regularize_p2);
      const bool energy_ok = std::isfinite(jc) && jc <= j0 + 1e-4 * t * slope;
      const double rn = interior_part(m, rc).norm();
      const bool resid_ok = std::isfinite(rn) && rn <= (1.0 - 1e-4 * t) * rnorm0;
      if (energy_ok || resid_ok) {
        u = std::move(cand);
        r = std::move(rc);
        rsup = sup_norm(m, r);
        accepted = true;
        break;
      }
    }
    if (!accepted) throw SolverFailure("Newton line search failed to reduce the energy", rsup);
  }
  throw SolverFailure("Newton did not converge in " + std::to_string(o.max_newton) +
                          " iterations (residual " + std::to_string(rsup) + ")",
                      rsup);
}

// Newton from u; if that fails for p != 2, continuation in the regularization:
// solve with eps = G/10, G/100, ... (G the largest face gradient of u) down to
// the requested eps, each stage starting from the previous one.
Field globalized_newton(const Mesh& m, double p, const Field& g, const SolveOptions& o,
                        const Field& u) {
  try {
    return newton(m, p, g, o, u);
  } catch (const SolverFailure&) {
    if (detail::plain_laplacian(p, o.epsilon, o.regularize_p2)) throw;
  }
  double grad = 0.0;
  for (const Face& f : m.faces()) grad = std::max(grad, std::abs(detail::normal_diff<double>(f, u)));
  if (!(grad > 0.0)) grad = 1.0;
  SolveOptions stage = o;
  stage.tolerance = std::max(o.tolerance, 1e-6);
  Field w = u;
  for (double eps = 0.1 * grad; eps > o.epsilon; eps *= 0.1) {
    stage.epsilon = eps;
    w = newton(m, p, g, stage, std::move(w));
  }
  return newton(m, p, g, o, std::move(w));
}

}  // namespace

Field solve_dirichlet(const Mesh& m, double p, const Field& g, const SolveOptions& opts) {
  check_exponent(p);
  const double scale = sup_norm(m, g);
  if (scale == 0.0) return Field::Zero(m.size());
  if (detail::plain_laplacian(p, opts.epsilon, opts.regularize_p2)) {
    Field u = linear_solve(m, g);
    return newton(m, p, g, opts, std::move(u));
  }
  // p = 2 solution of the normalized problem, scaled by homogeneity.
  const Field guess = linear_solve(m, g / scale) * std::pow(scale, 1.0 / (p - 1.0));
  return globalized_newton(m, p, g, opts, guess);
}

Field solve_dirichlet(const Mesh& m, double p, const Field& g, const SolveOptions& opts,
                      const Field& initial) {
  check_exponent(p);
  Field u = initial;
  for (Eigen::Index k = 0; k < m.size(); ++k)
    if (m.on_boundary(k)) u[k] = 0.0;
  return globalized_newton(m, p, g, opts, u);
}

Field solve_autonomous_singular(const Mesh& m, double p, double alpha, double c,
                                const SolveOptions& opts) {
  check_exponent(p);
  if (!(alpha > -1.0 && alpha < 0.0))
    throw Error(ErrorKind::InvalidExponent, "singular exponent must lie in (-1, 0)");
  if (!(c > 0.0) || !std::isfinite(c))
    throw Error(ErrorKind::InvalidParameter, "coefficient c must be positive");

  SolveOptions inner = opts;
  inner.tolerance = 0.1 * opts.tolerance;

  // Constant load of the magnitude the solution will have (c^{1/(p-1-alpha)}
  // by the scaling law); for c = 1 this is exactly g = c.
  const double load = std::pow(c, (p - 1.0) / (p - 1.0 - alpha));
  Field y = solve_dirichlet(m, p, interior_constant(m, load), inner);
  Field g = Field::Zero(m.size());
  double change = 0.0;
  for (int it = 0; it < opts.max_picard; ++it) {
    for (Eigen::Index k : m.interior_nodes()) g[k] = c * std::pow(std::max(y[k], opts.value_floor), alpha);
    Field next = solve_dirichlet(m, p, g, inner, y);
    change = sup_norm(m, next - y);
    const double size = sup_norm(m, next);
    y = std::move(next);
    if (change <= opts.tolerance * size) return y;
  }
  throw SolverFailure("Picard iteration for the autonomous singular problem did not converge", change);
}

}  // namespace singsys
