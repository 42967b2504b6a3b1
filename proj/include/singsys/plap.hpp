#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>

#include "singsys/mesh.hpp"

namespace singsys {

struct SolveOptions {
  /// Gradient regularization in (|Du|^2 + eps^2)^{(p-2)/2}.
  double epsilon = 1e-8;
  /// Apply the regularization at p == 2 as well (otherwise the operator is the
  /// plain 3/5-point Laplacian there).
  bool regularize_p2 = false;
  int max_newton = 100;
  /// Sup-norm residual target, relative to sup|g|.
  double tolerance = 1e-10;
  double backtrack = 0.5;
  /// Floor for singular powers y^alpha evaluated on Picard iterates.
  double value_floor = 1e-12;
  int max_picard = 500;
};

namespace detail {

inline bool plain_laplacian(double p, double eps, bool regularize_p2) {
  return p == 2.0 && !(regularize_p2 && eps > 0.0);
}

template <typename Scalar, typename Vec>
Scalar normal_diff(const Face& f, const Vec& u) {
  return (u[f.hi] - u[f.lo]) / f.h;
}

template <typename Scalar, typename Vec>
Scalar transverse_diff(const Face& f, const Vec& u) {
  if (f.h_transverse == 0.0) return Scalar(0);
  return (u[f.transverse[0]] - u[f.transverse[1]] + u[f.transverse[2]] - u[f.transverse[3]]) /
         (4.0 * f.h_transverse);
}

}  // namespace detail

inline void check_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorKind::InvalidExponent, "p-Laplacian exponent must satisfy p > 1");
}

/// Discrete -div(|grad u|^{p-2} grad u) at interior nodes, zero on the
/// boundary. Boundary values of u are read as given (they need not vanish).
template <typename Derived>
FieldT<typename Derived::Scalar> apply_plap(const Mesh& m, double p,
                                            const Eigen::MatrixBase<Derived>& u,
                                            double eps = SolveOptions{}.epsilon,
                                            bool regularize_p2 = false) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  check_exponent(p);
  const bool plain = detail::plain_laplacian(p, eps, regularize_p2);
  FieldT<Scalar> out = FieldT<Scalar>::Zero(m.size());
  for (const Face& f : m.faces()) {
    const Scalar dn = detail::normal_diff<Scalar>(f, u.derived());
    Scalar flux = dn;
    if (!plain) {
      const Scalar dt = detail::transverse_diff<Scalar>(f, u.derived());
      flux = pow(dn * dn + dt * dt + eps * eps, (p - 2.0) / 2.0) * dn;
    }
    if (!m.on_boundary(f.lo)) out[f.lo] -= flux / f.h;
    if (!m.on_boundary(f.hi)) out[f.hi] += flux / f.h;
  }
  return out;
}

/// J(u) = sum_faces h^dim/dim ((|grad u|^2+eps^2)^{p/2} - eps^p)/p - sum_nodes h^dim g u.
template <typename Derived>
typename Derived::Scalar energy(const Mesh& m, double p, const Eigen::MatrixBase<Derived>& u,
                                const Field& g, double eps = SolveOptions{}.epsilon,
                                bool regularize_p2 = false) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  check_exponent(p);
  const bool plain = detail::plain_laplacian(p, eps, regularize_p2);
  const double dim = m.dimension();
  Scalar stored(0);
  for (const Face& f : m.faces()) {
    const Scalar dn = detail::normal_diff<Scalar>(f, u.derived());
    const Scalar dt = detail::transverse_diff<Scalar>(f, u.derived());
    const Scalar s2 = dn * dn + dt * dt;
    const Scalar density = plain ? s2 / 2.0 : (pow(s2 + eps * eps, p / 2.0) - pow(eps, p)) / p;
    stored += f.measure / dim * density;
  }
  Scalar load(0);
  for (Eigen::Index k : m.interior_nodes()) load += g[k] * u.derived()[k];
  return stored - m.cell_measure() * load;
}

/// sup over interior nodes of |apply_plap(u) - g|.
double residual_sup(const Mesh& m, double p, const Field& u, const Field& g,
                    double eps = SolveOptions{}.epsilon, bool regularize_p2 = false);

/// Jacobian of apply_plap with respect to the interior unknowns (ordered as
/// Mesh::interior_nodes()).
Eigen::SparseMatrix<double> plap_jacobian(const Mesh& m, double p, const Field& u,
                                          double eps = SolveOptions{}.epsilon,
                                          bool regularize_p2 = false);

/// Solves -Delta_p u = g with zero Dirichlet data by damped Newton. Without an
/// initial guess Newton starts from the p = 2 solution, rescaled by
/// homogeneity to the magnitude of g.
Field solve_dirichlet(const Mesh& m, double p, const Field& g, const SolveOptions& opts = {});
Field solve_dirichlet(const Mesh& m, double p, const Field& g, const SolveOptions& opts,
                      const Field& initial);

/// Positive solution of -Delta_p y = c max(y, floor)^alpha, -1 < alpha < 0,
/// by Picard iteration on fixed right-hand sides.
Field solve_autonomous_singular(const Mesh& m, double p, double alpha, double c,
                                const SolveOptions& opts = {});

}  // namespace singsys
