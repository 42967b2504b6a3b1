#pragma once

// Independent reference solutions used by the tests. Nothing here calls the
// library's solvers.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

/// Trajectory of the symmetric half-problem
///   -(|y'|^{p-2} y')' = f(y),  y(0) = top, y'(0) = 0,
/// integrated in the distance s from the centre with RK4 on (y, F), F the
/// flux, until y reaches zero. Returns (s, y) samples; the last one is the
/// zero crossing, located by linear interpolation.
inline std::vector<std::pair<double, double>> shoot(double p, double top,
                                                    const std::function<double(double)>& f,
                                                    double ds, double s_max) {
  auto inv_flux = [p](double F) {
    return (F >= 0 ? 1.0 : -1.0) * std::pow(std::abs(F), 1.0 / (p - 1.0));
  };
  auto rhs = [&](double y, double F, double& dy, double& dF) {
    dF = -f(std::max(y, 1e-300));
    dy = inv_flux(F);
  };
  std::vector<std::pair<double, double>> out{{0.0, top}};
  double s = 0.0, y = top, F = 0.0;
  while (s < s_max) {
    double k1y, k1F, k2y, k2F, k3y, k3F, k4y, k4F;
    rhs(y, F, k1y, k1F);
    rhs(y + 0.5 * ds * k1y, F + 0.5 * ds * k1F, k2y, k2F);
    rhs(y + 0.5 * ds * k2y, F + 0.5 * ds * k2F, k3y, k3F);
    rhs(y + ds * k3y, F + ds * k3F, k4y, k4F);
    const double yn = y + ds / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    const double Fn = F + ds / 6.0 * (k1F + 2 * k2F + 2 * k3F + k4F);
    if (yn <= 0.0 || !std::isfinite(yn)) {
      out.emplace_back(s + ds * y / (y - std::min(yn, 0.0)), 0.0);
      return out;
    }
    s += ds;
    y = yn;
    F = Fn;
    out.emplace_back(s, y);
  }
  out.emplace_back(s_max, y);  // did not reach zero
  return out;
}

inline double zero_distance(const std::vector<std::pair<double, double>>& traj) {
  return traj.back().second == 0.0 ? traj.back().first : INFINITY;
}

/// Bisection on a monotone predicate: returns x in [lo, hi] with
/// too_far(x) switching from false to true.
inline double bisect(double lo, double hi, const std::function<bool(double)>& too_far,
                     int iterations = 80) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (too_far(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// First eigenvalue of -(|y'|^{p-2}y')' = lambda |y|^{p-2} y on an interval
/// of length L: the half-trajectory from y(0) = 1 must vanish at L/2; larger
/// lambda vanishes sooner.
inline double shooting_eigenvalue(double p, double L, double ds = 1e-5) {
  auto reach = [&](double lambda) {
    auto f = [&](double y) { return lambda * std::pow(y, p - 1.0); };
    return zero_distance(shoot(p, 1.0, f, ds, 4.0 * L));
  };
  return oracle::bisect(1e-3, 1e4, [&](double lam) { return reach(lam) < 0.5 * L; }, 60);
}

/// Symmetric solution of -(|y'|^{p-2}y')' = f(y) on an interval of length L:
/// bisection on the centre value so the zero lands at L/2 (f decreasing in y
/// or positive so larger centre values vanish later).
inline std::vector<std::pair<double, double>> symmetric_solution(
    double p, double L, const std::function<double(double)>& f, double top_lo, double top_hi,
    double ds) {
  const double top = bisect(top_lo, top_hi, [&](double m) {
    return zero_distance(shoot(p, m, f, ds, 4.0 * L)) > 0.5 * L;
  }, 70);
  return shoot(p, top, f, ds, 4.0 * L);
}

/// Linear interpolation of a trajectory at distance s from the centre.
inline double sample(const std::vector<std::pair<double, double>>& traj, double s) {
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (traj[i].first >= s) {
      const auto& [s0, y0] = traj[i - 1];
      const auto& [s1, y1] = traj[i];
      const double t = (s - s0) / (s1 - s0);
      return y0 + t * (y1 - y0);
    }
  }
  return 0.0;
}

/// Dense solve of the three-point Dirichlet Laplacian -(u_{i-1} - 2u_i + u_{i+1})/h^2 = g_i
/// on n nodes (boundary values zero), by full-pivot LU.
inline Eigen::VectorXd dense_laplace_1d(const Eigen::VectorXd& g, double h) {
  const Eigen::Index n = g.size();
  const Eigen::Index m = n - 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, i) = 2.0 / (h * h);
    if (i > 0) A(i, i - 1) = -1.0 / (h * h);
    if (i + 1 < m) A(i, i + 1) = -1.0 / (h * h);
    b[i] = g[i + 1];
  }
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u.segment(1, m) = x;
  return u;
}

/// (2/3)(1/2)^{3/2}: maximum of the p = 3 torsion function on (0,1).
inline double torsion_max_p3() { return 2.0 / 3.0 * std::pow(0.5, 1.5); }

/// pi_p = 2 pi / (p sin(pi/p)); lambda_1 = (p-1) (pi_p / L)^p on (0, L).
inline double lambda1_closed_form(double p, double L) {
  const double pi_p = 2.0 * M_PI / (p * std::sin(M_PI / p));
  return (p - 1.0) * std::pow(pi_p / L, p);
}

/// Centre value m of -y'' = y^{-1/2} on (0,1). From y'^2/2 + 2 sqrt(y) = 2 sqrt(m)
/// the half-length is m^{3/4} B(2, 1/2) = (4/3) m^{3/4} = 1/2.
inline double singular_centre_p2() { return std::pow(3.0 / 8.0, 4.0 / 3.0); }

}  // namespace oracle
