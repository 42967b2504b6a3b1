#include "singsys/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "singsys/system.hpp"

namespace singsys {

bool Certificate::passed() const {
  return std::all_of(passes.begin(), passes.end(), [](const auto& kv) { return kv.second; });
}

double hardy_integral(const Mesh& m, const Field& w, double alpha) {
  if (!(alpha > -1.0 && alpha < 0.0))
    throw Error(ErrorKind::InvalidExponent, "Hardy exponent must lie in (-1, 0)");
  const Field d = distance_field(m);
  double s = 0.0;
  for (Eigen::Index k : m.interior_nodes()) s += std::pow(d[k], alpha) * w[k];
  return m.cell_measure() * s;
}

std::pair<double, double> boundary_ratios(const Mesh& m, const Field& w, double fraction) {
  const Field d = distance_field(m);
  const double window = fraction * m.min_extent();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k : m.interior_nodes()) {
    if (!(d[k] < window)) continue;
    const double r = w[k] / d[k];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

double gradient_increment(const Mesh& m, const Field& w) {
  // Faces are stored axis by axis in lexicographic order, so consecutive
  // faces sharing a node are neighbours along the same line.
  double best = 0.0;
  const auto& faces = m.faces();
  for (std::size_t i = 1; i < faces.size(); ++i) {
    const Face& a = faces[i - 1];
    const Face& b = faces[i];
    if (a.axis != b.axis || a.hi != b.lo) continue;
    const double da = (w[a.hi] - w[a.lo]) / a.h;
    const double db = (w[b.hi] - w[b.lo]) / b.h;
    best = std::max(best, std::abs(db - da));
  }
  return best;
}

double holder_exponent_estimate(const std::vector<std::pair<Mesh, Field>>& levels) {
  if (levels.size() < 2)
    throw Error(ErrorKind::InvalidParameter, "Hoelder proxy needs at least two refinement levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(levels.size());
  for (const auto& [mesh, w] : levels) {
    const double x = std::log(mesh.spacing(0));
    const double y = std::log(gradient_increment(mesh, w));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Certificate certify_solution(const Field& u, const Field& v, const BarrierSet& bs,
                             const ProblemParams& pp, const CertifyOptions& opts,
                             std::optional<double> gamma_hat) {
  const Mesh& m = bs.mesh;
  Certificate c;
  c.gamma_hat = gamma_hat;

  c.min_u = std::numeric_limits<double>::infinity();
  c.min_v = std::numeric_limits<double>::infinity();
  for (Eigen::Index k : m.interior_nodes()) {
    c.min_u = std::min(c.min_u, u[k]);
    c.min_v = std::min(c.min_v, v[k]);
  }
  const bool positive = c.min_u > 0.0 && c.min_v > 0.0;
  if (positive) {
    const Field f = eval_rhs(m, pp, Equation::First, u, v);
    const Field g = eval_rhs(m, pp, Equation::Second, u, v);
    c.residual_u = residual_sup(m, pp.p, u, f, bs.opts.epsilon, bs.opts.regularize_p2);
    c.residual_v = residual_sup(m, pp.q, v, g, bs.opts.epsilon, bs.opts.regularize_p2);
  } else {
    c.residual_u = c.residual_v = std::numeric_limits<double>::infinity();
  }

  c.sandwich_margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k : m.interior_nodes()) {
    c.sandwich_margin = std::min({c.sandwich_margin, u[k] - bs.u_low[k], bs.u_high[k] - u[k],
                                  v[k] - bs.v_low[k], bs.v_high[k] - v[k]});
  }

  std::tie(c.r_low_u, c.r_high_u) = boundary_ratios(m, u, opts.window_fraction);
  std::tie(c.r_low_v, c.r_high_v) = boundary_ratios(m, v, opts.window_fraction);
  c.hardy_u = hardy_integral(m, u, pp.alpha1);
  c.hardy_v = hardy_integral(m, v, pp.beta2);

  auto ratio_ok = [&](double lo, double hi) {
    return lo > 0.0 && lo <= hi && std::isfinite(hi) && hi / lo <= opts.ratio_cap;
  };
  c.passes["residual_u"] = c.residual_u <= opts.residual_tol;
  c.passes["residual_v"] = c.residual_v <= opts.residual_tol;
  c.passes["min_u"] = c.min_u > 0.0;
  c.passes["min_v"] = c.min_v > 0.0;
  c.passes["sandwich"] = c.sandwich_margin >= -opts.sandwich_tol;
  c.passes["boundary_ratio_u"] = ratio_ok(c.r_low_u, c.r_high_u);
  c.passes["boundary_ratio_v"] = ratio_ok(c.r_low_v, c.r_high_v);
  return c;
}

}  // namespace singsys
