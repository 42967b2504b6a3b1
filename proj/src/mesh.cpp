#include "singsys/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace singsys {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMesh: return "invalid-mesh";
    case ErrorKind::InvalidStrip: return "invalid-strip";
    case ErrorKind::InvalidExponent: return "invalid-exponent";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::InvalidBarriers: return "invalid-barriers";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::BarrierFailure: return "barrier-failure";
    case ErrorKind::TuningFailure: return "tuning-failure";
    case ErrorKind::Nonconvergence: return "nonconvergence-failure";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::HypothesisViolation: return "hypothesis-violation";
  }
  return "unknown";
}

namespace {

void check_axis(double a, double b, Eigen::Index n) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::InvalidMesh, "mesh bounds must be finite");
  if (!(a < b)) throw Error(ErrorKind::InvalidMesh, "mesh bounds must satisfy a < b");
  if (n < 3) throw Error(ErrorKind::InvalidMesh, "need at least 3 nodes per axis, got " + std::to_string(n));
}

}  // namespace

double Mesh::min_extent() const {
  double e = extent(0);
  if (dim_ == 2) e = std::min(e, extent(1));
  return e;
}

double Mesh::cell_measure() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

double Mesh::coord(Eigen::Index node, int axis) const {
  const Eigen::Index i = axis == 0 ? node % n_[0] : node / n_[0];
  // Exact endpoints; interior nodes by uniform spacing.
  if (i == n_[axis] - 1) return hi_[axis];
  return lo_[axis] + static_cast<double>(i) * h_[axis];
}

void Mesh::finalize() {
  const Eigen::Index nx = n_[0];
  const Eigen::Index ny = dim_ == 2 ? n_[1] : 1;
  const Eigen::Index total = nx * ny;
  boundary_.assign(static_cast<std::size_t>(total), false);
  interior_index_.assign(static_cast<std::size_t>(total), -1);
  interior_nodes_.clear();
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Eigen::Index k = index(i, j);
      bool b = (i == 0 || i == nx - 1);
      if (dim_ == 2) b = b || j == 0 || j == ny - 1;
      boundary_[k] = b;
      if (!b) {
        interior_index_[k] = static_cast<Eigen::Index>(interior_nodes_.size());
        interior_nodes_.push_back(k);
      }
    }
  }
  interior_count_ = static_cast<Eigen::Index>(interior_nodes_.size());

  // Only faces that touch an interior node enter the operator.
  faces_.clear();
  const double measure = cell_measure();
  if (dim_ == 1) {
    for (Eigen::Index i = 0; i + 1 < nx; ++i) {
      Face f;
      f.lo = i;
      f.hi = i + 1;
      f.h = h_[0];
      f.measure = measure;
      faces_.push_back(f);
    }
    return;
  }
  for (Eigen::Index j = 1; j + 1 < ny; ++j) {
    for (Eigen::Index i = 0; i + 1 < nx; ++i) {
      Face f;
      f.axis = 0;
      f.lo = index(i, j);
      f.hi = index(i + 1, j);
      f.h = h_[0];
      f.measure = measure;
      f.transverse = {index(i, j + 1), index(i, j - 1), index(i + 1, j + 1), index(i + 1, j - 1)};
      f.h_transverse = h_[1];
      faces_.push_back(f);
    }
  }
  for (Eigen::Index j = 0; j + 1 < ny; ++j) {
    for (Eigen::Index i = 1; i + 1 < nx; ++i) {
      Face f;
      f.axis = 1;
      f.lo = index(i, j);
      f.hi = index(i, j + 1);
      f.h = h_[1];
      f.measure = measure;
      f.transverse = {index(i + 1, j), index(i - 1, j), index(i + 1, j + 1), index(i - 1, j + 1)};
      f.h_transverse = h_[0];
      faces_.push_back(f);
    }
  }
}

Mesh build_interval(double a, double b, Eigen::Index n) {
  check_axis(a, b, n);
  Mesh m;
  m.dim_ = 1;
  m.n_ = {n, 1};
  m.lo_ = {a, 0.0};
  m.hi_ = {b, 0.0};
  m.h_ = {(b - a) / static_cast<double>(n - 1), 0.0};
  m.finalize();
  return m;
}

Mesh build_box(double ax, double bx, double ay, double by, Eigen::Index nx, Eigen::Index ny) {
  check_axis(ax, bx, nx);
  check_axis(ay, by, ny);
  Mesh m;
  m.dim_ = 2;
  m.n_ = {nx, ny};
  m.lo_ = {ax, ay};
  m.hi_ = {bx, by};
  m.h_ = {(bx - ax) / static_cast<double>(nx - 1), (by - ay) / static_cast<double>(ny - 1)};
  m.finalize();
  return m;
}

Field distance_field(const Mesh& m) {
  Field d(m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    if (m.on_boundary(k)) {
      d[k] = 0.0;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < m.dimension(); ++axis) {
      const double x = m.coord(k, axis);
      best = std::min({best, x - m.lower(axis), m.upper(axis) - x});
    }
    d[k] = best;
  }
  return d;
}

Eigen::Index StripMask::count() const {
  return static_cast<Eigen::Index>(std::count(in_strip.begin(), in_strip.end(), true));
}

StripMask strip_mask(const Mesh& m, double width) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw Error(ErrorKind::InvalidStrip, "strip width must be positive");
  const Field d = distance_field(m);
  StripMask s;
  s.width = width;
  s.in_strip.assign(static_cast<std::size_t>(m.size()), false);
  Eigen::Index complement = 0;
  for (Eigen::Index k : m.interior_nodes()) {
    if (d[k] < width)
      s.in_strip[static_cast<std::size_t>(k)] = true;
    else
      ++complement;
  }
  if (complement == 0)
    throw Error(ErrorKind::InvalidStrip,
                "strip width " + std::to_string(width) + " leaves no interior node outside the strip");
  return s;
}

std::array<Eigen::Index, 2> dilation_offset(const Mesh& m, double margin) {
  if (!(margin > 0.0) || !std::isfinite(margin))
    throw Error(ErrorKind::InvalidMesh, "dilation margin must be positive");
  std::array<Eigen::Index, 2> k{0, 0};
  for (int axis = 0; axis < m.dimension(); ++axis)
    k[axis] = std::max<Eigen::Index>(1, std::llround(margin / m.spacing(axis)));
  return k;
}

Mesh dilate(const Mesh& m, double margin) {
  const auto k = dilation_offset(m, margin);
  if (m.dimension() == 1) {
    const double h = m.spacing(0);
    return build_interval(m.lower(0) - k[0] * h, m.upper(0) + k[0] * h, m.nodes(0) + 2 * k[0]);
  }
  const double hx = m.spacing(0);
  const double hy = m.spacing(1);
  return build_box(m.lower(0) - k[0] * hx, m.upper(0) + k[0] * hx, m.lower(1) - k[1] * hy,
                   m.upper(1) + k[1] * hy, m.nodes(0) + 2 * k[0], m.nodes(1) + 2 * k[1]);
}

Field restrict_to(const Mesh& m, const Mesh& dilated, const Field& f) {
  const Eigen::Index ox = (dilated.nodes(0) - m.nodes(0)) / 2;
  const Eigen::Index oy = m.dimension() == 2 ? (dilated.nodes(1) - m.nodes(1)) / 2 : 0;
  Field r(m.size());
  const Eigen::Index ny = m.dimension() == 2 ? m.nodes(1) : 1;
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < m.nodes(0); ++i) r[m.index(i, j)] = f[dilated.index(i + ox, j + oy)];
  return r;
}

Field interior_constant(const Mesh& m, double value) {
  Field f = Field::Zero(m.size());
  for (Eigen::Index k : m.interior_nodes()) f[k] = value;
  return f;
}

double sup_norm(const Mesh& m, const Field& f) {
  double s = 0.0;
  for (Eigen::Index k : m.interior_nodes()) s = std::max(s, std::abs(f[k]));
  return s;
}

}  // namespace singsys
