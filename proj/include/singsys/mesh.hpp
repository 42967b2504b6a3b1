#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "singsys/errors.hpp"

namespace singsys {

template <typename Scalar>
using FieldT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One value per mesh node, boundary nodes included. Node k of a box mesh is
/// (i, j) with k = i + nx * j.
using Field = FieldT<double>;

/// A cell face between two neighbouring nodes along one axis. The normal
/// difference is (u[hi] - u[lo]) / h; in 2-D the transverse derivative is the
/// average of the central differences at both endpoints.
struct Face {
  Eigen::Index lo = 0;
  Eigen::Index hi = 0;
  double h = 0.0;       // spacing along the normal axis
  double measure = 0.0; // quadrature weight h^dim of the dual cell
  int axis = 0;
  // Transverse stencil: {lo+, lo-, hi+, hi-} with derivative
  // (u[t0] - u[t1] + u[t2] - u[t3]) / (4 h_t). Unused in 1-D.
  std::array<Eigen::Index, 4> transverse{};
  double h_transverse = 0.0;
};

class Mesh {
 public:
  /// Empty placeholder; use build_interval / build_box.
  Mesh() = default;

  int dimension() const { return dim_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(boundary_.size()); }
  Eigen::Index interior_count() const { return interior_count_; }

  Eigen::Index nodes(int axis) const { return n_[axis]; }
  double lower(int axis) const { return lo_[axis]; }
  double upper(int axis) const { return hi_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double extent(int axis) const { return hi_[axis] - lo_[axis]; }
  double min_extent() const;

  /// h^dim, the quadrature weight of one node.
  double cell_measure() const;

  double coord(Eigen::Index node, int axis) const;
  bool on_boundary(Eigen::Index node) const { return boundary_[node]; }
  /// Position of the node among interior unknowns, or -1 on the boundary.
  Eigen::Index interior_index(Eigen::Index node) const { return interior_index_[node]; }
  const std::vector<Eigen::Index>& interior_nodes() const { return interior_nodes_; }
  const std::vector<Face>& faces() const { return faces_; }

  /// Node index on a box mesh; in 1-D only i is used.
  Eigen::Index index(Eigen::Index i, Eigen::Index j = 0) const { return i + n_[0] * j; }

  friend Mesh build_interval(double a, double b, Eigen::Index n);
  friend Mesh build_box(double ax, double bx, double ay, double by, Eigen::Index nx,
                        Eigen::Index ny);

 private:
  void finalize();

  int dim_ = 1;
  std::array<Eigen::Index, 2> n_{1, 1};
  std::array<double, 2> lo_{0.0, 0.0};
  std::array<double, 2> hi_{0.0, 0.0};
  std::array<double, 2> h_{0.0, 0.0};
  std::vector<bool> boundary_;
  std::vector<Eigen::Index> interior_index_;
  std::vector<Eigen::Index> interior_nodes_;
  std::vector<Face> faces_;
  Eigen::Index interior_count_ = 0;
};

Mesh build_interval(double a, double b, Eigen::Index n);
Mesh build_box(double ax, double bx, double ay, double by, Eigen::Index nx, Eigen::Index ny);

/// Exact distance to the boundary of the interval or box.
Field distance_field(const Mesh& m);

struct StripMask {
  std::vector<bool> in_strip;  // d(x) < width, interior nodes only
  double width = 0.0;

  bool operator[](Eigen::Index node) const { return in_strip[static_cast<std::size_t>(node)]; }
  Eigen::Index count() const;
};

StripMask strip_mask(const Mesh& m, double width);

/// Extends every axis by `margin` on both ends. The margin is snapped to the
/// nearest positive multiple of the spacing so original nodes embed exactly.
Mesh dilate(const Mesh& m, double margin);

/// Number of spacings the snapped margin of `dilate` adds per side and axis.
std::array<Eigen::Index, 2> dilation_offset(const Mesh& m, double margin);

/// Restriction of a field on `dilated` (built by dilate(m, margin)) to m.
Field restrict_to(const Mesh& m, const Mesh& dilated, const Field& f);

/// Zero on boundary nodes, `value` on interior ones.
Field interior_constant(const Mesh& m, double value);

double sup_norm(const Mesh& m, const Field& f);  // interior nodes only

}  // namespace singsys
