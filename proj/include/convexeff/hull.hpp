#pragma once

// Convex hulls of finite point sets in R^d (d <= 3) with point membership.
//
// Points are first reduced to their affine span. Rank 0 is a point, rank 1 a
// segment, rank 2 a convex polygon and rank 3 a polytope built by quickhull.
// Membership of a query point z requires (a) its distance to the affine span
// and (b) its signed distance to every supporting half-space inside the span
// to be at most the tolerance.

#include "convexeff/core.hpp"

#include <cstddef>
#include <vector>

namespace convexeff {

class Hull {
 public:
  // Supporting half-space {y : normal . y <= offset} in span coordinates.
  struct HalfSpace {
    Eigen::VectorXd normal;
    double offset = 0.0;
  };

  int rank() const { return rank_; }
  int dim() const { return static_cast<int>(origin_.size()); }
  // Indices (into the input) of the hull's extreme points.
  const std::vector<std::size_t>& vertices() const { return vertices_; }
  // Facets for rank 3, edges for rank 2, the two endpoints for rank 1.
  const std::vector<HalfSpace>& facets() const { return facets_; }
  // max(1, largest absolute input coordinate).
  double scale() const { return scale_; }

  // Boundary-inclusive membership with an absolute tolerance.
  bool contains(const Eigen::VectorXd& z, double tolerance) const;
  // Same, with tolerance 1e-7 * scale().
  bool contains(const Eigen::VectorXd& z) const { return contains(z, kRelativeTolerance * scale_); }

  static constexpr double kRelativeTolerance = 1e-7;

 private:
  friend Hull convex_hull(const Matrix& points);

  int rank_ = 0;
  Eigen::VectorXd origin_;
  Eigen::MatrixXd basis_;  // d x rank, orthonormal columns
  std::vector<std::size_t> vertices_;
  std::vector<HalfSpace> facets_;
  double scale_ = 1.0;
};

// `points` holds one point per row.
Hull convex_hull(const Matrix& points);

// Rows of `coords` selected by `indices`.
Matrix select_rows(const Matrix& coords, const std::vector<std::size_t>& indices);

// Universe referents inside the hull, tolerance 1e-7 * universe scale.
std::size_t hull_membership_count(const Hull& hull, const Universe& universe);
// Restricted to referents with mask[i] true.
std::size_t hull_membership_count(const Hull& hull, const Universe& universe, const std::vector<bool>& mask);

}  // namespace convexeff
