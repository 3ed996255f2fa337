#include "convexeff/hull.hpp"

#include "convexeff/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace convexeff {

namespace {

using Vec3 = Eigen::Vector3d;

// Quickhull over points in general 3D position (rank already known to be 3).
class QuickHull3 {
 public:
  QuickHull3(const std::vector<Vec3>& pts, double eps) : pts_(pts), eps_(eps) {}

  // Returns the outward-oriented triangular faces as half-spaces plus the
  // vertex indices they use.
  void run(std::vector<Hull::HalfSpace>& facets, std::vector<std::size_t>& vertices) {
    initial_simplex();
    while (true) {
      const int f = next_face_with_outside();
      if (f < 0) break;
      add_point(f);
    }
    std::vector<char> used(pts_.size(), 0);
    for (const auto& face : faces_) {
      if (!face.alive) continue;
      Hull::HalfSpace h;
      h.normal = face.n;
      h.offset = face.d;
      facets.push_back(std::move(h));
      for (int v : face.v) used[static_cast<std::size_t>(v)] = 1;
    }
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i]) vertices.push_back(i);
  }

 private:
  struct Face {
    std::array<int, 3> v{};
    Vec3 n = Vec3::Zero();
    double d = 0.0;
    std::vector<int> outside;
    bool alive = true;
  };

  double dist(const Face& f, int p) const { return f.n.dot(pts_[static_cast<std::size_t>(p)]) - f.d; }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    const Vec3& pa = pts_[static_cast<std::size_t>(a)];
    const Vec3& pb = pts_[static_cast<std::size_t>(b)];
    const Vec3& pc = pts_[static_cast<std::size_t>(c)];
    // Cross product of the two edges leaving the vertex opposite the longest
    // edge keeps slivers better conditioned.
    Vec3 n = (pb - pa).cross(pc - pa);
    const Vec3 n2 = (pc - pb).cross(pa - pb);
    const Vec3 n3 = (pa - pc).cross(pb - pc);
    if (n2.squaredNorm() > n.squaredNorm()) n = n2;
    if (n3.squaredNorm() > n.squaredNorm()) n = n3;
    const double len = n.norm();
    f.n = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    f.d = f.n.dot((pa + pb + pc) / 3.0);
    faces_.push_back(std::move(f));
    const int id = static_cast<int>(faces_.size()) - 1;
    edges_[{a, b}] = id;
    edges_[{b, c}] = id;
    edges_[{c, a}] = id;
    return id;
  }

  void kill_face(int id) {
    auto& f = faces_[static_cast<std::size_t>(id)];
    f.alive = false;
    for (int e = 0; e < 3; ++e) {
      const auto key = std::make_pair(f.v[static_cast<std::size_t>(e)], f.v[static_cast<std::size_t>((e + 1) % 3)]);
      const auto it = edges_.find(key);
      if (it != edges_.end() && it->second == id) edges_.erase(it);
    }
  }

  void initial_simplex() {
    const int n = static_cast<int>(pts_.size());
    auto P = [&](int i) -> const Vec3& { return pts_[static_cast<std::size_t>(i)]; };
    int i0 = 0;
    for (int i = 1; i < n; ++i)
      if (P(i).x() < P(i0).x()) i0 = i;
    int i1 = i0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = (P(i) - P(i0)).squaredNorm();
      if (d > best) best = d, i1 = i;
    }
    const Vec3 dir = (P(i1) - P(i0)).normalized();
    int i2 = i0;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 r = P(i) - P(i0);
      const double d = (r - r.dot(dir) * dir).squaredNorm();
      if (d > best) best = d, i2 = i;
    }
    const Vec3 nrm = (P(i1) - P(i0)).cross(P(i2) - P(i0)).normalized();
    int i3 = i0;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(nrm.dot(P(i) - P(i0)));
      if (d > best) best = d, i3 = i;
    }
    if (nrm.dot(P(i3) - P(i0)) > 0.0) std::swap(i1, i2);

    const std::array<std::array<int, 3>, 4> tris = {{{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i2, i3, i0}}};
    std::vector<int> ids;
    for (const auto& t : tris) ids.push_back(make_face(t[0], t[1], t[2]));

    for (int p = 0; p < n; ++p) {
      if (p == i0 || p == i1 || p == i2 || p == i3) continue;
      assign(p, ids);
    }
  }

  void assign(int p, const std::vector<int>& candidates) {
    int best_face = -1;
    double best = eps_;
    for (int id : candidates) {
      const double d = dist(faces_[static_cast<std::size_t>(id)], p);
      if (d > best) best = d, best_face = id;
    }
    if (best_face >= 0) faces_[static_cast<std::size_t>(best_face)].outside.push_back(p);
  }

  int next_face_with_outside() {
    for (; cursor_ < faces_.size(); ++cursor_) {
      const auto& f = faces_[cursor_];
      if (f.alive && !f.outside.empty()) return static_cast<int>(cursor_);
    }
    return -1;
  }

  void add_point(int start) {
    Face& sf = faces_[static_cast<std::size_t>(start)];
    int apex = sf.outside.front();
    double far = dist(sf, apex);
    for (int p : sf.outside) {
      const double d = dist(sf, p);
      if (d > far) far = d, apex = p;
    }

    // Visible region by flood fill from the start face.
    std::vector<int> visible{start};
    std::vector<char> mark(faces_.size(), 0);
    mark[static_cast<std::size_t>(start)] = 1;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Face& f = faces_[static_cast<std::size_t>(visible[q])];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[static_cast<std::size_t>(e)];
        const int b = f.v[static_cast<std::size_t>((e + 1) % 3)];
        const auto it = edges_.find({b, a});
        if (it == edges_.end()) continue;
        const int g = it->second;
        if (mark[static_cast<std::size_t>(g)]) continue;
        if (dist(faces_[static_cast<std::size_t>(g)], apex) > eps_) {
          mark[static_cast<std::size_t>(g)] = 1;
          visible.push_back(g);
        } else {
          mark[static_cast<std::size_t>(g)] = 2;
        }
      }
    }

    std::vector<std::pair<int, int>> horizon;
    std::vector<int> orphans;
    for (int id : visible) {
      const Face& f = faces_[static_cast<std::size_t>(id)];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[static_cast<std::size_t>(e)];
        const int b = f.v[static_cast<std::size_t>((e + 1) % 3)];
        const auto it = edges_.find({b, a});
        if (it == edges_.end() || mark[static_cast<std::size_t>(it->second)] != 1) horizon.emplace_back(a, b);
      }
      for (int p : f.outside)
        if (p != apex) orphans.push_back(p);
    }
    for (int id : visible) {
      faces_[static_cast<std::size_t>(id)].outside.clear();
      kill_face(id);
    }
    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& [a, b] : horizon) created.push_back(make_face(a, b, apex));
    for (int p : orphans) assign(p, created);
    cursor_ = 0;
  }

  const std::vector<Vec3>& pts_;
  double eps_;
  std::vector<Face> faces_;
  std::map<std::pair<int, int>, int> edges_;
  std::size_t cursor_ = 0;
};

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

Matrix select_rows(const Matrix& coords, const std::vector<std::size_t>& indices) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), coords.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = coords.row(static_cast<Eigen::Index>(indices[i]));
  return out;
}

Hull convex_hull(const Matrix& points) {
  if (points.rows() == 0) throw InvalidArgument("convex_hull: need at least one point");
  if (points.cols() < 1 || points.cols() > 3) throw InvalidArgument("convex_hull: dimension must be 1..3");
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();

  Hull h;
  h.scale_ = std::max(1.0, points.cwiseAbs().maxCoeff());
  const double tol = Hull::kRelativeTolerance * h.scale_;
  h.origin_ = points.colwise().mean().transpose();
  const Eigen::MatrixXd centered = points.rowwise() - h.origin_.transpose();

  // Smallest affine span keeping every input point within tol / 2.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
  const Eigen::MatrixXd& V = svd.matrixV();
  int rank = static_cast<int>(d);
  for (int r = 0; r <= d; ++r) {
    const Eigen::MatrixXd basis = V.leftCols(r);
    const Eigen::MatrixXd resid = centered - (centered * basis) * basis.transpose();
    const double worst = resid.rowwise().norm().maxCoeff();
    if (worst <= 0.5 * tol) {
      rank = r;
      break;
    }
  }
  h.rank_ = rank;
  h.basis_ = V.leftCols(rank);
  const Eigen::MatrixXd local = centered * h.basis_;  // n x rank

  if (rank == 0) {
    h.vertices_ = {0};
    return h;
  }
  if (rank == 1) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (local(i, 0) < local(lo, 0)) lo = i;
      if (local(i, 0) > local(hi, 0)) hi = i;
    }
    h.vertices_ = {static_cast<std::size_t>(std::min(lo, hi)), static_cast<std::size_t>(std::max(lo, hi))};
    h.facets_.push_back({Eigen::VectorXd::Constant(1, 1.0), local(hi, 0)});
    h.facets_.push_back({Eigen::VectorXd::Constant(1, -1.0), -local(lo, 0)});
    return h;
  }
  if (rank == 2) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto pt = [&](Eigen::Index i) { return Eigen::Vector2d(local(i, 0), local(i, 1)); };
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return local(a, 0) < local(b, 0) || (local(a, 0) == local(b, 0) && local(a, 1) < local(b, 1));
    });
    std::vector<Eigen::Index> chain(static_cast<std::size_t>(2 * n));
    std::size_t k = 0;
    for (Eigen::Index i : order) {
      while (k >= 2 && cross2(pt(chain[k - 2]), pt(chain[k - 1]), pt(i)) <= 0.0) --k;
      chain[k++] = i;
    }
    for (std::size_t j = order.size() - 1, lower = k + 1; j-- > 0;) {
      const Eigen::Index i = order[j];
      while (k >= lower && cross2(pt(chain[k - 2]), pt(chain[k - 1]), pt(i)) <= 0.0) --k;
      chain[k++] = i;
    }
    chain.resize(k - 1);  // counter-clockwise, last point repeats the first
    for (std::size_t j = 0; j < chain.size(); ++j) {
      const Eigen::Vector2d a = pt(chain[j]);
      const Eigen::Vector2d b = pt(chain[(j + 1) % chain.size()]);
      const Eigen::Vector2d e = b - a;
      const double len = e.norm();
      if (len == 0.0) continue;
      Eigen::VectorXd nrm(2);
      nrm << e.y() / len, -e.x() / len;
      h.facets_.push_back({nrm, nrm.dot(a)});
      h.vertices_.push_back(static_cast<std::size_t>(chain[j]));
    }
    std::sort(h.vertices_.begin(), h.vertices_.end());
    return h;
  }

  std::vector<Vec3> pts(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = Vec3(local(i, 0), local(i, 1), local(i, 2));
  QuickHull3 qh(pts, 1e-3 * tol);
  std::vector<Hull::HalfSpace> facets;
  qh.run(facets, h.vertices_);
  h.facets_ = std::move(facets);
  return h;
}

bool Hull::contains(const Eigen::VectorXd& z, double tolerance) const {
  if (z.size() != origin_.size()) throw InvalidArgument("Hull::contains: dimension mismatch");
  const Eigen::VectorXd centered = z - origin_;
  const Eigen::VectorXd local = basis_.transpose() * centered;
  const double off_span = (centered - basis_ * local).norm();
  if (off_span > tolerance) return false;
  for (const auto& f : facets_) {
    if (f.normal.dot(local) - f.offset > tolerance) return false;
  }
  return true;
}

std::size_t hull_membership_count(const Hull& hull, const Universe& universe) {
  return hull_membership_count(hull, universe, std::vector<bool>(universe.size(), true));
}

std::size_t hull_membership_count(const Hull& hull, const Universe& universe, const std::vector<bool>& mask) {
  if (mask.size() != universe.size()) throw InvalidArgument("hull_membership_count: mask size mismatch");
  const double tol = Hull::kRelativeTolerance * universe.coordinate_scale();
  std::size_t count = 0;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (mask[i] && hull.contains(universe.point(i), tol)) ++count;
  }
  return count;
}

}  // namespace convexeff
