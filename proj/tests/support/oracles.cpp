#include "oracles.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <vector>

namespace convexeff::testing {

namespace {

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace

// By Caratheodory it suffices to try every subset of at most d + 1 points
// and solve for barycentric weights by least squares.
bool convex_combination(const Matrix& pts, const Eigen::VectorXd& z, double tol) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index d = pts.cols();
  std::vector<Eigen::Index> idx;
  bool found = false;
  auto try_subset = [&] {
    const auto s = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd a(d + 1, s);
    for (Eigen::Index j = 0; j < s; ++j) {
      a.block(0, j, d, 1) = pts.row(idx[static_cast<std::size_t>(j)]).transpose();
      a(d, j) = 1.0;
    }
    Eigen::VectorXd b(d + 1);
    b << z, 1.0;
    const Eigen::VectorXd lambda = a.completeOrthogonalDecomposition().solve(b);
    if ((a * lambda - b).norm() <= tol && lambda.minCoeff() >= -1e-9) found = true;
  };
  auto recurse = [&](auto&& self, Eigen::Index start) -> void {
    if (found) return;
    if (!idx.empty()) try_subset();
    if (static_cast<Eigen::Index>(idx.size()) == d + 1) return;
    for (Eigen::Index i = start; i < n && !found; ++i) {
      idx.push_back(i);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  recurse(recurse, 0);
  return found;
}

Matrix random_points(Rng& rng, Eigen::Index n, int rank) {
  Matrix p(n, 3);
  Eigen::Matrix3d rot = Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized().toRotationMatrix();
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Vector3d v(rng.uniform(-10, 10), rank >= 2 ? rng.uniform(-10, 10) : 0.0, rank >= 3 ? rng.uniform(-10, 10) : 0.0);
    p.row(i) = (rot * v).transpose();
  }
  return p;
}

Reference reference(const NamingSystem& s, const MeaningModel& mm) {
  const auto n = static_cast<std::size_t>(mm.size());
  const auto k = s.word_count();
  const auto& p = mm.prior().p();
  const auto& m = mm.m();
  const auto& q = s.q();

  std::vector<double> pw(k, 0.0), pu(n, 0.0);
  std::vector<std::vector<double>> pwu(k, std::vector<double>(n, 0.0));
  double h_w_given_m = 0.0;
  double h_u_given_m = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> row(k), mrow(n);
    for (std::size_t w = 0; w < k; ++w) {
      row[w] = q(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(w));
      pw[w] += p[static_cast<Eigen::Index>(t)] * row[w];
    }
    for (std::size_t u = 0; u < n; ++u) {
      mrow[u] = m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(u));
      pu[u] += p[static_cast<Eigen::Index>(t)] * mrow[u];
      for (std::size_t w = 0; w < k; ++w) pwu[w][u] += p[static_cast<Eigen::Index>(t)] * row[w] * mrow[u];
    }
    h_w_given_m += p[static_cast<Eigen::Index>(t)] * entropy_bits(row);
    h_u_given_m += p[static_cast<Eigen::Index>(t)] * entropy_bits(mrow);
  }
  double h_u_given_w = 0.0;
  std::vector<std::vector<double>> decoder(k, std::vector<double>(n, 0.0));
  for (std::size_t w = 0; w < k; ++w) {
    if (pw[w] <= 0.0) continue;
    for (std::size_t u = 0; u < n; ++u) decoder[w][u] = pwu[w][u] / pw[w];
    h_u_given_w += pw[w] * entropy_bits(decoder[w]);
  }
  double ekl = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t w = 0; w < k; ++w) {
      const double qw = q(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(w));
      if (qw <= 0.0) continue;
      double kl = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        const double mt = m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(u));
        if (mt > 0.0) kl += mt * std::log2(mt / decoder[w][u]);
      }
      ekl += p[static_cast<Eigen::Index>(t)] * qw * kl;
    }
  }
  return Reference{entropy_bits(pw) - h_w_given_m, entropy_bits(pu) - h_u_given_w, entropy_bits(pu) - h_u_given_m,
                   ekl};
}

Matrix reference_update(const IBSolution& sol, const MeaningModel& mm) {
  const Matrix& m = mm.m();
  const Matrix& q = sol.encoder.q();
  const Vector& p = mm.prior().p();
  const Eigen::Index n = m.rows(), k = q.cols();
  Vector pw = Vector::Zero(k);
  for (Eigen::Index t = 0; t < n; ++t) pw += p[t] * q.row(t).transpose();
  Matrix dec = Matrix::Zero(k, n);
  for (Eigen::Index w = 0; w < k; ++w) {
    if (pw[w] <= 0.0) continue;
    for (Eigen::Index t = 0; t < n; ++t) dec.row(w) += p[t] * q(t, w) / pw[w] * m.row(t);
  }
  Matrix next(n, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    std::vector<double> logit(static_cast<std::size_t>(k));
    double top = -INFINITY;
    for (Eigen::Index w = 0; w < k; ++w) {
      double kl = 0.0;
      for (Eigen::Index u = 0; u < n; ++u)
        if (m(t, u) > 0.0) kl += m(t, u) * std::log(m(t, u) / dec(w, u));
      logit[static_cast<std::size_t>(w)] = pw[w] > 0.0 ? std::log(pw[w]) - sol.beta * kl : -INFINITY;
      top = std::max(top, logit[static_cast<std::size_t>(w)]);
    }
    double z = 0.0;
    for (Eigen::Index w = 0; w < k; ++w) z += next(t, w) = std::exp(logit[static_cast<std::size_t>(w)] - top);
    next.row(t) /= z;
  }
  return next;
}

}  // namespace convexeff::testing
