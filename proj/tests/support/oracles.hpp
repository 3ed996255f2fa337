#pragma once

// Brute-force reference computations used as independent oracles by the unit
// tests and the acceptance suite.

#include "convexeff/core.hpp"
#include "convexeff/ib.hpp"
#include "convexeff/rng.hpp"

namespace convexeff::testing {

// Is z a convex combination of the rows of pts, up to `tol` residual?
bool convex_combination(const Matrix& pts, const Eigen::VectorXd& z, double tol);

// n random points in R^3 whose affine span has the given rank (1..3).
Matrix random_points(Rng& rng, Eigen::Index n, int rank);

// Information quantities in bits, written out with plain loops as entropy
// differences.
struct Reference {
  double complexity, accuracy, meaning_info, expected_kl;
};
Reference reference(const NamingSystem& s, const MeaningModel& mm);

// One encoder update from a solution, written directly from the
// self-consistent form q(w|t) = q(w) exp(-beta KL[m_t || m_hat_w]) / Z_t.
Matrix reference_update(const IBSolution& sol, const MeaningModel& mm);

}  // namespace convexeff::testing
