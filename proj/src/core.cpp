#include "convexeff/core.hpp"

#include "convexeff/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace convexeff {

namespace {

constexpr int kGridRows = 10;
constexpr int kGridCols = 41;

void check_stochastic_rows(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw InvalidArgument(std::string(what) + ": empty matrix");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << ": entry (" << r << ", " << c << ") = " << v << " is not a probability";
        throw InvalidArgument(os.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      std::ostringstream os;
      os << what << ": row " << r << " sums to " << sum;
      throw InvalidArgument(os.str());
    }
  }
}

}  // namespace

Universe::Universe(Matrix coords, std::vector<std::optional<GridPos>> grid)
    : coords_(std::move(coords)), grid_(std::move(grid)) {
  if (coords_.rows() == 0 || coords_.cols() == 0) {
    throw InvalidArgument("Universe: needs at least one referent with a coordinate");
  }
  if (!coords_.allFinite()) throw InvalidArgument("Universe: non-finite coordinate");
  scale_ = std::max(1.0, coords_.cwiseAbs().maxCoeff());

  if (grid_.empty()) return;
  if (grid_.size() != size()) {
    throw InvalidArgument("Universe: grid positions must be given for every referent or none");
  }
  grid_index_.assign(kGridRows * kGridCols, -1);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!grid_[i]) continue;
    const GridPos g = *grid_[i];
    if (g.row < 0 || g.row >= kGridRows || g.col < 0 || g.col >= kGridCols) {
      throw InvalidArgument("Universe: grid position out of range for referent " + std::to_string(i));
    }
    auto& slot = grid_index_[static_cast<std::size_t>(g.row * kGridCols + g.col)];
    if (slot != -1) {
      throw InvalidArgument("Universe: duplicate grid position for referent " + std::to_string(i));
    }
    slot = static_cast<std::ptrdiff_t>(i);
  }
}

std::optional<std::size_t> Universe::at(GridPos pos) const {
  if (grid_index_.empty() || pos.row < 0 || pos.row >= kGridRows || pos.col < 0 || pos.col >= kGridCols) {
    return std::nullopt;
  }
  const auto slot = grid_index_[static_cast<std::size_t>(pos.row * kGridCols + pos.col)];
  if (slot < 0) return std::nullopt;
  return static_cast<std::size_t>(slot);
}

Prior::Prior(Vector p) : p_(std::move(p)) {
  if (p_.size() == 0) throw InvalidArgument("Prior: empty");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0) || !std::isfinite(p_[i])) throw InvalidArgument("Prior: negative or non-finite entry");
    sum += p_[i];
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw InvalidArgument("Prior: entries sum to " + std::to_string(sum));
  }
}

Prior Prior::uniform(std::size_t n) {
  if (n == 0) throw InvalidArgument("Prior: empty");
  return Prior(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

Prior Prior::from_weights(const Vector& w) {
  if (w.size() == 0) throw InvalidArgument("Prior: empty");
  if ((w.array() < 0.0).any() || !w.allFinite()) throw InvalidArgument("Prior: negative or non-finite weight");
  const double total = w.sum();
  if (!(total > 0.0)) throw InvalidArgument("Prior: weights sum to zero");
  return Prior(w / total);
}

MeaningModel::MeaningModel(Matrix m, Prior prior) : m_(std::move(m)), prior_(std::move(prior)) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("MeaningModel: meaning matrix must be square");
  if (static_cast<std::size_t>(m_.rows()) != prior_.size()) {
    throw InvalidArgument("MeaningModel: prior size does not match the meaning matrix");
  }
  check_stochastic_rows(m_, "MeaningModel");
}

NamingSystem::NamingSystem(Matrix q, std::vector<std::string> words) : q_(std::move(q)), words_(std::move(words)) {
  check_stochastic_rows(q_, "NamingSystem");
  if (words_.empty()) {
    words_.reserve(static_cast<std::size_t>(q_.cols()));
    for (Eigen::Index w = 0; w < q_.cols(); ++w) words_.push_back(std::to_string(w));
  } else if (words_.size() != static_cast<std::size_t>(q_.cols())) {
    throw InvalidArgument("NamingSystem: word list does not match the number of columns");
  }
}

HardPartition::HardPartition(const std::vector<int>& assign, std::vector<std::string> words) {
  if (assign.empty()) throw InvalidArgument("HardPartition: no referents");
  const int max_word = *std::max_element(assign.begin(), assign.end());
  if (*std::min_element(assign.begin(), assign.end()) < 0) {
    throw InvalidArgument("HardPartition: negative word index");
  }
  if (!words.empty() && static_cast<int>(words.size()) <= max_word) {
    throw InvalidArgument("HardPartition: word index beyond the word list");
  }
  const std::size_t listed = words.empty() ? static_cast<std::size_t>(max_word) + 1 : words.size();

  std::vector<int> remap(listed, -1);
  for (int w : assign) remap[static_cast<std::size_t>(w)] = 0;
  int next = 0;
  for (std::size_t w = 0; w < listed; ++w) {
    if (remap[w] < 0) continue;
    remap[w] = next++;
    words_.push_back(words.empty() ? std::to_string(w) : words[w]);
  }
  assign_.reserve(assign.size());
  for (int w : assign) assign_.push_back(remap[static_cast<std::size_t>(w)]);
}

int HardPartition::word_index(const std::string& label) const {
  auto it = std::find(words_.begin(), words_.end(), label);
  if (it == words_.end()) throw InvalidArgument("HardPartition: unknown word '" + label + "'");
  return static_cast<int>(it - words_.begin());
}

NamingSystem HardPartition::to_system() const {
  Matrix q = Matrix::Zero(static_cast<Eigen::Index>(assign_.size()), static_cast<Eigen::Index>(words_.size()));
  for (std::size_t t = 0; t < assign_.size(); ++t) q(static_cast<Eigen::Index>(t), assign_[t]) = 1.0;
  return NamingSystem(std::move(q), words_);
}

HardPartition mode_partition(const NamingSystem& system) {
  const Matrix& q = system.q();
  std::vector<int> assign(system.referents());
  for (Eigen::Index t = 0; t < q.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index w = 1; w < q.cols(); ++w) {
      if (q(t, w) > q(t, best)) best = w;
    }
    assign[static_cast<std::size_t>(t)] = static_cast<int>(best);
  }
  return HardPartition(assign, system.words());
}

std::vector<std::size_t> category_extension(const HardPartition& partition, int word) {
  if (word < 0 || static_cast<std::size_t>(word) >= partition.word_count()) {
    throw InvalidArgument("category_extension: unknown word index " + std::to_string(word));
  }
  std::vector<std::size_t> out;
  const auto& assign = partition.assign();
  for (std::size_t t = 0; t < assign.size(); ++t) {
    if (assign[t] == word) out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> category_extension(const HardPartition& partition, const std::string& word) {
  return category_extension(partition, partition.word_index(word));
}

std::size_t count_major_categories(const NamingSystem& system) {
  return mode_partition(system).word_count();
}

}  // namespace convexeff
