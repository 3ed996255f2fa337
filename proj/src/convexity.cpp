#include "convexeff/convexity.hpp"

#include "convexeff/error.hpp"
#include "convexeff/hull.hpp"
#include "convexeff/wcs.hpp"

namespace convexeff {

namespace {

std::vector<bool> participation_mask(const Universe& universe, const ConvexityOptions& options) {
  std::vector<bool> mask(universe.size(), true);
  if (!options.include_achromatic && universe.has_grid()) {
    for (std::size_t i = 0; i < universe.size(); ++i) mask[i] = !wcs::is_achromatic(universe, i);
  }
  return mask;
}

// (extension size, hull count) for one word under the mask.
std::pair<std::size_t, std::size_t> extension_and_hull(const std::vector<std::size_t>& members, const Universe& universe,
                                                       const std::vector<bool>& mask) {
  std::vector<std::size_t> kept;
  kept.reserve(members.size());
  for (std::size_t i : members)
    if (mask[i]) kept.push_back(i);
  if (kept.empty()) return {0, 0};
  const Hull hull = convex_hull(select_rows(universe.coords(), kept));
  return {kept.size(), hull_membership_count(hull, universe, mask)};
}

}  // namespace

double category_consistency(const HardPartition& partition, int word, const Universe& universe,
                            const ConvexityOptions& options) {
  if (partition.size() != universe.size()) throw InvalidArgument("category_consistency: size mismatch");
  const auto members = category_extension(partition, word);
  const auto mask = participation_mask(universe, options);
  const auto [size, hull_count] = extension_and_hull(members, universe, mask);
  if (size == 0) throw InvalidArgument("category_consistency: empty extension");
  return static_cast<double>(size) / static_cast<double>(hull_count);
}

double system_consistency(const HardPartition& partition, const Universe& universe, const ConvexityOptions& options) {
  if (partition.size() != universe.size()) throw InvalidArgument("system_consistency: size mismatch");
  const auto mask = participation_mask(universe, options);
  std::vector<std::vector<std::size_t>> members(partition.word_count());
  for (std::size_t i = 0; i < partition.size(); ++i)
    members[static_cast<std::size_t>(partition.assign()[i])].push_back(i);

  double weighted = 0.0;
  double total = 0.0;
  for (const auto& m : members) {
    const auto [size, hull_count] = extension_and_hull(m, universe, mask);
    if (size == 0) continue;
    const double s = static_cast<double>(size);
    weighted += s * (s / static_cast<double>(hull_count));
    total += s;
  }
  if (total == 0.0) throw InvalidArgument("system_consistency: no participating referents");
  return weighted / total;
}

}  // namespace convexeff
