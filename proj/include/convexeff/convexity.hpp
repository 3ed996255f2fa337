#pragma once

// Convexity consistency of hard partitions: each category's extension size
// relative to the number of universe referents inside its convex hull, and
// the extension-weighted average over categories.

#include "convexeff/core.hpp"

#include <vector>

namespace convexeff {

struct ConvexityOptions {
  // Whether achromatic (grid column 0) referents take part. Only meaningful
  // for universes with grid positions.
  bool include_achromatic = true;
};

// |C(w)| / |co(C(w))|, counting universe referents in the hull. Throws
// InvalidArgument for an empty extension.
double category_consistency(const HardPartition& partition, int word, const Universe& universe,
                            const ConvexityOptions& options = {});

// sum_w |C(w)| * (|C(w)| / |co(C(w))|) / sum_w |C(w)|.
double system_consistency(const HardPartition& partition, const Universe& universe,
                          const ConvexityOptions& options = {});

}  // namespace convexeff
