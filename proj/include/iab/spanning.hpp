#pragma once

#include "iab/forest.hpp"
#include "iab/network.hpp"
#include "iab/rng.hpp"
#include "iab/walks.hpp"

namespace iab {

// Classic Aldous-Broder: walk from `root` until every vertex has been visited
// and keep the reversed first-entry edges. Throws StepCapError if the walk
// does not cover the network within `step_cap` steps.
OrientedForest aldous_broder(const Network& net, VertexId root, Rng& rng, std::size_t step_cap = kDefaultStepCap);

// Wilson's algorithm rooted at `root`, scanning the remaining vertices in
// ascending id order.
OrientedForest wilson(const Network& net, VertexId root, Rng& rng);

}  // namespace iab
