#pragma once

#include "hlab/pathgroupoid.hpp"

namespace hlab {

/// r self-loop petals at vertex 0 in the plane; petal k is the unit circle
/// through the origin centred at angle 2 pi k / r. Edge ids 1..r.
Graph flower_graph(int petals, int samples = 65);

/// Cycle 0 -> 1 -> ... -> n-1 -> 0 on the unit circle, straight edges 1..n.
Graph cycle_graph(int n);

}  // namespace hlab
