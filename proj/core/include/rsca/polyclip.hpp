#pragma once

#include <span>
#include <vector>

#include "rsca/geometry.hpp"

namespace rsca {

enum class FillRule { EvenOdd, NonZero, Positive };
enum class BoolOp { Union, Intersection, Difference, Xor };

struct Region {
  std::vector<Ring> outers;  ///< counter-clockwise
  std::vector<Ring> holes;   ///< clockwise
};

// Boolean operations on sets of rings. All edges are split at their mutual
// intersections, each resulting sub-edge is classified by the winding
// numbers of the two ring sets just left and right of it, and the sub-edges
// separating inside from outside are chained back into rings.

Region boolean_op(std::span<const Ring> subject, std::span<const Ring> clip, BoolOp op,
                  FillRule rule = FillRule::NonZero);

/// Area of the boolean result, summed directly over the boundary sub-edges.
double boolean_area(std::span<const Ring> subject, std::span<const Ring> clip, BoolOp op,
                    FillRule rule = FillRule::NonZero);

/// Region covered by `rings` under `rule`.
Region resolve(std::span<const Ring> rings, FillRule rule);

}  // namespace rsca
