#pragma once

#include <cstddef>
#include <span>

namespace cnls {

/// Pairwise (tree) summation with a fixed split order. The result depends only
/// on the input values, never on scheduling.
double pairwise_sum(std::span<const double> values);

}  // namespace cnls
