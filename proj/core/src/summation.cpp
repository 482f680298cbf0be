#include "cnls/summation.hpp"

namespace cnls {

namespace {

constexpr std::size_t kLeafSize = 16;

double sum_range(const double* data, std::size_t n) {
  if (n <= kLeafSize) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return sum_range(data, half) + sum_range(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return sum_range(values.data(), values.size());
}

}  // namespace cnls
