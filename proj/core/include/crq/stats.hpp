#pragma once

#include <span>

namespace crq {

/// Ordinary least-squares slope of y against x. NaN for fewer than two points or
/// degenerate x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace crq
