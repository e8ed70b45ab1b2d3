#pragma once

#include "swl/singular.hpp"
#include "swl/weight.hpp"

namespace swl {

/// d = 2 support picture: node outlines, J-cubes, chosen vertices, cone rays.
std::string support_svg(const WeightTree& tree);

/// Ratio-vs-N line chart, one polyline per generation.
struct RatioTrendSeries {
  int generation;
  std::vector<std::pair<double, double>> points;  // (N, min ratio)
};
std::string ratio_trend_svg(const std::vector<RatioTrendSeries>& series);

}  // namespace swl
