#pragma once

#include <cstddef>
#include <vector>

#include "sleevemap/graph_model.hpp"
#include "sleevemap/sleeve_router.hpp"

namespace sleevemap {

struct EdgeQuality {
  EdgeIndex edge = 0;
  RouteKind kind = RouteKind::Straight;
  double routeLength = 0.0;    // center to center, before trimming
  double optimalLength = 0.0;  // visibility-graph shortest path between the same centers
  double ratio = 1.0;
};

struct QualityReport {
  std::vector<EdgeQuality> edges;  // edge order
  double meanRatio = 1.0;
  double maxRatio = 1.0;
  std::size_t failures = 0;
  RoutingStats routing;
};

/// Routes every edge of g and compares each route against the visibility optimum
/// over the same obstacles. Padding <= 0 picks defaultPadding(g).
QualityReport measureRouteQuality(const LaidOutGraph& g, double padding, const RouterOptions& options);

}  // namespace sleevemap
