#include "sleevemap/quality.hpp"

#include <algorithm>
#include <map>

#include "sleevemap/oracle.hpp"
#include "sleevemap/parallel.hpp"

namespace sleevemap {

QualityReport measureRouteQuality(const LaidOutGraph& g, double padding, const RouterOptions& options) {
  if (padding <= 0.0) padding = defaultPadding(g);
  const auto obstacles = buildObstacles(g, padding);
  const auto scene = makeRoutingScene(g, obstacles);
  auto routed = routeAll(scene, edgePairs(g), options);

  QualityReport out;
  out.routing = routed.stats;
  out.failures = routed.stats.failures;
  out.edges.resize(routed.routes.size());
  if (routed.routes.empty()) return out;

  std::map<NodeIndex, std::vector<EdgeIndex>> bySource;
  for (const auto& r : routed.routes) bySource[r.source].push_back(r.edge);
  std::vector<std::pair<NodeIndex, std::vector<EdgeIndex>>> groups(bySource.begin(), bySource.end());

  const VisibilityOracle oracle(obstacles.polygons, scene.centers);
  parallelFor(groups.size(), options.threads, [&](std::size_t, std::size_t i) {
    const auto& [s, edges] = groups[i];
    std::vector<std::size_t> targets;
    for (EdgeIndex e : edges) targets.push_back(routed.routes[e].target);
    const auto lengths = oracle.lengthsFrom(s, targets);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Route& r = routed.routes[edges[k]];
      EdgeQuality& q = out.edges[r.edge];
      q.edge = r.edge;
      q.kind = r.kind;
      q.routeLength = r.centerline.length();
      q.optimalLength = lengths[k];
      q.ratio = lengths[k] > 0.0 ? q.routeLength / lengths[k] : 1.0;
    }
  });

  double sum = 0.0;
  out.maxRatio = 0.0;
  for (const auto& q : out.edges) {
    sum += q.ratio;
    out.maxRatio = std::max(out.maxRatio, q.ratio);
  }
  out.meanRatio = sum / static_cast<double>(out.edges.size());
  return out;
}

}  // namespace sleevemap
