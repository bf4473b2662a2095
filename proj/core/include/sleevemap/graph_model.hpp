#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sleevemap/geometry.hpp"

namespace sleevemap {

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

struct NodeRecord {
  std::string id;
  Point center;
  Rect box;
  std::string label;
  Point size;  // declared width and height; taken from `box` when left at zero
};

struct EdgeRecord {
  NodeIndex source = 0;
  NodeIndex target = 0;
  std::string label;
};

/// Immutable laid-out input graph. Node boxes are pairwise disjoint.
struct LaidOutGraph {
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  Rect bounds = Rect::empty();

  std::size_t nodeCount() const { return nodes.size(); }
  std::size_t edgeCount() const { return edges.size(); }
  double averageNodeWidth() const;
  double averageNodeHeight() const;
};

enum class GraphFormat { Json, Dot };

/// Parse failure with a location ("line 3", "nodes[4]", ...) in the message.
class GraphError : public std::runtime_error {
 public:
  enum class Kind { Malformed, DuplicateId, UnresolvedEndpoint, Overlap, SelfLoop };
  GraphError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ParseOptions {
  double defaultWidth = 1.0;
  double defaultHeight = 1.0;
  /// Receives one line per ignored DOT attribute or statement.
  std::vector<std::string>* warnings = nullptr;
};

LaidOutGraph parseGraph(std::string_view text, GraphFormat format, const ParseOptions& options = {});

/// Reads and parses a file; the format is taken from the extension unless given.
LaidOutGraph loadGraph(const std::string& path, const ParseOptions& options = {});

/// Canonical JSON form; parse(serialize(g)) reproduces g.
std::string serializeGraph(const LaidOutGraph& g);

/// Builds a validated graph from records; shared by the parsers and by fixtures.
LaidOutGraph makeGraph(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges);

/// Throws GraphError::Overlap when two boxes overlap or touch.
void validateDisjointBoxes(const LaidOutGraph& g);

struct ObstacleSet {
  std::vector<ConvexPolygon> polygons;  // same order as the nodes
  std::vector<double> padding;          // effective padding per node
  std::vector<std::string> warnings;
};

inline constexpr int kDefaultCornerCut = 1;

/// 0.25 x average node half-height.
double defaultPadding(const LaidOutGraph& g);

/// One padded polygon per box. Padding is shrunk per pair so that neighbours
/// stay disjoint; every shrink is reported in `warnings`.
ObstacleSet buildObstacles(std::span<const Rect> boxes, std::span<const double> padding,
                           int cornerCut = kDefaultCornerCut);
ObstacleSet buildObstacles(const LaidOutGraph& g, double padding, int cornerCut = kDefaultCornerCut);

/// Candidate box pairs whose separation is below `reach`, found with a sweep on x.
std::vector<std::pair<std::size_t, std::size_t>> nearbyBoxPairs(std::span<const Rect> boxes,
                                                                double reach);

}  // namespace sleevemap
