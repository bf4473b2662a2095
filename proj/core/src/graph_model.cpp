#include "sleevemap/graph_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace sleevemap {

namespace {

using json = nlohmann::json;

std::string numberText(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double scaleOf(const Rect& bounds) {
  if (bounds.isEmpty()) return 1.0;
  return std::max({1.0, bounds.width(), bounds.height()});
}

}  // namespace

double LaidOutGraph::averageNodeWidth() const {
  if (nodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& n : nodes) s += n.box.width();
  return s / static_cast<double>(nodes.size());
}

double LaidOutGraph::averageNodeHeight() const {
  if (nodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& n : nodes) s += n.box.height();
  return s / static_cast<double>(nodes.size());
}

std::vector<std::pair<std::size_t, std::size_t>> nearbyBoxPairs(std::span<const Rect> boxes,
                                                                double reach) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].min.x < boxes[b].min.x || (boxes[a].min.x == boxes[b].min.x && a < b);
  });
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const Rect& a = boxes[order[oi]];
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const Rect& b = boxes[order[oj]];
      if (b.min.x > a.max.x + reach) break;
      if (boxGap(a, b) < reach) {
        pairs.emplace_back(std::min(order[oi], order[oj]), std::max(order[oi], order[oj]));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

void validateDisjointBoxes(const LaidOutGraph& g) {
  std::vector<Rect> boxes;
  boxes.reserve(g.nodes.size());
  for (const auto& n : g.nodes) boxes.push_back(n.box);
  const double slack = kEpsGeom * scaleOf(g.bounds);
  for (auto [i, j] : nearbyBoxPairs(boxes, slack)) {
    throw GraphError(GraphError::Kind::Overlap,
                     "nodes '" + g.nodes[i].id + "' and '" + g.nodes[j].id + "' overlap");
  }
}

LaidOutGraph makeGraph(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges) {
  LaidOutGraph g;
  g.nodes = std::move(nodes);
  g.edges = std::move(edges);
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    auto& n = g.nodes[i];
    if (!isFinite(n.center) || !isFinite(n.box.min) || !isFinite(n.box.max)) {
      throw GraphError(GraphError::Kind::Malformed, "nodes[" + std::to_string(i) + "]: non-finite value");
    }
    if (!(n.box.width() > 0.0) || !(n.box.height() > 0.0) || !n.box.contains(n.center)) {
      throw GraphError(GraphError::Kind::Malformed,
                       "nodes[" + std::to_string(i) + "] '" + n.id + "': box must have positive area and contain the center");
    }
    if (!(n.size.x > 0.0) || !(n.size.y > 0.0)) n.size = {n.box.width(), n.box.height()};
    if (!seen.emplace(n.id, i).second) {
      throw GraphError(GraphError::Kind::DuplicateId,
                       "nodes[" + std::to_string(i) + "]: duplicate id '" + n.id + "'");
    }
    g.bounds.expand(n.box);
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& r = g.edges[e];
    if (r.source >= g.nodes.size() || r.target >= g.nodes.size()) {
      throw GraphError(GraphError::Kind::UnresolvedEndpoint,
                       "edges[" + std::to_string(e) + "]: endpoint index out of range");
    }
    if (r.source == r.target) {
      throw GraphError(GraphError::Kind::SelfLoop,
                       "edges[" + std::to_string(e) + "]: self-loop on '" + g.nodes[r.source].id + "'");
    }
  }
  validateDisjointBoxes(g);
  return g;
}

namespace {

struct PendingEdge {
  std::string source;
  std::string target;
  std::string label;
  std::string where;
};

LaidOutGraph resolve(std::vector<NodeRecord> nodes, const std::vector<PendingEdge>& pending) {
  std::unordered_map<std::string, NodeIndex> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i].id, i);
  std::vector<EdgeRecord> edges;
  edges.reserve(pending.size());
  for (const auto& p : pending) {
    auto s = index.find(p.source);
    if (s == index.end()) {
      throw GraphError(GraphError::Kind::UnresolvedEndpoint, p.where + ": unknown node '" + p.source + "'");
    }
    auto t = index.find(p.target);
    if (t == index.end()) {
      throw GraphError(GraphError::Kind::UnresolvedEndpoint, p.where + ": unknown node '" + p.target + "'");
    }
    if (s->second == t->second) {
      throw GraphError(GraphError::Kind::SelfLoop, p.where + ": self-loop on '" + p.source + "'");
    }
    edges.push_back({s->second, t->second, p.label});
  }
  return makeGraph(std::move(nodes), std::move(edges));
}

std::string idText(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw GraphError(GraphError::Kind::Malformed, where + ": id must be a string");
}

double numberField(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw GraphError(GraphError::Kind::Malformed, where + ": missing numeric field '" + key + "'");
  }
  return it->get<double>();
}

LaidOutGraph parseJson(std::string_view text, const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GraphError(GraphError::Kind::Malformed, std::string("byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw GraphError(GraphError::Kind::Malformed, "document: expected an object with a 'nodes' array");
  }
  std::vector<NodeRecord> nodes;
  const auto& jn = doc["nodes"];
  nodes.reserve(jn.size());
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const json& n = jn[i];
    if (!n.is_object() || !n.contains("id")) {
      throw GraphError(GraphError::Kind::Malformed, where + ": expected an object with an 'id'");
    }
    NodeRecord r;
    r.id = idText(n["id"], where);
    r.center = {numberField(n, "x", where), numberField(n, "y", where)};
    const double w = n.contains("width") ? numberField(n, "width", where) : options.defaultWidth;
    const double h = n.contains("height") ? numberField(n, "height", where) : options.defaultHeight;
    r.box = Rect::around(r.center, w, h);
    r.size = {w, h};
    if (auto it = n.find("label"); it != n.end() && it->is_string()) r.label = it->get<std::string>();
    nodes.push_back(std::move(r));
  }
  std::vector<PendingEdge> pending;
  if (doc.contains("edges")) {
    const auto& je = doc["edges"];
    if (!je.is_array()) throw GraphError(GraphError::Kind::Malformed, "document: 'edges' must be an array");
    pending.reserve(je.size());
    for (std::size_t i = 0; i < je.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      const json& e = je[i];
      if (!e.is_object() || !e.contains("source") || !e.contains("target")) {
        throw GraphError(GraphError::Kind::Malformed, where + ": expected 'source' and 'target'");
      }
      PendingEdge p{idText(e["source"], where), idText(e["target"], where), {}, where};
      if (auto it = e.find("label"); it != e.end() && it->is_string()) p.label = it->get<std::string>();
      pending.push_back(std::move(p));
    }
  }
  return resolve(std::move(nodes), pending);
}

// --- DOT subset -----------------------------------------------------------

struct Token {
  enum class Type { Id, Punct, End } type;
  std::string text;
  int line;
};

class DotLexer {
 public:
  explicit DotLexer(std::string_view s) : s_(s) {}

  Token next() {
    skipSpace();
    if (pos_ >= s_.size()) return {Token::Type::End, "", line_};
    const char c = s_[pos_];
    if (c == '"') return quoted();
    if (c == '-' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == '-' || s_[pos_ + 1] == '>')) {
      std::string t(s_.substr(pos_, 2));
      pos_ += 2;
      return {Token::Type::Punct, t, line_};
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
      const std::size_t start = pos_;
      while (pos_ < s_.size()) {
        const char d = s_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' ||
            (d == '-' && !(pos_ + 1 < s_.size() && (s_[pos_ + 1] == '-' || s_[pos_ + 1] == '>')))) {
          ++pos_;
        } else {
          break;
        }
      }
      return {Token::Type::Id, std::string(s_.substr(start, pos_ - start)), line_};
    }
    ++pos_;
    return {Token::Type::Punct, std::string(1, c), line_};
  }

 private:
  void skipSpace() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == '#' ) {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < s_.size() && !(s_[pos_] == '*' && s_[pos_ + 1] == '/')) {
          if (s_[pos_] == '\n') ++line_;
          ++pos_;
        }
        pos_ = std::min(s_.size(), pos_ + 2);
      } else {
        break;
      }
    }
  }

  Token quoted() {
    const int startLine = line_;
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        ++pos_;
      }
      if (s_[pos_] == '\n') ++line_;
      out.push_back(s_[pos_++]);
    }
    if (pos_ >= s_.size()) {
      throw GraphError(GraphError::Kind::Malformed, "line " + std::to_string(startLine) + ": unterminated string");
    }
    ++pos_;
    return {Token::Type::Id, out, startLine};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class DotParser {
 public:
  DotParser(std::string_view text, const ParseOptions& options) : lex_(text), options_(options) {
    advance();
  }

  LaidOutGraph parse() {
    if (tok_.type == Token::Type::Id && tok_.text == "strict") advance();
    if (tok_.type != Token::Type::Id || (tok_.text != "graph" && tok_.text != "digraph")) {
      fail("expected 'graph' or 'digraph'");
    }
    advance();
    if (tok_.type == Token::Type::Id) advance();
    expect("{");
    statements();
    if (tok_.type != Token::Type::End) fail("unexpected trailing input");

    std::vector<NodeRecord> nodes;
    nodes.reserve(order_.size());
    for (const auto& id : order_) {
      const auto& a = attrs_[id];
      auto pos = a.find("pos");
      if (pos == a.end()) fail("node '" + id + "' has no pos attribute", lines_[id]);
      NodeRecord r;
      r.id = id;
      r.center = parsePos(pos->second, lines_[id]);
      double w = options_.defaultWidth;
      double h = options_.defaultHeight;
      if (auto it = a.find("width"); it != a.end()) w = parseNumber(it->second, lines_[id]);
      if (auto it = a.find("height"); it != a.end()) h = parseNumber(it->second, lines_[id]);
      r.box = Rect::around(r.center, w, h);
      r.size = {w, h};
      if (auto it = a.find("label"); it != a.end()) r.label = it->second;
      nodes.push_back(std::move(r));
    }
    return resolve(std::move(nodes), edges_);
  }

 private:
  using Attrs = std::unordered_map<std::string, std::string>;

  void advance() { tok_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg, int line = -1) {
    throw GraphError(GraphError::Kind::Malformed,
                     "line " + std::to_string(line < 0 ? tok_.line : line) + ": " + msg);
  }

  void expect(const char* p) {
    if (tok_.type != Token::Type::Punct || tok_.text != p) fail(std::string("expected '") + p + "'");
    advance();
  }

  bool isPunct(const char* p) const { return tok_.type == Token::Type::Punct && tok_.text == p; }

  void warn(const std::string& msg) {
    if (options_.warnings) options_.warnings->push_back("line " + std::to_string(tok_.line) + ": " + msg);
  }

  void statements() {
    while (!isPunct("}")) {
      if (tok_.type == Token::Type::End) fail("missing '}'");
      statement();
      if (isPunct(";") || isPunct(",")) advance();
    }
    advance();
  }

  Attrs attrList() {
    Attrs out;
    while (isPunct("[")) {
      advance();
      while (!isPunct("]")) {
        if (tok_.type != Token::Type::Id) fail("expected attribute name");
        std::string key = tok_.text;
        advance();
        std::string value;
        if (isPunct("=")) {
          advance();
          if (tok_.type != Token::Type::Id) fail("expected attribute value");
          value = tok_.text;
          advance();
        }
        out[key] = value;
        if (isPunct(",") || isPunct(";")) advance();
      }
      advance();
    }
    return out;
  }

  void touchNode(const std::string& id, int line) {
    if (attrs_.emplace(id, Attrs{}).second) {
      order_.push_back(id);
      lines_[id] = line;
    }
  }

  void statement() {
    if (tok_.type != Token::Type::Id) {
      if (isPunct("{")) {
        warn("anonymous subgraph flattened");
        advance();
        statements();
        return;
      }
      fail("expected a statement");
    }
    const std::string head = tok_.text;
    const int line = tok_.line;
    if (head == "node" || head == "edge" || head == "graph") {
      advance();
      attrList();
      warn("default '" + head + "' attributes ignored");
      return;
    }
    if (head == "subgraph") {
      advance();
      if (tok_.type == Token::Type::Id) advance();
      warn("subgraph flattened");
      expect("{");
      statements();
      return;
    }
    advance();
    if (isPunct("=")) {
      advance();
      advance();
      warn("graph attribute '" + head + "' ignored");
      return;
    }
    std::vector<std::string> chain{head};
    while (isPunct("--") || isPunct("->")) {
      advance();
      if (tok_.type != Token::Type::Id) fail("expected node id after edge operator");
      chain.push_back(tok_.text);
      advance();
    }
    Attrs a = attrList();
    for (const auto& id : chain) touchNode(id, line);
    if (chain.size() == 1) {
      auto& mine = attrs_[head];
      for (auto& [k, v] : a) {
        if (k == "pos" || k == "width" || k == "height" || k == "label") {
          mine[k] = v;
        } else {
          warn("node attribute '" + k + "' ignored");
        }
      }
      return;
    }
    std::string label;
    for (auto& [k, v] : a) {
      if (k == "label") {
        label = v;
      } else {
        warn("edge attribute '" + k + "' ignored");
      }
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      edges_.push_back({chain[i], chain[i + 1], label, "line " + std::to_string(line)});
    }
  }

  double parseNumber(const std::string& s, int line) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("bad number '" + s + "'", line);
    }
  }

  Point parsePos(const std::string& s, int line) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) fail("pos must be \"x,y\"", line);
    std::string ys = s.substr(comma + 1);
    if (!ys.empty() && ys.back() == '!') ys.pop_back();
    return {parseNumber(s.substr(0, comma), line), parseNumber(ys, line)};
  }

  DotLexer lex_;
  const ParseOptions& options_;
  Token tok_{Token::Type::End, "", 1};
  std::vector<std::string> order_;
  std::unordered_map<std::string, Attrs> attrs_;
  std::unordered_map<std::string, int> lines_;
  std::vector<PendingEdge> edges_;
};

}  // namespace

LaidOutGraph parseGraph(std::string_view text, GraphFormat format, const ParseOptions& options) {
  if (format == GraphFormat::Dot) return DotParser(text, options).parse();
  return parseJson(text, options);
}

LaidOutGraph loadGraph(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read input '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool dot = path.ends_with(".dot") || path.ends_with(".gv");
  return parseGraph(buf.str(), dot ? GraphFormat::Dot : GraphFormat::Json, options);
}

std::string serializeGraph(const LaidOutGraph& g) {
  std::string out = "{\"nodes\":[";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (i) out += ',';
    out += "{\"id\":" + json(n.id).dump() + ",\"x\":" + numberText(n.center.x) + ",\"y\":" +
           numberText(n.center.y) + ",\"width\":" + numberText(n.size.x) + ",\"height\":" +
           numberText(n.size.y);
    if (!n.label.empty()) out += ",\"label\":" + json(n.label).dump();
    out += '}';
  }
  out += "],\"edges\":[";
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (i) out += ',';
    out += "{\"source\":" + json(g.nodes[e.source].id).dump() + ",\"target\":" +
           json(g.nodes[e.target].id).dump();
    if (!e.label.empty()) out += ",\"label\":" + json(e.label).dump();
    out += '}';
  }
  out += "]}";
  return out;
}

double defaultPadding(const LaidOutGraph& g) { return 0.25 * 0.5 * g.averageNodeHeight(); }

ObstacleSet buildObstacles(std::span<const Rect> boxes, std::span<const double> padding, int cornerCut) {
  ObstacleSet out;
  out.padding.assign(padding.begin(), padding.end());
  const double reach = padding.empty() ? 0.0 : 2.0 * *std::max_element(padding.begin(), padding.end());
  for (auto [i, j] : nearbyBoxPairs(boxes, reach)) {
    const double gap = boxGap(boxes[i], boxes[j]);
    if (padding[i] + padding[j] < gap) continue;
    const double cap = 0.45 * gap;
    for (std::size_t k : {i, j}) {
      if (out.padding[k] > cap) out.padding[k] = cap;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "padding shrunk to %.6g between boxes %zu and %zu (gap %.6g)", cap, i,
                  j, gap);
    out.warnings.emplace_back(buf);
  }
  out.polygons.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    out.polygons.push_back(inflateBoxToPolygon(boxes[i], out.padding[i], cornerCut));
  }
  return out;
}

ObstacleSet buildObstacles(const LaidOutGraph& g, double padding, int cornerCut) {
  std::vector<Rect> boxes;
  boxes.reserve(g.nodes.size());
  for (const auto& n : g.nodes) boxes.push_back(n.box);
  std::vector<double> pads(boxes.size(), padding);
  return buildObstacles(boxes, pads, cornerCut);
}

}  // namespace sleevemap
