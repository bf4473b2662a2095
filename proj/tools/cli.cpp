#include "cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sleevemap/graph_model.hpp"
#include "sleevemap/quality.hpp"
#include "sleevemap/sleeve_router.hpp"
#include "sleevemap/tile_io.hpp"
#include "sleevemap/tiler.hpp"

namespace sleevemap::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CommonOptions {
  std::string input;
  std::string format = "auto";
  double padding = 0.0;
  std::string mode = "vc_dijkstra";
  int threads = 1;
};

struct BuildOptions {
  std::string output;
  std::size_t capacity = 500;
  std::uint64_t memoryBudget = std::uint64_t{4} << 30;
  double minTileFactor = 10.0;
  bool arrowheads = false;
};

// Thrown for conditions that map onto a specific exit code.
struct Exit {
  int code;
  std::string message;
};

void addInput(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("input", o.input, "Laid-out graph (.json or .dot)")->required();
  cmd->add_option("--format", o.format, "Input format")
      ->check(CLI::IsMember({"auto", "json", "dot"}))
      ->envname("SLEEVEMAP_FORMAT")
      ->capture_default_str();
}

void addPadding(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--padding", o.padding, "Obstacle padding in world units (0 = a quarter of the mean node half-height)")
      ->check(CLI::NonNegativeNumber)
      ->envname("SLEEVEMAP_PADDING");
}

void addRouting(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--mode", o.mode, "Routing mode")
      ->check(CLI::IsMember({"astar", "dijkstra", "vc_dijkstra"}))
      ->envname("SLEEVEMAP_MODE")
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->envname("SLEEVEMAP_THREADS")
      ->capture_default_str();
}

LaidOutGraph readGraph(const CommonOptions& o, std::vector<std::string>& warnings) {
  const fs::path path(o.input);
  if (!fs::is_regular_file(path)) throw Exit{kUsage, "input not found: " + o.input};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kUsage, "cannot read input: " + o.input};
  std::ostringstream buf;
  buf << in.rdbuf();
  GraphFormat format = GraphFormat::Json;
  if (o.format == "dot" ||
      (o.format == "auto" && (path.extension() == ".dot" || path.extension() == ".gv"))) {
    format = GraphFormat::Dot;
  }
  ParseOptions po;
  po.warnings = &warnings;
  try {
    return parseGraph(buf.str(), format, po);
  } catch (const GraphError& e) {
    throw Exit{kFailure, o.input + ": " + e.what()};
  }
}

RoutingMode modeOf(const std::string& name) { return *parseMode(name); }

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

json point(const Point& p) { return json::array({p.x, p.y}); }

json pathJson(const Polyline& line) {
  json out = json::array();
  for (const auto& p : line.vertices) out.push_back(point(p));
  return out;
}

json statsJson(const RoutingStats& s) {
  return json{{"edges", s.edges},
              {"sources", s.sources},
              {"roots", s.roots},
              {"treesLaunched", s.treesLaunched},
              {"expansions", s.expansions},
              {"probeHits", s.probeHits},
              {"failures", s.failures},
              {"probeSeconds", s.probeSeconds},
              {"searchSeconds", s.searchSeconds},
              {"geometrySeconds", s.geometrySeconds},
              {"totalSeconds", s.totalSeconds}};
}

json routesJson(const LaidOutGraph& g, const RoutingResult& res, RoutingMode mode, double padding) {
  json routes = json::array();
  for (const auto& r : res.routes) {
    json item{{"edge", r.edge},
              {"source", g.nodes[r.source].id},
              {"target", g.nodes[r.target].id},
              {"kind", std::string(routeKindName(r.kind))},
              {"stub", r.stub},
              {"path", pathJson(r.path)}};
    item["dualCost"] = std::isnan(r.dualCost) ? json(nullptr) : json(r.dualCost);
    routes.push_back(std::move(item));
  }
  return json{{"mode", std::string(modeName(mode))},
              {"padding", padding},
              {"routes", std::move(routes)},
              {"stats", statsJson(res.stats)}};
}

void writeText(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Exit{kFailure, "cannot write " + file};
}

// Left-aligned first column, right-aligned rest.
void printTable(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << (c ? std::right : std::left) << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << '\n';
  }
}

int cmdBuild(const CommonOptions& common, const BuildOptions& b, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  std::vector<std::string> warnings;
  const LaidOutGraph g = readGraph(common, warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const double parseSeconds = secondsSince(t0);

  PyramidOptions po;
  po.capacity = b.capacity;
  po.minTileFactor = b.minTileFactor;
  po.memoryBudget = b.memoryBudget;
  po.padding = common.padding;
  po.mode = modeOf(common.mode);
  po.threads = common.threads;
  po.arrowheads = b.arrowheads;
  const auto t1 = Clock::now();
  const BuildResult built = buildPyramid(g, po);
  const double buildSeconds = secondsSince(t1);
  const auto t2 = Clock::now();
  writePyramid(b.output, built.pyramid, g, built.report);
  const double writeSeconds = secondsSince(t2);
  const auto& rep = built.report;

  out << common.input << ": " << g.nodeCount() << " nodes, " << g.edgeCount() << " edges\n";
  out << "levels " << rep.levelsBuilt << ", stop " << stopReasonName(rep.stop) << ", max per tile "
      << rep.maxPerTile << " at level " << rep.maxTileLevel << "\n\n";
  std::vector<std::vector<std::string>> levels{{"z", "nodes", "dropped", "edges", "tiles", "elements", "max"}};
  for (const auto& l : rep.levels) {
    levels.push_back({std::to_string(l.z), std::to_string(l.nodes), std::to_string(l.dropped),
                      std::to_string(l.edges), std::to_string(l.tiles), std::to_string(l.elements),
                      std::to_string(l.maxElements)});
  }
  printTable(out, levels);
  out << '\n';
  const double ingest = std::max(0.0, buildSeconds - rep.routingSeconds - rep.tilingSeconds);
  printTable(out, {{"stage", "seconds"},
                   {"parse", fixed(parseSeconds, 3)},
                   {"layout-ingest", fixed(ingest, 3)},
                   {"routing", fixed(rep.routingSeconds, 3)},
                   {"tiling", fixed(rep.tilingSeconds + writeSeconds, 3)},
                   {"total", fixed(secondsSince(t0), 3)}});
  for (const auto& l : rep.levels) {
    if (l.failures) err << "warning: level " << l.z << ": " << l.failures << " edges without a sleeve\n";
  }
  return kOk;
}

int cmdRoute(const CommonOptions& common, bool compare, const std::string& output, std::ostream& out,
             std::ostream& err) {
  std::vector<std::string> warnings;
  const LaidOutGraph g = readGraph(common, warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  const double padding = common.padding > 0.0 ? common.padding : defaultPadding(g);
  const auto obstacles = buildObstacles(g, padding);
  for (const auto& w : obstacles.warnings) err << "warning: " << w << '\n';
  const auto scene = makeRoutingScene(g, obstacles);
  const auto pairs = edgePairs(g);

  RouterOptions ro;
  ro.mode = modeOf(common.mode);
  ro.threads = common.threads;
  if (!compare) {
    const auto res = routeAll(scene, pairs, ro);
    const std::string text = routesJson(g, res, ro.mode, padding).dump() + "\n";
    if (output.empty()) {
      out << text;
    } else {
      writeText(output, text);
    }
    return res.stats.failures ? kFailure : kOk;
  }

  std::map<RoutingMode, RoutingResult> results;
  for (RoutingMode m : {RoutingMode::AStar, RoutingMode::Dijkstra, RoutingMode::VcDijkstra}) {
    RouterOptions o = ro;
    o.mode = m;
    results[m] = routeAll(scene, pairs, o);
  }
  std::size_t mismatched = 0;
  const auto& base = results[RoutingMode::AStar].routes;
  for (const auto& [m, res] : results) {
    for (std::size_t e = 0; e < base.size(); ++e) {
      const double a = base[e].dualCost, b = res.routes[e].dualCost;
      if (std::isnan(a) != std::isnan(b) || (!std::isnan(a) && std::abs(a - b) > 1e-9 * std::max(1.0, a))) {
        ++mismatched;
      }
    }
  }
  const auto& astar = results[RoutingMode::AStar].stats;
  const auto& dij = results[RoutingMode::Dijkstra].stats;
  const auto& vc = results[RoutingMode::VcDijkstra].stats;
  auto pct = [&](std::size_t v) {
    if (astar.expansions == 0) return std::string("-");
    const double d = 100.0 * (static_cast<double>(astar.expansions) - static_cast<double>(v)) /
                     static_cast<double>(astar.expansions);
    return (d >= 0 ? "-" : "+") + fixed(std::abs(d), 1) + "%";
  };
  printTable(out, {{"graph", "|E|", "sources", "roots", "astar exp", "astar s", "dijkstra exp", "dijkstra s",
                    "vc exp", "vc s"},
                   {fs::path(common.input).stem().string(), std::to_string(g.edgeCount()),
                    std::to_string(dij.roots), std::to_string(vc.roots), std::to_string(astar.expansions),
                    fixed(astar.totalSeconds, 3), std::to_string(dij.expansions) + " (" + pct(dij.expansions) + ")",
                    fixed(dij.totalSeconds, 3), std::to_string(vc.expansions) + " (" + pct(vc.expansions) + ")",
                    fixed(vc.totalSeconds, 3)}});
  out << "dual costs " << (mismatched ? "differ on " + std::to_string(mismatched) + " routes" : "identical")
      << " across modes\n";
  if (!output.empty()) writeText(output, routesJson(g, results[ro.mode], ro.mode, padding).dump() + "\n");
  return mismatched ? kFailure : kOk;
}

int cmdStats(const std::string& dir, bool asJson, std::ostream& out) {
  if (!fs::is_directory(dir)) throw Exit{kUsage, "tile directory not found: " + dir};
  StoredPyramid p;
  try {
    p = readPyramid(dir);
  } catch (const TileIoError& e) {
    throw Exit{kCorruptTile, e.what()};
  }
  const auto& s = p.stats;
  if (asJson) {
    out << json{{"levelsBuilt", s.levelsBuilt},
                {"maxPerTile", s.maxPerTile},
                {"maxTileLevel", s.maxTileLevel},
                {"capacity", p.capacity},
                {"tilesPerLevel", s.tilesPerLevel},
                {"maxPerLevel", s.maxPerLevel}}
               .dump()
        << '\n';
    return kOk;
  }
  printTable(out, {{"graph", "levels", "max per tile", "max tile's level"},
                   {fs::path(dir).filename().string(), std::to_string(s.levelsBuilt), std::to_string(s.maxPerTile),
                    std::to_string(s.maxTileLevel)}});
  out << '\n';
  std::vector<std::vector<std::string>> rows{{"z", "tiles", "max"}};
  for (int z = 0; z < s.levelsBuilt; ++z) {
    rows.push_back({std::to_string(z), std::to_string(s.tilesPerLevel[z]), std::to_string(s.maxPerLevel[z])});
  }
  printTable(out, rows);
  return kOk;
}

int cmdServe(const std::string& dir, const std::string& host, int port, std::ostream& out) {
  if (!fs::is_regular_file(fs::path(dir) / "manifest.json")) {
    throw Exit{kUsage, "no manifest.json in " + dir};
  }
  httplib::Server server;
  // httplib's default also sets SO_REUSEPORT, which would let a second server share the port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  mountTileRoutes(server, dir);
  if (!server.bind_to_port(host, port)) {
    throw Exit{kPortInUse, "cannot bind " + host + ":" + std::to_string(port) + " (port in use?)"};
  }
  out << "serving " << dir << " at http://" << host << ":" << port << "/\n" << std::flush;
  server.listen_after_bind();
  return kOk;
}

int cmdBenchQuality(const CommonOptions& common, const std::string& output, std::ostream& out,
                    std::ostream& err) {
  std::vector<std::string> warnings;
  const LaidOutGraph g = readGraph(common, warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  RouterOptions ro;
  ro.mode = modeOf(common.mode);
  ro.threads = common.threads;
  const QualityReport q = measureRouteQuality(g, common.padding, ro);

  std::vector<std::vector<std::string>> rows{{"edge", "source", "target", "kind", "route", "optimal", "ratio"}};
  json edges = json::array();
  for (const auto& e : q.edges) {
    const auto& rec = g.edges[e.edge];
    rows.push_back({std::to_string(e.edge), g.nodes[rec.source].id, g.nodes[rec.target].id,
                    std::string(routeKindName(e.kind)), fixed(e.routeLength, 4), fixed(e.optimalLength, 4),
                    fixed(e.ratio, 4)});
    edges.push_back(json{{"edge", e.edge},
                         {"source", g.nodes[rec.source].id},
                         {"target", g.nodes[rec.target].id},
                         {"kind", std::string(routeKindName(e.kind))},
                         {"route", e.routeLength},
                         {"optimal", e.optimalLength},
                         {"ratio", e.ratio}});
  }
  printTable(out, rows);
  out << "\nedges " << q.edges.size() << ", mean ratio " << fixed(q.meanRatio, 4) << ", max ratio "
      << fixed(q.maxRatio, 4) << ", failures " << q.failures << '\n';
  if (!output.empty()) {
    writeText(output, json{{"mode", common.mode},
                           {"meanRatio", q.meanRatio},
                           {"maxRatio", q.maxRatio},
                           {"failures", q.failures},
                           {"edges", std::move(edges)}}
                              .dump() +
                          "\n");
  }
  return kOk;
}

}  // namespace

void mountTileRoutes(httplib::Server& server, const fs::path& dir) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                              {"Access-Control-Allow-Headers", "*"}});
  auto sendFile = [](const fs::path& file, httplib::Response& res) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      res.status = 404;
      res.set_content("not found\n", "text/plain");
      return;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    res.set_content(buf.str(), "application/json");
  };
  server.Get("/manifest.json", [dir, sendFile](const httplib::Request&, httplib::Response& res) {
    sendFile(dir / "manifest.json", res);
  });
  server.Get(R"(/tiles/(\d+)/(\d+)/(\d+)\.json)", [dir, sendFile](const httplib::Request& req,
                                                                 httplib::Response& res) {
    sendFile(dir / "tiles" / req.matches[1].str() / req.matches[2].str() / (req.matches[3].str() + ".json"), res);
  });
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tile pyramids of routed graph drawings", "sleevemap"};
  app.require_subcommand(1);

  CommonOptions common;
  BuildOptions build;
  bool compare = false;
  bool statsJson = false;
  std::string output, dir, host = "127.0.0.1";
  int port = 8080;

  auto* b = app.add_subcommand("build", "Route, tile and write the pyramid");
  addInput(b, common);
  b->add_option("-o,--output", build.output, "Output directory")->required();
  b->add_option("--capacity", build.capacity, "Maximum elements per tile")
      ->check(CLI::PositiveNumber)
      ->envname("SLEEVEMAP_CAPACITY")
      ->capture_default_str();
  b->add_option("--memory-budget", build.memoryBudget, "Element memory budget in bytes (suffixes K, M, G)")
      ->transform(CLI::AsSizeValue(false))
      ->check(CLI::PositiveNumber)
      ->envname("SLEEVEMAP_MEMORY_BUDGET")
      ->capture_default_str();
  b->add_option("--min-tile-factor", build.minTileFactor, "Stop when tiles are this many times the mean node size")
      ->check(CLI::PositiveNumber)
      ->envname("SLEEVEMAP_MIN_TILE_FACTOR")
      ->capture_default_str();
  b->add_flag("--arrowheads", build.arrowheads, "Emit an arrowhead at each route's target end")
      ->envname("SLEEVEMAP_ARROWHEADS");
  addPadding(b, common);
  addRouting(b, common);

  auto* r = app.add_subcommand("route", "Route all edges and write the routes as JSON");
  addInput(r, common);
  r->add_option("-o,--output", output, "Routes JSON file (default stdout)");
  r->add_flag("--compare", compare, "Run all three modes and print the comparison table");
  addPadding(r, common);
  addRouting(r, common);

  auto* s = app.add_subcommand("stats", "Per-level statistics of a tile directory");
  s->add_option("dir", dir, "Tile directory")->required();
  s->add_flag("--json", statsJson, "Print JSON instead of a table");

  auto* sv = app.add_subcommand("serve", "Serve a tile directory over HTTP");
  sv->add_option("dir", dir, "Tile directory")->required();
  sv->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535))->envname("SLEEVEMAP_PORT")->capture_default_str();
  sv->add_option("--host", host, "Bind address")->envname("SLEEVEMAP_HOST")->capture_default_str();

  auto* q = app.add_subcommand("bench-quality", "Compare each route against the visibility-graph optimum");
  addInput(q, common);
  q->add_option("-o,--output", output, "Write the per-edge table as JSON");
  addPadding(q, common);
  addRouting(q, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (b->parsed()) return cmdBuild(common, build, out, err);
    if (r->parsed()) return cmdRoute(common, compare, output, out, err);
    if (s->parsed()) return cmdStats(dir, statsJson, out);
    if (sv->parsed()) return cmdServe(dir, host, port, out);
    if (q->parsed()) return cmdBenchQuality(common, output, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const TileIoError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace sleevemap::cli
