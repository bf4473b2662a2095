#include "sleevemap/tile_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace sleevemap {

namespace fs = std::filesystem;

namespace {

class Writer {
 public:
  Writer& raw(std::string_view s) {
    out_ += s;
    return *this;
  }
  Writer& num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ += buf;
    return *this;
  }
  Writer& count(std::size_t v) {
    out_ += std::to_string(v);
    return *this;
  }
  Writer& str(std::string_view s) {
    out_ += nlohmann::json(std::string(s)).dump();
    return *this;
  }
  Writer& point(const Point& p) { return raw("[").num(p.x).raw(",").num(p.y).raw("]"); }
  Writer& rect(const Rect& r) {
    return raw("[").num(r.min.x).raw(",").num(r.min.y).raw(",").num(r.max.x).raw(",").num(r.max.y).raw("]");
  }
  Writer& edge(const LaidOutGraph& g, EdgeIndex e) {
    return raw("[").str(g.nodes[g.edges[e].source].id).raw(",").str(g.nodes[g.edges[e].target].id).raw("]");
  }
  template <class T, class Fn>
  Writer& list(const std::vector<T>& items, Fn&& fn) {
    raw("[");
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) raw(",");
      fn(items[i]);
    }
    return raw("]");
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

nlohmann::json parseFile(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw TileIoError(file, "cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw TileIoError(file, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string tileJson(const TileData& tile, const LaidOutGraph& g) {
  Writer w;
  w.raw("{\"nodes\":").list(tile.nodes, [&](const TileNode& n) {
    const auto& rec = g.nodes[n.node];
    w.raw("{\"id\":").str(rec.id).raw(",\"box\":").rect(n.box).raw(",\"scale\":").num(n.scale);
    w.raw(",\"label\":").str(rec.label).raw("}");
  });
  w.raw(",\"clips\":").list(tile.clips, [&](const EdgeClip& c) {
    w.raw("{\"path\":").list(c.curve.vertices, [&](const Point& p) { w.point(p); });
    w.raw(",\"edges\":").list(c.edges, [&](EdgeIndex e) { w.edge(g, e); }).raw("}");
  });
  w.raw(",\"labels\":").list(tile.labels, [&](const TileLabel& l) {
    w.raw("{\"text\":").str(l.text).raw(",\"anchor\":").point(l.anchor);
    if (l.onEdge) {
      w.raw(",\"edge\":").edge(g, l.ref);
    } else {
      w.raw(",\"node\":").str(g.nodes[l.ref].id);
    }
    w.raw("}");
  });
  w.raw(",\"arrowheads\":").list(tile.arrowheads, [&](const Arrowhead& a) {
    w.raw("{\"tip\":").point(a.tip).raw(",\"dir\":").point(a.dir).raw(",\"edge\":").edge(g, a.edge).raw("}");
  });
  w.raw("}\n");
  return w.take();
}

std::string manifestJson(const TilePyramid& p, const LaidOutGraph& g, const BuildReport& report) {
  const PyramidStats stats = pyramidStats(p);
  std::vector<std::size_t> nodesPerLevel, edgesPerLevel;
  for (const auto& level : p.levels) {
    nodesPerLevel.push_back(level.nodes.size());
    edgesPerLevel.push_back(level.edges.size());
  }
  auto counts = [](Writer& w, const std::vector<std::size_t>& v) {
    w.list(v, [&](std::size_t n) { w.count(n); });
  };
  Writer w;
  w.raw("{\"rootRect\":").rect(p.grid.root());
  w.raw(",\"levels\":").count(p.levels.size());
  w.raw(",\"capacity\":").count(p.capacity);
  w.raw(",\"yAxis\":\"up\"");
  w.raw(",\"graph\":{\"nodes\":").count(g.nodeCount()).raw(",\"edges\":").count(g.edgeCount()).raw("}");
  w.raw(",\"stats\":{\"levelsBuilt\":").count(stats.levelsBuilt);
  w.raw(",\"maxPerTile\":").count(stats.maxPerTile);
  w.raw(",\"maxTileLevel\":").count(static_cast<std::size_t>(stats.maxTileLevel));
  w.raw(",\"stopReason\":").str(stopReasonName(report.stop));
  w.raw(",\"padding\":").num(report.padding);
  w.raw(",\"tilesPerLevel\":");
  counts(w, stats.tilesPerLevel);
  w.raw(",\"maxPerLevel\":");
  counts(w, stats.maxPerLevel);
  w.raw(",\"nodesPerLevel\":");
  counts(w, nodesPerLevel);
  w.raw(",\"edgesPerLevel\":");
  counts(w, edgesPerLevel);
  w.raw("}");
  std::vector<EdgeIndex> all(g.edgeCount());
  for (EdgeIndex e = 0; e < all.size(); ++e) all[e] = e;
  w.raw(",\"edges\":").list(all, [&](EdgeIndex e) { w.edge(g, e); });
  w.raw("}\n");
  return w.take();
}

void writePyramid(const fs::path& dir, const TilePyramid& p, const LaidOutGraph& g, const BuildReport& report) {
  auto writeFile = [](const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw TileIoError(file, "cannot write");
    out << text;
    if (!out) throw TileIoError(file, "write failed");
  };
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw TileIoError(dir, ec.message());
  fs::remove_all(dir / "tiles", ec);
  if (ec) throw TileIoError(dir / "tiles", ec.message());
  for (int z = 0; z < static_cast<int>(p.levels.size()); ++z) {
    for (const auto& [key, tile] : p.levels[z].tiles) {
      if (tile.empty()) continue;
      const fs::path folder = dir / "tiles" / std::to_string(z) / std::to_string(key.x);
      fs::create_directories(folder, ec);
      if (ec) throw TileIoError(folder, ec.message());
      writeFile(folder / (std::to_string(key.y) + ".json"), tileJson(tile, g));
    }
  }
  writeFile(dir / "manifest.json", manifestJson(p, g, report));
}

std::size_t readTileElementCount(const fs::path& file) {
  const auto doc = parseFile(file);
  std::size_t n = 0;
  try {
    for (const char* key : {"nodes", "clips", "labels", "arrowheads"}) n += doc.at(key).size();
    for (const auto& clip : doc.at("clips")) {
      if (clip.at("path").size() < 2 || clip.at("edges").empty()) throw TileIoError(file, "degenerate clip");
    }
  } catch (const nlohmann::json::exception& e) {
    throw TileIoError(file, std::string("unexpected tile layout: ") + e.what());
  }
  return n;
}

StoredPyramid readPyramid(const fs::path& dir) {
  const fs::path manifestFile = dir / "manifest.json";
  if (!fs::exists(manifestFile)) throw TileIoError(manifestFile, "missing manifest");
  const auto manifest = parseFile(manifestFile);
  StoredPyramid out;
  try {
    const auto& r = manifest.at("rootRect");
    out.rootRect = {{r.at(0).get<double>(), r.at(1).get<double>()}, {r.at(2).get<double>(), r.at(3).get<double>()}};
    out.levels = manifest.at("levels").get<int>();
    out.capacity = manifest.at("capacity").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw TileIoError(manifestFile, std::string("unexpected manifest layout: ") + e.what());
  }
  if (out.levels < 1) throw TileIoError(manifestFile, "no levels");
  out.stats.levelsBuilt = out.levels;
  out.stats.tilesPerLevel.assign(out.levels, 0);
  out.stats.maxPerLevel.assign(out.levels, 0);
  for (int z = 0; z < out.levels; ++z) {
    const fs::path levelDir = dir / "tiles" / std::to_string(z);
    if (!fs::is_directory(levelDir)) continue;
    std::vector<fs::path> files;
    for (const auto& column : fs::directory_iterator(levelDir)) {
      if (!column.is_directory()) continue;
      for (const auto& entry : fs::directory_iterator(column.path())) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::size_t n = readTileElementCount(f);
      ++out.stats.tilesPerLevel[z];
      out.stats.maxPerLevel[z] = std::max(out.stats.maxPerLevel[z], n);
    }
    if (out.stats.maxPerLevel[z] > out.stats.maxPerTile) {
      out.stats.maxPerTile = out.stats.maxPerLevel[z];
      out.stats.maxTileLevel = z;
    }
  }
  return out;
}

}  // namespace sleevemap
