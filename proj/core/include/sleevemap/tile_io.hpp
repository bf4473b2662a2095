#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sleevemap/tiler.hpp"

namespace sleevemap {

/// Unreadable or malformed tile output; the message names the file.
class TileIoError : public std::runtime_error {
 public:
  TileIoError(const std::filesystem::path& file, const std::string& what)
      : std::runtime_error(file.string() + ": " + what), file_(file) {}
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
};

/// Tile document; numbers carry 17 significant digits so equal pyramids give equal bytes.
std::string tileJson(const TileData& tile, const LaidOutGraph& g);
std::string manifestJson(const TilePyramid& p, const LaidOutGraph& g, const BuildReport& report);

/// Writes `manifest.json` and `tiles/{z}/{x}/{y}.json` for every non-empty tile.
/// An existing `tiles/` directory under `dir` is replaced.
void writePyramid(const std::filesystem::path& dir, const TilePyramid& p, const LaidOutGraph& g,
                  const BuildReport& report);

/// Element counts of one tile file.
std::size_t readTileElementCount(const std::filesystem::path& file);

struct StoredPyramid {
  Rect rootRect;
  int levels = 0;
  std::size_t capacity = 0;
  PyramidStats stats;  // recomputed from the tile files
};

/// Reads the manifest and every tile file under `dir`.
StoredPyramid readPyramid(const std::filesystem::path& dir);

}  // namespace sleevemap
