#pragma once

#include <filesystem>
#include <iosfwd>

namespace httplib {
class Server;
}

namespace sleevemap::cli {

/// Process exit codes of the sleevemap tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // invalid graph, routing or write failure
  kUsage = 2,        // bad arguments, missing input file or directory
  kCorruptTile = 3,  // unreadable manifest or tile in a tile directory
  kPortInUse = 4,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Registers GET /manifest.json and GET /tiles/{z}/{x}/{y}.json on `server`,
/// with permissive cross-origin headers. Absent tiles answer 404.
void mountTileRoutes(httplib::Server& server, const std::filesystem::path& dir);

}  // namespace sleevemap::cli
