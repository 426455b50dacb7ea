#include "lexcnn/util.hpp"

#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "lexcnn/error.hpp"

namespace lexcnn {

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    hash = fnv1a64(std::string_view(buffer, static_cast<std::size_t>(in.gcount())), hash);
  }
  return hex64(hash);
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::string format_shortest(double value) { return fmt::format("{}", value); }

}  // namespace lexcnn
