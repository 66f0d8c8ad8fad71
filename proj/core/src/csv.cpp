#include "miwave/csv.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace miwave {

std::string format_number(double value) { return fmt::format("{}", value); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) {
    throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " +
                             ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace miwave
