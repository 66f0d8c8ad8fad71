#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace miwave {

/// Shortest round-trippable decimal form; used for every number we write to CSV/JSON text.
std::string format_number(double value);

/// Opens a file for writing, creating parent directories; throws std::runtime_error with the path.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace miwave
