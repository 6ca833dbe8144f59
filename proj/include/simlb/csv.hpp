#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace simlb {

// Shortest representation that round-trips to the same double. Used for every
// number written to CSV so outputs are byte-stable across reruns.
std::string format_number(double value);

// Fixed number of decimals, for millisecond and dollar columns.
std::string format_fixed(double value, int decimals);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws ConfigError if missing.
  std::size_t column(std::string_view name) const;
};

// Minimal reader for the files this project writes: comma separated, no
// quoting, first line is the header.
CsvTable read_csv(const std::filesystem::path& path);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace simlb
