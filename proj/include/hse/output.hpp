#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hse {

// Shortest decimal that round-trips to the same double; "nan"/"inf" spelled out.
std::string format_double(double value);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view content);

// Comma-separated table with a mandatory header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& add_row(std::vector<std::string> cells);
  std::size_t row_count() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace hse
