#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ctops::io {

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// CSV with `# key: value` comment lines before the header row. Numbers are
/// written with %.17g so files round-trip exactly and are byte-stable.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::string& config_hash, const std::vector<std::string>& columns);

  CsvWriter& comment(const std::string& key, const std::string& value);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(const std::string& value);
  void end_row();
  void close();

 private:
  void write_header_if_needed();

  std::ofstream out_;
  std::filesystem::path file_;
  std::vector<std::string> columns_;
  bool header_written_ = false;
  bool row_open_ = false;
};

std::string format_double(double value);

/// Binary 8-bit PGM, row 0 at the top. Values are scaled linearly by the
/// maximum; NaN pixels become 0. The hash goes into a PGM comment.
void write_pgm(const std::filesystem::path& file, const std::vector<double>& values, int width, int height,
               const std::string& config_hash);

}  // namespace ctops::io
