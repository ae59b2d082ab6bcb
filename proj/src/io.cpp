#include "ctops/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ctops::io {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& file, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : out_(file), file_(file), columns_(columns) {
  if (!out_) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out_ << "# config_hash: " << config_hash << "\n";
}

CsvWriter& CsvWriter::comment(const std::string& key, const std::string& value) {
  if (header_written_) throw std::logic_error("CsvWriter: comments must precede rows");
  out_ << "# " << key << ": " << value << "\n";
  return *this;
}

void CsvWriter::write_header_if_needed() {
  if (header_written_) return;
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
  out_ << "\n";
  header_written_ = true;
}

CsvWriter& CsvWriter::cell(double value) { return cell(format_double(value)); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::to_string(value)); }

CsvWriter& CsvWriter::cell(const std::string& value) {
  write_header_if_needed();
  if (row_open_) out_ << ",";
  out_ << value;
  row_open_ = true;
  return *this;
}

void CsvWriter::end_row() {
  write_header_if_needed();
  out_ << "\n";
  row_open_ = false;
}

void CsvWriter::close() {
  write_header_if_needed();
  out_.close();
  if (out_.fail()) throw std::runtime_error("error writing " + file_.string());
}

void write_pgm(const std::filesystem::path& file, const std::vector<double>& values, int width, int height,
               const std::string& config_hash) {
  if (width <= 0 || height <= 0 || values.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("write_pgm: size mismatch");
  }
  double vmax = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) vmax = std::max(vmax, v);
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << "P5\n# config_hash: " << config_hash << "\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> row(width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double v = values[static_cast<std::size_t>(r) * width + c];
      double s = (vmax > 0.0 && std::isfinite(v)) ? std::clamp(v / vmax, 0.0, 1.0) : 0.0;
      row[c] = static_cast<unsigned char>(std::lround(255.0 * s));
    }
    out.write(reinterpret_cast<const char*>(row.data()), width);
  }
  if (!out) throw std::runtime_error("error writing " + file.string());
}

}  // namespace ctops::io
