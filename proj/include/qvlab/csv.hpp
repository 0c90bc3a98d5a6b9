#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qvlab {

// CSV with a fixed dialect: comma separator, header row, '.' decimal point,
// LF line endings, doubles printed with 17 significant digits so re-runs are
// byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void write_file(const std::string& path) const;

  static std::string format(double v);

 private:
  std::size_t columns_;
  std::string body_;
};

// FNV-1a of a string; used for run-manifest config hashes.
std::uint64_t fnv1a(const std::string& data);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qvlab
