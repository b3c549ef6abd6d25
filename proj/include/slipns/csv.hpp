#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace slipns::io {

/// Locale-independent formatting with 17 significant digits.
std::string format_double(double v);

/// Comma-separated writer with '\n' line endings.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void comment(const std::string& text);  // "# text"
  void close();

private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

void write_text(const std::string& path, const std::string& content);

}  // namespace slipns::io
