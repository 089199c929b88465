#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gpmem/signal.hpp"

namespace gpmem {

/// %.17g, so a value read back is bit-identical; inf and nan spelled out.
std::string format_number(double v);

/// Sequential CSV writer. Comment lines ("# key: value") go before the header.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void comment(const std::string& key, const std::string& value);
  void header(std::span<const std::string> columns);
  void row(std::span<const double> values);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

struct CsvTable {
  /// "# key: value" lines before the header.
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with one header row and optional leading comment lines.
/// IoError if unreadable, ParseError (with line) on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

/// Two-column (t, value) CSV on a uniform grid starting at t = 0.
TimeSignal read_signal_csv(const std::filesystem::path& path);

}  // namespace gpmem
