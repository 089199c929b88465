#include "gpmem/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "gpmem/error.hpp"

namespace gpmem {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void CsvWriter::comment(const std::string& key, const std::string& value) { out_ << "# " << key << ": " << value << '\n'; }

void CsvWriter::header(std::span<const std::string> columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
  if (!out_) throw Error(ErrorCode::IoError, "write failed on " + path_.string());
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  CsvTable table;
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (!table.columns.empty()) fail("comment after the header");
      const std::string body = trim(s.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) table.meta[trim(body.substr(0, colon))] = trim(body.substr(colon + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (table.columns.empty()) {
      table.columns = cells;
      continue;
    }
    if (cells.size() != table.columns.size()) fail("expected " + std::to_string(table.columns.size()) + " cells");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') fail("not a number: '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no header row");
  return table;
}

TimeSignal read_signal_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (t.columns.size() != 2) throw Error(ErrorCode::ParseError, path.string() + ": expected two columns (t, value)");
  if (t.rows.size() < 2) throw Error(ErrorCode::EmptySignal, path.string() + ": need at least two samples");
  const double dt = t.rows[1][0] - t.rows[0][0];
  if (t.rows[0][0] != 0.0 || !(dt > 0.0)) {
    throw Error(ErrorCode::ParseError, path.string() + ": times must start at 0 and increase");
  }
  std::vector<double> v;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (std::abs(t.rows[i][0] - dt * static_cast<double>(i)) > 1e-9 * dt * static_cast<double>(i + 1)) {
      throw Error(ErrorCode::ParseError, path.string() + ": time grid is not uniform at row " + std::to_string(i + 1));
    }
    v.push_back(t.rows[i][1]);
  }
  return TimeSignal(dt, std::move(v));
}

}  // namespace gpmem
