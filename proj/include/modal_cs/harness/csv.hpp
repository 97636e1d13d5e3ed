#pragma once

// CSV reading and writing. Numbers are written in the shortest form that
// round-trips (std::to_chars), so output is locale-free and bit-exact.

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"

namespace modal_cs {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// RFC 4180 field quoting.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

using Cell = std::variant<double, long long, std::string>;

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

/// Column-named table of formatted cells.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  void add_row(const std::vector<Cell>& cells) {
    require(cells.size() == columns_.size(), ErrorKind::kDimensionMismatch,
            "row has " + std::to_string(cells.size()) + " cells, table has " +
                std::to_string(columns_.size()) + " columns");
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(format_cell(c));
    rows_.push_back(std::move(row));
  }

  void write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& fields) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
      }
      os << "\r\n";
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
  }

  std::string to_string() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIoError, "cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw Error(ErrorKind::kIoError, "write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Numeric CSV, one sensor per row. With `header`, the first line is skipped.
/// Accepts LF or CRLF and surrounding blanks in fields; blank lines are
/// ignored.
inline RealMatrix parse_sensor_csv(std::string_view text, bool header = false) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool skipped_header = !header;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t col = 0;
    std::size_t fpos = 0;
    for (;;) {
      std::size_t comma = line.find(',', fpos);
      if (comma == std::string_view::npos) comma = line.size();
      ++col;
      std::string_view field = line.substr(fpos, comma - fpos);
      std::size_t lead = field.find_first_not_of(" \t");
      std::size_t trail = field.find_last_not_of(" \t");
      const std::size_t column = fpos + 1 + (lead == std::string_view::npos ? 0 : lead);
      if (lead == std::string_view::npos) {
        throw ParseError(line_no, column, "empty field " + std::to_string(col));
      }
      field = field.substr(lead, trail - lead + 1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(line_no, column,
                         "not a number: '" + std::string(field) + "'");
      }
      row.push_back(v);
      if (comma == line.size()) break;
      fpos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::kRaggedRows,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::kParseError, "no data rows");
  RealMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

inline RealMatrix load_sensor_csv(const std::string& path, bool header = false) {
  return parse_sensor_csv(read_text_file(path), header);
}

inline std::string format_sensor_csv(const RealMatrix& data) {
  std::string out;
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) {
      if (j) out += ',';
      out += format_double(data(i, j));
    }
    out += "\r\n";
  }
  return out;
}

inline void save_sensor_csv(const std::string& path, const RealMatrix& data) {
  write_text_file(path, format_sensor_csv(data));
}

}  // namespace modal_cs
