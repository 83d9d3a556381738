#include "odmts/csv.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "odmts/core.h"

namespace odmts::csv {

namespace {

std::string trim(std::string_view s) {
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r\n");
  return std::string{s.substr(b, e - b + 1)};
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto const comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table Table::parse(std::istream& in, std::string const& source) {
  Table t;
  t.source_ = source;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split(line);
    if (t.header_.empty()) {
      t.header_ = std::move(fields);
      continue;
    }
    if (fields.size() != t.header_.size()) {
      throw Error("ParseError", source + ":" + std::to_string(line_no) + ": expected " +
                                    std::to_string(t.header_.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    t.rows_.push_back(std::move(fields));
  }
  if (t.header_.empty()) {
    throw Error("ParseError", source + ": missing header");
  }
  return t;
}

Table Table::parse(std::string_view text, std::string const& source) {
  std::istringstream in{std::string{text}};
  return parse(in, source);
}

Table Table::load(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw IoError("cannot open " + path);
  }
  return parse(in, path);
}

bool Table::has_column(std::string_view name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t Table::index(std::string_view column) const {
  auto const it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) {
    throw Error("ParseError", source_ + ": missing column " + std::string{column});
  }
  return static_cast<std::size_t>(it - header_.begin());
}

std::string const& Table::get(std::size_t row, std::string_view column) const {
  return rows_.at(row)[index(column)];
}

std::string Table::get_or(std::size_t row, std::string_view column) const {
  return has_column(column) ? get(row, column) : std::string{};
}

std::int64_t Table::get_int(std::size_t row, std::string_view column) const {
  return to_int(get(row, column), source_ + " row " + std::to_string(row + 1) + " " + std::string{column});
}

double Table::get_double(std::size_t row, std::string_view column) const {
  return to_double(get(row, column), source_ + " row " + std::to_string(row + 1) + " " + std::string{column});
}

std::int64_t to_int(std::string_view s, std::string const& context) {
  std::int64_t v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("ParseError", context + ": not an integer: '" + std::string{s} + "'");
  }
  return v;
}

double to_double(std::string_view s, std::string const& context) {
  double v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("ParseError", context + ": not a number: '" + std::string{s} + "'");
  }
  return v;
}

}  // namespace odmts::csv
