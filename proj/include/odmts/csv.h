#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace odmts::csv {

// Header-addressed CSV table. Fields are split on commas; quoting is not
// supported because none of the project's formats need it.
class Table {
public:
  static Table parse(std::istream& in, std::string const& source = "<csv>");
  static Table parse(std::string_view text, std::string const& source = "<csv>");
  static Table load(std::string const& path);

  std::size_t rows() const { return rows_.size(); }
  bool has_column(std::string_view name) const;

  std::string const& get(std::size_t row, std::string_view column) const;
  // Empty string when the column is absent or the cell is blank.
  std::string get_or(std::size_t row, std::string_view column) const;
  std::int64_t get_int(std::size_t row, std::string_view column) const;
  double get_double(std::size_t row, std::string_view column) const;

  std::string const& source() const { return source_; }

private:
  std::size_t index(std::string_view column) const;

  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::int64_t to_int(std::string_view s, std::string const& context);
double to_double(std::string_view s, std::string const& context);

}  // namespace odmts::csv
