#include "subsample/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace subsample::cli {

namespace {

std::string describe(const std::string& message, std::size_t record, const std::string& column) {
  std::string out = message;
  if (record > 0) out += " (record " + std::to_string(record);
  if (!column.empty()) out += (record > 0 ? ", column '" : " (column '") + column + "'";
  if (record > 0 || !column.empty()) out += ")";
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::size_t resolve_column(const std::vector<std::string>& header, const std::string& ref) {
  const auto it = std::find(header.begin(), header.end(), ref);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  if (!ref.empty() && std::all_of(ref.begin(), ref.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), index);
    if (ec == std::errc() && ptr == ref.data() + ref.size() && index < header.size()) return index;
  }
  throw CsvError("unknown column", 0, ref);
}

}  // namespace

CsvError::CsvError(const std::string& message, std::size_t record, std::string column)
    : InputError(describe(message, record, column)), record_(record), column_(std::move(column)) {}

CsvTable read_csv_table(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool row_has_content = false;
  std::size_t i = 0;

  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content || row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty() || field_quoted) {
          throw CsvError("quote inside an unquoted field", rows.size(), "");
        }
        field.clear();
        in_quotes = true;
        field_quoted = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        if (field_quoted && c != ' ' && c != '\t') {
          throw CsvError("text after a closing quote", rows.size(), "");
        }
        if (!field_quoted) field += c;
        break;
    }
    ++i;
  }
  if (in_quotes) throw CsvError("unterminated quoted field", rows.size(), "");
  if (!field.empty() || !row.empty() || field_quoted) end_row();

  if (rows.empty()) throw CsvError("file has no header row", 0, "");
  CsvTable table;
  table.header = std::move(rows.front());
  for (auto& name : table.header) name = std::string(trim(name));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != table.header.size()) {
      throw CsvError("expected " + std::to_string(table.header.size()) + " fields, found " +
                         std::to_string(rows[r].size()),
                     r, "");
    }
    table.records.push_back(std::move(rows[r]));
  }
  return table;
}

double parse_real(std::string_view cell, std::size_t record, const std::string& column) {
  const std::string_view s = trim(cell);
  if (s.empty()) throw CsvError("empty numeric cell", record, column);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::general);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError("non-numeric cell '" + std::string(s) + "'", record, column);
  }
  if (!std::isfinite(value)) throw CsvError("non-finite value '" + std::string(s) + "'", record, column);
  return value;
}

Dataset parse_csv_text(std::string_view text, const CsvOptions& options) {
  const CsvTable table = read_csv_table(text);
  const std::size_t width = table.header.size();

  const std::size_t response = options.response.empty() ? width - 1 : resolve_column(table.header, options.response);
  std::vector<std::size_t> predictors;
  if (options.predictors.empty()) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != response) predictors.push_back(c);
    }
  } else {
    for (const auto& ref : options.predictors) predictors.push_back(resolve_column(table.header, ref));
  }
  std::vector<bool> logged(width, false);
  for (const auto& ref : options.log_columns) logged[resolve_column(table.header, ref)] = true;

  if (options.drop_head_rows >= table.records.size()) {
    throw CsvError("no records left after dropping " + std::to_string(options.drop_head_rows) + " rows", 0, "");
  }
  const std::size_t first = options.drop_head_rows;
  const std::size_t n = table.records.size() - first;

  std::vector<bool> needed(width, false);
  needed[response] = true;
  for (const std::size_t c : predictors) needed[c] = true;

  // Parse and transform every needed or logged column, in file order.
  std::vector<std::vector<double>> columns(width);
  for (std::size_t c = 0; c < width; ++c) {
    if (!needed[c] && !logged[c]) continue;
    const std::string& name = table.header[c];
    columns[c].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t record = first + k + 1;
      double v = parse_real(table.records[first + k][c], record, name);
      if (logged[c]) {
        if (!(v > 0.0)) {
          throw CsvError("log transform of nonpositive value " + std::string(trim(table.records[first + k][c])),
                         record, name);
        }
        v = std::log(v);
      }
      columns[c][k] = v;
    }
  }

  const auto p = static_cast<Eigen::Index>(predictors.size() + (options.intercept ? 1 : 0));
  if (p == 0) throw CsvError("no predictor columns selected", 0, "");
  Matrix x(static_cast<Eigen::Index>(n), p);
  Vector y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    Eigen::Index j = 0;
    if (options.intercept) x(row, j++) = 1.0;
    for (const std::size_t c : predictors) x(row, j++) = columns[c][k];
    y(row) = columns[response][k];
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset parse_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_text(buffer.str(), options);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index j = 0; j < data.p(); ++j) out << 'x' << j << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << data.design()(i, j) << ',';
    out << data.response()(i) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace subsample::cli
