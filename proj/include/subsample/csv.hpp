#pragma once

#include "subsample/core.hpp"
#include "subsample/errors.hpp"

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace subsample::cli {

/// A CSV problem tied to a location. `record` is the 1-based data record
/// (header excluded, before drop_head_rows), 0 when not row specific.
class CsvError : public InputError {
 public:
  CsvError(const std::string& message, std::size_t record, std::string column);

  std::size_t record() const noexcept { return record_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t record_;
  std::string column_;
};

/// Columns are referenced by header name, or by 0-based position when no
/// header has that name.
struct CsvOptions {
  std::string response;                  // empty: last column
  std::vector<std::string> predictors;   // empty: every column but the response
  std::vector<std::string> log_columns;
  std::size_t drop_head_rows = 0;
  bool intercept = false;                // prepend a ones column
};

/// Header plus raw string cells of a comma-delimited file with optional
/// double-quoted fields ("" escapes a quote).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;
};

CsvTable read_csv_table(std::string_view text);

/// Strict decimal-point real; rejects empty cells, trailing junk and
/// non-finite values.
double parse_real(std::string_view cell, std::size_t record, const std::string& column);

/// Drops leading records, log-transforms the configured columns, then
/// selects response and predictors.
Dataset parse_csv_text(std::string_view text, const CsvOptions& options);
Dataset parse_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Writes x0..x{p-1},y with round-trip precision.
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace subsample::cli
