#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "classd_cli/config.hpp"

namespace classd::cli {

/// Empty, real, integer or text cell.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Index of `name`; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Document {
  Metadata metadata;
  Table table;
};

/// Metadata common to every output: config hash, parameter echo and analysis settings.
Metadata standard_metadata(const ExperimentConfig& config);

/// CSV: '# key: value' header lines, a column row, then RFC 4180 records. Reals are
/// written as %.16e so that parsing returns the same double.
std::string emit_csv(const Document& doc);
/// JSON object {metadata, columns, rows}; the precise variant writes reals as strings.
std::string emit_json(const Document& doc, bool precise);
std::string emit(const Document& doc, Format format);

/// Inverse of emit_csv.
Document parse_csv(const std::string& text);

/// Writes to `path`, or to stdout when it is empty.
void write_output(const Document& doc, const std::string& path, Format format);

/// Shortest representation used in text cells and metadata.
std::string format_real(double v);

}  // namespace classd::cli
