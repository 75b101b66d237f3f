#include "classd_cli/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace classd::cli {
namespace {

std::string real_text(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) return real_text(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos && (s.empty() || (s.front() != ' ' && s.back() != ' '))) {
    return s;
  }
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

Cell parse_cell(const std::string& s, bool quoted) {
  if (quoted) return s;
  if (s.empty()) return std::monostate{};
  long long i = 0;
  auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ei == std::errc() && pi == s.data() + s.size()) return i;
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double d = 0.0;
  auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ed == std::errc() && pd == s.data() + s.size()) return d;
  return s;
}

// Splits one record starting at `pos`; advances past its line end.
std::vector<std::pair<std::string, bool>> read_record(const std::string& text, std::size_t& pos) {
  std::vector<std::pair<std::string, bool>> fields;
  std::string cur;
  bool quoted = false;
  bool in_quotes = false;
  while (pos < text.size()) {
    const char ch = text[pos];
    if (in_quotes) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cur += '"';
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(cur, quoted);
      cur.clear();
      quoted = false;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      break;
    } else {
      cur += ch;
    }
    ++pos;
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  fields.emplace_back(cur, quoted);
  return fields;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no column '" + name + "'");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Metadata standard_metadata(const ExperimentConfig& c) {
  Metadata m;
  m.emplace_back("experiment", to_string(c.experiment));
  m.emplace_back("config_sha256", config_hash(c));
  for (auto name : kSweepableParams) m.emplace_back(std::string(name), format_real(c.params.get(name)));
  m.emplace_back("k", std::to_string(c.params.k));
  std::string input = "offset=" + format_real(c.input.offset());
  for (const auto& t : c.input.tones()) {
    input += "; sine(" + format_real(t.amplitude) + ", " + format_real(t.frequency) + " Hz, " +
             format_real(t.phase) + ")";
  }
  m.emplace_back("input", input);
  m.emplace_back("n_max", std::to_string(c.n_max));
  m.emplace_back("transient_periods", std::to_string(c.transient_periods));
  m.emplace_back("analysis_periods", std::to_string(c.analysis_periods));
  return m;
}

std::string emit_csv(const Document& doc) {
  std::string out;
  for (const auto& [k, v] : doc.metadata) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < doc.table.columns.size(); ++i) {
    out += (i ? "," : "") + csv_quote(doc.table.columns[i]);
  }
  out += "\n";
  for (const auto& row : doc.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string text = cell_text(row[i]);
      // Text that would read back as a number keeps its type through quoting.
      if (std::holds_alternative<std::string>(row[i])) {
        const Cell back = parse_cell(text, false);
        if (!std::holds_alternative<std::string>(back)) text = "\"" + text + "\"";
        else text = csv_quote(text);
      }
      out += (i ? "," : "") + text;
    }
    out += "\n";
  }
  return out;
}

std::string emit_json(const Document& doc, bool precise) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : doc.metadata) j["metadata"][k] = v;
  j["columns"] = doc.table.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : doc.table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (std::holds_alternative<double>(c)) {
        const double v = std::get<double>(c);
        if (precise || !std::isfinite(v)) {
          r.push_back(real_text(v));
        } else {
          r.push_back(v);
        }
      } else if (std::holds_alternative<long long>(c)) {
        r.push_back(std::get<long long>(c));
      } else if (std::holds_alternative<std::string>(c)) {
        r.push_back(std::get<std::string>(c));
      } else {
        r.push_back(nullptr);
      }
    }
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string emit(const Document& doc, Format format) {
  switch (format) {
    case Format::Csv: return emit_csv(doc);
    case Format::Json: return emit_json(doc, false);
    case Format::JsonPrecise: return emit_json(doc, true);
  }
  return {};
}

Document parse_csv(const std::string& text) {
  Document doc;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos + 2, (end == std::string::npos ? text.size() : end) - pos - 2);
    const std::size_t colon = line.find(": ");
    if (colon == std::string::npos) throw std::runtime_error("csv: malformed metadata line");
    doc.metadata.emplace_back(line.substr(0, colon), line.substr(colon + 2));
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  if (pos >= text.size()) throw std::runtime_error("csv: missing column row");
  for (auto& [name, quoted] : read_record(text, pos)) doc.table.columns.push_back(name);
  while (pos < text.size()) {
    const auto fields = read_record(text, pos);
    if (fields.size() != doc.table.columns.size()) {
      throw std::runtime_error("csv: row has " + std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(doc.table.columns.size()));
    }
    std::vector<Cell> row;
    for (const auto& [s, quoted] : fields) row.push_back(parse_cell(s, quoted));
    doc.table.rows.push_back(std::move(row));
  }
  return doc;
}

void write_output(const Document& doc, const std::string& path, Format format) {
  const std::string text = emit(doc, format);
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output.path: cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("output.path: write to '" + path + "' failed");
}

}  // namespace classd::cli
