#pragma once

#include "rellich/box_operator.hpp"
#include "rellich/grid.hpp"
#include "rellich/sector_operator.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rellich {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips, independent of the locale.
inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

inline double parse_number(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return infinity;
  if (text == "-inf") return -infinity;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  if (begin < end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw PreconditionError("not a number: '" + text + "'");
  return value;
}

/// CSV block with a declared header; every cell is stored already formatted.
class CsvTable {
 public:
  CsvTable(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {}

  struct Cell {
    std::string text;
    Cell(double v) : text(format_number(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(long long v) : text(std::to_string(v)) {}
    Cell(unsigned long v) : text(std::to_string(v)) {}
    Cell(bool v) : text(v ? "true" : "false") {}
    Cell(const char* v) : text(v) {}
    Cell(std::string v) : text(std::move(v)) {}
  };

  void add_row(std::vector<Cell> cells) {
    require(cells.size() == header_.size(), "CSV row width does not match header of " + name_);
    std::vector<std::string> row;
    for (auto& c : cells) row.push_back(std::move(c.text));
    rows_.push_back(std::move(row));
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string str() const {
    std::ostringstream out;
    write_line(out, header_);
    for (const auto& r : rows_) write_line(out, r);
    return out.str();
  }

 private:
  static void write_line(std::ostringstream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      const auto& f = fields[i];
      if (f.find_first_of(",\"\n") != std::string::npos) {
        out << '"';
        for (char ch : f) out << (ch == '"' ? "\"\"" : std::string(1, ch));
        out << '"';
      } else {
        out << f;
      }
    }
    out << '\n';
  }

  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parsed CSV: header plus string cells.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvData parse_csv(const std::string& text) {
  CsvData data;
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        fields.push_back(std::move(field));
        lines.push_back(std::move(fields));
      }
      fields.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (any || !field.empty()) {
    fields.push_back(std::move(field));
    lines.push_back(std::move(fields));
  }
  require(!lines.empty(), "CSV has no header row");
  data.header = lines.front();
  data.rows.assign(lines.begin() + 1, lines.end());
  return data;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Writes through a temporary file and a rename so readers never see a
/// partially written file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), "cannot write " + tmp);
    out << content;
    out.flush();
    require(static_cast<bool>(out), "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline Json vector_json(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json grid_manifest(const RadialGrid& g) {
  return Json{{"kind", "radial"},     {"dimension", g.dimension},   {"outer_radius", g.outer_radius},
              {"mode", to_string(g.spacing)}, {"size", g.size()}, {"hash", g.hash()},
              {"nodes", vector_json(g.nodes)}, {"weights", vector_json(g.weights)}};
}

inline Json grid_manifest(const BoxGrid& g) {
  return Json{{"kind", "box"},          {"dimension", g.dimension}, {"per_axis", g.per_axis},
              {"half_width", g.half_width}, {"spacing", g.spacing}, {"size", g.size()},
              {"hash", g.hash()},       {"weight", g.weight(0)}};
}

inline Json operator_manifest(const SectorOperator& op) {
  return Json{{"kind", "sector"}, {"dimension", op.dimension()}, {"ell", op.ell()}, {"coupling", op.coupling()},
              {"positive_definite", op.positive_definite()}, {"grid_hash", op.grid().hash()}, {"hash", op.hash()}};
}

inline Json operator_manifest(const BoxOperator& op) {
  return Json{{"kind", "box"}, {"dimension", op.dimension()}, {"per_axis", op.grid().per_axis},
              {"coupling", op.coupling()}, {"grid_hash", op.grid().hash()}, {"hash", op.hash()}};
}

/// Coordinate text format "row col value" of the sector Laplacian.
inline std::string laplacian_coordinates(const SectorOperator& op) {
  std::ostringstream out;
  for (const auto& [i, j, v] : op.laplacian_triplets()) out << i << ' ' << j << ' ' << format_number(v) << '\n';
  return out.str();
}

/// Columns: node-index, r (or x1..xN), re, im.
inline CsvTable grid_function_table(const std::string& name, const RadialGrid& g, const ComplexVector& v) {
  require(v.size() == g.size(), "grid function length does not match grid");
  CsvTable t(name, {"node", "r", "re", "im"});
  for (Eigen::Index i = 0; i < v.size(); ++i) t.add_row({static_cast<long>(i), g.nodes[i], v[i].real(), v[i].imag()});
  return t;
}

inline CsvTable grid_function_table(const std::string& name, const BoxGrid& g, const ComplexVector& v) {
  require(v.size() == g.size(), "grid function length does not match grid");
  std::vector<std::string> header{"node"};
  for (int ax = 0; ax < g.dimension; ++ax) header.push_back("x" + std::to_string(ax + 1));
  header.push_back("re");
  header.push_back("im");
  CsvTable t(name, header);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::vector<CsvTable::Cell> row{static_cast<long>(i)};
    for (int ax = 0; ax < g.dimension; ++ax) row.emplace_back(g.coordinate(i, ax));
    row.emplace_back(v[i].real());
    row.emplace_back(v[i].imag());
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace rellich
