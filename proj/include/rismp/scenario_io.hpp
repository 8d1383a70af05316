#pragma once

#include <Eigen/Dense>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rismp/blocks.hpp"
#include "rismp/errors.hpp"
#include "rismp/radiator.hpp"

namespace rismp {

// ---------------------------------------------------------------------------
// Shared low-level parsing helpers. Both file formats are plain text:
// '#' comments, 'key = value' header lines, then '[section]' blocks whose
// rows are comma-separated values.
// ---------------------------------------------------------------------------

namespace ioutil {

inline std::string trim(const std::string& s) {
  std::size_t first = 0, last = s.size();
  while (first < last && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(s[last - 1]))) --last;
  return s.substr(first, last - first);
}

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

inline std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

inline double parse_double(const std::string& text, long line_number) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') {
    throw ParseError("expected a number, got '" + t + "'", line_number);
  }
  return value;
}

/// Complex literal "a", "bj", or "a+bj" / "a-bj" (also accepts an 'i'
/// suffix). No spaces inside the literal.
inline Complex parse_complex(const std::string& text, long line_number) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty complex literal", line_number);
  char* end = nullptr;
  const double first = std::strtod(t.c_str(), &end);
  if (end == t.c_str()) {
    throw ParseError("malformed complex literal '" + t + "'", line_number);
  }
  if (*end == '\0') return Complex(first, 0.0);
  if ((*end == 'j' || *end == 'i') && end[1] == '\0') return Complex(0.0, first);
  const char* rest = end;
  char* end2 = nullptr;
  const double second = std::strtod(rest, &end2);
  if (end2 == rest || !(*end2 == 'j' || *end2 == 'i') || end2[1] != '\0') {
    throw ParseError("malformed complex literal '" + t + "'", line_number);
  }
  return Complex(first, second);
}

inline std::string format_complex(Complex value) {
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "%.17g%+.17gj", value.real(),
                value.imag());
  return buffer;
}

struct Line {
  std::string text;
  long number = 0;
};

/// Reads the stream into comment-stripped, trimmed, non-empty lines.
inline std::vector<Line> significant_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  long number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string text = trim(strip_comment(raw));
    if (!text.empty()) lines.push_back(Line{text, number});
  }
  return lines;
}

struct Document {
  std::map<std::string, std::pair<std::string, long>> keys;
  std::vector<std::pair<std::string, std::vector<Line>>> sections;
};

inline Document parse_document(std::istream& in) {
  Document doc;
  std::vector<Line>* current_section = nullptr;
  for (const Line& line : significant_lines(in)) {
    if (line.text.front() == '[') {
      if (line.text.back() != ']') {
        throw ParseError("unterminated section header", line.number);
      }
      const std::string name = trim(line.text.substr(1, line.text.size() - 2));
      if (name.empty()) throw ParseError("empty section name", line.number);
      doc.sections.emplace_back(name, std::vector<Line>{});
      current_section = &doc.sections.back().second;
      continue;
    }
    if (current_section) {
      current_section->push_back(line);
      continue;
    }
    const auto equals = line.text.find('=');
    if (equals == std::string::npos) {
      throw ParseError("expected 'key = value' before the first section",
                       line.number);
    }
    const std::string key = trim(line.text.substr(0, equals));
    const std::string value = trim(line.text.substr(equals + 1));
    if (key.empty() || value.empty()) {
      throw ParseError("expected 'key = value'", line.number);
    }
    doc.keys[key] = {value, line.number};
  }
  return doc;
}

inline const std::pair<std::string, long>& require_key(const Document& doc,
                                                       const std::string& key) {
  const auto it = doc.keys.find(key);
  if (it == doc.keys.end()) {
    throw ParseError("missing required key '" + key + "'", 0);
  }
  return it->second;
}

template <class Scalar, class CellParser>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> parse_table(
    const std::vector<Line>& rows, Eigen::Index expected_rows,
    Eigen::Index expected_cols, const std::string& name, CellParser parse) {
  if (Eigen::Index(rows.size()) != expected_rows) {
    const long line = rows.empty() ? 0 : rows.front().number;
    throw ParseError("section [" + name + "] has " +
                         std::to_string(rows.size()) + " rows, expected " +
                         std::to_string(expected_rows),
                     line);
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> table(expected_rows,
                                                              expected_cols);
  for (Eigen::Index i = 0; i < expected_rows; ++i) {
    const auto cells = split_cells(rows[std::size_t(i)].text);
    if (Eigen::Index(cells.size()) != expected_cols) {
      throw ParseError("section [" + name + "] row has " +
                           std::to_string(cells.size()) + " columns, expected " +
                           std::to_string(expected_cols),
                       rows[std::size_t(i)].number);
    }
    for (Eigen::Index j = 0; j < expected_cols; ++j) {
      table(i, j) = parse(cells[std::size_t(j)], rows[std::size_t(i)].number);
    }
  }
  return table;
}

}  // namespace ioutil

// ---------------------------------------------------------------------------
// Scenario files: link parameters plus geometry, either as path-length
// tables or as 3D positions. See the README for the schema.
// ---------------------------------------------------------------------------

inline Scenario read_scenario(std::istream& in) {
  using namespace ioutil;
  const Document doc = parse_document(in);

  LinkConfig cfg;
  cfg.tx_antennas = Eigen::Index(
      parse_double(require_key(doc, "tx").first, require_key(doc, "tx").second));
  cfg.ris_elements = Eigen::Index(parse_double(
      require_key(doc, "ris").first, require_key(doc, "ris").second));
  cfg.rx_antennas = Eigen::Index(
      parse_double(require_key(doc, "rx").first, require_key(doc, "rx").second));
  cfg.wavelength = parse_double(require_key(doc, "lambda").first,
                                require_key(doc, "lambda").second);
  if (const auto it = doc.keys.find("r"); it != doc.keys.end()) {
    cfg.port_resistance = parse_double(it->second.first, it->second.second);
  }
  bool blocked = false;
  if (const auto it = doc.keys.find("blocked_direct"); it != doc.keys.end()) {
    const std::string& v = it->second.first;
    if (v == "true" || v == "1") {
      blocked = true;
    } else if (v == "false" || v == "0") {
      blocked = false;
    } else {
      throw ParseError("blocked_direct must be true or false", it->second.second);
    }
  }
  cfg.validate();

  std::map<std::string, const std::vector<Line>*> sections;
  for (const auto& [name, rows] : doc.sections) {
    if (sections.count(name)) {
      throw ParseError("duplicate section [" + name + "]",
                       rows.empty() ? 0 : rows.front().number);
    }
    sections[name] = &rows;
  }
  auto real_cell = [](const std::string& cell, long line) {
    return parse_double(cell, line);
  };
  auto table = [&](const std::string& name, Eigen::Index rows,
                   Eigen::Index cols) -> std::optional<Eigen::MatrixXd> {
    const auto it = sections.find(name);
    if (it == sections.end()) return std::nullopt;
    return parse_table<double>(*it->second, rows, cols, name, real_cell);
  };

  const bool has_positions = sections.count("tx_positions") != 0;
  LinkGeometry geom = [&] {
    if (has_positions) {
      auto positions = [&](const std::string& name, Eigen::Index count) {
        const auto m = table(name, count, 3);
        if (!m) throw ParseError("missing section [" + name + "]", 0);
        std::vector<Eigen::Vector3d> points(static_cast<std::size_t>(count));
        for (Eigen::Index i = 0; i < count; ++i) {
          points[static_cast<std::size_t>(i)] = m->row(i).transpose();
        }
        return points;
      };
      return LinkGeometry::from_positions(
          positions("tx_positions", cfg.tx_antennas),
          positions("ris_positions", cfg.ris_elements),
          positions("rx_positions", cfg.rx_antennas), blocked);
    }
    auto d_rs = table("path_ris_from_tx", cfg.ris_elements, cfg.tx_antennas);
    auto d_dr = table("path_rx_from_ris", cfg.rx_antennas, cfg.ris_elements);
    auto d_ds = table("path_rx_from_tx", cfg.rx_antennas, cfg.tx_antennas);
    if (!d_rs || !d_dr) {
      throw ParseError(
          "scenario needs either position sections or the path sections "
          "[path_ris_from_tx] and [path_rx_from_ris]",
          0);
    }
    if (blocked && d_ds) {
      throw ParseError(
          "blocked_direct = true conflicts with a [path_rx_from_tx] section", 0);
    }
    LinkGeometry g = LinkGeometry::from_path_lengths(
        std::move(*d_rs), std::move(*d_dr),
        blocked ? std::optional<Eigen::MatrixXd>() : std::move(d_ds));
    auto amp_rs = table("amp_ris_from_tx", cfg.ris_elements, cfg.tx_antennas);
    auto amp_dr = table("amp_rx_from_ris", cfg.rx_antennas, cfg.ris_elements);
    auto amp_ds = table("amp_rx_from_tx", cfg.rx_antennas, cfg.tx_antennas);
    if (amp_rs || amp_dr || amp_ds) {
      g = g.with_amplitude_reference(
          amp_rs ? std::move(*amp_rs) : Eigen::MatrixXd(),
          amp_dr ? std::move(*amp_dr) : Eigen::MatrixXd(),
          amp_ds ? std::move(*amp_ds) : Eigen::MatrixXd());
    }
    return g;
  }();

  if (!blocked && !has_positions && geom.path_rx_from_tx().size() == 0) {
    throw ParseError(
        "direct path table [path_rx_from_tx] missing; set blocked_direct = "
        "true for a blocked link",
        0);
  }
  geom.validate(cfg);
  return Scenario{cfg, geom};
}

inline Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  try {
    return read_scenario(in);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Multiport block files: a full Z or S matrix, stored block by block.
// ---------------------------------------------------------------------------

struct MultiportFile {
  enum class Kind { impedance, scattering };
  Kind kind = Kind::impedance;
  double port_resistance = 50.0;
  BlockPartition partition;
  Eigen::MatrixXcd dense;

  MultiportImpedance as_impedance() const {
    if (kind != Kind::impedance) {
      throw StructureError("block file holds scattering parameters");
    }
    return MultiportImpedance(partition, dense);
  }
  MultiportScattering as_scattering() const {
    if (kind != Kind::scattering) {
      throw StructureError("block file holds impedance parameters");
    }
    return MultiportScattering(partition, dense);
  }
};

namespace ioutil {

inline const std::array<std::pair<PortGroup, PortGroup>, 9>& block_order() {
  static const std::array<std::pair<PortGroup, PortGroup>, 9> order = {{
      {PortGroup::tx, PortGroup::tx},
      {PortGroup::tx, PortGroup::ris},
      {PortGroup::tx, PortGroup::rx},
      {PortGroup::ris, PortGroup::tx},
      {PortGroup::ris, PortGroup::ris},
      {PortGroup::ris, PortGroup::rx},
      {PortGroup::rx, PortGroup::tx},
      {PortGroup::rx, PortGroup::ris},
      {PortGroup::rx, PortGroup::rx},
  }};
  return order;
}

inline std::string block_section_name(PortGroup row, PortGroup col) {
  if (row == col) return std::string(to_string(row)) + "_self";
  return std::string(to_string(row)) + "_from_" + to_string(col);
}

}  // namespace ioutil

inline MultiportFile read_multiport(std::istream& in) {
  using namespace ioutil;
  const Document doc = parse_document(in);

  MultiportFile file;
  const auto& [kind_text, kind_line] = require_key(doc, "kind");
  if (kind_text == "impedance") {
    file.kind = MultiportFile::Kind::impedance;
  } else if (kind_text == "scattering") {
    file.kind = MultiportFile::Kind::scattering;
  } else {
    throw ParseError("kind must be 'impedance' or 'scattering'", kind_line);
  }
  file.port_resistance = parse_double(require_key(doc, "r").first,
                                      require_key(doc, "r").second);
  if (!(file.port_resistance > 0.0)) {
    throw ParseError("r must be positive", require_key(doc, "r").second);
  }
  file.partition.tx = Eigen::Index(
      parse_double(require_key(doc, "tx").first, require_key(doc, "tx").second));
  file.partition.ris = Eigen::Index(parse_double(
      require_key(doc, "ris").first, require_key(doc, "ris").second));
  file.partition.rx = Eigen::Index(
      parse_double(require_key(doc, "rx").first, require_key(doc, "rx").second));
  if (file.partition.tx < 1 || file.partition.ris < 1 || file.partition.rx < 1) {
    throw ParseError("tx, ris and rx counts must be >= 1", 0);
  }

  const Eigen::Index total = file.partition.total();
  file.dense = Eigen::MatrixXcd::Zero(total, total);

  auto complex_cell = [](const std::string& cell, long line) {
    return parse_complex(cell, line);
  };
  for (const auto& [name, rows] : doc.sections) {
    bool known = false;
    for (const auto& [row_group, col_group] : block_order()) {
      if (name != block_section_name(row_group, col_group)) continue;
      known = true;
      const Eigen::Index block_rows = file.partition.size(row_group);
      const Eigen::Index block_cols = file.partition.size(col_group);
      const Eigen::MatrixXcd block = parse_table<Complex>(
          rows, block_rows, block_cols, name, complex_cell);
      file.dense.block(file.partition.offset(row_group),
                       file.partition.offset(col_group), block_rows,
                       block_cols) = block;
      break;
    }
    if (!known) {
      throw ParseError("unknown section [" + name + "]",
                       rows.empty() ? 0 : rows.front().number);
    }
  }
  if (!file.dense.allFinite()) {
    throw ParseError("multiport file contains non-finite entries", 0);
  }
  return file;
}

inline MultiportFile read_multiport_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open multiport file '" + path + "'");
  try {
    return read_multiport(in);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

inline void write_multiport(std::ostream& out, const MultiportFile& file) {
  using namespace ioutil;
  out << "kind = "
      << (file.kind == MultiportFile::Kind::impedance ? "impedance"
                                                      : "scattering")
      << "\n";
  {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", file.port_resistance);
    out << "r = " << buffer << "\n";
  }
  out << "tx = " << file.partition.tx << "\n";
  out << "ris = " << file.partition.ris << "\n";
  out << "rx = " << file.partition.rx << "\n";
  for (const auto& [row_group, col_group] : block_order()) {
    out << "\n[" << block_section_name(row_group, col_group) << "]\n";
    const Eigen::Index r0 = file.partition.offset(row_group);
    const Eigen::Index c0 = file.partition.offset(col_group);
    for (Eigen::Index i = 0; i < file.partition.size(row_group); ++i) {
      for (Eigen::Index j = 0; j < file.partition.size(col_group); ++j) {
        if (j) out << ", ";
        out << format_complex(file.dense(r0 + i, c0 + j));
      }
      out << "\n";
    }
  }
}

inline void write_multiport_file(const std::string& path,
                                 const MultiportFile& file) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_multiport(out, file);
}

}  // namespace rismp
