#pragma once

// Text formats for nodal fields.
//
// CSV: first line "nx,ny,h", then ny rows (y ascending) of nx values printed
// with 17 significant digits, so reading a file back reproduces every double.
// PGM: plain "P2" graymap, rows top (largest y) to bottom, maxval 255.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "discrete_ops.hpp"

namespace segregation {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string field_to_csv(const ScalarField& u) {
  const auto& d = u.domain();
  std::string out = std::to_string(d.nx()) + "," + std::to_string(d.ny()) + "," + format_double(d.h()) + "\n";
  for (int j = 0; j < d.ny(); ++j) {
    for (int i = 0; i < d.nx(); ++i) {
      if (i) out += ',';
      out += format_double(u[d.node(i, j)]);
    }
    out += '\n';
  }
  return out;
}

inline void emit_field(const ScalarField& u, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << field_to_csv(u);
  if (!f) throw IoError("write failed for '" + path + "'");
}

struct RawField {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  std::vector<double> values;  ///< row-major, y ascending
};

inline RawField parse_field_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  RawField raw;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ls(s);
    while (std::getline(ls, cur, ',')) parts.push_back(cur);
    return parts;
  };
  if (!std::getline(in, line)) throw IoError("empty field file");
  const auto head = split(line);
  if (head.size() != 3) throw IoError("field header must be 'nx,ny,h'");
  raw.nx = std::stoi(head[0]);
  raw.ny = std::stoi(head[1]);
  raw.h = std::stod(head[2]);
  if (raw.nx <= 0 || raw.ny <= 0) throw IoError("field header has non-positive dimensions");
  raw.values.reserve(static_cast<std::size_t>(raw.nx) * raw.ny);
  for (int j = 0; j < raw.ny; ++j) {
    if (!std::getline(in, line)) throw IoError("field file ends after " + std::to_string(j) + " rows");
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != raw.nx)
      throw IoError("row " + std::to_string(j) + " has " + std::to_string(cells.size()) + " values");
    for (const auto& c : cells) raw.values.push_back(std::stod(c));
  }
  return raw;
}

inline RawField read_field_raw(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_field_csv(ss.str());
}

/// Reads a CSV field back onto `domain`; the grid must match the header.
inline ScalarField read_field(const std::string& path, const DomainPtr& domain) {
  RawField raw = read_field_raw(path);
  if (raw.nx != domain->nx() || raw.ny != domain->ny() || raw.h != domain->h())
    throw DomainMismatchError("field file '" + path + "' does not match the domain grid");
  return ScalarField(domain, std::move(raw.values));
}

inline std::string field_to_pgm(const ScalarField& u) {
  const auto& d = u.domain();
  const double scale = u.max_abs();
  std::string out = "P2\n" + std::to_string(d.nx()) + " " + std::to_string(d.ny()) + "\n255\n";
  for (int j = d.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < d.nx(); ++i) {
      long pixel = 0;
      if (scale > 0.0) pixel = std::lround(255.0 * u[d.node(i, j)] / scale);
      pixel = std::clamp(pixel, 0L, 255L);
      if (i) out += ' ';
      out += std::to_string(pixel);
    }
    out += '\n';
  }
  return out;
}

inline void emit_image(const ScalarField& u, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << field_to_pgm(u);
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace segregation
