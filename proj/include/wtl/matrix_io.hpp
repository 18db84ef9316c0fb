#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wtl/errors.hpp"
#include "wtl/rational.hpp"
#include "wtl/sparse_matrix.hpp"

namespace wtl::io {

// {"nrows": r, "ncols": c, "entries": [[row, col, "p/q"], ...]} in row-major order.
inline nlohmann::json to_json(const SparseRationalMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  m.for_each([&](std::size_t r, std::size_t c, const Rational& v) {
    entries.push_back(nlohmann::json::array({r, c, to_string(v)}));
  });
  return {{"nrows", m.rows()}, {"ncols", m.cols()}, {"entries", std::move(entries)}};
}

inline SparseRationalMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    SparseRationalMatrix m(j.at("nrows").get<std::size_t>(), j.at("ncols").get<std::size_t>());
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3) throw ParseError("matrix entry must be [row, col, \"p/q\"]");
      const auto r = e[0].get<std::size_t>();
      const auto c = e[1].get<std::size_t>();
      if (r >= m.rows() || c >= m.cols()) throw ParseError("matrix entry index out of range");
      const Rational v = e[2].is_string() ? parse_rational(e[2].get<std::string>()) : Rational(e[2].get<long>());
      if (m.at(r, c) != 0) throw ParseError("duplicate matrix entry");
      m.set(r, c, v);
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed matrix JSON: ") + ex.what());
  }
}

// Dense whitespace-separated table, one row per line; entries are integers or p/q.
inline std::string to_dense_text(const SparseRationalMatrix& m) {
  std::ostringstream os;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << to_display(m.at(r, c));
    }
    os << '\n';
  }
  return os.str();
}

inline SparseRationalMatrix matrix_from_dense_text(std::istream& in) {
  std::vector<std::vector<Rational>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Rational> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_rational(tok));
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("ragged dense matrix");
    rows.push_back(std::move(row));
  }
  SparseRationalMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.set(r, c, rows[r][c]);
  return m;
}

inline SparseRationalMatrix matrix_from_dense_text(const std::string& text) {
  std::istringstream in(text);
  return matrix_from_dense_text(in);
}

// Reads either format; JSON is recognised by a leading '{'.
inline SparseRationalMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& ex) {
      throw ParseError(std::string("malformed matrix JSON: ") + ex.what());
    }
  }
  return matrix_from_dense_text(text);
}

inline void write_matrix_file(const std::string& path, const SparseRationalMatrix& m, bool dense = false) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write matrix file '" + path + "'");
  if (dense)
    out << to_dense_text(m);
  else
    out << to_json(m).dump() << '\n';
}

}  // namespace wtl::io
