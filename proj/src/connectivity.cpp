#include "spinsim/connectivity.hpp"

#include <sstream>

#include "text_util.hpp"

namespace spinsim {

void ConnectivityMatrix::validate() const {
  const int t = size();
  if (m.rows() != t || m.cols() != t) throw InputError("connectivity matrix must be square with one row per transition");
  for (int i = 0; i < t; ++i) {
    if (m(i, i) != 0) throw InputError("connectivity matrix diagonal must be zero");
    for (int j = 0; j < t; ++j) {
      if (m(i, j) < -1 || m(i, j) > 1) throw InputError("connectivity entries must be -1, 0 or 1");
      if (m(i, j) != m(j, i)) throw InputError("connectivity matrix must be symmetric");
    }
  }
}

int connectivity_sign(const LevelEdge& a, const LevelEdge& b) {
  const int shared = int(a.lower == b.lower) + int(a.lower == b.upper) + int(a.upper == b.lower) + int(a.upper == b.upper);
  if (shared != 1) return 0;
  return a.lower == b.upper || a.upper == b.lower ? 1 : -1;
}

ConnectivityMatrix connectivity_of(const LevelDiagram& ld) {
  ConnectivityMatrix cm;
  const int t = static_cast<int>(ld.edges.size());
  cm.m = IMatrix::Zero(t, t);
  for (int i = 0; i < t; ++i) {
    cm.ids.push_back(ld.edges[i].id);
    for (int j = 0; j < t; ++j) {
      if (i != j) cm.m(i, j) = connectivity_sign(ld.edges[i], ld.edges[j]);
    }
  }
  return cm;
}

ConnectivityMatrix parse_connectivity(std::string_view text, const std::string& source) {
  std::vector<std::vector<int>> rows;
  int line_no = 0;
  int first_line = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++line_no;
    const auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    if (rows.empty()) first_line = line_no;
    std::vector<int> row;
    for (const auto& tok : toks) {
      const int v = detail::to_int(tok, source, line_no);
      if (v < -1 || v > 1) throw ParseError(source, line_no, tok.col, "entries must be -1, 0 or 1");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, line_no, toks.front().col, "row length differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, 1, 1, "empty connectivity matrix");
  const int t = static_cast<int>(rows.size());
  if (static_cast<int>(rows.front().size()) != t) {
    throw ParseError(source, first_line, 1, "matrix is not square (" + std::to_string(t) + " rows)");
  }
  ConnectivityMatrix cm;
  cm.m.resize(t, t);
  for (int i = 0; i < t; ++i) {
    cm.ids.push_back(i + 1);
    for (int j = 0; j < t; ++j) cm.m(i, j) = rows[i][j];
  }
  try {
    cm.validate();
  } catch (const InputError& e) {
    throw ParseError(source, first_line, 1, e.what());
  }
  return cm;
}

ConnectivityMatrix load_connectivity(const std::string& path) {
  return parse_connectivity(detail::read_file(path), path);
}

std::string format_connectivity(const ConnectivityMatrix& cm) {
  std::ostringstream out;
  for (int i = 0; i < cm.size(); ++i) {
    for (int j = 0; j < cm.size(); ++j) {
      if (j) out << ' ';
      out << (cm.m(i, j) < 0 ? "" : " ") << cm.m(i, j);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_diagram(const LevelDiagram& ld) {
  std::ostringstream out;
  for (int k = 0; k < ld.levels(); ++k) out << "level " << k << " mz " << fmt_real(ld.level_mz[k]) << '\n';
  for (const auto& e : ld.edges) {
    out << "edge " << e.id << ' ' << e.lower << ' ' << e.upper;
    if (e.ambiguous) out << " ambiguous";
    out << '\n';
  }
  return out.str();
}

LevelDiagram parse_diagram(std::string_view text, const std::string& source) {
  LevelDiagram ld;
  int line_no = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++line_no;
    const auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    if (toks[0].text == "level" && toks.size() == 4 && toks[2].text == "mz") {
      const int idx = detail::to_int(toks[1], source, line_no);
      if (idx != ld.levels()) throw ParseError(source, line_no, toks[1].col, "levels must be listed in order");
      ld.level_mz.push_back(detail::to_real(toks[3], source, line_no));
    } else if (toks[0].text == "edge" && (toks.size() == 4 || (toks.size() == 5 && toks[4].text == "ambiguous"))) {
      LevelEdge e;
      e.id = detail::to_int(toks[1], source, line_no);
      e.lower = detail::to_int(toks[2], source, line_no);
      e.upper = detail::to_int(toks[3], source, line_no);
      e.ambiguous = toks.size() == 5;
      for (int k : {2, 3}) {
        const int v = k == 2 ? e.lower : e.upper;
        if (v < 0 || v >= ld.levels()) throw ParseError(source, line_no, toks[k].col, "unknown level");
      }
      ld.edges.push_back(e);
    } else {
      throw ParseError(source, line_no, toks[0].col, "expected 'level <idx> mz <value>' or 'edge <tid> <lower> <upper>'");
    }
  }
  int n = 0;
  while ((1 << n) < ld.levels()) ++n;
  ld.n = n;
  return ld;
}

}  // namespace spinsim
