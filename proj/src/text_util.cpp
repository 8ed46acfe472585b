#include "text_util.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spinsim/types.hpp"

namespace spinsim {

std::string fmt_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace detail {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '#') ++j;
    out.push_back({std::string(line.substr(i, j - i)), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

int to_int(const Token& tok, const std::string& source, int line) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(tok.text.c_str(), &end, 10);
  if (end == tok.text.c_str() || *end != '\0' || errno != 0) {
    throw ParseError(source, line, tok.col, "expected an integer, got '" + tok.text + "'");
  }
  return static_cast<int>(v);
}

double to_real(const Token& tok, const std::string& source, int line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.text.c_str(), &end);
  if (end == tok.text.c_str() || *end != '\0' || errno != 0 || !std::isfinite(v)) {
    throw ParseError(source, line, tok.col, "expected a number, got '" + tok.text + "'");
  }
  return v;
}

std::string fmt_exact(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  for (int prec = 12; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << contents;
}

}  // namespace detail
}  // namespace spinsim
