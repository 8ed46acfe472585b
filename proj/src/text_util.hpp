#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spinsim::detail {

struct Token {
  std::string text;
  int col = 1;  // 1-based
};

std::vector<std::string> split_lines(std::string_view text);

// Whitespace tokenizer; '#' starts a comment that runs to end of line.
std::vector<Token> tokenize(std::string_view line);

int to_int(const Token& tok, const std::string& source, int line);
double to_real(const Token& tok, const std::string& source, int line);

// Shortest %g form that parses back to the same double.
std::string fmt_exact(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace spinsim::detail
