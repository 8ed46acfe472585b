#pragma once

#include <string>
#include <vector>

namespace acceptance {

struct Outcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> run_all(const std::string& data_dir);

// "criterion N PASS|FAIL title: detail"
std::string format_line(const Outcome& o);

}  // namespace acceptance
