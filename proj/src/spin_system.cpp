#include "spinsim/spin_system.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace spinsim {

SpinSystem SpinSystem::make(std::string name, std::vector<double> offsets) {
  SpinSystem sys;
  sys.name = std::move(name);
  sys.n = static_cast<int>(offsets.size());
  sys.offset_hz = std::move(offsets);
  sys.j_hz = RMatrix::Zero(sys.n, sys.n);
  sys.d_hz = RMatrix::Zero(sys.n, sys.n);
  return sys;
}

void SpinSystem::set_j(int i, int j, double hz) {
  j_hz(i, j) = hz;
  j_hz(j, i) = hz;
}

void SpinSystem::set_d(int i, int j, double hz) {
  d_hz(i, j) = hz;
  d_hz(j, i) = hz;
}

void SpinSystem::validate() const {
  if (n < 1 || n > kMaxSpins) {
    throw InputError("spin count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxSpins));
  }
  if (static_cast<int>(offset_hz.size()) != n) throw InputError("offset count does not match spin count");
  if (j_hz.rows() != n || j_hz.cols() != n || d_hz.rows() != n || d_hz.cols() != n) {
    throw InputError("coupling matrix dimension does not match spin count");
  }
  for (double v : offset_hz) {
    if (!std::isfinite(v)) throw InputError("non-finite offset");
  }
  for (int i = 0; i < n; ++i) {
    if (j_hz(i, i) != 0.0 || d_hz(i, i) != 0.0) throw InputError("coupling matrix diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(j_hz(i, j)) || !std::isfinite(d_hz(i, j))) throw InputError("non-finite coupling");
      if (j_hz(i, j) != j_hz(j, i) || d_hz(i, j) != d_hz(j, i)) throw InputError("coupling matrix not symmetric");
    }
  }
  for (const auto& [a, b] : relabel) {
    if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n ||
        a.find_first_not_of("01") != std::string::npos || b.find_first_not_of("01") != std::string::npos) {
      throw InputError("relabel entries must be " + std::to_string(n) + "-bit strings");
    }
  }
  for (std::size_t i = 0; i < pinned.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (pinned[i].id == pinned[j].id) throw InputError("transition id " + std::to_string(pinned[i].id) + " pinned twice");
    }
  }
}

namespace {

int parse_index(const detail::Token& tok, int n, const std::string& source, int line) {
  const int idx = detail::to_int(tok, source, line);
  if (n <= 0) throw ParseError(source, line, tok.col, "coupling given before nspins");
  if (idx < 1 || idx > n) throw ParseError(source, line, tok.col, "spin index out of range");
  return idx - 1;
}

}  // namespace

SpinSystem parse_spin_system(std::string_view text, const std::string& source) {
  SpinSystem sys;
  bool have_offsets = false;
  int line_no = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++line_no;
    const auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    const std::string& key = toks[0].text;
    auto need = [&](std::size_t count) {
      if (toks.size() != count) {
        throw ParseError(source, line_no, toks[0].col,
                         "'" + key + "' expects " + std::to_string(count - 1) + " argument(s)");
      }
    };
    if (key == "name") {
      if (toks.size() < 2) throw ParseError(source, line_no, toks[0].col, "'name' expects a value");
      sys.name = toks[1].text;
    } else if (key == "nspins") {
      need(2);
      const int n = detail::to_int(toks[1], source, line_no);
      if (n < 1 || n > kMaxSpins) {
        throw ParseError(source, line_no, toks[1].col, "nspins must be in 1.." + std::to_string(kMaxSpins));
      }
      if (sys.n != 0) throw ParseError(source, line_no, toks[0].col, "nspins given twice");
      sys.n = n;
      sys.offset_hz.assign(n, 0.0);
      sys.j_hz = RMatrix::Zero(n, n);
      sys.d_hz = RMatrix::Zero(n, n);
    } else if (key == "offset_hz") {
      if (sys.n == 0) throw ParseError(source, line_no, toks[0].col, "offset_hz given before nspins");
      need(static_cast<std::size_t>(sys.n) + 1);
      for (int i = 0; i < sys.n; ++i) sys.offset_hz[i] = detail::to_real(toks[i + 1], source, line_no);
      have_offsets = true;
    } else if (key == "j_hz" || key == "d_hz") {
      need(4);
      const int i = parse_index(toks[1], sys.n, source, line_no);
      const int j = parse_index(toks[2], sys.n, source, line_no);
      if (i == j) throw ParseError(source, line_no, toks[2].col, "self coupling not allowed");
      const double v = detail::to_real(toks[3], source, line_no);
      if (key == "j_hz") sys.set_j(i, j, v); else sys.set_d(i, j, v);
    } else if (key == "relabel") {
      need(3);
      for (int k = 1; k <= 2; ++k) {
        if (static_cast<int>(toks[k].text.size()) != sys.n ||
            toks[k].text.find_first_not_of("01") != std::string::npos) {
          throw ParseError(source, line_no, toks[k].col, "expected a " + std::to_string(sys.n) + "-bit label");
        }
      }
      sys.relabel.emplace_back(toks[1].text, toks[2].text);
    } else if (key == "transition") {
      need(4);
      PinnedTransition pin;
      pin.id = detail::to_int(toks[1], source, line_no);
      if (pin.id < 1) throw ParseError(source, line_no, toks[1].col, "transition id must be positive");
      for (int k = 2; k <= 3; ++k) {
        if (static_cast<int>(toks[k].text.size()) != sys.n ||
            toks[k].text.find_first_not_of("01") != std::string::npos) {
          throw ParseError(source, line_no, toks[k].col, "expected a " + std::to_string(sys.n) + "-bit label");
        }
      }
      pin.a = toks[2].text;
      pin.b = toks[3].text;
      sys.pinned.push_back(std::move(pin));
    } else {
      throw ParseError(source, line_no, toks[0].col, "unknown keyword '" + key + "'");
    }
  }
  if (sys.n == 0) throw ParseError(source, std::max(line_no, 1), 1, "missing nspins");
  if (!have_offsets) throw ParseError(source, std::max(line_no, 1), 1, "missing offset_hz");
  try {
    sys.validate();
  } catch (const InputError& e) {
    throw ParseError(source, line_no, 1, e.what());
  }
  return sys;
}

SpinSystem load_spin_system(const std::string& path) {
  return parse_spin_system(detail::read_file(path), path);
}

std::string format_spin_system(const SpinSystem& sys) {
  std::ostringstream os;
  if (!sys.name.empty()) os << "name " << sys.name << "\n";
  os << "nspins " << sys.n << "\noffset_hz";
  for (double v : sys.offset_hz) os << ' ' << fmt_real(v);
  os << "\n";
  for (int i = 0; i < sys.n; ++i) {
    for (int j = i + 1; j < sys.n; ++j) {
      if (sys.j_hz(i, j) != 0.0) os << "j_hz " << i + 1 << ' ' << j + 1 << ' ' << fmt_real(sys.j_hz(i, j)) << "\n";
      if (sys.d_hz(i, j) != 0.0) os << "d_hz " << i + 1 << ' ' << j + 1 << ' ' << fmt_real(sys.d_hz(i, j)) << "\n";
    }
  }
  for (const auto& [a, b] : sys.relabel) os << "relabel " << a << ' ' << b << "\n";
  for (const auto& p : sys.pinned) os << "transition " << p.id << ' ' << p.a << ' ' << p.b << "\n";
  return os.str();
}

}  // namespace spinsim
