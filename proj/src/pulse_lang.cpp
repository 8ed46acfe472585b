#include "spinsim/pulse_lang.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace spinsim {

bool Instruction::operator==(const Instruction& o) const {
  return kind == o.kind && transition == o.transition && angle_deg == o.angle_deg && angle_slot == o.angle_slot &&
         phase == o.phase &&
         delay == o.delay && seconds == o.seconds && points == o.points && dwell == o.dwell;
}

bool PulseProgram::has_symbolic_delay() const {
  for (const auto& ins : instructions) {
    if (ins.kind == Instruction::Kind::Delay && ins.delay != DelayKind::Seconds) return true;
  }
  return false;
}

const Instruction* PulseProgram::acquire() const {
  const Instruction* found = nullptr;
  for (const auto& ins : instructions) {
    if (ins.kind == Instruction::Kind::Acquire) found = &ins;
  }
  return found;
}

namespace {

using detail::Token;

double normalize_phase(double deg) {
  double v = std::fmod(deg, 360.0);
  if (v < 0) v += 360.0;
  if (v == 0.0 || v == 360.0) v = 0.0;
  return v;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

bool is_transition_id(std::string_view s) {
  if (s.size() < 2 || s[0] != 't') return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// "$NAME" or a bare identifier that cannot be read as anything else.
std::optional<std::string> slot_name(std::string_view s) {
  if (!s.empty() && s[0] == '$') s.remove_prefix(1);
  if (!is_identifier(s) || is_transition_id(s) || s == "x" || s == "y") return std::nullopt;
  return std::string(s);
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  PulseProgram run();

 private:
  using SlotKind = CycleValue::Kind;
  struct SlotUse {
    SlotKind kind = SlotKind::Phase;
    SourceLoc loc;
  };
  struct RawRow {
    int line = 0;
    std::vector<Token> values;
    int receiver = 1;
  };

  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    throw ParseError(source_, line, col, msg);
  }

  std::optional<double> phase_literal(const Token& tok, int line) const;
  PhaseRef phase(const Token& tok, int line);
  std::optional<TransitionRef> transition_literal(const Token& tok, int line) const;
  TransitionRef transition(const Token& tok, int line);
  void angle(const Token& tok, int line, Instruction& ins);
  void use_slot(const std::string& name, SlotKind kind, int line, int col);
  void finish(PulseProgram& prog);

  std::string_view text_;
  std::string source_;
  std::map<std::string, SlotUse> uses_;
  std::vector<RawRow> raw_rows_;
};

std::optional<double> Parser::phase_literal(const Token& tok, int line) const {
  const std::string& t = tok.text;
  if (t == "x") return 0.0;
  if (t == "y") return 90.0;
  if (t == "-x") return 180.0;
  if (t == "-y") return 270.0;
  if (t.rfind("deg:", 0) == 0) {
    const Token num{t.substr(4), tok.col + 4};
    return normalize_phase(detail::to_real(num, source_, line));
  }
  return std::nullopt;
}

PhaseRef Parser::phase(const Token& tok, int line) {
  PhaseRef ref;
  if (auto v = phase_literal(tok, line)) {
    ref.deg = *v;
    return ref;
  }
  if (auto name = slot_name(tok.text)) {
    ref.is_slot = true;
    ref.slot = *name;
    use_slot(*name, SlotKind::Phase, line, tok.col);
    return ref;
  }
  fail(line, tok.col, "expected a phase (x, y, -x, -y, deg:F or $SLOT), got '" + tok.text + "'");
}

std::optional<TransitionRef> Parser::transition_literal(const Token& tok, int line) const {
  const std::string& t = tok.text;
  TransitionRef ref;
  if (is_transition_id(t)) {
    ref.kind = TransitionRef::Kind::Id;
    ref.id = detail::to_int(Token{t.substr(1), tok.col + 1}, source_, line);
    if (ref.id < 1) fail(line, tok.col, "transition ids start at t1");
    return ref;
  }
  if (t.size() >= 5 && t.front() == '(' && t.back() == ')') {
    const auto comma = t.find(',');
    if (comma == std::string::npos) fail(line, tok.col, "expected (bits,bits)");
    ref.kind = TransitionRef::Kind::Pair;
    ref.a = t.substr(1, comma - 1);
    ref.b = t.substr(comma + 1, t.size() - comma - 2);
    auto bits_ok = [](const std::string& s) { return !s.empty() && s.find_first_not_of("01") == std::string::npos; };
    if (!bits_ok(ref.a) || !bits_ok(ref.b) || ref.a.size() != ref.b.size()) {
      fail(line, tok.col, "malformed state pair '" + t + "'");
    }
    return ref;
  }
  return std::nullopt;
}

TransitionRef Parser::transition(const Token& tok, int line) {
  if (auto ref = transition_literal(tok, line)) return *ref;
  if (auto name = slot_name(tok.text)) {
    TransitionRef ref;
    ref.kind = TransitionRef::Kind::Slot;
    ref.slot = *name;
    use_slot(*name, SlotKind::Transition, line, tok.col);
    return ref;
  }
  fail(line, tok.col, "expected a transition (tN, (bits,bits) or $SLOT), got '" + tok.text + "'");
}

void Parser::angle(const Token& tok, int line, Instruction& ins) {
  if (!tok.text.empty() && tok.text[0] == '$') {
    if (auto name = slot_name(tok.text)) {
      ins.angle_slot = *name;
      use_slot(*name, SlotKind::Angle, line, tok.col);
      return;
    }
  }
  ins.angle_deg = detail::to_real(tok, source_, line);
}

void Parser::use_slot(const std::string& name, SlotKind kind, int line, int col) {
  auto it = uses_.find(name);
  if (it == uses_.end()) {
    uses_[name] = {kind, {line, col}};
    return;
  }
  if (it->second.kind != kind) fail(line, col, "slot $" + name + " used for two different kinds of value");
}

PulseProgram Parser::run() {
  PulseProgram prog;
  prog.source = source_;
  int line_no = 0;
  for (const auto& raw : detail::split_lines(text_)) {
    ++line_no;
    const auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    const std::string& key = toks[0].text;
    auto need = [&](std::size_t count) {
      if (toks.size() != count) {
        fail(line_no, toks[0].col, "'" + key + "' expects " + std::to_string(count - 1) + " argument(s)");
      }
    };
    Instruction ins;
    ins.loc = {line_no, toks[0].col};
    if (key == "selpulse") {
      need(4);
      ins.kind = Instruction::Kind::SelPulse;
      ins.transition = transition(toks[1], line_no);
      ins.ref_loc = {line_no, toks[1].col};
      angle(toks[2], line_no, ins);
      ins.phase = phase(toks[3], line_no);
    } else if (key == "pulse") {
      need(3);
      ins.kind = Instruction::Kind::HardPulse;
      angle(toks[1], line_no, ins);
      ins.phase = phase(toks[2], line_no);
    } else if (key == "grad") {
      need(1);
      ins.kind = Instruction::Kind::Grad;
    } else if (key == "delay") {
      need(2);
      ins.kind = Instruction::Kind::Delay;
      if (toks[1].text == "t1") {
        ins.delay = DelayKind::T1;
      } else if (toks[1].text == "t2") {
        ins.delay = DelayKind::T2;
      } else {
        ins.seconds = detail::to_real(toks[1], source_, line_no);
        if (ins.seconds < 0) fail(line_no, toks[1].col, "delay must be non-negative");
      }
    } else if (key == "acquire") {
      need(3);
      ins.kind = Instruction::Kind::Acquire;
      ins.points = detail::to_int(toks[1], source_, line_no);
      if (ins.points < 1 || (ins.points & (ins.points - 1)) != 0) {
        fail(line_no, toks[1].col, "acquire points must be a power of two");
      }
      ins.dwell = detail::to_real(toks[2], source_, line_no);
      if (!(ins.dwell > 0)) fail(line_no, toks[2].col, "dwell must be positive");
    } else if (key == "cycle") {
      if (!prog.cycle.empty()) fail(line_no, toks[0].col, "only one cycle table is allowed");
      prog.cycle.defined = true;
      prog.cycle.loc = {line_no, toks[0].col};
      for (std::size_t k = 1; k < toks.size(); ++k) {
        auto name = slot_name(toks[k].text);
        if (!name) fail(line_no, toks[k].col, "invalid slot name '" + toks[k].text + "'");
        for (const auto& s : prog.cycle.slots) {
          if (s == *name) fail(line_no, toks[k].col, "duplicate slot $" + *name);
        }
        prog.cycle.slots.push_back(*name);
      }
      continue;
    } else if (key == "row") {
      if (prog.cycle.empty()) fail(line_no, toks[0].col, "'row' before 'cycle'");
      RawRow row;
      row.line = line_no;
      row.values.assign(toks.begin() + 1, toks.end());
      if (!row.values.empty() && (row.values.back().text == "+" || row.values.back().text == "-")) {
        row.receiver = row.values.back().text == "+" ? 1 : -1;
        row.values.pop_back();
      }
      if (row.values.size() != prog.cycle.slots.size()) {
        fail(line_no, toks[0].col,
             "row has " + std::to_string(row.values.size()) + " value(s), cycle has " +
                 std::to_string(prog.cycle.slots.size()) + " slot(s)");
      }
      raw_rows_.push_back(std::move(row));
      continue;
    } else {
      fail(line_no, toks[0].col, "unknown instruction '" + key + "'");
    }
    prog.instructions.push_back(std::move(ins));
  }
  finish(prog);
  return prog;
}

void Parser::finish(PulseProgram& prog) {
  for (const auto& [name, use] : uses_) {
    bool defined = false;
    for (const auto& s : prog.cycle.slots) defined = defined || s == name;
    if (!defined) fail(use.loc.line, use.loc.col, "slot $" + name + " is not defined in a cycle table");
  }
  if (!prog.cycle.empty() && raw_rows_.empty()) {
    fail(prog.cycle.loc.line, prog.cycle.loc.col, "cycle table has no rows");
  }
  for (const auto& raw : raw_rows_) {
    CycleRow row;
    row.loc = {raw.line, 1};
    row.receiver = raw.receiver;
    for (std::size_t k = 0; k < raw.values.size(); ++k) {
      const Token& tok = raw.values[k];
      const auto use = uses_.find(prog.cycle.slots[k]);
      CycleValue v;
      const std::string& slot = prog.cycle.slots[k];
      if (use == uses_.end()) {
        if (auto p = phase_literal(tok, raw.line)) {
          v.value = *p;
        } else if (auto ref = transition_literal(tok, raw.line)) {
          v.kind = SlotKind::Transition;
          v.transition = *ref;
        } else {
          v.kind = SlotKind::Angle;
          v.value = detail::to_real(tok, source_, raw.line);
        }
      } else if (use->second.kind == SlotKind::Transition) {
        auto ref = transition_literal(tok, raw.line);
        if (!ref) fail(raw.line, tok.col, "expected a transition for slot $" + slot + ", got '" + tok.text + "'");
        v.kind = SlotKind::Transition;
        v.transition = *ref;
      } else if (use->second.kind == SlotKind::Angle) {
        v.kind = SlotKind::Angle;
        v.value = detail::to_real(tok, source_, raw.line);
      } else {
        auto p = phase_literal(tok, raw.line);
        if (!p) fail(raw.line, tok.col, "expected a phase for slot $" + slot + ", got '" + tok.text + "'");
        v.value = *p;
      }
      row.values.push_back(v);
      row.cols.push_back(tok.col);
    }
    prog.cycle.rows.push_back(std::move(row));
  }
}

std::string format_transition(const TransitionRef& ref) {
  switch (ref.kind) {
    case TransitionRef::Kind::Id: return "t" + std::to_string(ref.id);
    case TransitionRef::Kind::Pair: return "(" + ref.a + "," + ref.b + ")";
    case TransitionRef::Kind::Slot: return "$" + ref.slot;
  }
  return {};
}

std::string format_phase_ref(const PhaseRef& p) { return p.is_slot ? "$" + p.slot : format_phase(p.deg); }

std::string format_angle(const Instruction& ins) {
  return ins.angle_slot.empty() ? detail::fmt_exact(ins.angle_deg) : "$" + ins.angle_slot;
}

}  // namespace

std::string format_phase(double deg) {
  const double v = normalize_phase(deg);
  if (v == 0.0) return "x";
  if (v == 90.0) return "y";
  if (v == 180.0) return "-x";
  if (v == 270.0) return "-y";
  return "deg:" + detail::fmt_exact(v);
}

PulseProgram parse_program(std::string_view text, const std::string& source) {
  return Parser(text, source).run();
}

PulseProgram load_program(const std::string& path) { return parse_program(detail::read_file(path), path); }

std::string format_program(const PulseProgram& prog) {
  std::ostringstream out;
  for (const auto& ins : prog.instructions) {
    switch (ins.kind) {
      case Instruction::Kind::SelPulse:
        out << "selpulse " << format_transition(ins.transition) << ' ' << format_angle(ins) << ' '
            << format_phase_ref(ins.phase) << '\n';
        break;
      case Instruction::Kind::HardPulse:
        out << "pulse " << format_angle(ins) << ' ' << format_phase_ref(ins.phase) << '\n';
        break;
      case Instruction::Kind::Grad: out << "grad\n"; break;
      case Instruction::Kind::Delay:
        out << "delay "
            << (ins.delay == DelayKind::T1   ? std::string("t1")
                : ins.delay == DelayKind::T2 ? std::string("t2")
                                             : detail::fmt_exact(ins.seconds))
            << '\n';
        break;
      case Instruction::Kind::Acquire:
        out << "acquire " << ins.points << ' ' << detail::fmt_exact(ins.dwell) << '\n';
        break;
    }
  }
  if (!prog.cycle.empty()) {
    out << "cycle";
    for (const auto& s : prog.cycle.slots) out << ' ' << s;
    out << '\n';
    for (const auto& row : prog.cycle.rows) {
      out << "row";
      for (const auto& v : row.values) {
        out << ' ';
        switch (v.kind) {
          case CycleValue::Kind::Phase: out << format_phase(v.value); break;
          case CycleValue::Kind::Angle: out << detail::fmt_exact(v.value); break;
          case CycleValue::Kind::Transition: out << format_transition(v.transition); break;
        }
      }
      if (row.receiver < 0) out << " -";
      out << '\n';
    }
  }
  return out.str();
}

namespace {

std::pair<int, int> resolve(const TransitionRef& ref, const EigenSystem& es, const TransitionCatalog& cat,
                            const std::string& source, SourceLoc loc) {
  auto unknown = [&](const std::string& what) -> ParseError {
    return ParseError(source, loc.line, loc.col, "unknown transition " + what);
  };
  if (ref.kind == TransitionRef::Kind::Id) {
    if (ref.id < 1 || ref.id > static_cast<int>(cat.entries.size())) throw unknown("t" + std::to_string(ref.id));
    const auto& t = cat.by_id(ref.id);
    return {t.lower, t.upper};
  }
  const std::string text = "(" + ref.a + "," + ref.b + ")";
  if (static_cast<int>(ref.a.size()) != es.n || static_cast<int>(ref.b.size()) != es.n) throw unknown(text);
  const auto id = cat.find(es.index_of(ref.a), es.index_of(ref.b));
  if (!id) throw unknown(text);
  const auto& t = cat.by_id(*id);
  return {t.lower, t.upper};
}

}  // namespace

CompiledProgram compile(const PulseProgram& prog, const EigenSystem& es, const TransitionCatalog& cat) {
  CompiledProgram out;
  out.dim = es.dim();
  const int nrows = prog.row_count();
  auto slot_index = [&](const std::string& name) {
    for (std::size_t k = 0; k < prog.cycle.slots.size(); ++k) {
      if (prog.cycle.slots[k] == name) return k;
    }
    throw InputError("slot $" + name + " is not defined");
  };
  for (int r = 0; r < nrows; ++r) {
    const CycleRow* row = prog.cycle.empty() ? nullptr : &prog.cycle.rows[r];
    std::vector<Step> steps;
    for (const auto& ins : prog.instructions) {
      Step st;
      st.kind = ins.kind;
      st.angle_deg = ins.angle_slot.empty() ? ins.angle_deg : row->values[slot_index(ins.angle_slot)].value;
      st.delay = ins.delay;
      st.seconds = ins.seconds;
      if (ins.kind == Instruction::Kind::SelPulse || ins.kind == Instruction::Kind::HardPulse) {
        st.phase_deg = ins.phase.is_slot ? row->values[slot_index(ins.phase.slot)].value : ins.phase.deg;
      }
      if (ins.kind == Instruction::Kind::SelPulse) {
        if (ins.transition.kind == TransitionRef::Kind::Slot) {
          const auto k = slot_index(ins.transition.slot);
          std::tie(st.r, st.s) =
              resolve(row->values[k].transition, es, cat, prog.source, {row->loc.line, row->cols[k]});
        } else {
          std::tie(st.r, st.s) = resolve(ins.transition, es, cat, prog.source, ins.ref_loc);
        }
      }
      steps.push_back(st);
    }
    out.rows.push_back(std::move(steps));
    out.receiver.push_back(row ? row->receiver : 1);
  }
  return out;
}

DensityMatrix execute_row(const CompiledProgram& prog, std::size_t row, const EigenSystem& es,
                          const DensityMatrix& rho0, const DelayBindings& bindings) {
  if (row >= prog.rows.size()) throw InputError("cycle row out of range");
  if (rho0.dim() != es.dim() || prog.dim != es.dim()) throw InputError("state dimension does not match the program");
  DensityMatrix rho = rho0;
  for (const auto& st : prog.rows[row]) {
    switch (st.kind) {
      case Instruction::Kind::SelPulse:
        rho = conjugate(selective_pulse_unitary(es, st.r, st.s, st.angle_deg, st.phase_deg), rho);
        break;
      case Instruction::Kind::HardPulse:
        rho = conjugate(hard_pulse_unitary(es, st.angle_deg, st.phase_deg), rho);
        break;
      case Instruction::Kind::Grad: rho = crush_gradient(rho); break;
      case Instruction::Kind::Delay: {
        double t = st.seconds;
        if (st.delay != DelayKind::Seconds) {
          const auto& bound = st.delay == DelayKind::T1 ? bindings.t1 : bindings.t2;
          if (!bound) throw InputError(std::string("unresolved symbolic delay ") + (st.delay == DelayKind::T1 ? "t1" : "t2"));
          t = *bound;
        }
        rho = free_evolution(es, rho, t);
        break;
      }
      case Instruction::Kind::Acquire: break;
    }
  }
  return rho;
}

DensityMatrix execute(const CompiledProgram& prog, const EigenSystem& es, const DensityMatrix& rho0,
                      const DelayBindings& bindings) {
  return execute_row(prog, 0, es, rho0, bindings);
}

DensityMatrix execute_cycled(const CompiledProgram& prog, const EigenSystem& es, const DensityMatrix& rho0,
                             const DelayBindings& bindings) {
  std::vector<std::size_t> unique;
  std::vector<int> weight;
  for (std::size_t r = 0; r < prog.rows.size(); ++r) {
    std::size_t u = 0;
    while (u < unique.size() && !(prog.rows[unique[u]] == prog.rows[r])) ++u;
    if (u == unique.size()) {
      unique.push_back(r);
      weight.push_back(0);
    }
    weight[u] += prog.receiver[r];
  }
  const double n = static_cast<double>(prog.rows.size());
  std::vector<CMatrix> terms;
  for (std::size_t u = 0; u < unique.size(); ++u) {
    if (weight[u] == 0) continue;
    const DensityMatrix out = execute_row(prog, unique[u], es, rho0, bindings);
    terms.push_back(weight[u] == n ? out.mat : (weight[u] / n) * out.mat);
  }
  if (terms.empty()) return DensityMatrix::zero(es.dim());
  return DensityMatrix(pairwise_sum(terms));
}

}  // namespace spinsim
