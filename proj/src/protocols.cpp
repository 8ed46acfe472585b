#include "spinsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace spinsim {

namespace {

void require_spins(const EigenSystem& es, int n, const std::string& what) {
  if (es.n != n) {
    throw InputError(what + " needs " + std::to_string(n) + " spins, the system has " + std::to_string(es.n));
  }
}

std::string tref(int id) { return "t" + std::to_string(id); }

const Transition& observable_line(const TransitionCatalog& cat, int id) {
  const auto& t = cat.by_id(id);
  if (!t.observable) throw InputError("transition " + tref(id) + " is not observable");
  return t;
}

int order(const EigenSystem& es, int k, int l) { return static_cast<int>(std::lround(es.mz[k] - es.mz[l])); }

CMatrix projector(int dim, int k) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return m;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Largest |rho_kl| over k != l with the given |coherence order|.
double order_amplitude(const EigenSystem& es, const CMatrix& rho, int p) {
  double best = 0.0;
  for (int k = 0; k < rho.rows(); ++k) {
    for (int l = 0; l < rho.cols(); ++l) {
      if (k != l && std::abs(order(es, k, l)) == p) best = std::max(best, std::abs(rho(k, l)));
    }
  }
  return best;
}

// Largest deviation of any single cycle row from the cycled result.
double cycle_spread(const CompiledProgram& prog, const EigenSystem& es, const DensityMatrix& rho0,
                    const DensityMatrix& cycled) {
  double worst = 0.0;
  for (std::size_t r = 0; r < prog.rows.size(); ++r) {
    const auto out = execute_row(prog, r, es, rho0);
    worst = std::max(worst, max_abs(prog.receiver[r] * out.mat - cycled.mat));
  }
  return worst;
}

ProtocolReport make_report(std::string name, const std::string& text, const EigenSystem& es,
                           const TransitionCatalog& cat, DensityMatrix initial, bool difference = false) {
  ProtocolReport rep;
  rep.name = std::move(name);
  rep.program = parse_program(text, rep.name + ".pp");
  rep.initial_state = std::move(initial);
  rep.difference = difference;
  rep.final_state = rerun(rep, es, cat);
  return rep;
}

DensityMatrix pops_state(const EigenSystem& es, const TransitionCatalog& cat, int id) {
  ProtocolReport rep;
  rep.program = parse_program("selpulse " + tref(id) + " 180 x\n");
  rep.initial_state = equilibrium_deviation(es);
  rep.difference = true;
  return rerun(rep, es, cat);
}

std::string pps_program(const std::string& target) {
  const std::string theta = detail::fmt_exact(rad_to_deg(2.0 * std::acos(std::sqrt(2.0 / 3.0))));
  if (target == "11") {
    return "selpulse (00,01) " + theta + " x\ngrad\nselpulse (00,10) 90 x\ngrad\ncycle\nrow -\n";
  }
  std::string text = "selpulse (10,11) " + theta + " x\ngrad\nselpulse (01,11) 90 x\ngrad\n";
  if (target == "01") text += "selpulse (00,01) 180 x\n";
  if (target == "10") text += "selpulse (00,10) 180 x\n";
  return text;
}

DensityMatrix pps00_deviation() { return DensityMatrix::diagonal({1.0, -1.0 / 3, -1.0 / 3, -1.0 / 3}); }

int pair_id(const EigenSystem& es, const TransitionCatalog& cat, const std::string& a, const std::string& b) {
  const auto id = cat.find(es.index_of(a), es.index_of(b));
  if (!id) throw InputError("no transition joins " + a + " and " + b);
  return *id;
}

std::string with_swap(std::string label, const std::optional<std::pair<std::string, std::string>>& swap) {
  if (swap) {
    if (label == swap->first) return swap->second;
    if (label == swap->second) return swap->first;
  }
  return label;
}

// Index of the single differing bit, or -1.
int flipped_bit(const std::string& a, const std::string& b) {
  int at = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (at >= 0) return -1;
    at = static_cast<int>(i);
  }
  return at;
}

// Which of the four work lines (input pairs 11, 01, 10, 00) carry a pi pulse.
std::array<bool, 4> dj_pattern(int f) {
  switch (f) {
    case 1: return {false, false, false, false};
    case 2: return {true, true, true, true};
    case 3: return {false, false, true, true};
    case 4: return {true, true, false, false};
    case 5: return {true, false, true, false};
    case 6: return {false, true, false, true};
    case 7: return {true, false, false, true};
    case 8: return {false, true, true, false};
    default: throw InputError("two-qubit function must be f1..f8, got f" + std::to_string(f));
  }
}

std::string perm_text(const std::array<int, 4>& p, const EigenSystem& es) {
  std::string out;
  for (int k = 0; k < 4; ++k) {
    if (k) out += ' ';
    out += es.labels[k] + "->" + es.labels[p[k]];
  }
  return out;
}

// Population permutation error of a compiled program over every basis projector.
double permutation_error(const CompiledProgram& prog, const EigenSystem& es, const std::vector<int>& perm) {
  double worst = 0.0;
  for (int k = 0; k < es.dim(); ++k) {
    const auto out = execute(prog, es, DensityMatrix(projector(es.dim(), k)));
    worst = std::max(worst, max_abs(out.mat - projector(es.dim(), perm[k])));
  }
  return worst;
}

}  // namespace

double ProtocolReport::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw InputError("report " + name + " has no metric " + key);
}

const std::string& ProtocolReport::note(const std::string& key) const {
  for (const auto& [k, v] : notes) {
    if (k == key) return v;
  }
  throw InputError("report " + name + " has no entry " + key);
}

DensityMatrix rerun(const ProtocolReport& rep, const EigenSystem& es, const TransitionCatalog& cat) {
  const auto out = execute_cycled(compile(rep.program, es, cat), es, rep.initial_state, rep.bindings);
  if (!rep.difference) return out;
  return DensityMatrix(rep.initial_state.mat - out.mat);
}

ProtocolReport pseudopure_2spin(const EigenSystem& es, const TransitionCatalog& cat, const std::string& target) {
  require_spins(es, 2, "pseudopure preparation");
  if (target != "00" && target != "01" && target != "10" && target != "11") {
    throw InputError("pseudopure target must be 00, 01, 10 or 11, got '" + target + "'");
  }
  auto rep = make_report("pps" + target, pps_program(target), es, cat, equilibrium_deviation(es));
  const int k = es.index_of(target);
  rep.metrics.emplace_back("pps_fidelity", pseudopure_fidelity(rep.final_state, k));
  const auto p = rep.final_state.populations();
  for (int i = 0; i < 4; ++i) rep.metrics.emplace_back("population_" + es.labels[i], p[i]);
  rep.metrics.emplace_back("coherence_max", order_amplitude(es, rep.final_state.mat, 1));
  return rep;
}

ProtocolReport pops_pair(const EigenSystem& es, const TransitionCatalog& cat, int id) {
  const auto& t = observable_line(cat, id);
  const auto eq = equilibrium_deviation(es);
  auto rep = make_report("pops" + std::to_string(id), "selpulse " + tref(id) + " 180 x\n", es, cat, eq, true);
  const auto p = eq.populations();
  const double diff = p[t.lower] - p[t.upper];
  CMatrix expected = diff * (projector(es.dim(), t.lower) - projector(es.dim(), t.upper));
  rep.metrics.emplace_back("population_difference", diff);
  rep.metrics.emplace_back("pair_error", max_abs(rep.final_state.mat - expected));
  rep.notes.emplace_back("lower", es.labels[t.lower]);
  rep.notes.emplace_back("upper", es.labels[t.upper]);
  return rep;
}

ProtocolReport dj_one_qubit(const EigenSystem& es, const TransitionCatalog& cat, int f) {
  require_spins(es, 2, "one-qubit Deutsch-Jozsa");
  std::string text = "pulse 90 -y\n";
  switch (f) {
    case 1: break;
    case 2: text += "selpulse (00,01) 180 y\nselpulse (10,11) 180 y\n"; break;
    case 3: text += "selpulse (10,11) 180 y\n"; break;
    case 4: text += "selpulse (00,01) 180 y\n"; break;
    default: throw InputError("one-qubit function must be f1..f4, got f" + std::to_string(f));
  }
  auto rep = make_report("dj1_f" + std::to_string(f), text, es, cat, pps00_deviation());
  const int a = pair_id(es, cat, "00", "10");
  const int b = pair_id(es, cat, "01", "11");
  const auto amps = line_amplitudes(es, cat, rep.final_state);
  const cplx la = amps[a - 1];
  const cplx lb = amps[b - 1];
  const double denom = std::abs(la) * std::abs(lb);
  const double relative = denom > 0 ? std::real(la * std::conj(lb)) / denom : 0.0;
  rep.metrics.emplace_back("input_line_" + tref(a) + "_re", la.real());
  rep.metrics.emplace_back("input_line_" + tref(a) + "_im", la.imag());
  rep.metrics.emplace_back("input_line_" + tref(b) + "_re", lb.real());
  rep.metrics.emplace_back("input_line_" + tref(b) + "_im", lb.imag());
  rep.metrics.emplace_back("relative_sign", relative);
  rep.notes.emplace_back("verdict", relative > 0 ? "constant" : "balanced");
  return rep;
}

ProtocolReport dj_two_qubit_2d(const EigenSystem& es, const TransitionCatalog& cat, int f,
                               const DjTwoQubitOptions& opt) {
  require_spins(es, 3, "two-qubit Deutsch-Jozsa");
  const auto pattern = dj_pattern(f);
  auto labels_of = [&](int id) {
    const auto& t = observable_line(cat, id);
    return std::pair{with_swap(es.labels[t.lower], opt.swap), with_swap(es.labels[t.upper], opt.swap)};
  };
  static const char* inputs[4] = {"11", "01", "10", "00"};
  for (int i = 0; i < 4; ++i) {
    const auto [lo, up] = labels_of(opt.work[i]);
    if (flipped_bit(lo, up) != 2 || lo.substr(0, 2) != inputs[i]) {
      throw InputError("work transition " + tref(opt.work[i]) + " (" + lo + "<->" + up +
                       ") does not flip the work qubit at input " + inputs[i] + " under the current labels");
    }
  }
  for (int q = 0; q < 2; ++q) {
    for (int id : q == 0 ? opt.input1 : opt.input2) {
      const auto [lo, up] = labels_of(id);
      if (flipped_bit(lo, up) != q) {
        throw InputError("input transition " + tref(id) + " (" + lo + "<->" + up + ") does not flip input qubit " +
                         std::to_string(q + 1) + " under the current labels");
      }
    }
  }

  const double dwell = default_dwell(es);
  std::string text = "pulse 90 y\ndelay t1\n";
  for (int i = 0; i < 4; ++i) {
    if (pattern[i]) text += "selpulse " + tref(opt.work[i]) + " 180 x\n";
  }
  text += "acquire " + std::to_string(opt.t2_points) + " " + detail::fmt_exact(dwell) + "\n";

  ProtocolReport rep;
  rep.name = "dj2_f" + std::to_string(f);
  rep.program = parse_program(text, rep.name + ".pp");
  rep.initial_state = equilibrium_deviation(es);
  rep.bindings.t1 = 0.0;
  rep.final_state = rerun(rep, es, cat);

  const auto compiled = compile(rep.program, es, cat);
  Dataset2D ds;
  ds.t1_points = opt.t1_points;
  ds.t2_points = opt.t2_points;
  ds.dwell1 = dwell;
  ds.dwell2 = dwell;
  ds.data.resize(opt.t1_points, opt.t2_points);
  for (int j = 0; j < opt.t1_points; ++j) {
    const auto rho = execute_cycled(compiled, es, rep.initial_state, DelayBindings{j * dwell, std::nullopt});
    const auto fid = acquire_fid(es, cat, rho, opt.t2_points, dwell);
    for (int m = 0; m < opt.t2_points; ++m) ds.data(j, m) = fid[m];
  }
  rep.dataset = std::move(ds);

  // Peak (a, b): coherence of line a in t1 carried onto line b in t2.
  const CMatrix excited = conjugate(hard_pulse_unitary(es, 90, 90), rep.initial_state).mat;
  CMatrix uf = CMatrix::Identity(es.dim(), es.dim());
  for (int i = 0; i < 4; ++i) {
    if (!pattern[i]) continue;
    const auto& t = cat.by_id(opt.work[i]);
    uf = selective_pulse_unitary(es, t.lower, t.upper, 180, 0) * uf;
  }
  std::vector<int> lines{opt.input1[0], opt.input1[1], opt.input2[0], opt.input2[1]};
  auto peak = [&](const CMatrix& u, int a, int b) {
    const auto& ta = cat.by_id(a);
    CMatrix e = CMatrix::Zero(es.dim(), es.dim());
    e(ta.upper, ta.lower) = excited(ta.upper, ta.lower);
    return std::abs(line_amplitudes(es, cat, DensityMatrix(u * e * u.adjoint()))[b - 1]);
  };
  const CMatrix id = CMatrix::Identity(es.dim(), es.dim());
  double diagonal = 0.0, total = 0.0;
  double retained[2] = {0.0, 0.0};
  for (int q = 0; q < 2; ++q) {
    double kept = 0.0, ref = 0.0;
    for (int ai = 2 * q; ai < 2 * q + 2; ++ai) {
      ref += peak(id, lines[ai], lines[ai]);
      for (int b : lines) {
        const double v = peak(uf, lines[ai], b);
        kept += v;
        total += v;
        if (b == lines[ai]) diagonal += v;
      }
    }
    retained[q] = ref > 0 ? kept / ref : 0.0;
  }
  rep.metrics.emplace_back("retained_input1", retained[0]);
  rep.metrics.emplace_back("retained_input2", retained[1]);
  rep.metrics.emplace_back("diagonal_fraction", total > 0 ? diagonal / total : 0.0);
  rep.notes.emplace_back("verdict", std::min(retained[0], retained[1]) >= 0.5 ? "constant" : "balanced");
  return rep;
}

ProtocolReport epr_create(const EigenSystem& es, const TransitionCatalog& cat) {
  require_spins(es, 2, "EPR preparation");
  std::vector<std::pair<int, int>> paths;
  for (const char* mid : {"01", "10"}) paths.emplace_back(pair_id(es, cat, "00", mid), pair_id(es, cat, mid, "11"));
  std::sort(paths.begin(), paths.end());
  std::string text = "selpulse $K 90 $P1\nselpulse $L 180 $P2\ncycle K L P1 P2\n";
  for (const auto& [k, l] : paths) {
    for (const char* ph : {"x -x", "-x x", "y y", "-y -y"}) {
      text += "row " + tref(k) + " " + tref(l) + " " + ph + "\n";
    }
  }
  auto rep = make_report("epr", text, es, cat, pps00_deviation());
  const CMatrix p = pure_part(rep.final_state);
  CMatrix bell = CMatrix::Zero(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  CMatrix reduced = CMatrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      for (int b = 0; b < 2; ++b) reduced(a, c) += p(2 * a + b, 2 * c + b);
    }
  }
  const CMatrix half = 0.5 * CMatrix::Identity(2, 2);
  rep.metrics.emplace_back("dq_amplitude", std::abs(p(0, 3)));
  rep.metrics.emplace_back("sq_amplitude", order_amplitude(es, p, 1));
  rep.metrics.emplace_back("zq_amplitude", order_amplitude(es, p, 0));
  rep.metrics.emplace_back("fidelity", std::real((bell * p).trace()));
  rep.metrics.emplace_back("bell_error", max_abs(p - bell));
  rep.metrics.emplace_back("reduced_state_error", max_abs(reduced - half));
  rep.metrics.emplace_back("cycle_spread",
                           cycle_spread(compile(rep.program, es, cat), es, rep.initial_state, rep.final_state));
  return rep;
}

ProtocolReport ghz_create(const EigenSystem& es, const TransitionCatalog& cat, std::array<int, 3> ladder,
                          int pops_id) {
  require_spins(es, 3, "GHZ preparation");
  int at = es.index_of("000");
  for (int id : ladder) {
    const auto& t = observable_line(cat, id);
    if (t.lower != at && t.upper != at) {
      throw InputError("transitions " + tref(ladder[0]) + ", " + tref(ladder[1]) + ", " + tref(ladder[2]) +
                       " do not form a ladder from 000 to 111");
    }
    at = t.lower == at ? t.upper : t.lower;
  }
  if (at != es.index_of("111")) {
    throw InputError("transitions " + tref(ladder[0]) + ", " + tref(ladder[1]) + ", " + tref(ladder[2]) +
                     " do not end at 111");
  }
  std::string text = "selpulse " + tref(ladder[0]) + " 90 $P1\nselpulse " + tref(ladder[1]) + " 180 $P2\nselpulse " +
                     tref(ladder[2]) + " 180 $P3\ncycle P1 P2 P3\n";
  for (const char* row : {"y y y", "y -y -y", "-y y -y", "-y -y y", "y x -x", "y -x x", "-y x x", "-y -x -x",
                          "x y -x", "x -y x", "-x y x", "-x -y -x", "x x -y", "x -x y", "-x x y", "-x -x -y"}) {
    text += std::string("row ") + row + "\n";
  }
  auto rep = make_report("ghz", text, es, cat, pops_state(es, cat, pops_id));
  const CMatrix& r = rep.final_state.mat;
  const int bottom = es.index_of("000");
  const int top = es.index_of("111");
  const cplx c = r(bottom, top);
  CMatrix target = -projector(8, es.index_of("001"));
  target(bottom, bottom) += 0.5;
  target(top, top) += 0.5;
  if (std::abs(c) > 0) {
    target(bottom, top) = 0.5 * c / std::abs(c);
    target(top, bottom) = std::conj(target(bottom, top));
  }
  rep.metrics.emplace_back("tq_amplitude", std::abs(c));
  rep.metrics.emplace_back("tq_phase_deg", rad_to_deg(std::arg(c)));
  rep.metrics.emplace_back("dq_amplitude", order_amplitude(es, r, 2));
  rep.metrics.emplace_back("sq_amplitude", order_amplitude(es, r, 1));
  rep.metrics.emplace_back("zq_amplitude", order_amplitude(es, r, 0));
  rep.metrics.emplace_back("ghz_error", max_abs(r - target));
  rep.metrics.emplace_back("cycle_spread",
                           cycle_spread(compile(rep.program, es, cat), es, rep.initial_state, rep.final_state));
  return rep;
}

std::array<int, 4> gate_permutation(int g) {
  if (g < 1 || g > 24) throw InputError("gate must be 1..24, got " + std::to_string(g));
  std::array<int, 4> p{0, 1, 2, 3};
  for (int i = 1; i < g; ++i) std::next_permutation(p.begin(), p.end());
  return p;
}

int gate_index(const std::array<int, 4>& perm) {
  std::array<int, 4> p{0, 1, 2, 3};
  for (int g = 1; g <= 24; ++g) {
    if (p == perm) return g;
    std::next_permutation(p.begin(), p.end());
  }
  throw InputError("not a permutation of four states");
}

ProtocolReport gate_library_2spin(const EigenSystem& es, const TransitionCatalog& cat, int g) {
  require_spins(es, 2, "two-qubit gate library");
  const auto target = gate_permutation(g);
  // Breadth-first search over permutations, one transposition per catalog line.
  using Perm = std::array<int, 4>;
  std::map<Perm, std::pair<Perm, int>> parent;
  const Perm start{0, 1, 2, 3};
  parent[start] = {start, 0};
  std::deque<Perm> queue{start};
  while (!queue.empty() && !parent.count(target)) {
    const Perm cur = queue.front();
    queue.pop_front();
    for (const auto& t : cat.entries) {
      Perm next = cur;
      for (int& v : next) {
        if (v == t.lower) v = t.upper;
        else if (v == t.upper) v = t.lower;
      }
      if (parent.count(next)) continue;
      parent[next] = {cur, t.id};
      queue.push_back(next);
    }
  }
  if (!parent.count(target)) throw InputError("gate " + std::to_string(g) + " is not reachable");
  std::vector<int> word;
  for (Perm p = target; p != start; p = parent[p].first) word.push_back(parent[p].second);
  std::reverse(word.begin(), word.end());
  std::string text = "# gate " + std::to_string(g) + "\n";
  for (int id : word) text += "selpulse " + tref(id) + " 180 x\n";

  auto rep = make_report("gate" + std::to_string(g), text, es, cat, equilibrium_deviation(es));
  const double err =
      permutation_error(compile(rep.program, es, cat), es, std::vector<int>(target.begin(), target.end()));
  rep.metrics.emplace_back("pulses", static_cast<double>(word.size()));
  rep.metrics.emplace_back("truth_table_error", err);
  rep.metrics.emplace_back("truth_table_ok", err <= 1e-12 ? 1.0 : 0.0);
  rep.notes.emplace_back("permutation", perm_text(target, es));
  return rep;
}

ProtocolReport c3not_4spin(const EigenSystem& es, const TransitionCatalog& cat, int id) {
  require_spins(es, 4, "C3-NOT");
  const auto& t = observable_line(cat, id);
  auto rep = make_report("c3not", "selpulse " + tref(id) + " 180 x\n", es, cat, equilibrium_deviation(es));
  std::vector<int> perm(es.dim());
  for (int k = 0; k < es.dim(); ++k) perm[k] = k;
  std::swap(perm[t.lower], perm[t.upper]);
  const double err = permutation_error(compile(rep.program, es, cat), es, perm);
  rep.metrics.emplace_back("truth_table_error", err);
  rep.metrics.emplace_back("truth_table_ok", err <= 1e-12 ? 1.0 : 0.0);
  rep.notes.emplace_back("swaps", es.labels[t.lower] + "<->" + es.labels[t.upper]);
  return rep;
}

ProtocolReport c2swap_4spin(const EigenSystem& es, const TransitionCatalog& cat, std::array<int, 3> ids, int pops_in,
                            int pops_out) {
  require_spins(es, 4, "C2-SWAP");
  for (int id : ids) observable_line(cat, id);
  const auto& in = observable_line(cat, pops_in);
  observable_line(cat, pops_out);
  std::string text;
  for (int id : ids) text += "selpulse " + tref(id) + " 180 x\n";
  auto rep = make_report("c2swap", text, es, cat, pops_state(es, cat, pops_in));
  const auto compiled = compile(rep.program, es, cat);

  // Unit pair on the input line, then its image.
  const CMatrix pair = projector(es.dim(), in.upper) - projector(es.dim(), in.lower);
  const CMatrix image = execute(compiled, es, DensityMatrix(pair)).mat;
  const auto& out = cat.by_id(pops_out);
  const CMatrix expected = projector(es.dim(), out.upper) - projector(es.dim(), out.lower);
  rep.metrics.emplace_back("pair_mapping_error", max_abs(image - expected));
  rep.metrics.emplace_back("pops_out_error", max_abs(rep.final_state.mat - pops_state(es, cat, pops_out).mat));
  rep.notes.emplace_back("input_pair", es.labels[in.upper] + "-" + es.labels[in.lower]);
  rep.notes.emplace_back("output_pair", es.labels[out.upper] + "-" + es.labels[out.lower]);
  return rep;
}

std::vector<std::string> protocol_names() {
  return {"pps00", "pps01", "pps10", "pps11", "pops<ID>", "dj1_f1..dj1_f4", "dj2_f1..dj2_f8",
          "epr",   "ghz",   "gate1..gate24",  "c3not",    "c2swap"};
}

ProtocolReport run_protocol(const std::string& name, const EigenSystem& es, const TransitionCatalog& cat) {
  auto number_after = [&](const std::string& prefix) -> std::optional<int> {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return std::nullopt;
    const std::string rest = name.substr(prefix.size());
    if (rest.size() > 3 || rest.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return std::stoi(rest);
  };
  if (name.size() == 5 && name.rfind("pps", 0) == 0) return pseudopure_2spin(es, cat, name.substr(3));
  if (auto f = number_after("dj1_f")) return dj_one_qubit(es, cat, *f);
  if (auto f = number_after("dj2_f")) return dj_two_qubit_2d(es, cat, *f);
  if (auto g = number_after("gate")) return gate_library_2spin(es, cat, *g);
  if (auto id = number_after("pops")) return pops_pair(es, cat, *id);
  if (name == "epr") return epr_create(es, cat);
  if (name == "ghz") return ghz_create(es, cat);
  if (name == "c3not") return c3not_4spin(es, cat);
  if (name == "c2swap") return c2swap_4spin(es, cat);
  throw InputError("unknown protocol '" + name + "'");
}

std::string format_report(const ProtocolReport& rep) {
  std::ostringstream out;
  out << "name=" << rep.name << '\n';
  out << "final=" << (rep.difference ? "initial_minus_run" : "run") << '\n';
  for (const auto& [k, v] : rep.metrics) out << k << '=' << fmt_real(v) << '\n';
  for (const auto& [k, v] : rep.notes) out << k << '=' << v << '\n';
  return out.str();
}

std::vector<std::string> write_report(const ProtocolReport& rep, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = (std::filesystem::path(dir) / rep.name).string();
  std::vector<std::string> written{base + ".pp", base + ".state", base + ".report"};
  detail::write_file(written[0], format_program(rep.program));
  detail::write_file(written[1], format_density(rep.final_state));
  detail::write_file(written[2], format_report(rep));
  if (rep.dataset) {
    written.push_back(base + ".2d");
    detail::write_file(written.back(), format_magnitude_grid(*rep.dataset));
  }
  return written;
}

}  // namespace spinsim
