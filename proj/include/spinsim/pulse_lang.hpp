#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinsim/dynamics.hpp"
#include "spinsim/eigensystem.hpp"
#include "spinsim/transitions.hpp"

namespace spinsim {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

// t3, (10,11) or $K
struct TransitionRef {
  enum class Kind { Id, Pair, Slot };
  Kind kind = Kind::Id;
  int id = 0;
  std::string a, b;
  std::string slot;

  bool operator==(const TransitionRef&) const = default;
};

// x, y, -x, -y, deg:F or $P. Literal phases are normalized to [0, 360).
struct PhaseRef {
  bool is_slot = false;
  double deg = 0.0;
  std::string slot;

  bool operator==(const PhaseRef&) const = default;
};

enum class DelayKind { Seconds, T1, T2 };

struct Instruction {
  enum class Kind { SelPulse, HardPulse, Grad, Delay, Acquire };
  Kind kind = Kind::Grad;
  TransitionRef transition;
  double angle_deg = 0.0;
  std::string angle_slot;  // set when the angle comes from a cycle slot
  PhaseRef phase;
  DelayKind delay = DelayKind::Seconds;
  double seconds = 0.0;
  int points = 0;
  double dwell = 0.0;
  SourceLoc loc;      // keyword
  SourceLoc ref_loc;  // transition token of a selpulse

  // Source location is not part of the value.
  bool operator==(const Instruction& o) const;
};

// A cycle slot holds phases, angles or transition references, fixed by how it is used.
struct CycleValue {
  enum class Kind { Phase, Angle, Transition };
  Kind kind = Kind::Phase;
  TransitionRef transition;
  double value = 0.0;  // degrees

  bool operator==(const CycleValue&) const = default;
};

struct CycleRow {
  std::vector<CycleValue> values;
  int receiver = 1;
  SourceLoc loc;
  std::vector<int> cols;  // column of each value

  bool operator==(const CycleRow& o) const { return values == o.values && receiver == o.receiver; }
};

// A cycle may have no slots; its rows then only carry receiver weights.
struct PhaseCycle {
  bool defined = false;
  std::vector<std::string> slots;
  std::vector<CycleRow> rows;
  SourceLoc loc;

  bool empty() const { return !defined; }
  bool operator==(const PhaseCycle& o) const { return defined == o.defined && slots == o.slots && rows == o.rows; }
};

struct PulseProgram {
  std::string source = "<program>";
  std::vector<Instruction> instructions;
  PhaseCycle cycle;

  int row_count() const { return cycle.empty() ? 1 : static_cast<int>(cycle.rows.size()); }
  bool has_symbolic_delay() const;
  const Instruction* acquire() const;  // last acquire, if any
  bool operator==(const PulseProgram& o) const { return instructions == o.instructions && cycle == o.cycle; }
};

PulseProgram parse_program(std::string_view text, const std::string& source = "<program>");
PulseProgram load_program(const std::string& path);
std::string format_program(const PulseProgram& prog);
std::string format_phase(double deg);

// One resolved operation of one cycle row.
struct Step {
  Instruction::Kind kind = Instruction::Kind::Grad;
  int r = 0, s = 0;  // eigenstate indices for selective pulses
  double angle_deg = 0.0;
  double phase_deg = 0.0;
  DelayKind delay = DelayKind::Seconds;
  double seconds = 0.0;

  bool operator==(const Step&) const = default;
};

struct CompiledProgram {
  int dim = 0;
  std::vector<std::vector<Step>> rows;
  std::vector<int> receiver;
};

// Resolves transitions and cycle slots. Unknown transitions raise a ParseError pointing at
// the offending token with the message "unknown transition ...".
CompiledProgram compile(const PulseProgram& prog, const EigenSystem& es, const TransitionCatalog& cat);

struct DelayBindings {
  std::optional<double> t1;
  std::optional<double> t2;
};

// Applies one cycle row in program order. `acquire` marks detection and does not change
// the state. Symbolic delays without a binding are an error.
DensityMatrix execute_row(const CompiledProgram& prog, std::size_t row, const EigenSystem& es,
                          const DensityMatrix& rho0, const DelayBindings& bindings = {});

// First row only.
DensityMatrix execute(const CompiledProgram& prog, const EigenSystem& es, const DensityMatrix& rho0,
                      const DelayBindings& bindings = {});

// Receiver-weighted mean over all rows, summed pairwise. Identical rows are executed once.
DensityMatrix execute_cycled(const CompiledProgram& prog, const EigenSystem& es, const DensityMatrix& rho0,
                             const DelayBindings& bindings = {});

}  // namespace spinsim
