#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinsim/acquisition.hpp"
#include "spinsim/pulse_lang.hpp"

namespace spinsim {

struct ProtocolReport {
  std::string name;
  PulseProgram program;
  DensityMatrix initial_state;
  DensityMatrix final_state;
  DelayBindings bindings;
  // final_state = initial_state - run(program, initial_state) instead of run(...)
  bool difference = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, std::string>> notes;  // verdicts and other text
  std::optional<Dataset2D> dataset;

  double metric(const std::string& key) const;
  const std::string& note(const std::string& key) const;
};

// Executes the report's program on its initial state, cycled.
DensityMatrix rerun(const ProtocolReport& rep, const EigenSystem& es, const TransitionCatalog& cat);

// Target is a 2-bit label.
ProtocolReport pseudopure_2spin(const EigenSystem& es, const TransitionCatalog& cat, const std::string& target);

// Equilibrium minus the state after a pi pulse on the transition.
ProtocolReport pops_pair(const EigenSystem& es, const TransitionCatalog& cat, int id);

// f is 1..4.
ProtocolReport dj_one_qubit(const EigenSystem& es, const TransitionCatalog& cat, int f);

struct DjTwoQubitOptions {
  std::array<int, 4> work{3, 4, 9, 6};  // work-qubit lines for input pairs 11, 01, 10, 00
  std::array<int, 2> input1{1, 2};
  std::array<int, 2> input2{7, 8};
  std::optional<std::pair<std::string, std::string>> swap{{"011", "101"}};
  int t1_points = 64;
  int t2_points = 128;
};

// f is 1..8.
ProtocolReport dj_two_qubit_2d(const EigenSystem& es, const TransitionCatalog& cat, int f,
                               const DjTwoQubitOptions& opt = {});

ProtocolReport epr_create(const EigenSystem& es, const TransitionCatalog& cat);

ProtocolReport ghz_create(const EigenSystem& es, const TransitionCatalog& cat, std::array<int, 3> ladder = {8, 4, 1},
                          int pops_id = 6);

// Gate g (1..24) is the g-th permutation of the four eigenstates in lexicographic order;
// gate 1 is the identity. perm[k] is the image of eigenstate k.
std::array<int, 4> gate_permutation(int g);
int gate_index(const std::array<int, 4>& perm);
ProtocolReport gate_library_2spin(const EigenSystem& es, const TransitionCatalog& cat, int g);

ProtocolReport c3not_4spin(const EigenSystem& es, const TransitionCatalog& cat, int id = 4);
ProtocolReport c2swap_4spin(const EigenSystem& es, const TransitionCatalog& cat, std::array<int, 3> ids = {4, 14, 4},
                            int pops_in = 1, int pops_out = 15);

// Names accepted by run_protocol: pps00..pps11, pops<ID>, dj1_f<1-4>, dj2_f<1-8>, epr, ghz,
// gate<1-24>, c3not, c2swap.
ProtocolReport run_protocol(const std::string& name, const EigenSystem& es, const TransitionCatalog& cat);
std::vector<std::string> protocol_names();

std::string format_report(const ProtocolReport& rep);

// Writes <name>.pp, <name>.state and <name>.report, plus <name>.2d when there is a dataset.
std::vector<std::string> write_report(const ProtocolReport& rep, const std::string& dir);

}  // namespace spinsim
