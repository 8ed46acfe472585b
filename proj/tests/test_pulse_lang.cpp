#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "spinsim/pulse_lang.hpp"
#include "spinsim/transitions.hpp"
#include "test_support.hpp"

using namespace spinsim;

namespace {

struct Fixture {
  SpinSystem sys;
  EigenSystem es;
  TransitionCatalog cat;

  explicit Fixture(const std::string& file) : sys(load_spin_system(data_path(file))), es(solve(sys)), cat(transition_catalog(es, sys)) {}

  DensityMatrix run(const std::string& text, const DensityMatrix& rho0) const {
    return execute(compile(parse_program(text), es, cat), es, rho0);
  }
  DensityMatrix run_cycled(const PulseProgram& prog, const DensityMatrix& rho0) const {
    return execute_cycled(compile(prog, es, cat), es, rho0);
  }
};

CMatrix bell_projector() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return m;
}

DensityMatrix pure_state(int dim, int k) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(m);
}

int coherence_order(const EigenSystem& es, int k, int l) { return static_cast<int>(std::lround(es.mz[k] - es.mz[l])); }

}  // namespace

TEST_CASE("single selective pulse parses") {
  const auto prog = parse_program("selpulse t3 90 x\n");
  REQUIRE(prog.instructions.size() == 1);
  const auto& ins = prog.instructions[0];
  CHECK(ins.kind == Instruction::Kind::SelPulse);
  CHECK(ins.transition.kind == TransitionRef::Kind::Id);
  CHECK(ins.transition.id == 3);
  CHECK(ins.angle_deg == 90.0);
  CHECK(ins.phase.deg == 0.0);
  CHECK(prog.cycle.empty());
}

TEST_CASE("phases and other instructions") {
  const auto prog = parse_program(
      "pulse 90 -y   # hard\n"
      "selpulse (10,11) 45 deg:-30\n"
      "grad\n"
      "delay 0.25\n"
      "delay t1\n"
      "acquire 1024 1e-3\n");
  REQUIRE(prog.instructions.size() == 6);
  CHECK(prog.instructions[0].phase.deg == 270.0);
  CHECK(prog.instructions[1].transition.a == "10");
  CHECK(prog.instructions[1].phase.deg == 330.0);
  CHECK(prog.instructions[3].seconds == 0.25);
  CHECK(prog.instructions[4].delay == DelayKind::T1);
  CHECK(prog.has_symbolic_delay());
  REQUIRE(prog.acquire() != nullptr);
  CHECK(prog.acquire()->points == 1024);
}

TEST_CASE("EPR program parses to two instructions and eight rows") {
  const auto prog = load_program(data_path("programs/epr.pp"));
  CHECK(prog.instructions.size() == 2);
  CHECK(prog.cycle.slots.size() == 4);
  CHECK(prog.cycle.rows.size() == 8);
  CHECK(prog.cycle.rows[4].values[0].kind == CycleValue::Kind::Transition);
  CHECK(prog.cycle.rows[4].values[0].transition.id == 4);
  CHECK(prog.cycle.rows[3].values[3].value == 270.0);
}

TEST_CASE("syntax errors carry line and column") {
  auto expect_error = [](const std::string& text, int line, int col) {
    try {
      parse_program(text, "p.pp");
      FAIL("expected a parse error for: " << text);
    } catch (const ParseError& e) {
      CHECK(e.file() == "p.pp");
      CHECK(e.line() == line);
      CHECK(e.column() == col);
    }
  };
  expect_error("selpulse t3 ninety x\n", 1, 13);
  expect_error("grad\nselpulse t3 90 z9\n", 2, 16);
  expect_error("selpulse t3 90 $P\n", 1, 16);
  expect_error("selpulse t3 90 x extra\n", 1, 1);
  expect_error("\n\nwobble 3\n", 3, 1);
  expect_error("row x\n", 1, 1);
  expect_error("selpulse t1 90 $P\ncycle P\nrow x y\n", 3, 1);
  expect_error("selpulse t1 90 $P\ncycle P\nrow t2\n", 3, 5);
  expect_error("selpulse $K 90 $K\ncycle K\nrow t1\n", 1, 16);
  expect_error("selpulse t1 90 x\ncycle P\n", 2, 1);
  expect_error("acquire 1000 0.001\n", 1, 9);
  expect_error("delay -1\n", 1, 7);
  expect_error("selpulse (10,1) 90 x\n", 1, 10);
}

TEST_CASE("unknown transitions are reported at compile time") {
  Fixture f("citrate.spin");
  auto expect_unknown = [&](const std::string& text, int line, int col) {
    const auto prog = parse_program(text, "u.pp");
    try {
      compile(prog, f.es, f.cat);
      FAIL("expected unknown transition");
    } catch (const ParseError& e) {
      CHECK(e.reason().rfind("unknown transition", 0) == 0);
      CHECK(e.line() == line);
      CHECK(e.column() == col);
    }
  };
  expect_unknown("selpulse t5 90 x\n", 1, 10);
  expect_unknown("grad\nselpulse (00,11) 90 x\n", 2, 10);
  expect_unknown("selpulse (000,001) 90 x\n", 1, 10);
  expect_unknown("selpulse $K 90 x\ncycle K\nrow t1\nrow t7\n", 4, 5);
}

TEST_CASE("print and reparse give the same program") {
  for (const auto& entry : std::filesystem::directory_iterator(data_path("programs"))) {
    const auto prog = load_program(entry.path().string());
    const auto text = format_program(prog);
    CAPTURE(entry.path().string());
    CHECK(parse_program(text) == prog);
    CHECK(format_program(parse_program(text)) == text);
  }
  const auto odd = parse_program(
      "pulse 33.3333333333333357 deg:12.5\nselpulse $T $A $P\ndelay 1.25e-7\ncycle T A P\nrow (01,11) 0.1 y -\nrow t2 180 deg:7.25\n");
  CHECK(parse_program(format_program(odd)) == odd);
}

TEST_CASE("empty program leaves the state alone") {
  Fixture f("citrate.spin");
  const auto rho = equilibrium_deviation(f.es);
  CHECK((f.run("# nothing\n", rho).mat - rho.mat).norm() == 0.0);
}

TEST_CASE("|00> pseudopure program") {
  Fixture f("citrate.spin");
  const auto out = execute(compile(load_program(data_path("programs/pps00.pp")), f.es, f.cat), f.es,
                           equilibrium_deviation(f.es));
  const auto p = out.populations();
  // closed-form population update applied twice by hand: (1,0,0,-1) -> (1,0,-1/3,-2/3) -> (1,-1/3,-1/3,-1/3)
  CHECK(std::abs(p[0] - 1.0) <= 1e-10);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(p[k] + 1.0 / 3.0) <= 1e-10);
  CHECK((out.mat - CMatrix(out.mat.diagonal().asDiagonal())).norm() <= 1e-15);
}

TEST_CASE("EPR program reproduces the entangled state") {
  Fixture f("citrate.spin");
  const auto prog = load_program(data_path("programs/epr.pp"));
  const auto compiled = compile(prog, f.es, f.cat);
  SUBCASE("every cycle row maps |00><00| onto the Bell projector") {
    for (std::size_t r = 0; r < compiled.rows.size(); ++r) {
      const auto out = execute_row(compiled, r, f.es, pure_state(4, 0));
      CAPTURE(r);
      CHECK((out.mat - bell_projector()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("cycled run from the pseudopure deviation") {
    const auto pps = DensityMatrix::diagonal({1, -1.0 / 3, -1.0 / 3, -1.0 / 3});
    const auto out = execute_cycled(compiled, f.es, pps);
    CHECK((pure_part(out) - bell_projector()).cwiseAbs().maxCoeff() <= 1e-12);
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) {
        if (coherence_order(f.es, k, l) != 2 && coherence_order(f.es, k, l) != -2 && k != l) {
          CHECK(std::abs(out.mat(k, l)) <= 1e-12);
        }
      }
    }
    for (std::size_t r = 0; r < compiled.rows.size(); ++r) {
      CHECK((execute_row(compiled, r, f.es, pps).mat - out.mat).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("GHZ cycle leaves only zero- and triple-quantum terms") {
  Fixture f("demo3.spin");
  const auto prog = load_program(data_path("programs/ghz.pp"));
  REQUIRE(prog.cycle.rows.size() == 16);
  const int a = f.es.index_of("000");
  const int b = f.es.index_of("001");
  const int top = f.es.index_of("111");
  CMatrix pops = CMatrix::Zero(8, 8);
  pops(a, a) = 1;
  pops(b, b) = -1;
  const auto out = f.run_cycled(prog, DensityMatrix(pops));
  CHECK(std::abs(std::abs(out.mat(a, top)) - 0.5) <= 1e-12);
  for (int k = 0; k < 8; ++k) {
    for (int l = 0; l < 8; ++l) {
      const int order = std::abs(coherence_order(f.es, k, l));
      if (k != l && order != 3) CHECK(std::abs(out.mat(k, l)) <= 1e-12);
    }
  }
}

TEST_CASE("receiver-only cycle flips the sign of the |11> sequence") {
  Fixture f("citrate.spin");
  const auto prog = load_program(data_path("programs/pps11.pp"));
  const auto out = f.run_cycled(prog, equilibrium_deviation(f.es));
  const auto p = out.populations();
  CHECK(std::abs(p[3] - 1.0) <= 1e-10);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(p[k] + 1.0 / 3.0) <= 1e-10);
}

TEST_CASE("execution is compositional") {
  Fixture f("demo3.spin");
  const std::string a = "selpulse t8 37 y\npulse 20 deg:15\ndelay 0.003\n";
  const std::string b = "grad\nselpulse (001,101) 113 -x\npulse 90 x\n";
  const auto rho = equilibrium_deviation(f.es);
  const auto joint = f.run(a + b, rho);
  const auto split = f.run(b, f.run(a, rho));
  CHECK((joint.mat - split.mat).norm() == 0.0);
}

TEST_CASE("identical cycle rows equal a single execution") {
  Fixture f("demo3.spin");
  const std::string body = "selpulse t6 90 $P\nselpulse t7 45 y\n";
  const auto single = f.run("selpulse t6 90 y\nselpulse t7 45 y\n", equilibrium_deviation(f.es));
  for (int rows : {1, 2, 3, 8}) {
    std::string text = body + "cycle P\n";
    for (int r = 0; r < rows; ++r) text += "row y\n";
    const auto out = f.run_cycled(parse_program(text), equilibrium_deviation(f.es));
    CHECK((out.mat - single.mat).norm() == 0.0);
  }
}

TEST_CASE("symbolic delays need bindings") {
  Fixture f("citrate.spin");
  const auto compiled = compile(parse_program("pulse 90 x\ndelay t1\n"), f.es, f.cat);
  const auto rho = equilibrium_deviation(f.es);
  CHECK_THROWS_AS(execute(compiled, f.es, rho), InputError);
  DelayBindings bind;
  bind.t1 = 0.01;
  const auto out = execute(compiled, f.es, rho, bind);
  const auto ref = free_evolution(f.es, conjugate(hard_pulse_unitary(f.es, 90, 0), rho), 0.01);
  CHECK((out.mat - ref.mat).norm() == 0.0);
}
