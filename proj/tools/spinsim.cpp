#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "spinsim/acquisition.hpp"
#include "spinsim/assignment.hpp"
#include "spinsim/protocols.hpp"

using namespace spinsim;

namespace {

// Exit codes: 0 success, 1 runtime failure or failed check, 2 bad input.
constexpr int kFail = 1;
constexpr int kBadInput = 2;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

struct Options {
  std::string out = ".";
  double threshold = kDefaultThreshold;
  int points = 0;
  double dwell = 0.0;
  double beta = 10.0;
  std::string init = "eq";
  std::string data_dir = SPINSIM_DATA_DIR;
};

struct Loaded {
  SpinSystem sys;
  EigenSystem es;
  TransitionCatalog cat;
};

Loaded load(const std::string& path, const Options& opt) {
  Loaded l{load_spin_system(path), {}, {}};
  l.es = solve(l.sys);
  l.cat = transition_catalog(l.es, l.sys, opt.threshold);
  return l;
}

void check_options(const Options& opt) {
  if (!(opt.threshold > 0.0 && opt.threshold <= 1.0)) throw CliError(kBadInput, "--threshold must be in (0, 1]");
  if (opt.points != 0 && (opt.points < 8 || opt.points > 65536 || !is_power_of_two(opt.points))) {
    throw CliError(kBadInput, "--points must be a power of two between 8 and 65536");
  }
  if (opt.dwell < 0.0) throw CliError(kBadInput, "--dwell must be positive");
  if (!(opt.beta > 0.0 && opt.beta <= 90.0)) throw CliError(kBadInput, "--beta must be in (0, 90] degrees");
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::string out_path(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out);
  return (std::filesystem::path(opt.out) / name).string();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError(kFail, "cannot write " + path);
  f << text;
  std::cout << "wrote " << path << '\n';
}

// eq, pps:BITS, pops:ID or a .state file
DensityMatrix initial_state(const std::string& spec, const Loaded& l) {
  if (spec == "eq") return equilibrium_deviation(l.es);
  if (spec.rfind("pps:", 0) == 0) {
    const int k = l.es.index_of(spec.substr(4));
    std::vector<double> p(l.es.dim(), -1.0 / (l.es.dim() - 1));
    p[k] = 1.0;
    return DensityMatrix::diagonal(p);
  }
  if (spec.rfind("pops:", 0) == 0) {
    int id = 0;
    try {
      id = std::stoi(spec.substr(5));
    } catch (const std::exception&) {
      throw CliError(kBadInput, "bad --init '" + spec + "'");
    }
    return pops_pair(l.es, l.cat, id).final_state;
  }
  std::ifstream f(spec);
  if (!f) throw CliError(kBadInput, "--init must be eq, pps:BITS, pops:ID or a state file; cannot read '" + spec + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  auto rho = parse_density(ss.str(), spec);
  if (rho.dim() != l.es.dim()) {
    throw CliError(kBadInput, spec + ": state dimension " + std::to_string(rho.dim()) + " does not match " +
                                  std::to_string(l.es.dim()));
  }
  return rho;
}

// A deviation with one raised level and the rest equal has a rank-one pure part.
bool is_pseudopure(const DensityMatrix& rho) {
  if (rho.mat.cwiseAbs().maxCoeff() <= 1e-12) return false;
  const CMatrix p = pure_part(rho);
  return std::abs((p * p).trace().real() - 1.0) <= 1e-9;
}

int cmd_eigen(const std::string& path, const Options& opt) {
  const auto l = load(path, opt);
  std::ostringstream out;
  out << "system " << l.sys.name << '\n';
  out << "spins " << l.es.n << '\n';
  out << "label_conflicts " << l.es.label_conflicts << '\n';
  out << "# level label mz energy_hz\n";
  for (int k = 0; k < l.es.dim(); ++k) {
    out << "level " << k << ' ' << l.es.labels[k] << ' ' << fmt_real(l.es.mz[k]) << ' ' << fmt_real(l.es.energy_hz(k))
        << '\n';
  }
  out << "# transition id lower upper freq_hz intensity observable\n";
  for (const auto& t : l.cat.entries) {
    out << "transition t" << t.id << ' ' << l.es.labels[t.lower] << ' ' << l.es.labels[t.upper] << ' '
        << fmt_real(t.freq_hz) << ' ' << fmt_real(t.intensity) << ' ' << (t.observable ? "yes" : "no") << '\n';
  }
  out << "observable " << l.cat.observable_count() << " of " << l.cat.entries.size() << " threshold "
      << fmt_real(opt.threshold) << '\n';
  if (l.es.n == 2) out << "theta " << fmt_real(mixing_angle_ab(l.sys)) << " deg\n";
  std::cout << out.str();
  if (!opt.out.empty() && opt.out != ".") write(out_path(opt, stem_of(path) + ".eigen"), out.str());
  return 0;
}

int cmd_run(const std::string& sys_path, const std::string& prog_path, const Options& opt, std::optional<double> t1,
            std::optional<double> t2) {
  const auto l = load(sys_path, opt);
  const auto prog = load_program(prog_path);
  const auto compiled = compile(prog, l.es, l.cat);
  const auto rho0 = initial_state(opt.init, l);
  const auto rho = execute_cycled(compiled, l.es, rho0, DelayBindings{t1, t2});
  const std::string stem = stem_of(prog_path);
  write(out_path(opt, stem + ".state"), format_density(rho));
  if (is_pseudopure(rho)) write(out_path(opt, stem + ".pure.state"), format_density(DensityMatrix(pure_part(rho))));
  write(out_path(opt, stem + ".spectrum"), format_stick_csv(detect_small_angle(l.es, l.cat, rho, opt.beta)));

  int points = opt.points;
  double dwell = opt.dwell;
  if (const auto* acq = prog.acquire()) {
    if (!points) points = acq->points;
    if (dwell == 0.0) dwell = acq->dwell;
  }
  if (points) {
    if (dwell == 0.0) dwell = default_dwell(l.es);
    const auto fid = acquire_fid(l.es, l.cat, rho, points, dwell);
    write(out_path(opt, stem + ".fid.spectrum"), format_spectrum_csv(fft_spectrum(fid, dwell)));
  }
  return 0;
}

int cmd_protocol(const std::string& name, const std::string& sys_path, const Options& opt) {
  const auto l = load(sys_path, opt);
  const auto rep = run_protocol(name, l.es, l.cat);
  std::cout << format_report(rep);
  for (const auto& f : write_report(rep, opt.out)) std::cout << "wrote " << f << '\n';
  return 0;
}

int cmd_assign(const std::string& path, int n, const Options& opt) {
  ConnectivityMatrix cm;
  if (std::filesystem::path(path).extension() == ".spin") {
    const auto l = load(path, opt);
    const int points = opt.points ? opt.points : 256;
    const auto dx = zcosy_dataset(l.es, l.cat, opt.beta, points, points, opt.dwell, opt.dwell, 0.0);
    const auto dy = zcosy_dataset(l.es, l.cat, opt.beta, points, points, opt.dwell, opt.dwell, 90.0);
    cm = zcosy_connectivity_from_data(l.es, l.cat, dx, dy, opt.beta);
    if (n == 0) n = l.es.n;
    std::cout << format_connectivity(cm);
  } else {
    cm = load_connectivity(path);
  }
  if (n == 0) throw CliError(kBadInput, "assign needs the spin count for a connectivity file");
  const auto res = reconstruct_levels(cm, n);
  if (!res.satisfiable) throw CliError(kFail, res.report);
  std::ostringstream out;
  out << "diagrams " << res.diagrams.size() << (res.truncated ? " truncated" : "") << '\n';
  for (std::size_t i = 0; i < res.diagrams.size(); ++i) {
    out << "# diagram " << i + 1 << '\n' << format_diagram(res.diagrams[i]);
    for (const auto& e : res.diagrams[i].edges) {
      if (e.ambiguous) out << "# t" << e.id << " has no cross peaks; its placement is not determined\n";
    }
  }
  std::cout << out.str();
  if (opt.out != ".") write(out_path(opt, stem_of(path) + ".diagrams"), out.str());
  return 0;
}

int cmd_tomo(const std::string& sys_path, const Options& opt) {
  const auto l = load(sys_path, opt);
  const auto rho = initial_state(opt.init, l);
  TomoOptions t;
  if (opt.points) {
    t.t1_points = opt.points;
    t.t2_points = opt.points;
  } else {
    t.t1_points = 256;
    t.t2_points = 256;
  }
  t.dwell1 = t.dwell2 = opt.dwell;
  const auto res = full_tomography(l.es, l.cat, rho, t);
  std::ostringstream out;
  out << "fidelity " << fmt_real(res.fidelity) << '\n';
  out << "calibration_ratio " << fmt_real(res.calibration.ratio) << '\n';
  out << "scale " << fmt_real(res.calibration.scale) << '\n';
  const auto& pops = res.diagonal.populations;
  for (std::size_t k = 0; k < pops.size(); ++k) out << "population " << l.es.labels[k] << ' ' << fmt_real(pops[k]) << '\n';
  for (const auto& c : res.offdiagonal.coherences) {
    out << "coherence " << l.es.labels[c.k] << ' ' << l.es.labels[c.l] << " order " << c.order << " freq_hz "
        << fmt_real(c.freq_hz) << " value " << fmt_real(c.value.real()) << ' ' << fmt_real(c.value.imag()) << '\n';
  }
  std::cout << out.str();
  const std::string stem = stem_of(sys_path) + ".tomo";
  write(out_path(opt, stem + ".report"), out.str());
  write(out_path(opt, stem + ".state"), format_density(res.reconstruction.rho));
  write(out_path(opt, stem + ".2d"), format_magnitude_grid(res.offdiagonal.dataset));
  return 0;
}

int cmd_accept(const Options& opt) {
  int failed = 0;
  for (const auto& o : acceptance::run_all(opt.data_dir)) {
    std::cout << acceptance::format_line(o) << '\n';
    failed += !o.pass;
  }
  std::cout << 10 - failed << " of 10 criteria passed\n";
  return failed ? kFail : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NMR quantum-information spin simulator"};
  app.require_subcommand(1);
  Options opt;
  std::string sys_path, prog_path, name, cm_path;
  int n = 0;
  std::optional<double> t1, t2;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--threshold", opt.threshold, "observability threshold (fraction of the strongest line)");
    sub->add_option("--points", opt.points, "acquisition points");
    sub->add_option("--dwell", opt.dwell, "dwell time in seconds");
    sub->add_option("--beta", opt.beta, "small flip angle in degrees");
  };

  auto* eigen = app.add_subcommand("eigen", "eigenstates and transition catalog");
  eigen->add_option("system", sys_path, "spin system file")->required();
  common(eigen);

  auto* run = app.add_subcommand("run", "run a pulse program");
  run->add_option("system", sys_path, "spin system file")->required();
  run->add_option("program", prog_path, "pulse program file")->required();
  run->add_option("--init", opt.init, "eq, pps:BITS, pops:ID or a state file");
  run->add_option("--t1", t1, "value bound to delay t1");
  run->add_option("--t2", t2, "value bound to delay t2");
  common(run);

  auto* protocol = app.add_subcommand("protocol", "run a named experiment");
  protocol->add_option("name", name, "protocol name")->required();
  protocol->add_option("system", sys_path, "spin system file")->required();
  common(protocol);

  auto* assign = app.add_subcommand("assign", "level diagrams from a connectivity matrix or a spin system");
  assign->add_option("input", cm_path, "connectivity file or spin system file")->required();
  assign->add_option("n", n, "number of spins");
  common(assign);

  auto* tomo = app.add_subcommand("tomo", "density-matrix tomography of a state");
  tomo->add_option("system", sys_path, "spin system file")->required();
  tomo->add_option("--init", opt.init, "eq, pps:BITS, pops:ID or a state file");
  common(tomo);

  auto* accept = app.add_subcommand("accept", "run the acceptance criteria");
  accept->add_option("--data", opt.data_dir, "directory with the shipped data files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    check_options(opt);
    if (*eigen) return cmd_eigen(sys_path, opt);
    if (*run) return cmd_run(sys_path, prog_path, opt, t1, t2);
    if (*protocol) return cmd_protocol(name, sys_path, opt);
    if (*assign) return cmd_assign(cm_path, n, opt);
    if (*tomo) return cmd_tomo(sys_path, opt);
    if (*accept) return cmd_accept(opt);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kFail;
}
