#include "fermimap/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fermimap/constraint.hpp"
#include "fermimap/errors.hpp"
#include "fermimap/fermion.hpp"
#include "fermimap/mapping.hpp"
#include "fermimap/measure.hpp"
#include "fermimap/pauli.hpp"
#include "fermimap/sim.hpp"
#include "fermimap/vqe.hpp"

namespace fermimap::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Wall-clock stage reporting; goes to the diagnostic stream so command
// output stays machine-readable.
class StageTimer {
 public:
  explicit StageTimer(std::ostream& err) : err_(err), last_(Clock::now()) {}

  void lap(const char* stage) {
    const auto now = Clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", ms);
    err_ << "# " << stage << ' ' << buf << " ms\n";
  }

 private:
  std::ostream& err_;
  Clock::time_point last_;
};

struct CommonArgs {
  std::string topology_name = "star";
  std::string coupling_path;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--topology", args->topology_name,
                  "rotation layout: star or chain")
      ->check(CLI::IsMember({"star", "chain"}));
  cmd->add_option("--coupling", args->coupling_path,
                  "hardware coupling graph file");
}

// Owns the optional coupling graph so build_plan can take a pointer.
struct PlanConfig {
  Topology topology = Topology::star;
  std::optional<CouplingGraph> coupling;

  const CouplingGraph* coupling_ptr() const {
    return coupling.has_value() ? &*coupling : nullptr;
  }
};

PlanConfig plan_config(const CommonArgs& args) {
  PlanConfig config;
  config.topology = topology_from_name(args.topology_name);
  if (!args.coupling_path.empty()) {
    config.coupling = parse_coupling_file(args.coupling_path);
  }
  return config;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ParseError("cannot create output directory " + dir + ": " +
                     ec.message());
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path.string());
  return out;
}

std::size_t count_jw_strings(const FermionOperator& op) {
  const auto strings = jordan_wigner(op);
  std::size_t n = 0;
  for (const auto& s : strings) {
    if (!s.is_identity()) ++n;
  }
  return n;
}

void write_probability_csv(const fs::path& path,
                           const ProbabilityTable& table) {
  auto out = open_out(path);
  if (table.shots == 0) {
    out << "index,probability\n";
    for (std::size_t i = 0; i < table.probability.size(); ++i) {
      out << i << ',' << format_float(table.probability[i]) << "\n";
    }
  } else {
    out << "index,count,probability\n";
    for (std::size_t i = 0; i < table.probability.size(); ++i) {
      out << i << ',' << table.counts[i] << ','
          << format_float(table.probability[i]) << "\n";
    }
  }
}

// Interatomic distance encoded as the last number in the filename stem,
// e.g. curve_0.75.ham -> 0.75.
double distance_from_stem(const std::string& stem) {
  static const std::regex number(
      R"([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)");
  auto begin = std::sregex_iterator(stem.begin(), stem.end(), number);
  auto end = std::sregex_iterator();
  if (begin == end) {
    throw ParseError("cannot read a distance from filename stem '" + stem +
                     "'");
  }
  std::string last;
  for (auto it = begin; it != end; ++it) last = it->str();
  return std::stod(last);
}

int cmd_map(const std::string& ham_path, const std::string& cons_path,
            const std::string& out_dir, const CommonArgs& common,
            std::ostream& out, std::ostream& err) {
  StageTimer timer(err);
  const FermionOperator op = parse_fermion_operator_file(ham_path);
  const auto constraints = parse_constraints_file(cons_path);
  const std::size_t jw_strings = count_jw_strings(op);
  timer.lap("parse");

  const SubspaceBasis basis =
      intersect_constraints(constraints, op.n_orbitals());
  const SubspaceMap map = build_map(basis);
  timer.lap("constrain");

  const ReducedHamiltonian reduced = reduce_hamiltonian(op, map);
  timer.lap("reduce");

  const PlanConfig config = plan_config(common);
  const MeasurementPlan plan =
      build_plan(reduced, config.topology, config.coupling_ptr());
  timer.lap("plan");

  ensure_dir(out_dir);
  write_reduced_file((fs::path(out_dir) / "reduced.ham").string(), reduced);
  write_subspace_file((fs::path(out_dir) / "subspace.txt").string(),
                      map.basis);
  write_plan_dir(out_dir, plan);
  timer.lap("write");

  out << "Q_before=" << op.n_orbitals() << " Q_after=" << map.n_qubits
      << " terms=" << jw_strings << " circuits=" << plan.n_circuits() << "\n";
  return 0;
}

int cmd_group(const std::string& reduced_path, const std::string& out_dir,
              const CommonArgs& common, std::ostream& out) {
  const ReducedHamiltonian reduced = read_reduced_file(reduced_path);
  const PlanConfig config = plan_config(common);
  const MeasurementPlan plan =
      build_plan(reduced, config.topology, config.coupling_ptr());
  ensure_dir(out_dir);
  write_plan_dir(out_dir, plan);
  const CountBounds bounds = count_bounds(plan);
  out << "circuits=" << bounds.n_circuits
      << " circuit_bound=" << bounds.circuit_bound << "\n";
  return 0;
}

int cmd_measure(const std::string& reduced_path, const std::string& prep_path,
                const std::string& out_dir, const CommonArgs& common,
                std::uint64_t shots, std::uint64_t seed, std::ostream& out) {
  const ReducedHamiltonian reduced = read_reduced_file(reduced_path);
  const Circuit prep = parse_qasm_file(prep_path);
  if (prep.n_qubits != reduced.n_qubits()) {
    std::ostringstream msg;
    msg << "preparation circuit register (" << prep.n_qubits
        << " qubits) does not match the reduced register ("
        << reduced.n_qubits() << ")";
    throw NumericError(msg.str());
  }
  const PlanConfig config = plan_config(common);
  const MeasurementPlan plan =
      build_plan(reduced, config.topology, config.coupling_ptr());

  const State state = run(prep);
  const ProbabilityTable diagonal =
      shots > 0 ? probabilities(state, shots, seed) : probabilities(state);
  std::vector<ProbabilityTable> rotated;
  rotated.reserve(plan.groups.size());
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const State turned = run(plan.groups[g].rotation, &state);
    rotated.push_back(shots > 0
                          ? probabilities(turned, shots, seed + 1 + g)
                          : probabilities(turned));
  }

  ensure_dir(out_dir);
  write_probability_csv(fs::path(out_dir) / "probs_diag.csv", diagonal);
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    char csv_name[48];
    std::snprintf(csv_name, sizeof(csv_name), "probs_g%llx.csv",
                  static_cast<unsigned long long>(plan.groups[g].active_set));
    write_probability_csv(fs::path(out_dir) / csv_name, rotated[g]);
  }

  out << "energy=" << format_float(
             reconstruct_expectation(plan, diagonal, rotated))
      << "\n";
  return 0;
}

int cmd_eig_single(const std::string& reduced_path, const std::string& out_dir,
                   std::ostream& out) {
  const ReducedHamiltonian reduced = read_reduced_file(reduced_path);
  const SpectrumResult spectrum = eigensolve(reduced);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto csv = open_out(fs::path(out_dir) / "spectrum.csv");
    csv << "index,eigenvalue\n";
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
      csv << i << ',' << format_float(spectrum.eigenvalues[i]) << "\n";
    }
  }
  out << "ground=" << format_float(spectrum.eigenvalues.front()) << "\n";
  return 0;
}

int cmd_eig_batch(const std::string& batch_dir, const std::string& cons_path,
                  const std::string& out_dir, std::ostream& out) {
  const auto constraints = parse_constraints_file(cons_path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(batch_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ham") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw ParseError("no .ham files in batch directory: " + batch_dir);
  }
  std::sort(files.begin(), files.end());

  // One independent pipeline per geometry; rows come back sorted by distance.
  const auto solve_one = [&constraints](const fs::path& path) {
    const FermionOperator op = parse_fermion_operator_file(path.string());
    const SubspaceBasis basis =
        intersect_constraints(constraints, op.n_orbitals());
    const SubspaceMap map = build_map(basis);
    const ReducedHamiltonian reduced = reduce_hamiltonian(op, map);
    const SpectrumResult spectrum = eigensolve(reduced);
    return std::make_pair(distance_from_stem(path.stem().string()),
                          spectrum.eigenvalues.front());
  };

  std::vector<std::future<std::pair<double, double>>> futures;
  futures.reserve(files.size());
  for (const auto& path : files) {
    futures.push_back(
        std::async(std::launch::async, [&solve_one, path] {
          return solve_one(path);
        }));
  }
  std::vector<std::pair<double, double>> rows;
  rows.reserve(files.size());
  for (auto& future : futures) rows.push_back(future.get());
  std::sort(rows.begin(), rows.end());

  std::ostringstream csv;
  csv << "distance,energy\n";
  for (const auto& [distance, energy] : rows) {
    csv << format_float(distance) << ',' << format_float(energy) << "\n";
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    open_out(fs::path(out_dir) / "curve.csv") << csv.str();
  }
  out << csv.str();
  return 0;
}

int cmd_vqe(const std::string& reduced_path, const std::string& out_dir,
            int layers, const std::string& entangler_name, int budget,
            std::uint64_t shots, std::uint64_t seed, std::ostream& out) {
  const ReducedHamiltonian reduced = read_reduced_file(reduced_path);
  AnsatzSpec spec;
  spec.n_qubits = reduced.n_qubits();
  spec.layers = layers;
  spec.entangler = entangler_from_name(entangler_name);
  spec.initial_bits = default_initial_bits(reduced);
  VqeOptions options;
  options.budget = budget;
  options.shots = shots;
  options.seed = seed;
  const VqeResult result = optimize(reduced, spec, options);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto csv = open_out(fs::path(out_dir) / "trace.csv");
    csv << "iter,energy\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      csv << i << ',' << format_float(result.trace[i]) << "\n";
    }
  }
  out << "energy=" << format_float(result.energy)
      << " evaluations=" << result.evaluations << "\n";
  return 0;
}

int cmd_pauli_count(const std::string& ham_path,
                    const std::string& reduced_path, const CommonArgs& common,
                    std::ostream& out) {
  if (!ham_path.empty()) {
    const FermionOperator op = parse_fermion_operator_file(ham_path);
    out << "jw_strings=" << count_jw_strings(op) << "\n";
    return 0;
  }
  const ReducedHamiltonian reduced = read_reduced_file(reduced_path);
  const PlanConfig config = plan_config(common);
  const MeasurementPlan plan =
      build_plan(reduced, config.topology, config.coupling_ptr());
  const CountBounds bounds = count_bounds(plan);
  out << "circuits=" << bounds.n_circuits
      << " circuit_bound=" << bounds.circuit_bound
      << " pauli_bound=" << bounds.naive_pauli_bound << "\n";
  return 0;
}

int cmd_verify_circuits(const std::string& reduced_path,
                        const std::string& coupling_path, std::ostream& out,
                        std::ostream& err) {
  const ReducedHamiltonian reduced = read_reduced_file(reduced_path);
  std::optional<CouplingGraph> coupling;
  if (!coupling_path.empty()) {
    coupling = parse_coupling_file(coupling_path);
  }
  const CouplingGraph* graph = coupling.has_value() ? &*coupling : nullptr;
  const MeasurementPlan star_plan =
      build_plan(reduced, Topology::star, graph);
  const MeasurementPlan chain_plan =
      build_plan(reduced, Topology::chain, graph);

  const double r_residual =
      std::max(verify_r_properties(star_plan), verify_r_properties(chain_plan));
  double equivalence_residual = 0.0;
  for (std::size_t g = 0; g < star_plan.groups.size(); ++g) {
    double residual = 0.0;
    equivalent(unitary_of(star_plan.groups[g].rotation),
               unitary_of(chain_plan.groups[g].rotation), 1e-9, &residual);
    equivalence_residual = std::max(equivalence_residual, residual);
  }
  out << "r_residual=" << format_float(r_residual)
      << " equivalence_residual=" << format_float(equivalence_residual)
      << "\n";
  if (r_residual > 1e-9 || equivalence_residual > 1e-9) {
    err << "error: rotation circuits failed verification\n";
    return 4;
  }
  return 0;
}

}  // namespace

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"maps constrained fermionic operators onto minimal qubit "
               "registers and compiles their measurement circuits"};
  app.name("fermimap");
  app.require_subcommand(1);

  std::string ham_path;
  std::string cons_path;
  std::string reduced_path;
  std::string prep_path;
  std::string out_dir;
  std::string batch_dir;
  CommonArgs map_common;
  CommonArgs group_common;
  CommonArgs measure_common;
  CommonArgs count_common;
  std::string verify_coupling;
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;
  int layers = 1;
  std::string entangler_name = "chain";
  int budget = 500;

  auto* map_cmd = app.add_subcommand(
      "map", "constrain, compress, and compile one operator");
  map_cmd->add_option("--ham", ham_path, "fermionic operator file")
      ->required();
  map_cmd->add_option("--constraints", cons_path, "constraint file")
      ->required();
  map_cmd->add_option("--out", out_dir, "output directory")->required();
  add_common(map_cmd, &map_common);

  auto* group_cmd = app.add_subcommand(
      "group", "compile measurement circuits for a reduced operator");
  group_cmd->add_option("--reduced", reduced_path, "reduced operator file")
      ->required();
  group_cmd->add_option("--out", out_dir, "output directory")->required();
  add_common(group_cmd, &group_common);

  auto* measure_cmd = app.add_subcommand(
      "measure", "simulate the measurement plan on a prepared state");
  measure_cmd->add_option("--reduced", reduced_path, "reduced operator file")
      ->required();
  measure_cmd->add_option("--prep", prep_path, "state-preparation circuit")
      ->required();
  measure_cmd->add_option("--out", out_dir, "output directory")->required();
  measure_cmd->add_option("--shots", shots, "samples per circuit (0 = exact)");
  measure_cmd->add_option("--seed", seed, "sampling seed");
  add_common(measure_cmd, &measure_common);

  auto* eig_cmd = app.add_subcommand(
      "eig", "exact spectrum of a reduced operator, or a batch ground-state "
             "curve");
  eig_cmd->add_option("--reduced", reduced_path, "reduced operator file");
  eig_cmd->add_option("--batch", batch_dir,
                      "directory of operator files (one per geometry)");
  eig_cmd->add_option("--constraints", cons_path,
                      "constraint file (batch mode)");
  eig_cmd->add_option("--out", out_dir, "output directory");

  auto* vqe_cmd = app.add_subcommand(
      "vqe", "variational ground-state search on the reduced register");
  vqe_cmd->add_option("--reduced", reduced_path, "reduced operator file")
      ->required();
  vqe_cmd->add_option("--out", out_dir, "output directory");
  vqe_cmd->add_option("--layers", layers, "ansatz layers")
      ->check(CLI::PositiveNumber);
  vqe_cmd->add_option("--entangler", entangler_name, "chain or full")
      ->check(CLI::IsMember({"chain", "full"}));
  vqe_cmd->add_option("--budget", budget, "maximum energy evaluations")
      ->check(CLI::PositiveNumber);
  vqe_cmd->add_option("--shots", shots, "samples per circuit (0 = exact)");
  vqe_cmd->add_option("--seed", seed, "sampling seed");

  auto* count_cmd = app.add_subcommand(
      "pauli-count", "compare measurement-circuit counts against string "
                     "counts");
  count_cmd->add_option("--ham", ham_path, "fermionic operator file");
  count_cmd->add_option("--reduced", reduced_path, "reduced operator file");
  add_common(count_cmd, &count_common);

  auto* verify_cmd = app.add_subcommand(
      "verify-circuits", "check rotation-circuit action and topology "
                         "equivalence");
  verify_cmd->add_option("--reduced", reduced_path, "reduced operator file")
      ->required();
  verify_cmd->add_option("--coupling", verify_coupling,
                         "hardware coupling graph file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));

    if (*map_cmd) {
      return cmd_map(ham_path, cons_path, out_dir, map_common, out, err);
    }
    if (*group_cmd) {
      return cmd_group(reduced_path, out_dir, group_common, out);
    }
    if (*measure_cmd) {
      return cmd_measure(reduced_path, prep_path, out_dir, measure_common,
                         shots, seed, out);
    }
    if (*eig_cmd) {
      const bool batch = !batch_dir.empty();
      if (batch == !reduced_path.empty()) {
        throw ParseError(
            "eig needs exactly one of --reduced or --batch");
      }
      if (batch && cons_path.empty()) {
        throw ParseError("eig --batch needs --constraints");
      }
      return batch ? cmd_eig_batch(batch_dir, cons_path, out_dir, out)
                   : cmd_eig_single(reduced_path, out_dir, out);
    }
    if (*vqe_cmd) {
      return cmd_vqe(reduced_path, out_dir, layers, entangler_name, budget,
                     shots, seed, out);
    }
    if (*count_cmd) {
      if (ham_path.empty() == reduced_path.empty()) {
        throw ParseError(
            "pauli-count needs exactly one of --ham or --reduced");
      }
      return cmd_pauli_count(ham_path, reduced_path, count_common, out);
    }
    if (*verify_cmd) {
      return cmd_verify_circuits(reduced_path, verify_coupling, out, err);
    }
    throw ParseError("no command selected");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fermimap::cli
