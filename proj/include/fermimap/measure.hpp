#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fermimap/circuit.hpp"
#include "fermimap/mapping.hpp"
#include "fermimap/sim.hpp"

namespace fermimap {

// Layout of the rotation's CNOT network.
enum class Topology { star, chain };

const char* to_string(Topology topology);
Topology topology_from_name(const std::string& name);

// Undirected hardware connectivity; qubits are rotation-circuit wires.
struct CouplingGraph {
  int n_qubits = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> adjacency() const;  // sorted neighbor lists
};

// Format: `qubits <n>` header, then `<a> <b>` per edge, # comments.
CouplingGraph parse_coupling(std::istream& in);
CouplingGraph parse_coupling_file(const std::string& path);

// One off-diagonal matrix entry measured by a group: value * (|m><m'| + h.c.).
// mp is the member whose control bit is 1 (the primed outcome).
struct TermPair {
  int m = 0;
  int mp = 0;
  double value = 0.0;
};

// All off-diagonal entries that flip the same set of register bits share one
// rotation circuit.
struct MeasurementGroup {
  std::uint64_t active_set = 0;  // XOR of paired indices, at least one bit
  int control = 0;               // active bit carrying the Hadamard
  std::vector<TermPair> pairs;   // sorted by (m, mp)
  Circuit rotation;
};

// Diagonal readout plus one rotated readout per XOR group.
struct MeasurementPlan {
  int n_qubits = 0;
  std::vector<double> diagonal;           // length 2^n_qubits
  std::vector<MeasurementGroup> groups;   // ascending active_set

  std::size_t n_circuits() const { return groups.size() + 1; }
};

// Groups the reduced operator's entries and compiles each group's rotation.
// With a coupling graph the control maximizes in-set degree (ties to the
// lowest index) and chain rotations follow a breadth-first tree inside the
// active set; a disconnected active set throws ParseError.
MeasurementPlan build_plan(const ReducedHamiltonian& h,
                           Topology topology = Topology::star,
                           const CouplingGraph* coupling = nullptr);

// The rotation for one active set: a CNOT fan-in onto the control, a Hadamard
// on the control, and the mirrored fan-out. A single-qubit active set has no
// fan and reduces to the lone Hadamard.
Circuit rotation_circuit(int n_qubits, std::uint64_t active_set, int control,
                         Topology topology,
                         const CouplingGraph* coupling = nullptr);

// Max residual over all groups of the rotation's defining action: basis
// column m maps to (|m> + |m'>)/sqrt(2) and column m' to (|m> - |m'>)/sqrt(2)
// for every pair in the group.
double verify_r_properties(const MeasurementPlan& plan);

// E = sum_m h(m,m) p_diag(m) + sum_groups sum_pairs value * (p(m) - p(m')),
// with rotated tables given in the plan's group order.
double reconstruct_expectation(const MeasurementPlan& plan,
                               const ProbabilityTable& diagonal,
                               const std::vector<ProbabilityTable>& rotated);

struct CountBounds {
  std::size_t n_circuits = 0;        // 1 + number of groups
  std::size_t circuit_bound = 0;     // 2^Q
  std::size_t naive_pauli_bound = 0; // 4^Q - 1
};
CountBounds count_bounds(const MeasurementPlan& plan);

// Manifest: `# qubits <Q> circuits <N>` then one line per group:
//   group <active-set-hex> control=<q> pairs=<m>:<m'>[,<m>:<m'>...]
void write_manifest(std::ostream& out, const MeasurementPlan& plan);

// "circ_g<active-set-hex>.qasm"
std::string group_circuit_name(std::uint64_t active_set);

// Writes manifest.txt, circ_diag.qasm, and one rotation circuit per group
// (all with measurements) into an existing directory.
void write_plan_dir(const std::string& dir, const MeasurementPlan& plan);

}  // namespace fermimap
