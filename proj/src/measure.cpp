#include "fermimap/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "fermimap/errors.hpp"

namespace fermimap {
namespace {

constexpr int kMaxQubits = 24;

std::vector<int> active_bits(std::uint64_t active_set) {
  std::vector<int> bits;
  for (int q = 0; q < 64; ++q) {
    if (active_set & (std::uint64_t{1} << q)) bits.push_back(q);
  }
  return bits;
}

// Breadth-first tree of the active set inside the coupling graph, rooted at
// the control. Returns parent->child CNOT edges in visit order, or throws
// when some active qubit is unreachable through active qubits.
std::vector<std::pair<int, int>> bfs_tree(const CouplingGraph& coupling,
                                          const std::vector<int>& active,
                                          int control) {
  const auto adjacency = coupling.adjacency();
  std::vector<bool> in_set(coupling.n_qubits, false);
  for (int q : active) in_set[q] = true;
  std::vector<bool> visited(coupling.n_qubits, false);
  std::vector<std::pair<int, int>> edges;
  std::deque<int> frontier{control};
  visited[control] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop_front();
    for (int next : adjacency[node]) {
      if (next < coupling.n_qubits && in_set[next] && !visited[next]) {
        visited[next] = true;
        edges.emplace_back(node, next);
        frontier.push_back(next);
        ++reached;
      }
    }
  }
  if (reached != active.size()) {
    std::ostringstream msg;
    msg << "coupling graph disconnects active set 0x" << std::hex
        << [&] {
             std::uint64_t mask = 0;
             for (int q : active) mask |= (std::uint64_t{1} << q);
             return mask;
           }()
        << std::dec << " reached " << reached << " of " << active.size()
        << " qubits from control " << control;
    throw ParseError(msg.str());
  }
  return edges;
}

int choose_control(const std::vector<int>& active,
                   const CouplingGraph* coupling) {
  if (coupling == nullptr) return active.front();
  const auto adjacency = coupling->adjacency();
  std::vector<bool> in_set(coupling->n_qubits, false);
  for (int q : active) in_set[q] = true;
  int best = active.front();
  int best_degree = -1;
  for (int q : active) {
    int degree = 0;
    if (q < coupling->n_qubits) {
      for (int next : adjacency[q]) {
        if (next < coupling->n_qubits && in_set[next]) ++degree;
      }
    }
    if (degree > best_degree) {  // ties keep the lowest index
      best_degree = degree;
      best = q;
    }
  }
  return best;
}

}  // namespace

const char* to_string(Topology topology) {
  return topology == Topology::star ? "star" : "chain";
}

Topology topology_from_name(const std::string& name) {
  if (name == "star") return Topology::star;
  if (name == "chain") return Topology::chain;
  throw ParseError("unknown topology '" + name + "' (expected star or chain)");
}

std::vector<std::vector<int>> CouplingGraph::adjacency() const {
  std::vector<std::vector<int>> adj(n_qubits);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& neighbors : adj) {
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()),
                    neighbors.end());
  }
  return adj;
}

CouplingGraph parse_coupling(std::istream& in) {
  CouplingGraph graph;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    if (!have_header) {
      std::string key;
      if (!(words >> key)) continue;
      if (key != "qubits" || !(words >> graph.n_qubits) ||
          graph.n_qubits < 1 || graph.n_qubits > kMaxQubits) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected header 'qubits <n>' with n in 1.." +
                         std::to_string(kMaxQubits));
      }
      std::string extra;
      if (words >> extra) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unexpected token '" + extra + "' after header");
      }
      have_header = true;
      continue;
    }
    int a = -1;
    int b = -1;
    if (!(words >> a)) continue;
    std::string extra;
    if (!(words >> b) || (words >> extra)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected edge '<a> <b>'");
    }
    if (a < 0 || b < 0 || a >= graph.n_qubits || b >= graph.n_qubits ||
        a == b) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": edge endpoints must be distinct qubits below " +
                       std::to_string(graph.n_qubits));
    }
    graph.edges.emplace_back(a, b);
  }
  if (!have_header) {
    throw ParseError("coupling file has no 'qubits <n>' header");
  }
  return graph;
}

CouplingGraph parse_coupling_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open coupling file: " + path);
  try {
    return parse_coupling(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

Circuit rotation_circuit(int n_qubits, std::uint64_t active_set, int control,
                         Topology topology, const CouplingGraph* coupling) {
  const std::vector<int> active = active_bits(active_set);
  if (active.empty()) {
    throw NumericError("rotation needs a non-empty active set");
  }
  if (std::find(active.begin(), active.end(), control) == active.end()) {
    throw NumericError("rotation control must belong to the active set");
  }
  for (int q : active) {
    if (q >= n_qubits) {
      throw NumericError("active set does not fit the register");
    }
  }

  // Fan-out CNOT order, written as it appears after the Hadamard; the fan-in
  // before the Hadamard is its mirror.
  std::vector<std::pair<int, int>> fan_out;
  if (topology == Topology::star) {
    for (int q : active) {
      if (q != control) fan_out.emplace_back(control, q);
    }
  } else if (coupling == nullptr) {
    // Path through the sorted active set, both arms walking away from the
    // control (right arm first).
    const auto pos = static_cast<std::size_t>(
        std::find(active.begin(), active.end(), control) - active.begin());
    for (std::size_t i = pos + 1; i < active.size(); ++i) {
      fan_out.emplace_back(active[i - 1], active[i]);
    }
    for (std::size_t i = pos; i-- > 0;) {
      fan_out.emplace_back(active[i + 1], active[i]);
    }
  } else {
    fan_out = bfs_tree(*coupling, active, control);
  }

  Circuit circuit(n_qubits);
  for (auto it = fan_out.rbegin(); it != fan_out.rend(); ++it) {
    circuit.add(Gate::cx(it->first, it->second));
  }
  circuit.add(Gate::h(control));
  for (const auto& [parent, child] : fan_out) {
    circuit.add(Gate::cx(parent, child));
  }
  return circuit;
}

MeasurementPlan build_plan(const ReducedHamiltonian& h, Topology topology,
                           const CouplingGraph* coupling) {
  if (coupling != nullptr && coupling->n_qubits < h.n_qubits()) {
    throw ParseError("coupling graph has fewer qubits than the register");
  }
  MeasurementPlan plan;
  plan.n_qubits = h.n_qubits();
  plan.diagonal.assign(std::size_t{1} << h.n_qubits(), 0.0);
  for (std::size_t m = 0; m < h.dim(); ++m) {
    plan.diagonal[m] = h.entry(static_cast<int>(m), static_cast<int>(m));
  }

  std::map<std::uint64_t, std::vector<std::pair<int, int>>> grouped;
  for (const auto& entry : h.entries()) {
    if (entry.m == entry.mp) continue;
    const auto active = static_cast<std::uint64_t>(entry.m) ^
                        static_cast<std::uint64_t>(entry.mp);
    grouped[active].emplace_back(entry.m, entry.mp);
  }

  for (const auto& [active_set, index_pairs] : grouped) {
    MeasurementGroup group;
    group.active_set = active_set;
    const std::vector<int> active = active_bits(active_set);
    group.control = choose_control(active, coupling);
    const auto control_bit = std::uint64_t{1} << group.control;
    for (const auto& [a, b] : index_pairs) {
      // The primed member is the one whose control bit reads 1.
      const bool b_primed = (static_cast<std::uint64_t>(b) & control_bit) != 0;
      const int m = b_primed ? a : b;
      const int mp = b_primed ? b : a;
      group.pairs.push_back({m, mp, h.entry(a, b)});
    }
    std::sort(group.pairs.begin(), group.pairs.end(),
              [](const TermPair& lhs, const TermPair& rhs) {
                return std::make_pair(lhs.m, lhs.mp) <
                       std::make_pair(rhs.m, rhs.mp);
              });
    group.rotation = rotation_circuit(plan.n_qubits, active_set, group.control,
                                      topology, coupling);
    plan.groups.push_back(std::move(group));
  }
  return plan;
}

double verify_r_properties(const MeasurementPlan& plan) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  double worst = 0.0;
  for (const auto& group : plan.groups) {
    const Eigen::MatrixXcd u = unitary_of(group.rotation);
    for (const auto& pair : group.pairs) {
      const Eigen::Index m = pair.m;
      const Eigen::Index mp = pair.mp;
      // Column m: (|m> + |m'>)/sqrt(2); column m': (|m> - |m'>)/sqrt(2).
      for (Eigen::Index row = 0; row < u.rows(); ++row) {
        const std::complex<double> want_m =
            (row == m || row == mp) ? kInvSqrt2 : 0.0;
        const std::complex<double> want_mp =
            row == m ? kInvSqrt2 : (row == mp ? -kInvSqrt2 : 0.0);
        worst = std::max(worst, std::abs(u(row, m) - want_m));
        worst = std::max(worst, std::abs(u(row, mp) - want_mp));
      }
    }
  }
  return worst;
}

double reconstruct_expectation(const MeasurementPlan& plan,
                               const ProbabilityTable& diagonal,
                               const std::vector<ProbabilityTable>& rotated) {
  const std::size_t reg_dim = std::size_t{1} << plan.n_qubits;
  if (diagonal.probability.size() != reg_dim) {
    throw NumericError("diagonal probability table has the wrong length");
  }
  if (rotated.size() != plan.groups.size()) {
    throw NumericError("expected one rotated table per measurement group");
  }
  double energy = 0.0;
  for (std::size_t m = 0; m < reg_dim; ++m) {
    energy += plan.diagonal[m] * diagonal.probability[m];
  }
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    if (rotated[g].probability.size() != reg_dim) {
      throw NumericError("rotated probability table has the wrong length");
    }
    for (const auto& pair : plan.groups[g].pairs) {
      energy += pair.value * (rotated[g].probability[pair.m] -
                              rotated[g].probability[pair.mp]);
    }
  }
  return energy;
}

CountBounds count_bounds(const MeasurementPlan& plan) {
  CountBounds bounds;
  bounds.n_circuits = plan.n_circuits();
  bounds.circuit_bound = std::size_t{1} << plan.n_qubits;
  bounds.naive_pauli_bound = (std::size_t{1} << (2 * plan.n_qubits)) - 1;
  return bounds;
}

void write_manifest(std::ostream& out, const MeasurementPlan& plan) {
  out << "# qubits " << plan.n_qubits << " circuits " << plan.n_circuits()
      << "\n";
  char hex_buf[32];
  for (const auto& group : plan.groups) {
    std::snprintf(hex_buf, sizeof(hex_buf), "%llx",
                  static_cast<unsigned long long>(group.active_set));
    out << "group " << hex_buf << " control=" << group.control << " pairs=";
    bool first = true;
    for (const auto& pair : group.pairs) {
      if (!first) out << ',';
      out << pair.m << ':' << pair.mp;
      first = false;
    }
    out << "\n";
  }
}

std::string group_circuit_name(std::uint64_t active_set) {
  char hex_buf[32];
  std::snprintf(hex_buf, sizeof(hex_buf), "%llx",
                static_cast<unsigned long long>(active_set));
  return std::string("circ_g") + hex_buf + ".qasm";
}

void write_plan_dir(const std::string& dir, const MeasurementPlan& plan) {
  {
    std::ofstream manifest(dir + "/manifest.txt");
    if (!manifest) {
      throw ParseError("cannot write manifest in directory: " + dir);
    }
    write_manifest(manifest, plan);
  }
  write_qasm_file(dir + "/circ_diag.qasm", Circuit(plan.n_qubits), true);
  for (const auto& group : plan.groups) {
    write_qasm_file(dir + "/" + group_circuit_name(group.active_set),
                    group.rotation, true);
  }
}

}  // namespace fermimap
