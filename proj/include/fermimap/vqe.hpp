#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fermimap/circuit.hpp"
#include "fermimap/mapping.hpp"

namespace fermimap {

// CNOT pattern between rotation layers.
enum class Entangler { chain, full };

const char* to_string(Entangler entangler);
Entangler entangler_from_name(const std::string& name);

// Hardware-efficient ansatz on the compressed register: X gates prepare a
// basis state, then each layer applies RY and RZ on every qubit followed by
// the entangler CNOTs.
struct AnsatzSpec {
  int n_qubits = 1;
  int layers = 1;
  Entangler entangler = Entangler::chain;
  std::uint64_t initial_bits = 0;
};

std::size_t parameter_count(const AnsatzSpec& spec);
Circuit ansatz_circuit(const AnsatzSpec& spec,
                       const std::vector<double>& parameters);

// Register basis state with the lowest diagonal entry (the optimizer start).
std::uint64_t default_initial_bits(const ReducedHamiltonian& h);

struct VqeOptions {
  int budget = 500;          // maximum energy evaluations
  std::uint64_t shots = 0;   // 0 = exact expectation values
  std::uint64_t seed = 1;    // sampling seed (shots > 0)
  double initial_step = 0.1; // simplex spread around the start point
};

struct VqeResult {
  double energy = 0.0;               // best energy seen
  std::vector<double> parameters;    // parameters achieving it
  int evaluations = 0;
  std::vector<double> trace;         // best-so-far energy per iteration
};

// Nelder-Mead minimization of the ansatz expectation value, starting from the
// zero parameter vector. The trace is monotone non-increasing; identical
// options give identical runs.
VqeResult optimize(const ReducedHamiltonian& h, const AnsatzSpec& spec,
                   const VqeOptions& options = {});

}  // namespace fermimap
