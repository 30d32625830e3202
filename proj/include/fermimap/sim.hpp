#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fermimap/circuit.hpp"
#include "fermimap/mapping.hpp"

namespace fermimap {

// Statevector over computational basis states; index bit q holds qubit q.
using State = std::vector<std::complex<double>>;

State basis_state(int n_qubits, std::uint64_t index);

// Runs the circuit on `initial` (|0...0> when null).
State run(const Circuit& circuit, const State* initial = nullptr);

// Exact or sampled outcome distribution. With shots > 0 the counts come from
// a seeded deterministic generator and probability = count / shots.
struct ProbabilityTable {
  std::uint64_t shots = 0;  // 0 means exact
  std::vector<double> probability;
  std::vector<std::uint64_t> counts;  // empty when exact
};

ProbabilityTable probabilities(const State& state);
ProbabilityTable probabilities(const State& state, std::uint64_t shots,
                               std::uint64_t seed);

// Full unitary of the circuit (at most 12 qubits).
Eigen::MatrixXcd unitary_of(const Circuit& circuit);

// True when a and b agree up to a global phase within tol (max norm); the
// aligned residual is written to *residual when non-null.
bool equivalent(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                double tol = 1e-9, double* residual = nullptr);

// Exact spectrum of the reduced operator (dimension at most 4096). The ground
// vector is padded with zeros to the full register and sign-fixed so its
// first nonzero amplitude is positive.
struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending, one per subspace dimension
  State ground;                     // length 2^n_qubits, real entries
};
SpectrumResult eigensolve(const ReducedHamiltonian& h);

// <state| h |state> on the register (state length 2^n_qubits).
double expectation_value(const ReducedHamiltonian& h, const State& state);

}  // namespace fermimap
