#include "fermimap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fermimap/errors.hpp"

namespace fermimap {
namespace {

constexpr int kMaxRunQubits = 24;
constexpr int kMaxUnitaryQubits = 12;
constexpr std::size_t kMaxEigDim = 4096;

using Complex = std::complex<double>;

struct Matrix2 {
  Complex a, b, c, d;  // [[a, b], [c, d]]
};

Matrix2 gate_matrix(const Gate& gate) {
  const double half = 0.5 * gate.angle;
  const double cos_h = std::cos(half);
  const double sin_h = std::sin(half);
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  switch (gate.kind) {
    case GateKind::h:
      return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case GateKind::x:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::rx:
      return {cos_h, Complex(0.0, -sin_h), Complex(0.0, -sin_h), cos_h};
    case GateKind::ry:
      return {cos_h, -sin_h, sin_h, cos_h};
    case GateKind::rz:
      return {Complex(cos_h, -sin_h), 0.0, 0.0, Complex(cos_h, sin_h)};
    case GateKind::cx:
      break;
  }
  throw NumericError("cx has no single-qubit matrix");
}

void apply_single(State& state, const Matrix2& m, int qubit) {
  const std::uint64_t stride = std::uint64_t{1} << qubit;
  const std::uint64_t dim = state.size();
  for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
    for (std::uint64_t offset = 0; offset < stride; ++offset) {
      const std::uint64_t i0 = base + offset;
      const std::uint64_t i1 = i0 + stride;
      const Complex lo = state[i0];
      const Complex hi = state[i1];
      state[i0] = m.a * lo + m.b * hi;
      state[i1] = m.c * lo + m.d * hi;
    }
  }
}

void apply_cx(State& state, int control, int target) {
  const std::uint64_t control_bit = std::uint64_t{1} << control;
  const std::uint64_t target_bit = std::uint64_t{1} << target;
  const std::uint64_t dim = state.size();
  for (std::uint64_t i = 0; i < dim; ++i) {
    if ((i & control_bit) && !(i & target_bit)) {
      std::swap(state[i], state[i | target_bit]);
    }
  }
}

}  // namespace

State basis_state(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1 || n_qubits > kMaxRunQubits) {
    throw NumericError("statevector supports 1 to " +
                       std::to_string(kMaxRunQubits) + " qubits");
  }
  State state(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  if (index >= state.size()) {
    throw NumericError("basis state index out of range");
  }
  state[index] = 1.0;
  return state;
}

State run(const Circuit& circuit, const State* initial) {
  if (circuit.n_qubits < 1 || circuit.n_qubits > kMaxRunQubits) {
    throw NumericError("statevector supports 1 to " +
                       std::to_string(kMaxRunQubits) + " qubits");
  }
  State state;
  if (initial != nullptr) {
    if (initial->size() != (std::size_t{1} << circuit.n_qubits)) {
      throw NumericError("initial state length must be 2^n_qubits");
    }
    state = *initial;
  } else {
    state = basis_state(circuit.n_qubits, 0);
  }
  for (const auto& gate : circuit.gates) {
    if (gate.kind == GateKind::cx) {
      apply_cx(state, gate.control, gate.target);
    } else {
      apply_single(state, gate_matrix(gate), gate.target);
    }
  }
  return state;
}

ProbabilityTable probabilities(const State& state) {
  ProbabilityTable table;
  table.probability.reserve(state.size());
  for (const auto& amp : state) table.probability.push_back(std::norm(amp));
  return table;
}

ProbabilityTable probabilities(const State& state, std::uint64_t shots,
                               std::uint64_t seed) {
  if (shots == 0) return probabilities(state);
  // Inverse-CDF sampling from explicitly generated uniforms keeps the
  // counts identical across standard library implementations.
  std::vector<double> cumulative(state.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    acc += std::norm(state[i]);
    cumulative[i] = acc;
  }
  const double total = acc;
  std::mt19937_64 gen(seed);
  ProbabilityTable table;
  table.shots = shots;
  table.counts.assign(state.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u =
        total * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx =
        std::min(static_cast<std::size_t>(it - cumulative.begin()),
                 state.size() - 1);
    ++table.counts[idx];
  }
  table.probability.reserve(state.size());
  for (const auto count : table.counts) {
    table.probability.push_back(static_cast<double>(count) /
                                static_cast<double>(shots));
  }
  return table;
}

Eigen::MatrixXcd unitary_of(const Circuit& circuit) {
  if (circuit.n_qubits > kMaxUnitaryQubits) {
    throw NumericError("full unitary supports at most " +
                       std::to_string(kMaxUnitaryQubits) + " qubits");
  }
  const auto dim =
      static_cast<Eigen::Index>(std::size_t{1} << circuit.n_qubits);
  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const State column =
        basis_state(circuit.n_qubits, static_cast<std::uint64_t>(col));
    const State out = run(circuit, &column);
    for (Eigen::Index row = 0; row < dim; ++row) {
      u(row, col) = out[static_cast<std::size_t>(row)];
    }
  }
  return u;
}

bool equivalent(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                double tol, double* residual) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    if (residual != nullptr) *residual = 1.0;
    return false;
  }
  // Align global phase at a's largest entry, then compare everywhere.
  Eigen::Index max_row = 0;
  Eigen::Index max_col = 0;
  a.cwiseAbs().maxCoeff(&max_row, &max_col);
  Complex phase = 1.0;
  const Complex pivot_b = b(max_row, max_col);
  if (std::abs(pivot_b) > 1e-15) {
    phase = a(max_row, max_col) / pivot_b;
    const double mag = std::abs(phase);
    phase = (mag > 1e-15) ? phase / mag : Complex{1.0, 0.0};
  }
  const double diff = (a - phase * b).cwiseAbs().maxCoeff();
  if (residual != nullptr) *residual = diff;
  return diff <= tol;
}

SpectrumResult eigensolve(const ReducedHamiltonian& h) {
  if (h.dim() > kMaxEigDim) {
    throw NumericError("exact spectrum supports dimension up to " +
                       std::to_string(kMaxEigDim));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolve failed on the reduced operator");
  }
  SpectrumResult result;
  result.eigenvalues.assign(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + h.dim());
  Eigen::VectorXd ground = solver.eigenvectors().col(0);
  for (Eigen::Index i = 0; i < ground.size(); ++i) {
    if (std::abs(ground(i)) > 1e-12) {
      if (ground(i) < 0.0) ground = -ground;
      break;
    }
  }
  result.ground.assign(std::size_t{1} << h.n_qubits(), Complex{0.0, 0.0});
  for (Eigen::Index i = 0; i < ground.size(); ++i) {
    result.ground[static_cast<std::size_t>(i)] = ground(i);
  }
  return result;
}

double expectation_value(const ReducedHamiltonian& h, const State& state) {
  const std::size_t reg_dim = std::size_t{1} << h.n_qubits();
  if (state.size() != reg_dim) {
    throw NumericError("state length must be 2^n_qubits");
  }
  const auto dim = static_cast<std::size_t>(h.dim());
  Complex acc = 0.0;
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t mp = 0; mp < dim; ++mp) {
      const double value = h.entry(static_cast<int>(m), static_cast<int>(mp));
      if (value != 0.0) {
        acc += std::conj(state[m]) * value * state[mp];
      }
    }
  }
  // Weight on unassigned register states contributes nothing (h is zero
  // there), matching measurement on the padded register.
  return acc.real();
}

}  // namespace fermimap
