#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fermimap/circuit.hpp"
#include "fermimap/constraint.hpp"
#include "fermimap/errors.hpp"
#include "fermimap/fermion.hpp"
#include "fermimap/mapping.hpp"
#include "fermimap/sim.hpp"

using namespace fermimap;
using Complex = std::complex<double>;

namespace {

const std::string kPrepFixture =
    std::string(FERMIMAP_FIXTURE_DIR) + "/h2_prep.qasm";
const std::string kHamFixture =
    std::string(FERMIMAP_FIXTURE_DIR) + "/h2_sto3g_0.75.ham";

Eigen::MatrixXcd single_gate_unitary(const Gate& gate) {
  Circuit circuit(1);
  circuit.add(gate);
  return unitary_of(circuit);
}

ReducedHamiltonian hydrogen_reduced() {
  const FermionOperator op = parse_fermion_operator_file(kHamFixture);
  const SubspaceMap map = build_map(intersect_constraints(
      {{ConstraintKind::number_up, {1.0}}, {ConstraintKind::number_down, {1.0}}},
      4));
  return reduce_hamiltonian(op, map);
}

}  // namespace

TEST_CASE("single-qubit gates match their defining matrices") {
  const double theta = 0.37;
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  const auto h = single_gate_unitary(Gate::h(0));
  CHECK(std::abs(h(0, 0) - Complex(inv_sqrt2)) < 1e-15);
  CHECK(std::abs(h(0, 1) - Complex(inv_sqrt2)) < 1e-15);
  CHECK(std::abs(h(1, 0) - Complex(inv_sqrt2)) < 1e-15);
  CHECK(std::abs(h(1, 1) + Complex(inv_sqrt2)) < 1e-15);

  const auto x = single_gate_unitary(Gate::x(0));
  CHECK(std::abs(x(0, 1) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(x(1, 0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(x(0, 0)) < 1e-15);

  const auto rx = single_gate_unitary(Gate::rx(theta, 0));
  CHECK(std::abs(rx(0, 0) - Complex(c)) < 1e-15);
  CHECK(std::abs(rx(0, 1) - Complex(0.0, -s)) < 1e-15);
  CHECK(std::abs(rx(1, 0) - Complex(0.0, -s)) < 1e-15);
  CHECK(std::abs(rx(1, 1) - Complex(c)) < 1e-15);

  const auto ry = single_gate_unitary(Gate::ry(theta, 0));
  CHECK(std::abs(ry(0, 0) - Complex(c)) < 1e-15);
  CHECK(std::abs(ry(0, 1) - Complex(-s)) < 1e-15);
  CHECK(std::abs(ry(1, 0) - Complex(s)) < 1e-15);
  CHECK(std::abs(ry(1, 1) - Complex(c)) < 1e-15);

  const auto rz = single_gate_unitary(Gate::rz(theta, 0));
  CHECK(std::abs(rz(0, 0) - Complex(c, -s)) < 1e-15);
  CHECK(std::abs(rz(1, 1) - Complex(c, s)) < 1e-15);
  CHECK(std::abs(rz(0, 1)) < 1e-15);
}

TEST_CASE("controlled-not flips the target when the control bit is set") {
  Circuit circuit(2);
  circuit.add(Gate::cx(0, 1));
  const auto u = unitary_of(circuit);
  // Index bit 0 is the control: |01> -> |11>, |11> -> |01>.
  CHECK(std::abs(u(3, 1) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(u(1, 3) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(u(0, 0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(u(2, 2) - Complex(1.0)) < 1e-15);

  Circuit reverse(2);
  reverse.add(Gate::cx(1, 0));
  const auto v = unitary_of(reverse);
  CHECK(std::abs(v(3, 2) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(v(2, 3) - Complex(1.0)) < 1e-15);
}

TEST_CASE("gate sequences compose in application order") {
  Circuit circuit(2);
  circuit.add(Gate::ry(0.7, 0));
  circuit.add(Gate::cx(0, 1));
  const auto u = unitary_of(circuit);

  Circuit first(2);
  first.add(Gate::ry(0.7, 0));
  Circuit second(2);
  second.add(Gate::cx(0, 1));
  const Eigen::MatrixXcd product = unitary_of(second) * unitary_of(first);
  CHECK((u - product).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("preparation fixture creates the two-determinant state") {
  const Circuit prep = parse_qasm_file(kPrepFixture);
  CHECK(prep.n_qubits == 4);
  const State state = run(prep);
  REQUIRE(state.size() == 16);
  CHECK(std::abs(state[0b0011] - Complex(std::cos(0.115))) < 1e-12);
  CHECK(std::abs(state[0b1100] - Complex(-std::sin(0.115))) < 1e-12);
  double elsewhere = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i != 0b0011 && i != 0b1100) elsewhere += std::norm(state[i]);
  }
  CHECK(elsewhere < 1e-24);
}

TEST_CASE("circuits run from supplied initial states") {
  Circuit flip(2);
  flip.add(Gate::x(1));
  const State start = basis_state(2, 1);
  const State out = run(flip, &start);
  CHECK(std::abs(out[3] - Complex(1.0)) < 1e-15);

  State bad(3, 0.0);
  CHECK_THROWS_AS(run(flip, &bad), NumericError);
}

TEST_CASE("exact probabilities are squared amplitudes") {
  Circuit circuit(2);
  circuit.add(Gate::ry(2.0 * std::numbers::pi / 3.0, 0));
  const ProbabilityTable table = probabilities(run(circuit));
  CHECK(table.shots == 0);
  CHECK(table.counts.empty());
  REQUIRE(table.probability.size() == 4);
  CHECK(table.probability[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(table.probability[1] == doctest::Approx(0.75).epsilon(1e-12));
  double total = 0.0;
  for (double p : table.probability) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shot sampling is seeded and reproducible") {
  Circuit circuit(2);
  circuit.add(Gate::ry(-0.23, 0));
  circuit.add(Gate::cx(0, 1));
  const State state = run(circuit);

  const ProbabilityTable a = probabilities(state, 50000, 42);
  const ProbabilityTable b = probabilities(state, 50000, 42);
  REQUIRE(a.counts.size() == 4);
  CHECK(a.counts == b.counts);
  CHECK(a.shots == 50000);

  std::uint64_t total = 0;
  for (const auto count : a.counts) total += count;
  CHECK(total == 50000);

  // A different seed draws a different sample.
  const ProbabilityTable c = probabilities(state, 50000, 43);
  CHECK(a.counts != c.counts);

  // Estimates track the exact distribution (five-sigma envelope).
  const ProbabilityTable exact = probabilities(state);
  for (std::size_t i = 0; i < 4; ++i) {
    const double sigma =
        std::sqrt(exact.probability[i] * (1.0 - exact.probability[i]) / 50000.0);
    CHECK(std::abs(a.probability[i] - exact.probability[i]) <=
          5.0 * sigma + 1e-12);
  }
}

TEST_CASE("unitary equivalence ignores global phase only") {
  Circuit circuit(2);
  circuit.add(Gate::h(0));
  circuit.add(Gate::cx(0, 1));
  const Eigen::MatrixXcd u = unitary_of(circuit);

  const Complex phase = std::exp(Complex(0.0, 0.3));
  double residual = -1.0;
  CHECK(equivalent(u, phase * u, 1e-9, &residual));
  CHECK(residual < 1e-12);

  Circuit other(2);
  other.add(Gate::h(0));
  CHECK_FALSE(equivalent(u, unitary_of(other), 1e-9, &residual));
  CHECK(residual > 0.1);
}

TEST_CASE("reduced spectrum matches the sector eigenvalues") {
  const ReducedHamiltonian h = hydrogen_reduced();
  const SpectrumResult spectrum = eigensolve(h);
  REQUIRE(spectrum.eigenvalues.size() == 4);
  CHECK(spectrum.eigenvalues[0] ==
        doctest::Approx(-1.1371170676).epsilon(1e-8));
  CHECK(spectrum.eigenvalues[1] ==
        doctest::Approx(-0.5427821061).epsilon(1e-8));
  CHECK(spectrum.eigenvalues[2] ==
        doctest::Approx(-0.1792390341).epsilon(1e-8));
  CHECK(spectrum.eigenvalues[3] ==
        doctest::Approx(0.4598045066).epsilon(1e-8));

  // Ground vector: normalized, padded to the register, sign-fixed, and an
  // eigenvector for the lowest eigenvalue.
  REQUIRE(spectrum.ground.size() == 4);
  double norm2 = 0.0;
  for (const auto& amp : spectrum.ground) norm2 += std::norm(amp);
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectrum.ground[0].real() > 0.0);
  CHECK(expectation_value(h, spectrum.ground) ==
        doctest::Approx(spectrum.eigenvalues[0]).epsilon(1e-10));
}

TEST_CASE("expectation of a register basis state is its diagonal entry") {
  const ReducedHamiltonian h = hydrogen_reduced();
  for (std::uint64_t m = 0; m < 4; ++m) {
    CHECK(expectation_value(h, basis_state(2, m)) ==
          doctest::Approx(h.entry(static_cast<int>(m), static_cast<int>(m)))
              .epsilon(1e-12));
  }
}

TEST_CASE("qasm writer and parser round-trip a circuit") {
  Circuit circuit(3);
  circuit.add(Gate::x(0));
  circuit.add(Gate::h(2));
  circuit.add(Gate::rx(std::numbers::pi / 2.0, 1));
  circuit.add(Gate::ry(-0.25, 0));
  circuit.add(Gate::rz(1.75e-3, 2));
  circuit.add(Gate::cx(2, 0));

  std::stringstream buffer;
  write_qasm(buffer, circuit, true);
  const Circuit back = parse_qasm(buffer);
  CHECK(back.n_qubits == 3);
  REQUIRE(back.gates.size() == circuit.gates.size());
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    CHECK(back.gates[i].kind == circuit.gates[i].kind);
    CHECK(back.gates[i].target == circuit.gates[i].target);
    CHECK(back.gates[i].control == circuit.gates[i].control);
    CHECK(back.gates[i].angle == circuit.gates[i].angle);
  }
}

TEST_CASE("qasm parser understands pi expressions") {
  std::istringstream in(
      "OPENQASM 2.0;\n"
      "include \"qelib1.inc\";\n"
      "qreg q[1];\n"
      "rx(pi/2) q[0];\n"
      "ry(-pi/4) q[0];\n"
      "rz(2*pi) q[0];\n"
      "rx(0.5*pi) q[0];\n");
  const Circuit circuit = parse_qasm(in);
  REQUIRE(circuit.gates.size() == 4);
  CHECK(circuit.gates[0].angle == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(circuit.gates[1].angle == doctest::Approx(-std::numbers::pi / 4.0));
  CHECK(circuit.gates[2].angle == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(circuit.gates[3].angle == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("qasm parser rejects malformed programs") {
  const auto expect_parse_error = [](const std::string& text,
                                     const std::string& fragment) {
    std::istringstream in(text);
    try {
      parse_qasm(in);
      FAIL_CHECK("expected ParseError for: " << text);
    } catch (const ParseError& err) {
      CHECK(std::string(err.what()).find(fragment) != std::string::npos);
    }
  };
  expect_parse_error("h q[0];\n", "before qreg");
  expect_parse_error("qreg q[2];\nh q[2];\n", "exceeds");
  expect_parse_error("qreg q[2];\ncz q[0],q[1];\n", "unsupported gate");
  expect_parse_error("qreg q[2];\nh q[0]\n", "';'");
  expect_parse_error("qreg q[2];\ncx q[1],q[1];\n", "differ");
  expect_parse_error("qreg q[2];\nrx() q[0];\n", "angle");
  expect_parse_error("OPENQASM 2.0;\n", "no qreg");
}

TEST_CASE("simulator guards register sizes") {
  CHECK_THROWS_AS(basis_state(0, 0), NumericError);
  CHECK_THROWS_AS(basis_state(2, 4), NumericError);
  Circuit huge(13);
  CHECK_THROWS_AS(unitary_of(huge), NumericError);
}
