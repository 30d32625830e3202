#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fermimap/constraint.hpp"
#include "fermimap/errors.hpp"
#include "fermimap/fermion.hpp"
#include "fermimap/mapping.hpp"
#include "fermimap/sim.hpp"
#include "fermimap/vqe.hpp"

using namespace fermimap;

namespace {

const std::string kHamFixture =
    std::string(FERMIMAP_FIXTURE_DIR) + "/h2_sto3g_0.75.ham";

ReducedHamiltonian hydrogen_reduced() {
  const FermionOperator op = parse_fermion_operator_file(kHamFixture);
  const SubspaceMap map = build_map(intersect_constraints(
      {{ConstraintKind::number_up, {1.0}}, {ConstraintKind::number_down, {1.0}}},
      4));
  return reduce_hamiltonian(op, map);
}

}  // namespace

TEST_CASE("parameter count is two rotations per qubit per layer") {
  CHECK(parameter_count({2, 1, Entangler::chain, 0}) == 4);
  CHECK(parameter_count({3, 2, Entangler::full, 0}) == 12);
  CHECK(parameter_count({1, 4, Entangler::chain, 0}) == 8);
}

TEST_CASE("ansatz lays out preparation, rotations, and entangler") {
  AnsatzSpec spec{3, 1, Entangler::chain, 0b101};
  const std::vector<double> params{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const Circuit circuit = ansatz_circuit(spec, params);
  REQUIRE(circuit.gates.size() == 2 + 3 + 3 + 2);

  // X preparation on the set bits of initial_bits, ascending.
  CHECK(circuit.gates[0].kind == GateKind::x);
  CHECK(circuit.gates[0].target == 0);
  CHECK(circuit.gates[1].kind == GateKind::x);
  CHECK(circuit.gates[1].target == 2);

  // RY sweep then RZ sweep, one parameter each in qubit order.
  for (int q = 0; q < 3; ++q) {
    CHECK(circuit.gates[2 + q].kind == GateKind::ry);
    CHECK(circuit.gates[2 + q].target == q);
    CHECK(circuit.gates[2 + q].angle == doctest::Approx(params[q]));
    CHECK(circuit.gates[5 + q].kind == GateKind::rz);
    CHECK(circuit.gates[5 + q].target == q);
    CHECK(circuit.gates[5 + q].angle == doctest::Approx(params[3 + q]));
  }

  // Chain entangler: 0->1, 1->2.
  CHECK(circuit.gates[8].kind == GateKind::cx);
  CHECK(circuit.gates[8].control == 0);
  CHECK(circuit.gates[8].target == 1);
  CHECK(circuit.gates[9].control == 1);
  CHECK(circuit.gates[9].target == 2);
}

TEST_CASE("full entangler couples every ordered qubit pair once") {
  AnsatzSpec spec{3, 1, Entangler::full, 0};
  const Circuit circuit = ansatz_circuit(spec, std::vector<double>(6, 0.0));
  std::vector<std::pair<int, int>> cnots;
  for (const auto& gate : circuit.gates) {
    if (gate.kind == GateKind::cx) cnots.emplace_back(gate.control, gate.target);
  }
  CHECK(cnots == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("ansatz validates the parameter vector length") {
  AnsatzSpec spec{2, 1, Entangler::chain, 0};
  CHECK_THROWS_AS(ansatz_circuit(spec, {0.0, 0.0, 0.0}), NumericError);
}

TEST_CASE("default start is the lowest diagonal entry") {
  const ReducedHamiltonian h = hydrogen_reduced();
  // Diagonal: -1.11615 at |00>, -0.36101 twice, 0.43884.
  CHECK(default_initial_bits(h) == 0);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(2, 2) = -5.0;
  CHECK(default_initial_bits(ReducedHamiltonian(2, m)) == 2);
}

TEST_CASE("zero parameters reproduce the starting diagonal energy") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{2, 1, Entangler::chain, default_initial_bits(h)};
  const Circuit circuit =
      ansatz_circuit(spec, std::vector<double>(parameter_count(spec), 0.0));
  const double energy = expectation_value(h, run(circuit));
  CHECK(energy == doctest::Approx(h.entry(0, 0)).epsilon(1e-12));
}

TEST_CASE("optimizer reaches the sector ground state") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{2, 1, Entangler::chain, default_initial_bits(h)};
  const VqeResult result = optimize(h, spec);

  const double ground = eigensolve(h).eigenvalues.front();
  CHECK(result.evaluations <= 500);
  CHECK(result.energy == doctest::Approx(ground).epsilon(1e-7));
  CHECK(result.parameters.size() == parameter_count(spec));

  // The reported parameters really achieve the reported energy.
  const double replay =
      expectation_value(h, run(ansatz_circuit(spec, result.parameters)));
  CHECK(replay == doctest::Approx(result.energy).epsilon(1e-12));
}

TEST_CASE("trace is monotone and ends at the result energy") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{2, 1, Entangler::chain, default_initial_bits(h)};
  const VqeResult result = optimize(h, spec);
  REQUIRE(!result.trace.empty());
  CHECK(std::is_sorted(result.trace.rbegin(), result.trace.rend()));
  CHECK(result.trace.back() == doctest::Approx(result.energy).epsilon(1e-14));
}

TEST_CASE("identical options give identical runs") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{2, 2, Entangler::full, 0};
  const VqeResult a = optimize(h, spec);
  const VqeResult b = optimize(h, spec);
  CHECK(a.energy == b.energy);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.parameters == b.parameters);
  CHECK(a.trace == b.trace);
}

TEST_CASE("evaluation budget is respected") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{2, 1, Entangler::chain, 0};
  VqeOptions options;
  options.budget = 20;
  const VqeResult result = optimize(h, spec, options);
  CHECK(result.evaluations <= 20);
}

TEST_CASE("sampled optimization lands near the exact optimum") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{2, 1, Entangler::chain, default_initial_bits(h)};
  VqeOptions options;
  options.shots = 20000;
  options.seed = 11;
  const VqeResult result = optimize(h, spec, options);
  const double ground = eigensolve(h).eigenvalues.front();
  CHECK(std::abs(result.energy - ground) < 5e-2);

  const VqeResult again = optimize(h, spec, options);
  CHECK(result.energy == again.energy);
  CHECK(result.evaluations == again.evaluations);
}

TEST_CASE("ansatz register must match the operator") {
  const ReducedHamiltonian h = hydrogen_reduced();
  AnsatzSpec spec{3, 1, Entangler::chain, 0};
  CHECK_THROWS_AS(optimize(h, spec), NumericError);
}

TEST_CASE("entangler names round-trip") {
  CHECK(entangler_from_name("chain") == Entangler::chain);
  CHECK(entangler_from_name("full") == Entangler::full);
  CHECK(std::string(to_string(Entangler::chain)) == "chain");
  CHECK(std::string(to_string(Entangler::full)) == "full");
  CHECK_THROWS_AS(entangler_from_name("ladder"), ParseError);
}
