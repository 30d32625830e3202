#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fermimap/constraint.hpp"
#include "fermimap/errors.hpp"
#include "fermimap/fermion.hpp"

using namespace fermimap;

namespace {

const std::string kConsFixture =
    std::string(FERMIMAP_FIXTURE_DIR) + "/h2_sector_n1n1.cons";

bool vectors_close(const SparseVector& a, const SparseVector& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first) return false;
    if (std::abs(a[i].second - b[i].second) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("diagonal eigenvalues count alpha and beta occupations") {
  // Bits 0 and 3: one alpha electron (orbital 0), one beta (orbital 3).
  CHECK(diagonal_eigenvalue(ConstraintKind::total_number, 0b1001) == 2.0);
  CHECK(diagonal_eigenvalue(ConstraintKind::number_up, 0b1001) == 1.0);
  CHECK(diagonal_eigenvalue(ConstraintKind::number_down, 0b1001) == 1.0);
  CHECK(diagonal_eigenvalue(ConstraintKind::sz, 0b1001) == 0.0);
  // Both alpha electrons: spin projection one.
  CHECK(diagonal_eigenvalue(ConstraintKind::sz, 0b0101) == 1.0);
  CHECK_THROWS_AS(diagonal_eigenvalue(ConstraintKind::s_squared, 0b1001),
                  NumericError);
}

TEST_CASE("constraint operators reproduce their diagonal eigenvalues") {
  for (const auto kind :
       {ConstraintKind::total_number, ConstraintKind::number_up,
        ConstraintKind::number_down, ConstraintKind::sz}) {
    const FermionOperator op = constraint_operator(kind, 4);
    for (FockState f = 0; f < 16; ++f) {
      CHECK(matrix_element(op, f, f) ==
            doctest::Approx(diagonal_eigenvalue(kind, f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("total-spin operator mixes the open-shell pair") {
  const FermionOperator s2 = constraint_operator(ConstraintKind::s_squared, 4);

  // Paired doubly-occupied states are singlets.
  CHECK(matrix_element(s2, 0b0011, 0b0011) == doctest::Approx(0.0));
  CHECK(matrix_element(s2, 0b1111, 0b1111) == doctest::Approx(0.0));

  // The two open-shell states mix with unit amplitude.
  CHECK(matrix_element(s2, 0b1001, 0b1001) == doctest::Approx(1.0));
  CHECK(matrix_element(s2, 0b0110, 0b1001) == doctest::Approx(1.0));

  // Aligned spins form a triplet with eigenvalue S(S+1) = 2.
  CHECK(matrix_element(s2, 0b0101, 0b0101) == doctest::Approx(2.0));
  CHECK(matrix_element(s2, 0b1010, 0b1010) == doctest::Approx(2.0));

  // Singlet and triplet combinations are eigenvectors.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const SparseVector singlet{{0b0110, inv_sqrt2}, {0b1001, -inv_sqrt2}};
  const SparseVector triplet{{0b0110, inv_sqrt2}, {0b1001, inv_sqrt2}};
  CHECK(sparse_dot(singlet, apply_operator(s2, singlet)) ==
        doctest::Approx(0.0));
  CHECK(sparse_dot(triplet, apply_operator(s2, triplet)) ==
        doctest::Approx(2.0));

  // One electron carries spin one-half: S(S+1) = 3/4.
  CHECK(matrix_element(s2, 0b0001, 0b0001) == doctest::Approx(0.75));
}

TEST_CASE("full space enumerates every occupation state in order") {
  const SubspaceBasis basis = full_space(2);
  REQUIRE(basis.dim() == 4);
  for (FockState f = 0; f < 4; ++f) {
    REQUIRE(basis.vectors[f].size() == 1);
    CHECK(basis.vectors[f][0].first == f);
    CHECK(basis.vectors[f][0].second == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(full_space(0), NumericError);
  CHECK_THROWS_AS(full_space(40), NumericError);
}

TEST_CASE("diagonal constraints filter basis states exactly") {
  const SubspaceBasis full = full_space(4);
  const SubspaceBasis two_electron =
      null_space({ConstraintKind::total_number, {2.0}}, full);
  REQUIRE(two_electron.dim() == 6);

  const SubspaceBasis sector = null_space(
      {ConstraintKind::number_down, {1.0}},
      null_space({ConstraintKind::number_up, {1.0}}, full));
  REQUIRE(sector.dim() == 4);
  CHECK(sector.vectors[0][0].first == 0b0011);
  CHECK(sector.vectors[1][0].first == 0b0110);
  CHECK(sector.vectors[2][0].first == 0b1001);
  CHECK(sector.vectors[3][0].first == 0b1100);
}

TEST_CASE("allowed values may list several eigenvalues") {
  const SubspaceBasis basis =
      null_space({ConstraintKind::total_number, {0.0, 4.0}}, full_space(4));
  REQUIRE(basis.dim() == 2);
  CHECK(basis.vectors[0][0].first == 0b0000);
  CHECK(basis.vectors[1][0].first == 0b1111);
}

TEST_CASE("singlet intersection yields the canonical three-state basis") {
  const std::vector<ConstraintSpec> specs{
      {ConstraintKind::total_number, {2.0}},
      {ConstraintKind::s_squared, {0.0}},
  };
  const SubspaceBasis basis = intersect_constraints(specs, 4);
  REQUIRE(basis.dim() == 3);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(vectors_close(basis.vectors[0], {{0b0011, 1.0}}, 1e-12));
  CHECK(vectors_close(basis.vectors[1],
                      {{0b0110, inv_sqrt2}, {0b1001, -inv_sqrt2}}, 1e-12));
  CHECK(vectors_close(basis.vectors[2], {{0b1100, 1.0}}, 1e-12));
}

TEST_CASE("triplet sector holds the three aligned combinations") {
  const std::vector<ConstraintSpec> specs{
      {ConstraintKind::total_number, {2.0}},
      {ConstraintKind::s_squared, {2.0}},
  };
  const SubspaceBasis basis = intersect_constraints(specs, 4);
  REQUIRE(basis.dim() == 3);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(vectors_close(basis.vectors[0], {{0b0101, 1.0}}, 1e-12));
  CHECK(vectors_close(basis.vectors[1],
                      {{0b0110, inv_sqrt2}, {0b1001, inv_sqrt2}}, 1e-12));
  CHECK(vectors_close(basis.vectors[2], {{0b1010, 1.0}}, 1e-12));
}

TEST_CASE("constraint order does not change the subspace") {
  const std::vector<ConstraintSpec> forward{
      {ConstraintKind::total_number, {2.0}},
      {ConstraintKind::s_squared, {0.0}},
  };
  const std::vector<ConstraintSpec> backward{
      {ConstraintKind::s_squared, {0.0}},
      {ConstraintKind::total_number, {2.0}},
  };
  const SubspaceBasis a = intersect_constraints(forward, 4);
  const SubspaceBasis b = intersect_constraints(backward, 4);
  REQUIRE(a.dim() == b.dim());
  for (std::size_t m = 0; m < a.dim(); ++m) {
    CHECK(vectors_close(a.vectors[m], b.vectors[m], 1e-10));
  }
}

TEST_CASE("singlet count over the full four-orbital space") {
  // Vacuum, two doubly occupied states, the open-shell singlet, and the
  // fully filled state.
  const SubspaceBasis basis =
      null_space({ConstraintKind::s_squared, {0.0}}, full_space(4));
  CHECK(basis.dim() == 5);
}

TEST_CASE("half-integer spin sector via the generic eigensolve path") {
  const SubspaceBasis basis =
      null_space({ConstraintKind::s_squared, {0.75}}, full_space(2));
  REQUIRE(basis.dim() == 2);
  CHECK(vectors_close(basis.vectors[0], {{0b01, 1.0}}, 1e-12));
  CHECK(vectors_close(basis.vectors[1], {{0b10, 1.0}}, 1e-12));
}

TEST_CASE("diagonal constraints filter non-bitstring bases too") {
  const SubspaceBasis spin_free =
      null_space({ConstraintKind::s_squared, {0.0}}, full_space(4));
  const SubspaceBasis sector =
      null_space({ConstraintKind::total_number, {2.0}}, spin_free);
  CHECK(sector.dim() == 3);
}

TEST_CASE("empty intersections and impossible eigenvalues are rejected") {
  // Contradictory per-spin counts against the total.
  CHECK_THROWS_AS(
      intersect_constraints({{ConstraintKind::total_number, {2.0}},
                             {ConstraintKind::number_up, {2.0}},
                             {ConstraintKind::number_down, {2.0}}},
                            4),
      InfeasibleError);
  // Out-of-spectrum allowed values.
  CHECK_THROWS_AS(
      null_space({ConstraintKind::number_up, {3.0}}, full_space(4)),
      InfeasibleError);
  CHECK_THROWS_AS(
      null_space({ConstraintKind::s_squared, {1.5}}, full_space(4)),
      InfeasibleError);
  CHECK_THROWS_AS(
      null_space({ConstraintKind::total_number, {-1.0}}, full_space(4)),
      InfeasibleError);
  // Empty allowed list.
  CHECK_THROWS_AS(null_space({ConstraintKind::sz, {}}, full_space(4)),
                  InfeasibleError);
}

TEST_CASE("sector fixture parses to per-spin occupation constraints") {
  const auto specs = parse_constraints_file(kConsFixture);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].kind == ConstraintKind::number_up);
  CHECK(specs[0].allowed == std::vector<double>{1.0});
  CHECK(specs[1].kind == ConstraintKind::number_down);
  CHECK(specs[1].allowed == std::vector<double>{1.0});
}

TEST_CASE("electron-count and multiplicity shorthand expand to base constraints") {
  std::istringstream in(
      "# hydrogen molecule, singlet\n"
      "neutral_electrons=2\n"
      "multiplicity=1 sz=0\n");
  const auto specs = parse_constraints(in);
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].kind == ConstraintKind::total_number);
  CHECK(specs[0].allowed == std::vector<double>{2.0});
  CHECK(specs[1].kind == ConstraintKind::number_up);
  CHECK(specs[1].allowed == std::vector<double>{1.0});
  CHECK(specs[2].kind == ConstraintKind::number_down);
  CHECK(specs[2].allowed == std::vector<double>{1.0});
  CHECK(specs[3].kind == ConstraintKind::s_squared);
  CHECK(specs[3].allowed == std::vector<double>{0.0});
}

TEST_CASE("triplet shorthand splits electrons unevenly") {
  std::istringstream in(
      "total_number allowed=2\n"
      "multiplicity=3 sz=1\n");
  const auto specs = parse_constraints(in);
  REQUIRE(specs.size() == 4);
  CHECK(specs[1].allowed == std::vector<double>{2.0});  // alpha count
  CHECK(specs[2].allowed == std::vector<double>{0.0});  // beta count
  CHECK(specs[3].allowed == std::vector<double>{2.0});  // S(S+1)
}

TEST_CASE("constraint parser reports malformed lines") {
  const auto expect_parse_error = [](const std::string& text,
                                     const std::string& fragment) {
    std::istringstream in(text);
    try {
      parse_constraints(in);
      FAIL_CHECK("expected ParseError for: " << text);
    } catch (const ParseError& err) {
      CHECK(std::string(err.what()).find(fragment) != std::string::npos);
    }
  };
  expect_parse_error("frobnicate allowed=1\n", "unknown constraint kind");
  expect_parse_error("number_up\n", "line 1");
  expect_parse_error("number_up allowed=\n", "line 1");
  expect_parse_error("number_up allowed=a,b\n", "allowed value");
  expect_parse_error("multiplicity=1 sz=0\n", "preceding total");
  expect_parse_error("neutral_electrons=2\nmultiplicity=4 sz=0\n",
                     "needs more than");
  expect_parse_error("neutral_electrons=3\nmultiplicity=2 sz=0\n",
                     "non-integer");
  expect_parse_error("neutral_electrons=2\nmultiplicity=1 sz=1\n",
                     "exceeds the spin");
  expect_parse_error("neutral_electrons=-2\n", "non-negative");
  expect_parse_error("", "no constraints");
}
