#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fermimap/errors.hpp"

namespace fermimap {

// Occupation-number basis state: bit i holds the occupation of spin orbital i.
// Printed kets put orbital 0 rightmost, so |0011> on four orbitals means
// orbitals 0 and 1 occupied (integer value 3).
using FockState = std::uint64_t;

std::string fock_to_string(FockState state, int n_orbitals);

// Single creation (a^dag_i) or annihilation (a_i) operator.
struct LadderOp {
  int orbital = 0;
  bool creation = false;
};

// coefficient * product of ladder operators, applied right to left.
struct FermionTerm {
  double coefficient = 0.0;
  std::vector<LadderOp> ops;
};

// Sparse vector over the occupation basis, sorted by Fock index.
using SparseVector = std::vector<std::pair<FockState, double>>;

// Real linear combination of ladder-operator products over n_orbitals spin
// orbitals. Hermiticity (max-norm of H - H^dag below 1e-9) is validated on
// construction.
class FermionOperator {
 public:
  FermionOperator() = default;
  FermionOperator(std::vector<FermionTerm> terms, int n_orbitals);

  const std::vector<FermionTerm>& terms() const { return terms_; }
  int n_orbitals() const { return n_orbitals_; }

 private:
  std::vector<FermionTerm> terms_;
  int n_orbitals_ = 0;
};

// Applies the term's ladder operators (right to left) to a basis state.
// Returns the resulting state and the fermionic sign, or nullopt when the
// product annihilates the state. The term's coefficient is not included.
std::optional<std::pair<FockState, int>> apply_term(const FermionTerm& term,
                                                    FockState state);

// <bra| op |ket> over occupation basis states.
double matrix_element(const FermionOperator& op, FockState bra, FockState ket);

// op |v> for a sparse real vector; result sorted by Fock index with duplicate
// indices merged.
SparseVector apply_operator(const FermionOperator& op, const SparseVector& v);

// <a|b> for index-sorted sparse vectors.
double sparse_dot(const SparseVector& a, const SparseVector& b);

// Parses the term-per-line format:
//   # comment (also allowed at end of line)
//   <coefficient> [<op> <op> ...]
// where <op> is `<index>^` (creation) or `<index>` (annihilation) and `[]` is
// the identity. Orbital count is 1 + the highest index seen. Throws ParseError
// with a line number on malformed input, and NumericError if the parsed
// operator is not Hermitian.
FermionOperator parse_fermion_operator(std::istream& in);
FermionOperator parse_fermion_operator_file(const std::string& path);

}  // namespace fermimap
