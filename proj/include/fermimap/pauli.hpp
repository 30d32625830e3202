#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fermimap/fermion.hpp"

namespace fermimap {

// Real-weighted Pauli string. Factors are (qubit, axis) with axis one of
// 'X', 'Y', 'Z', sorted by qubit; the identity string has no factors.
struct PauliString {
  std::vector<std::pair<int, char>> factors;
  double coefficient = 0.0;

  bool is_identity() const { return factors.empty(); }
  std::string to_string() const;  // e.g. "X0 X1 Y2 Y3", identity prints "I"
};

// Jordan-Wigner transform: a^dag_i -> (X_i - iY_i)/2 times Z on qubits below i,
// a_i -> (X_i + iY_i)/2 times the same Z tail. Strings with |coefficient|
// below 1e-12 are dropped; a residual imaginary part at or above 1e-10 (the
// input was not Hermitian enough) throws NumericError. Output is sorted by
// factor list, identity first.
std::vector<PauliString> jordan_wigner(const FermionOperator& op);

}  // namespace fermimap
