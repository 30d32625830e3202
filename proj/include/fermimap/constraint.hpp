#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fermimap/fermion.hpp"

namespace fermimap {

// Symmetry operators whose eigenspaces carve out the physical subspace.
// total_number / number_up / number_down count electrons (up = even orbital
// indices, down = odd); sz is half their difference; s_squared is the total
// spin operator S-S+ + Sz(Sz+1) with spatial orbital p on spin orbitals
// (2p, 2p+1).
enum class ConstraintKind {
  total_number,
  number_up,
  number_down,
  sz,
  s_squared,
};

const char* to_string(ConstraintKind kind);

// One constraint: the operator together with its admissible eigenvalues.
struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::total_number;
  std::vector<double> allowed;
};

// Orthonormal basis of a subspace of the 2^n-dimensional occupation space.
// Vectors are sparse over Fock indices and canonically ordered: each vector's
// key is its Fock-index sequence sorted by descending |amplitude| (ties broken
// by ascending index), vectors sort by ascending key, and each vector's first
// nonzero amplitude in Fock-index order is made positive. Pure bitstring bases
// therefore ascend by integer value.
struct SubspaceBasis {
  int n_orbitals = 0;
  std::vector<SparseVector> vectors;

  std::size_t dim() const { return vectors.size(); }
};

// The constraint observable as a fermionic operator (used by the generic
// eigensolver path and by verification oracles).
FermionOperator constraint_operator(ConstraintKind kind, int n_orbitals);

// Eigenvalue of a diagonal constraint on one basis state. Valid for every
// kind except s_squared.
double diagonal_eigenvalue(ConstraintKind kind, FockState state);

// The full occupation space as a bitstring basis.
SubspaceBasis full_space(int n_orbitals);

// Basis of the span of eigenvectors (restricted to `within`) whose eigenvalue
// lies within 1e-8 of any allowed value. Diagonal constraints on bitstring
// bases use an exact filter; everything else goes through a dense symmetric
// eigensolve of the restricted operator. Throws InfeasibleError when an
// allowed value lies outside the operator's spectrum.
SubspaceBasis null_space(const ConstraintSpec& spec, const SubspaceBasis& within);

// Intersection of all constraint eigenspaces, diagonal constraints first.
// Throws InfeasibleError when the intersection is empty.
SubspaceBasis intersect_constraints(const std::vector<ConstraintSpec>& specs,
                                    int n_orbitals);

// Constraint-file grammar (one constraint per line, # comments):
//   <kind> allowed=<v1,v2,...>
//   neutral_electrons=<n>            -> total_number allowed=[n]
//   multiplicity=<2S+1> sz=<v>       -> number_up/number_down per-spin counts
// The multiplicity form needs a preceding total-number line to fix N.
std::vector<ConstraintSpec> parse_constraints(std::istream& in);
std::vector<ConstraintSpec> parse_constraints_file(const std::string& path);

}  // namespace fermimap
