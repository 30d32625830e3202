#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fermimap/constraint.hpp"
#include "fermimap/fermion.hpp"

namespace fermimap {

// Assignment of subspace basis vector m to compressed register state |m> on
// the minimal number of qubits that holds dim states.
struct SubspaceMap {
  SubspaceBasis basis;
  int n_qubits = 0;

  std::size_t dim() const { return basis.dim(); }
};

SubspaceMap build_map(const SubspaceBasis& basis);

// Number of qubits needed for `dim` register states (at least one qubit).
int qubits_for(std::size_t dim);

// Real symmetric matrix h(m, m') = <m| H |m'> on the compressed register.
// Entries with |h| below 1e-10 are stored as exact zeros.
class ReducedHamiltonian {
 public:
  ReducedHamiltonian() = default;
  ReducedHamiltonian(int n_qubits, Eigen::MatrixXd h);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(h_.rows()); }
  double entry(int m, int mp) const { return h_(m, mp); }
  const Eigen::MatrixXd& matrix() const { return h_; }

  struct Entry {
    int m = 0;
    int mp = 0;  // m <= mp
    double value = 0.0;
  };
  // Nonzero upper-triangle entries in (m, mp) order.
  std::vector<Entry> entries() const;

 private:
  int n_qubits_ = 1;
  Eigen::MatrixXd h_;
};

// h(m, m') = <m| op |m'> over the map's basis vectors. Throws NumericError
// when the restriction is not symmetric to 1e-8.
ReducedHamiltonian reduce_hamiltonian(const FermionOperator& op,
                                      const SubspaceMap& map);

// Compress a full-space state (length 2^n_orbitals) onto the register
// (length 2^n_qubits). Throws NumericError when the state has projection
// residual above 1e-8 outside the subspace.
std::vector<std::complex<double>> map_state(
    const SubspaceMap& map, const std::vector<std::complex<double>>& state);

// Expand a register state (length 2^n_qubits) back to the full space. Throws
// NumericError when the register state has weight on unassigned indices.
std::vector<std::complex<double>> unmap_state(
    const SubspaceMap& map, const std::vector<std::complex<double>>& state);

// Max-norm residuals of the map's defining identities: the basis Gram matrix
// against the identity, the induced projector against its square, and the
// projector against its transpose.
struct ProjectorCheck {
  double gram_residual = 0.0;
  double idempotent_residual = 0.0;
  double symmetry_residual = 0.0;

  double max_residual() const;
};
ProjectorCheck projector_check(const SubspaceMap& map);

// Dense 2^n x 2^n projector onto the mapped subspace (n_orbitals <= 12).
Eigen::MatrixXd dense_projector(const SubspaceMap& map);

// Reduced-Hamiltonian file format:
//   qubits <Q> dim <M>
//   <m> <m'> <value>     (m <= m', absent entries are zero)
void write_reduced(std::ostream& out, const ReducedHamiltonian& h);
void write_reduced_file(const std::string& path, const ReducedHamiltonian& h);
ReducedHamiltonian read_reduced(std::istream& in);
ReducedHamiltonian read_reduced_file(const std::string& path);

// Subspace-basis file format:
//   # orbitals <n>
//   <m> : <amp> <fock> [; <amp> <fock> ...]
void write_subspace(std::ostream& out, const SubspaceBasis& basis);
void write_subspace_file(const std::string& path, const SubspaceBasis& basis);
SubspaceBasis read_subspace(std::istream& in);
SubspaceBasis read_subspace_file(const std::string& path);

}  // namespace fermimap
