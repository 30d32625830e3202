#include "fermimap/mapping.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "fermimap/errors.hpp"

namespace fermimap {
namespace {

constexpr double kPruneTol = 1e-10;     // reduced-matrix entry pruning
constexpr double kSymTol = 1e-8;        // restriction symmetry requirement
constexpr double kResidualTol = 1e-8;   // map_state projection residual
constexpr double kWeightTol = 1e-12;    // unmap_state stray-amplitude limit
constexpr int kMaxQubits = 24;
constexpr int kDenseMaxOrbitals = 12;

void check_register_size(std::size_t dim, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw NumericError("register size must be 1 to " +
                       std::to_string(kMaxQubits) + " qubits");
  }
  if (dim < 1 || dim > (std::size_t{1} << n_qubits)) {
    throw NumericError("register of " + std::to_string(n_qubits) +
                       " qubits cannot hold " + std::to_string(dim) +
                       " states");
  }
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int qubits_for(std::size_t dim) {
  if (dim < 1) throw NumericError("cannot map an empty subspace");
  int q = 0;
  while ((std::size_t{1} << q) < dim) ++q;
  return std::max(1, q);
}

SubspaceMap build_map(const SubspaceBasis& basis) {
  SubspaceMap map;
  map.basis = basis;
  map.n_qubits = qubits_for(basis.dim());
  check_register_size(basis.dim(), map.n_qubits);
  return map;
}

ReducedHamiltonian::ReducedHamiltonian(int n_qubits, Eigen::MatrixXd h)
    : n_qubits_(n_qubits), h_(std::move(h)) {
  if (h_.rows() != h_.cols()) {
    throw NumericError("reduced matrix must be square");
  }
  check_register_size(static_cast<std::size_t>(h_.rows()), n_qubits_);
  const double asym = (h_ - h_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol) {
    std::ostringstream msg;
    msg << "reduced matrix is not symmetric (residual " << asym << ")";
    throw NumericError(msg.str());
  }
  h_ = 0.5 * (h_ + h_.transpose()).eval();
  for (Eigen::Index j = 0; j < h_.cols(); ++j) {
    for (Eigen::Index i = 0; i < h_.rows(); ++i) {
      if (std::abs(h_(i, j)) < kPruneTol) h_(i, j) = 0.0;
    }
  }
}

std::vector<ReducedHamiltonian::Entry> ReducedHamiltonian::entries() const {
  std::vector<Entry> out;
  for (Eigen::Index m = 0; m < h_.rows(); ++m) {
    for (Eigen::Index mp = m; mp < h_.cols(); ++mp) {
      if (h_(m, mp) != 0.0) {
        out.push_back({static_cast<int>(m), static_cast<int>(mp), h_(m, mp)});
      }
    }
  }
  return out;
}

ReducedHamiltonian reduce_hamiltonian(const FermionOperator& op,
                                      const SubspaceMap& map) {
  const auto k = static_cast<Eigen::Index>(map.dim());
  Eigen::MatrixXd h(k, k);
  std::vector<SparseVector> images;
  images.reserve(map.dim());
  for (const auto& v : map.basis.vectors) {
    images.push_back(apply_operator(op, v));
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      h(i, j) = sparse_dot(map.basis.vectors[i], images[j]);
    }
  }
  return ReducedHamiltonian(map.n_qubits, std::move(h));
}

std::vector<std::complex<double>> map_state(
    const SubspaceMap& map, const std::vector<std::complex<double>>& state) {
  const std::size_t full_dim = std::size_t{1} << map.basis.n_orbitals;
  if (state.size() != full_dim) {
    throw NumericError("full-space state must have length 2^n_orbitals");
  }
  std::vector<std::complex<double>> out(std::size_t{1} << map.n_qubits,
                                        {0.0, 0.0});
  double norm2 = 0.0;
  for (const auto& amp : state) norm2 += std::norm(amp);
  double captured = 0.0;
  for (std::size_t m = 0; m < map.dim(); ++m) {
    std::complex<double> acc = 0.0;
    for (const auto& [fock, amp] : map.basis.vectors[m]) {
      acc += amp * state[fock];
    }
    out[m] = acc;
    captured += std::norm(acc);
  }
  // Orthonormal basis: the residual norm of the un-projected remainder is
  // exactly sqrt(|state|^2 - |projection|^2).
  const double residual = std::sqrt(std::max(0.0, norm2 - captured));
  if (residual > kResidualTol) {
    std::ostringstream msg;
    msg << "state lies outside the constrained subspace (projection residual "
        << residual << ")";
    throw NumericError(msg.str());
  }
  return out;
}

std::vector<std::complex<double>> unmap_state(
    const SubspaceMap& map, const std::vector<std::complex<double>>& state) {
  const std::size_t reg_dim = std::size_t{1} << map.n_qubits;
  if (state.size() != reg_dim) {
    throw NumericError("register state must have length 2^n_qubits");
  }
  for (std::size_t m = map.dim(); m < reg_dim; ++m) {
    if (std::abs(state[m]) > kWeightTol) {
      std::ostringstream msg;
      msg << "register state has weight " << std::abs(state[m])
          << " on unassigned index " << m;
      throw NumericError(msg.str());
    }
  }
  std::vector<std::complex<double>> out(
      std::size_t{1} << map.basis.n_orbitals, {0.0, 0.0});
  for (std::size_t m = 0; m < map.dim(); ++m) {
    if (state[m] == std::complex<double>{0.0, 0.0}) continue;
    for (const auto& [fock, amp] : map.basis.vectors[m]) {
      out[fock] += state[m] * amp;
    }
  }
  return out;
}

double ProjectorCheck::max_residual() const {
  return std::max({gram_residual, idempotent_residual, symmetry_residual});
}

Eigen::MatrixXd dense_projector(const SubspaceMap& map) {
  if (map.basis.n_orbitals > kDenseMaxOrbitals) {
    throw NumericError("dense projector supports at most " +
                       std::to_string(kDenseMaxOrbitals) + " orbitals");
  }
  const auto dim =
      static_cast<Eigen::Index>(std::size_t{1} << map.basis.n_orbitals);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& v : map.basis.vectors) {
    for (const auto& [fi, ai] : v) {
      for (const auto& [fj, aj] : v) {
        p(static_cast<Eigen::Index>(fi), static_cast<Eigen::Index>(fj)) +=
            ai * aj;
      }
    }
  }
  return p;
}

ProjectorCheck projector_check(const SubspaceMap& map) {
  ProjectorCheck check;
  const auto k = static_cast<Eigen::Index>(map.dim());
  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      gram(i, j) = sparse_dot(map.basis.vectors[i], map.basis.vectors[j]);
    }
  }
  check.gram_residual =
      (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd p = dense_projector(map);
  check.idempotent_residual = (p * p - p).cwiseAbs().maxCoeff();
  check.symmetry_residual = (p - p.transpose()).cwiseAbs().maxCoeff();
  return check;
}

void write_reduced(std::ostream& out, const ReducedHamiltonian& h) {
  out << "qubits " << h.n_qubits() << " dim " << h.dim() << "\n";
  for (const auto& entry : h.entries()) {
    out << entry.m << ' ' << entry.mp << ' ' << format_g17(entry.value)
        << "\n";
  }
}

void write_reduced_file(const std::string& path, const ReducedHamiltonian& h) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write reduced operator file: " + path);
  write_reduced(out, h);
}

ReducedHamiltonian read_reduced(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n_qubits = -1;
  long dim = -1;
  Eigen::MatrixXd h;
  std::set<std::pair<long, long>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    std::string first;
    if (!(words >> first)) continue;
    if (n_qubits < 0) {
      std::string dim_key;
      if (first != "qubits" || !(words >> n_qubits >> dim_key >> dim) ||
          dim_key != "dim") {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected header 'qubits <Q> dim <M>'");
      }
      std::string extra;
      if (words >> extra) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unexpected token '" + extra + "' after header");
      }
      if (n_qubits < 1 || n_qubits > kMaxQubits || dim < 1 ||
          dim > (long{1} << n_qubits)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": header dimensions out of range");
      }
      h = Eigen::MatrixXd::Zero(dim, dim);
      continue;
    }
    long m = -1;
    long mp = -1;
    double value = 0.0;
    std::istringstream entry(line);
    std::string extra;
    if (!(entry >> m >> mp >> value) || (entry >> extra)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected '<m> <m'> <value>'");
    }
    if (m < 0 || mp < m || mp >= dim) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": entry indices must satisfy 0 <= m <= m' < dim");
    }
    if (!seen.insert({m, mp}).second) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": duplicate entry for (" + std::to_string(m) + ", " +
                       std::to_string(mp) + ")");
    }
    h(m, mp) = value;
    h(mp, m) = value;
  }
  if (n_qubits < 0) {
    throw ParseError("reduced operator file has no header");
  }
  return ReducedHamiltonian(n_qubits, std::move(h));
}

ReducedHamiltonian read_reduced_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open reduced operator file: " + path);
  try {
    return read_reduced(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

void write_subspace(std::ostream& out, const SubspaceBasis& basis) {
  out << "# orbitals " << basis.n_orbitals << "\n";
  for (std::size_t m = 0; m < basis.vectors.size(); ++m) {
    out << m << " :";
    bool first = true;
    for (const auto& [fock, amp] : basis.vectors[m]) {
      if (!first) out << " ;";
      out << ' ' << format_g17(amp) << ' ' << fock;
      first = false;
    }
    out << "\n";
  }
}

void write_subspace_file(const std::string& path, const SubspaceBasis& basis) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write subspace file: " + path);
  write_subspace(out, basis);
}

SubspaceBasis read_subspace(std::istream& in) {
  SubspaceBasis basis;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!have_header) {
      std::istringstream header(line);
      std::string hash;
      std::string key;
      if (!(header >> hash)) continue;  // leading blank lines
      if (!(header >> key >> basis.n_orbitals) || hash != "#" ||
          key != "orbitals" || basis.n_orbitals < 1 ||
          basis.n_orbitals > kMaxQubits) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected header '# orbitals <n>'");
      }
      have_header = true;
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    long index = -1;
    std::string colon;
    if (!(words >> index)) continue;
    if (!(words >> colon) || colon != ":" ||
        index != static_cast<long>(basis.vectors.size())) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected '<m> : <amp> <fock> [; ...]' with "
                       "consecutive m starting at 0");
    }
    SparseVector v;
    while (true) {
      double amp = 0.0;
      unsigned long long fock = 0;
      if (!(words >> amp >> fock)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected '<amp> <fock>' component");
      }
      if (fock >> basis.n_orbitals) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": occupation index " + std::to_string(fock) +
                         " exceeds the orbital count");
      }
      v.emplace_back(static_cast<FockState>(fock), amp);
      std::string sep;
      if (!(words >> sep)) break;
      if (sep != ";") {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected ';' between components");
      }
    }
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].first == v[i - 1].first) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": duplicate occupation index in one vector");
      }
    }
    basis.vectors.push_back(std::move(v));
  }
  if (!have_header) {
    throw ParseError("subspace file has no '# orbitals <n>' header");
  }
  if (basis.vectors.empty()) {
    throw ParseError("subspace file lists no basis vectors");
  }
  return basis;
}

SubspaceBasis read_subspace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open subspace file: " + path);
  try {
    return read_subspace(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

}  // namespace fermimap
