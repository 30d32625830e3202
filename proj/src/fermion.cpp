#include "fermimap/fermion.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fermimap {

namespace {

constexpr double kHermTol = 1e-9;
constexpr int kDenseHermitianMaxOrbitals = 12;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Exact sparse check of <b|H|k> == <k|H|b> over every reachable entry.
void check_hermitian_dense(const FermionOperator& op) {
  const int n = op.n_orbitals();
  const FockState dim = FockState{1} << n;
  std::unordered_map<std::uint64_t, double> entries;
  for (FockState ket = 0; ket < dim; ++ket) {
    for (const auto& term : op.terms()) {
      if (auto res = apply_term(term, ket)) {
        entries[(res->first << n) | ket] += term.coefficient * res->second;
      }
    }
  }
  for (const auto& [key, value] : entries) {
    const FockState bra = key >> n;
    const FockState ket = key & (dim - 1);
    double transpose = 0.0;
    if (auto it = entries.find((ket << n) | bra); it != entries.end()) {
      transpose = it->second;
    }
    if (std::abs(value - transpose) > kHermTol) {
      throw NumericError("non-Hermitian operator: |<" + std::to_string(bra) +
                         "|H|" + std::to_string(ket) + "> - <" +
                         std::to_string(ket) + "|H|" + std::to_string(bra) +
                         ">| = " + std::to_string(std::abs(value - transpose)));
    }
  }
}

// Seeded spot check for operators too large to enumerate: sample kets, apply
// the operator, and compare each produced entry against its transpose.
void check_hermitian_sampled(const FermionOperator& op) {
  const int n = op.n_orbitals();
  const FockState mask =
      n >= 64 ? ~FockState{0} : ((FockState{1} << n) - 1);
  std::mt19937_64 gen(0xfe51u);
  for (int trial = 0; trial < 64; ++trial) {
    const FockState ket = gen() & mask;
    std::unordered_map<FockState, double> row;
    for (const auto& term : op.terms()) {
      if (auto res = apply_term(term, ket)) {
        row[res->first] += term.coefficient * res->second;
      }
    }
    for (const auto& [bra, value] : row) {
      const double transpose = matrix_element(op, ket, bra);
      if (std::abs(value - transpose) > kHermTol) {
        throw NumericError("non-Hermitian operator: sampled |<" +
                           std::to_string(bra) + "|H|" + std::to_string(ket) +
                           "> - transpose| = " +
                           std::to_string(std::abs(value - transpose)));
      }
    }
  }
}

}  // namespace

std::string fock_to_string(FockState state, int n_orbitals) {
  std::string out(static_cast<std::size_t>(n_orbitals), '0');
  for (int i = 0; i < n_orbitals; ++i) {
    if (state >> i & 1) out[n_orbitals - 1 - i] = '1';
  }
  return out;
}

FermionOperator::FermionOperator(std::vector<FermionTerm> terms, int n_orbitals)
    : terms_(std::move(terms)), n_orbitals_(n_orbitals) {
  if (n_orbitals_ < 1 || n_orbitals_ > 63) {
    throw ParseError("orbital count out of range: " + std::to_string(n_orbitals_));
  }
  for (const auto& term : terms_) {
    for (const auto& op : term.ops) {
      if (op.orbital < 0 || op.orbital >= n_orbitals_) {
        throw ParseError("orbital index " + std::to_string(op.orbital) +
                         " outside operator of " + std::to_string(n_orbitals_) +
                         " orbitals");
      }
    }
  }
  if (n_orbitals_ <= kDenseHermitianMaxOrbitals) {
    check_hermitian_dense(*this);
  } else {
    check_hermitian_sampled(*this);
  }
}

std::optional<std::pair<FockState, int>> apply_term(const FermionTerm& term,
                                                    FockState state) {
  int sign = 1;
  for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) {
    const FockState mask = FockState{1} << it->orbital;
    const bool occupied = state & mask;
    if (it->creation == occupied) return std::nullopt;
    if (std::popcount(state & (mask - 1)) & 1) sign = -sign;
    state ^= mask;
  }
  return std::pair{state, sign};
}

double matrix_element(const FermionOperator& op, FockState bra, FockState ket) {
  double value = 0.0;
  for (const auto& term : op.terms()) {
    if (auto res = apply_term(term, ket); res && res->first == bra) {
      value += term.coefficient * res->second;
    }
  }
  return value;
}

SparseVector apply_operator(const FermionOperator& op, const SparseVector& v) {
  std::map<FockState, double> acc;
  for (const auto& [state, amplitude] : v) {
    for (const auto& term : op.terms()) {
      if (auto res = apply_term(term, state)) {
        acc[res->first] += term.coefficient * res->second * amplitude;
      }
    }
  }
  SparseVector out;
  out.reserve(acc.size());
  for (const auto& [state, amplitude] : acc) {
    if (std::abs(amplitude) >= 1e-14) out.emplace_back(state, amplitude);
  }
  return out;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double acc = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      acc += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

FermionOperator parse_fermion_operator(std::istream& in) {
  std::vector<FermionTerm> terms;
  int max_orbital = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const char* text = line.c_str();
    char* after_coeff = nullptr;
    const double coeff = std::strtod(text, &after_coeff);
    if (after_coeff == text) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected a coefficient, got '" + line + "'");
    }
    std::string rest = trim(std::string(after_coeff));
    if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected a bracketed operator list after the "
                       "coefficient");
    }
    rest = rest.substr(1, rest.size() - 2);
    if (rest.find('[') != std::string::npos ||
        rest.find(']') != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": nested brackets in operator list");
    }

    FermionTerm term;
    term.coefficient = coeff;
    std::istringstream tokens(rest);
    std::string tok;
    while (tokens >> tok) {
      bool creation = false;
      if (tok.back() == '^') {
        creation = true;
        tok.pop_back();
      }
      if (tok.empty() ||
          tok.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": bad ladder operator token '" + tok +
                         (creation ? "^" : "") +
                         "' (expected a non-negative orbital index, optionally "
                         "followed by ^)");
      }
      const long idx = std::strtol(tok.c_str(), nullptr, 10);
      if (idx > 62) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": orbital index " + tok + " too large");
      }
      term.ops.push_back({static_cast<int>(idx), creation});
      max_orbital = std::max(max_orbital, static_cast<int>(idx));
    }
    terms.push_back(std::move(term));
  }
  if (terms.empty()) {
    throw ParseError("no terms: operator file is empty");
  }
  return FermionOperator(std::move(terms), std::max(1, max_orbital + 1));
}

FermionOperator parse_fermion_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open operator file: " + path);
  try {
    return parse_fermion_operator(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  } catch (const NumericError& err) {
    throw NumericError(path + ": " + err.what());
  }
}

}  // namespace fermimap
