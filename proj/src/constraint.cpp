#include "fermimap/constraint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "fermimap/errors.hpp"

namespace fermimap {
namespace {

constexpr double kEigTol = 1e-8;   // eigenvalue-to-allowed matching
constexpr double kAmpTol = 1e-12;  // amplitude pruning in basis vectors
constexpr int kMaxOrbitals = 24;   // 2^24 basis states is the dense ceiling

bool is_diagonal(ConstraintKind kind) {
  return kind != ConstraintKind::s_squared;
}

bool near(double a, double b) { return std::abs(a - b) <= kEigTol; }

bool matches_allowed(double value, const std::vector<double>& allowed) {
  for (double a : allowed) {
    if (near(value, a)) return true;
  }
  return false;
}

// Rejects allowed values that no eigenvalue of the operator on n orbitals can
// ever match, independent of the subspace the constraint is applied within.
void validate_allowed(const ConstraintSpec& spec, int n_orbitals) {
  if (spec.allowed.empty()) {
    throw InfeasibleError(std::string("constraint ") + to_string(spec.kind) +
                          " has no allowed values");
  }
  const int n_up_max = (n_orbitals + 1) / 2;  // even orbital indices
  const int n_down_max = n_orbitals / 2;      // odd orbital indices
  for (double v : spec.allowed) {
    bool ok = false;
    switch (spec.kind) {
      case ConstraintKind::total_number:
        for (int k = 0; k <= n_orbitals && !ok; ++k) ok = near(v, k);
        break;
      case ConstraintKind::number_up:
        for (int k = 0; k <= n_up_max && !ok; ++k) ok = near(v, k);
        break;
      case ConstraintKind::number_down:
        for (int k = 0; k <= n_down_max && !ok; ++k) ok = near(v, k);
        break;
      case ConstraintKind::sz:
        for (int u = 0; u <= n_up_max && !ok; ++u)
          for (int d = 0; d <= n_down_max && !ok; ++d)
            ok = near(v, 0.5 * (u - d));
        break;
      case ConstraintKind::s_squared:
        // Eigenvalues are S(S+1) with S in {0, 1/2, 1, ...} bounded by half
        // the orbital count.
        for (int twos = 0; twos <= n_orbitals && !ok; ++twos) {
          const double s = 0.5 * twos;
          ok = near(v, s * (s + 1.0));
        }
        break;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "allowed value " << v << " lies outside the spectrum of "
          << to_string(spec.kind) << " on " << n_orbitals << " orbitals";
      throw InfeasibleError(msg.str());
    }
  }
}

bool is_bitstring_basis(const SubspaceBasis& basis) {
  for (const auto& v : basis.vectors) {
    if (v.size() != 1 || std::abs(v[0].second - 1.0) > kAmpTol) return false;
  }
  return true;
}

// Drops negligible amplitudes, renormalizes, and fixes the overall sign so
// the first surviving amplitude (lowest Fock index) is positive.
SparseVector canonical_vector(SparseVector v) {
  SparseVector out;
  out.reserve(v.size());
  double norm2 = 0.0;
  for (const auto& [state, amp] : v) {
    if (std::abs(amp) >= kAmpTol) {
      out.emplace_back(state, amp);
      norm2 += amp * amp;
    }
  }
  if (out.empty()) return out;
  double scale = 1.0 / std::sqrt(norm2);
  if (out.front().second < 0.0) scale = -scale;
  for (auto& [state, amp] : out) amp *= scale;
  return out;
}

// Sort key: Fock indices ordered by descending |amplitude|, ties by ascending
// index. Lexicographic comparison of keys orders the basis.
std::vector<FockState> vector_key(const SparseVector& v) {
  std::vector<std::pair<double, FockState>> ranked;
  ranked.reserve(v.size());
  for (const auto& [state, amp] : v) ranked.emplace_back(-std::abs(amp), state);
  std::sort(ranked.begin(), ranked.end());
  std::vector<FockState> key;
  key.reserve(ranked.size());
  for (const auto& [neg_amp, state] : ranked) key.push_back(state);
  return key;
}

void canonical_order(SubspaceBasis& basis) {
  std::vector<std::pair<std::vector<FockState>, SparseVector>> keyed;
  keyed.reserve(basis.vectors.size());
  for (auto& v : basis.vectors) {
    auto key = vector_key(v);
    keyed.emplace_back(std::move(key), std::move(v));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  basis.vectors.clear();
  for (auto& [key, v] : keyed) basis.vectors.push_back(std::move(v));
}

SubspaceBasis filter_bitstrings(const ConstraintSpec& spec,
                                const SubspaceBasis& within) {
  SubspaceBasis out;
  out.n_orbitals = within.n_orbitals;
  for (const auto& v : within.vectors) {
    if (matches_allowed(diagonal_eigenvalue(spec.kind, v[0].first),
                        spec.allowed)) {
      out.vectors.push_back(v);
    }
  }
  return out;
}

SubspaceBasis restricted_eigenspace(const ConstraintSpec& spec,
                                    const SubspaceBasis& within) {
  const auto k = static_cast<Eigen::Index>(within.dim());
  const FermionOperator op =
      constraint_operator(spec.kind, within.n_orbitals);

  std::vector<SparseVector> images;
  images.reserve(within.dim());
  for (const auto& v : within.vectors) images.push_back(apply_operator(op, v));

  Eigen::MatrixXd restricted(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) {
      restricted(i, j) = sparse_dot(within.vectors[i], images[j]);
    }
  }
  const double asym =
      (restricted - restricted.transpose()).cwiseAbs().maxCoeff();
  if (asym > kEigTol) {
    std::ostringstream msg;
    msg << to_string(spec.kind) << " restricted to the current subspace is "
        << "not symmetric (residual " << asym << ")";
    throw NumericError(msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (restricted + restricted.transpose()));
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolve failed for restricted constraint operator");
  }

  SubspaceBasis out;
  out.n_orbitals = within.n_orbitals;
  for (Eigen::Index c = 0; c < k; ++c) {
    if (!matches_allowed(solver.eigenvalues()(c), spec.allowed)) continue;
    // Combine the within-vectors with the eigenvector column; orthonormality
    // of the column set carries over to the combined vectors.
    std::map<FockState, double> acc;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double w = solver.eigenvectors()(j, c);
      if (std::abs(w) < kAmpTol) continue;
      for (const auto& [state, amp] : within.vectors[j]) {
        acc[state] += w * amp;
      }
    }
    SparseVector combined(acc.begin(), acc.end());
    auto canon = canonical_vector(std::move(combined));
    if (!canon.empty()) out.vectors.push_back(std::move(canon));
  }
  canonical_order(out);
  return out;
}

ConstraintKind kind_from_name(const std::string& name, int line_no) {
  if (name == "total_number") return ConstraintKind::total_number;
  if (name == "number_up") return ConstraintKind::number_up;
  if (name == "number_down") return ConstraintKind::number_down;
  if (name == "sz") return ConstraintKind::sz;
  if (name == "s_squared") return ConstraintKind::s_squared;
  throw ParseError("line " + std::to_string(line_no) +
                   ": unknown constraint kind '" + name + "'");
}

double parse_number(const std::string& text, int line_no,
                    const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                     " '" + text + "'");
  }
  return value;
}

std::vector<double> parse_allowed_list(const std::string& text, int line_no) {
  std::vector<double> values;
  std::string item;
  std::istringstream items(text);
  while (std::getline(items, item, ',')) {
    values.push_back(parse_number(item, line_no, "allowed value"));
  }
  if (values.empty()) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": empty allowed list");
  }
  return values;
}

bool near_nonneg_int(double v, long* out) {
  const double r = std::round(v);
  if (r < -0.5 || std::abs(v - r) > 1e-9) return false;
  *out = static_cast<long>(r);
  return *out >= 0;
}

}  // namespace

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::total_number: return "total_number";
    case ConstraintKind::number_up: return "number_up";
    case ConstraintKind::number_down: return "number_down";
    case ConstraintKind::sz: return "sz";
    case ConstraintKind::s_squared: return "s_squared";
  }
  return "unknown";
}

double diagonal_eigenvalue(ConstraintKind kind, FockState state) {
  constexpr std::uint64_t kEvenBits = 0x5555555555555555ull;
  const int up = std::popcount(state & kEvenBits);
  const int down = std::popcount(state & ~kEvenBits);
  switch (kind) {
    case ConstraintKind::total_number: return up + down;
    case ConstraintKind::number_up: return up;
    case ConstraintKind::number_down: return down;
    case ConstraintKind::sz: return 0.5 * (up - down);
    case ConstraintKind::s_squared: break;
  }
  throw NumericError("s_squared has no diagonal eigenvalue on a basis state");
}

FermionOperator constraint_operator(ConstraintKind kind, int n_orbitals) {
  if (n_orbitals < 1) throw NumericError("constraint needs >= 1 orbital");
  std::vector<FermionTerm> terms;
  const auto number_op = [](int i) {
    return std::vector<LadderOp>{{i, true}, {i, false}};
  };
  const auto sz_weight = [](int i) { return (i % 2 == 0) ? 0.5 : -0.5; };

  switch (kind) {
    case ConstraintKind::total_number:
      for (int i = 0; i < n_orbitals; ++i) terms.push_back({1.0, number_op(i)});
      break;
    case ConstraintKind::number_up:
      for (int i = 0; i < n_orbitals; i += 2)
        terms.push_back({1.0, number_op(i)});
      break;
    case ConstraintKind::number_down:
      for (int i = 1; i < n_orbitals; i += 2)
        terms.push_back({1.0, number_op(i)});
      break;
    case ConstraintKind::sz:
      for (int i = 0; i < n_orbitals; ++i)
        terms.push_back({sz_weight(i), number_op(i)});
      break;
    case ConstraintKind::s_squared: {
      // S-S+ over complete spatial pairs (lowering then raising, right to
      // left), plus Sz^2 + Sz expanded over signed number products.
      const int pairs = n_orbitals / 2;
      for (int q = 0; q < pairs; ++q) {
        for (int p = 0; p < pairs; ++p) {
          terms.push_back({1.0,
                           {{2 * q + 1, true},
                            {2 * q, false},
                            {2 * p, true},
                            {2 * p + 1, false}}});
        }
      }
      for (int a = 0; a < n_orbitals; ++a) {
        for (int b = 0; b < n_orbitals; ++b) {
          terms.push_back({sz_weight(a) * sz_weight(b),
                           {{a, true}, {a, false}, {b, true}, {b, false}}});
        }
      }
      for (int i = 0; i < n_orbitals; ++i)
        terms.push_back({sz_weight(i), number_op(i)});
      break;
    }
  }
  return FermionOperator(std::move(terms), n_orbitals);
}

SubspaceBasis full_space(int n_orbitals) {
  if (n_orbitals < 1 || n_orbitals > kMaxOrbitals) {
    throw NumericError("subspace construction supports 1 to " +
                       std::to_string(kMaxOrbitals) + " orbitals");
  }
  SubspaceBasis basis;
  basis.n_orbitals = n_orbitals;
  const FockState dim = FockState{1} << n_orbitals;
  basis.vectors.reserve(dim);
  for (FockState f = 0; f < dim; ++f) {
    basis.vectors.push_back(SparseVector{{f, 1.0}});
  }
  return basis;
}

SubspaceBasis null_space(const ConstraintSpec& spec,
                         const SubspaceBasis& within) {
  validate_allowed(spec, within.n_orbitals);
  if (is_diagonal(spec.kind) && is_bitstring_basis(within)) {
    return filter_bitstrings(spec, within);
  }
  if (within.dim() == 0) {
    SubspaceBasis empty;
    empty.n_orbitals = within.n_orbitals;
    return empty;
  }
  return restricted_eigenspace(spec, within);
}

SubspaceBasis intersect_constraints(const std::vector<ConstraintSpec>& specs,
                                    int n_orbitals) {
  SubspaceBasis basis = full_space(n_orbitals);
  // Diagonal constraints first: they are cheap exact filters and commute with
  // everything here, so the result is order-independent while the heavy
  // eigensolve runs on the smallest possible subspace.
  for (const auto& spec : specs) {
    if (is_diagonal(spec.kind)) basis = null_space(spec, basis);
  }
  for (const auto& spec : specs) {
    if (!is_diagonal(spec.kind)) basis = null_space(spec, basis);
  }
  if (basis.dim() == 0) {
    std::ostringstream msg;
    msg << "constraints admit no states on " << n_orbitals << " orbitals:";
    for (const auto& spec : specs) {
      msg << ' ' << to_string(spec.kind) << "=[";
      for (std::size_t i = 0; i < spec.allowed.size(); ++i) {
        if (i > 0) msg << ',';
        msg << spec.allowed[i];
      }
      msg << ']';
    }
    throw InfeasibleError(msg.str());
  }
  return basis;
}

std::vector<ConstraintSpec> parse_constraints(std::istream& in) {
  std::vector<ConstraintSpec> specs;
  std::string line;
  int line_no = 0;
  bool have_total = false;
  long total_electrons = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.empty()) continue;

    const auto split_kv = [&](const std::string& token,
                              const std::string& expected_key) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || token.substr(0, eq) != expected_key) {
        throw ParseError("line " + std::to_string(line_no) + ": expected '" +
                         expected_key + "=<value>', got '" + token + "'");
      }
      return token.substr(eq + 1);
    };

    if (tokens[0].rfind("neutral_electrons=", 0) == 0) {
      if (tokens.size() != 1) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unexpected tokens after neutral_electrons");
      }
      const double n = parse_number(tokens[0].substr(18), line_no,
                                    "electron count");
      long n_int = 0;
      if (!near_nonneg_int(n, &n_int)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": electron count must be a non-negative integer");
      }
      specs.push_back({ConstraintKind::total_number,
                       {static_cast<double>(n_int)}});
      have_total = true;
      total_electrons = n_int;
      continue;
    }

    if (tokens[0].rfind("multiplicity=", 0) == 0) {
      if (tokens.size() != 2) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": multiplicity form is 'multiplicity=<2S+1> "
                         "sz=<value>'");
      }
      if (!have_total) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": multiplicity needs a preceding total electron "
                         "count (neutral_electrons or total_number with one "
                         "allowed value)");
      }
      const double mult =
          parse_number(tokens[0].substr(13), line_no, "multiplicity");
      long mult_int = 0;
      if (!near_nonneg_int(mult, &mult_int) || mult_int < 1) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": multiplicity must be a positive integer");
      }
      if (mult_int - 1 > total_electrons) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": multiplicity " + std::to_string(mult_int) +
                         " needs more than " +
                         std::to_string(total_electrons) + " electrons");
      }
      const double sz =
          parse_number(split_kv(tokens[1], "sz"), line_no, "sz value");
      const double s = 0.5 * (mult_int - 1);
      if (std::abs(sz) > s + 1e-9) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": |sz| exceeds the spin fixed by the multiplicity");
      }
      const double up = 0.5 * total_electrons + sz;
      const double down = 0.5 * total_electrons - sz;
      long up_int = 0;
      long down_int = 0;
      if (!near_nonneg_int(up, &up_int) || !near_nonneg_int(down, &down_int)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": electron count and sz give non-integer per-spin "
                         "counts");
      }
      specs.push_back({ConstraintKind::number_up,
                       {static_cast<double>(up_int)}});
      specs.push_back({ConstraintKind::number_down,
                       {static_cast<double>(down_int)}});
      specs.push_back({ConstraintKind::s_squared, {s * (s + 1.0)}});
      continue;
    }

    const ConstraintKind kind = kind_from_name(tokens[0], line_no);
    if (tokens.size() != 2) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": constraint form is '<kind> allowed=<v1,v2,...>'");
    }
    ConstraintSpec spec;
    spec.kind = kind;
    spec.allowed = parse_allowed_list(split_kv(tokens[1], "allowed"), line_no);
    if (kind == ConstraintKind::total_number && spec.allowed.size() == 1) {
      long n_int = 0;
      if (near_nonneg_int(spec.allowed[0], &n_int)) {
        have_total = true;
        total_electrons = n_int;
      }
    }
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) {
    throw ParseError("no constraints: constraint file is empty");
  }
  return specs;
}

std::vector<ConstraintSpec> parse_constraints_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open constraint file: " + path);
  try {
    return parse_constraints(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

}  // namespace fermimap
