#include "fermimap/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

namespace fermimap {

namespace {

constexpr double kDropTol = 1e-12;
constexpr double kImagTol = 1e-10;

// Axes encoded 0=I, 1=X, 2=Y, 3=Z; a factor map never stores I.
using FactorMap = std::map<int, int>;

struct WeightedString {
  std::complex<double> coeff;
  FactorMap factors;
};

// Single-qubit products P_a * P_b = i^phase * P_c with phase in {0,1,2,3}.
struct PauliProduct {
  int phase;
  int op;
};

PauliProduct compose(int a, int b) {
  if (a == 0) return {0, b};
  if (b == 0) return {0, a};
  if (a == b) return {0, 0};
  // XY=iZ, YZ=iX, ZX=iY and the reversed orders pick up -i.
  static constexpr int third[4][4] = {
      {0, 0, 0, 0}, {0, 0, 3, 2}, {0, 3, 0, 1}, {0, 2, 1, 0}};
  const bool forward = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1);
  return {forward ? 1 : 3, third[a][b]};
}

void multiply_into(std::vector<WeightedString>& lhs,
                   const std::vector<WeightedString>& rhs) {
  std::map<FactorMap, std::complex<double>> merged;
  for (const auto& l : lhs) {
    for (const auto& r : rhs) {
      std::complex<double> coeff = l.coeff * r.coeff;
      FactorMap factors = l.factors;
      for (const auto& [qubit, op] : r.factors) {
        auto it = factors.find(qubit);
        if (it == factors.end()) {
          factors.emplace(qubit, op);
          continue;
        }
        const PauliProduct p = compose(it->second, op);
        switch (p.phase & 3) {
          case 1: coeff *= std::complex<double>(0.0, 1.0); break;
          case 2: coeff = -coeff; break;
          case 3: coeff *= std::complex<double>(0.0, -1.0); break;
          default: break;
        }
        if (p.op == 0) {
          factors.erase(it);
        } else {
          it->second = p.op;
        }
      }
      merged[std::move(factors)] += coeff;
    }
  }
  lhs.clear();
  for (auto& [factors, coeff] : merged) {
    if (std::abs(coeff) > 0.0) lhs.push_back({coeff, factors});
  }
}

// Jordan-Wigner image of one ladder operator: (X -+ iY)/2 with a Z tail on
// every qubit below the acted one.
std::vector<WeightedString> ladder_image(const LadderOp& op) {
  FactorMap tail;
  for (int q = 0; q < op.orbital; ++q) tail.emplace(q, 3);
  WeightedString x{{0.5, 0.0}, tail};
  x.factors[op.orbital] = 1;
  WeightedString y{{0.0, op.creation ? -0.5 : 0.5}, tail};
  y.factors[op.orbital] = 2;
  return {x, y};
}

}  // namespace

std::string PauliString::to_string() const {
  if (factors.empty()) return "I";
  std::string out;
  for (const auto& [qubit, axis] : factors) {
    if (!out.empty()) out += ' ';
    out += axis;
    out += std::to_string(qubit);
  }
  return out;
}

std::vector<PauliString> jordan_wigner(const FermionOperator& op) {
  std::map<FactorMap, std::complex<double>> total;
  for (const auto& term : op.terms()) {
    std::vector<WeightedString> product = {
        {{term.coefficient, 0.0}, FactorMap{}}};
    for (const auto& ladder : term.ops) {
      multiply_into(product, ladder_image(ladder));
    }
    for (const auto& ws : product) total[ws.factors] += ws.coeff;
  }

  std::vector<PauliString> out;
  for (const auto& [factors, coeff] : total) {
    if (std::abs(coeff) < kDropTol) continue;
    if (std::abs(coeff.imag()) >= kImagTol) {
      throw NumericError(
          "Jordan-Wigner transform left an imaginary coefficient of magnitude " +
          std::to_string(std::abs(coeff.imag())) +
          "; the input operator is not Hermitian");
    }
    PauliString ps;
    ps.coefficient = coeff.real();
    for (const auto& [qubit, axis] : factors) {
      ps.factors.emplace_back(qubit, "IXYZ"[axis]);
    }
    out.push_back(std::move(ps));
  }
  std::sort(out.begin(), out.end(), [](const PauliString& a, const PauliString& b) {
    return a.factors < b.factors;
  });
  return out;
}

}  // namespace fermimap
