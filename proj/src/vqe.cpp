#include "fermimap/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

#include "fermimap/errors.hpp"
#include "fermimap/measure.hpp"
#include "fermimap/sim.hpp"

namespace fermimap {
namespace {

// Evaluates the ansatz energy either exactly or through the sampled
// measurement plan; sampling seeds advance deterministically per circuit.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const ReducedHamiltonian& h, const AnsatzSpec& spec,
                  const VqeOptions& options)
      : h_(h), spec_(spec), options_(options) {
    if (options.shots > 0) plan_ = build_plan(h, Topology::star);
  }

  double operator()(const std::vector<double>& parameters) {
    const Circuit circuit = ansatz_circuit(spec_, parameters);
    const State state = run(circuit);
    if (options_.shots == 0) return expectation_value(h_, state);

    const ProbabilityTable diagonal =
        probabilities(state, options_.shots, next_seed());
    std::vector<ProbabilityTable> rotated;
    rotated.reserve(plan_.groups.size());
    for (const auto& group : plan_.groups) {
      const State turned = run(group.rotation, &state);
      rotated.push_back(probabilities(turned, options_.shots, next_seed()));
    }
    return reconstruct_expectation(plan_, diagonal, rotated);
  }

 private:
  std::uint64_t next_seed() { return options_.seed + seed_counter_++; }

  const ReducedHamiltonian& h_;
  const AnsatzSpec& spec_;
  const VqeOptions& options_;
  MeasurementPlan plan_;
  std::uint64_t seed_counter_ = 0;
};

}  // namespace

const char* to_string(Entangler entangler) {
  return entangler == Entangler::chain ? "chain" : "full";
}

Entangler entangler_from_name(const std::string& name) {
  if (name == "chain") return Entangler::chain;
  if (name == "full") return Entangler::full;
  throw ParseError("unknown entangler '" + name +
                   "' (expected chain or full)");
}

std::size_t parameter_count(const AnsatzSpec& spec) {
  return static_cast<std::size_t>(spec.layers) *
         static_cast<std::size_t>(spec.n_qubits) * 2;
}

Circuit ansatz_circuit(const AnsatzSpec& spec,
                       const std::vector<double>& parameters) {
  if (spec.n_qubits < 1 || spec.layers < 1) {
    throw NumericError("ansatz needs at least one qubit and one layer");
  }
  if (parameters.size() != parameter_count(spec)) {
    throw NumericError("ansatz expects " +
                       std::to_string(parameter_count(spec)) +
                       " parameters, got " +
                       std::to_string(parameters.size()));
  }
  Circuit circuit(spec.n_qubits);
  for (int q = 0; q < spec.n_qubits; ++q) {
    if (spec.initial_bits & (std::uint64_t{1} << q)) {
      circuit.add(Gate::x(q));
    }
  }
  std::size_t next = 0;
  for (int layer = 0; layer < spec.layers; ++layer) {
    for (int q = 0; q < spec.n_qubits; ++q) {
      circuit.add(Gate::ry(parameters[next++], q));
    }
    for (int q = 0; q < spec.n_qubits; ++q) {
      circuit.add(Gate::rz(parameters[next++], q));
    }
    if (spec.entangler == Entangler::chain) {
      for (int q = 0; q + 1 < spec.n_qubits; ++q) {
        circuit.add(Gate::cx(q, q + 1));
      }
    } else {
      for (int a = 0; a < spec.n_qubits; ++a) {
        for (int b = a + 1; b < spec.n_qubits; ++b) {
          circuit.add(Gate::cx(a, b));
        }
      }
    }
  }
  return circuit;
}

std::uint64_t default_initial_bits(const ReducedHamiltonian& h) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < h.dim(); ++m) {
    if (h.entry(static_cast<int>(m), static_cast<int>(m)) <
        h.entry(static_cast<int>(best), static_cast<int>(best))) {
      best = m;
    }
  }
  return best;
}

VqeResult optimize(const ReducedHamiltonian& h, const AnsatzSpec& spec,
                   const VqeOptions& options) {
  if (spec.n_qubits != h.n_qubits()) {
    throw NumericError("ansatz register does not match the reduced operator");
  }
  if (options.budget < 1) throw NumericError("budget must be positive");

  EnergyEvaluator energy_of(h, spec, options);
  const std::size_t d = parameter_count(spec);

  VqeResult result;
  result.energy = std::numeric_limits<double>::infinity();
  result.parameters.assign(d, 0.0);

  const auto evaluate = [&](const std::vector<double>& point) {
    const double value = energy_of(point);
    ++result.evaluations;
    if (value < result.energy) {
      result.energy = value;
      result.parameters = point;
    }
    return value;
  };

  // Initial simplex: the zero vector plus one step along each coordinate.
  std::vector<std::vector<double>> simplex;
  std::vector<double> values;
  simplex.emplace_back(d, 0.0);
  values.push_back(evaluate(simplex.back()));
  result.trace.push_back(result.energy);
  for (std::size_t i = 0; i < d && result.evaluations < options.budget; ++i) {
    auto point = std::vector<double>(d, 0.0);
    point[i] = options.initial_step;
    simplex.push_back(point);
    values.push_back(evaluate(point));
  }
  result.trace.push_back(result.energy);

  const auto order = [&]() {
    std::vector<std::size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    std::vector<std::vector<double>> new_simplex;
    std::vector<double> new_values;
    for (std::size_t i : idx) {
      new_simplex.push_back(std::move(simplex[i]));
      new_values.push_back(values[i]);
    }
    simplex = std::move(new_simplex);
    values = std::move(new_values);
  };

  while (result.evaluations < options.budget && simplex.size() == d + 1) {
    order();
    if (values.back() - values.front() < 1e-12) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
      for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k];
    }
    for (std::size_t k = 0; k < d; ++k) {
      centroid[k] /= static_cast<double>(d);
    }
    const auto blend = [&](double t) {
      std::vector<double> point(d);
      for (std::size_t k = 0; k < d; ++k) {
        point[k] = centroid[k] + t * (simplex.back()[k] - centroid[k]);
      }
      return point;
    };

    const auto reflected = blend(-1.0);
    const double f_reflected = evaluate(reflected);
    if (f_reflected < values.front() &&
        result.evaluations < options.budget) {
      const auto expanded = blend(-2.0);
      const double f_expanded = evaluate(expanded);
      if (f_expanded < f_reflected) {
        simplex.back() = expanded;
        values.back() = f_expanded;
      } else {
        simplex.back() = reflected;
        values.back() = f_reflected;
      }
    } else if (f_reflected < values[values.size() - 2]) {
      simplex.back() = reflected;
      values.back() = f_reflected;
    } else if (result.evaluations < options.budget) {
      const bool outside = f_reflected < values.back();
      const auto contracted = blend(outside ? -0.5 : 0.5);
      const double f_contracted = evaluate(contracted);
      if (f_contracted < std::min(f_reflected, values.back())) {
        simplex.back() = contracted;
        values.back() = f_contracted;
      } else {
        // Shrink every point toward the best one.
        for (std::size_t i = 1;
             i < simplex.size() && result.evaluations < options.budget; ++i) {
          for (std::size_t k = 0; k < d; ++k) {
            simplex[i][k] =
                simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
          }
          values[i] = evaluate(simplex[i]);
        }
      }
    }
    result.trace.push_back(result.energy);
  }

  return result;
}

}  // namespace fermimap
