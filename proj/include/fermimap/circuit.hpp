#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermimap {

enum class GateKind { h, x, cx, rx, ry, rz };

const char* to_string(GateKind kind);
bool gate_has_angle(GateKind kind);

struct Gate {
  GateKind kind = GateKind::h;
  int target = 0;
  int control = -1;    // cx only
  double angle = 0.0;  // rx/ry/rz only

  static Gate h(int q) { return {GateKind::h, q, -1, 0.0}; }
  static Gate x(int q) { return {GateKind::x, q, -1, 0.0}; }
  static Gate cx(int control, int target) {
    return {GateKind::cx, target, control, 0.0};
  }
  static Gate rx(double angle, int q) { return {GateKind::rx, q, -1, angle}; }
  static Gate ry(double angle, int q) { return {GateKind::ry, q, -1, angle}; }
  static Gate rz(double angle, int q) { return {GateKind::rz, q, -1, angle}; }
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n) : n_qubits(n) {}

  void add(const Gate& gate);
  // Appends another circuit's gates; register sizes must match.
  void append(const Circuit& other);
};

// Parses the gate subset of OPENQASM 2.0: one statement per ';', a single
// qreg, gates h/x/cx/rx/ry/rz with literal angles (pi, integers, decimals,
// and scientific notation; `pi/2`, `-pi/4`, `2*pi` forms are accepted).
// OPENQASM/include/creg/barrier/measure statements are recognized and
// ignored. Throws ParseError with a line number on anything else.
Circuit parse_qasm(std::istream& in);
Circuit parse_qasm_file(const std::string& path);

// Writes OPENQASM 2.0; with_measurement adds a creg and a full measurement.
void write_qasm(std::ostream& out, const Circuit& circuit,
                bool with_measurement);
void write_qasm_file(const std::string& path, const Circuit& circuit,
                     bool with_measurement);

}  // namespace fermimap
