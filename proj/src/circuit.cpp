#include "fermimap/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fermimap/errors.hpp"

namespace fermimap {
namespace {

constexpr int kMaxQubits = 24;

[[noreturn]] void fail(int line_no, const std::string& message) {
  throw ParseError("line " + std::to_string(line_no) + ": " + message);
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

// number | pi, combined left to right with '*' and '/'; optional leading '-'.
double parse_angle(const std::string& text, int line_no) {
  std::string expr = trim(text);
  if (expr.empty()) fail(line_no, "empty gate angle");
  double sign = 1.0;
  std::size_t pos = 0;
  if (expr[pos] == '-') {
    sign = -1.0;
    ++pos;
  } else if (expr[pos] == '+') {
    ++pos;
  }
  const auto parse_factor = [&]() -> double {
    while (pos < expr.size() && std::isspace(expr[pos])) ++pos;
    if (expr.compare(pos, 2, "pi") == 0) {
      pos += 2;
      return std::numbers::pi;
    }
    const char* begin = expr.c_str() + pos;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) fail(line_no, "bad gate angle '" + text + "'");
    pos += static_cast<std::size_t>(end - begin);
    return value;
  };
  double value = parse_factor();
  while (true) {
    while (pos < expr.size() && std::isspace(expr[pos])) ++pos;
    if (pos >= expr.size()) break;
    const char op = expr[pos];
    if (op != '*' && op != '/') fail(line_no, "bad gate angle '" + text + "'");
    ++pos;
    const double rhs = parse_factor();
    if (op == '*') {
      value *= rhs;
    } else {
      value /= rhs;
    }
  }
  return sign * value;
}

int parse_qubit_ref(const std::string& token, const std::string& reg_name,
                    int n_qubits, int line_no) {
  const std::string ref = trim(token);
  const auto open = ref.find('[');
  if (open == std::string::npos || ref.back() != ']' ||
      ref.substr(0, open) != reg_name) {
    fail(line_no, "expected qubit reference '" + reg_name + "[<i>]', got '" +
                      ref + "'");
  }
  const std::string idx_text = ref.substr(open + 1, ref.size() - open - 2);
  if (idx_text.empty() ||
      idx_text.find_first_not_of("0123456789") != std::string::npos) {
    fail(line_no, "bad qubit index '" + idx_text + "'");
  }
  const long idx = std::strtol(idx_text.c_str(), nullptr, 10);
  if (idx >= n_qubits) {
    fail(line_no, "qubit index " + idx_text + " exceeds register size " +
                      std::to_string(n_qubits));
  }
  return static_cast<int>(idx);
}

}  // namespace

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::h: return "h";
    case GateKind::x: return "x";
    case GateKind::cx: return "cx";
    case GateKind::rx: return "rx";
    case GateKind::ry: return "ry";
    case GateKind::rz: return "rz";
  }
  return "?";
}

bool gate_has_angle(GateKind kind) {
  return kind == GateKind::rx || kind == GateKind::ry || kind == GateKind::rz;
}

void Circuit::add(const Gate& gate) {
  if (gate.target < 0 || gate.target >= n_qubits) {
    throw NumericError("gate target out of range");
  }
  if (gate.kind == GateKind::cx) {
    if (gate.control < 0 || gate.control >= n_qubits) {
      throw NumericError("gate control out of range");
    }
    if (gate.control == gate.target) {
      throw NumericError("cx control and target must differ");
    }
  }
  gates.push_back(gate);
}

void Circuit::append(const Circuit& other) {
  if (other.n_qubits != n_qubits) {
    throw NumericError("cannot append a circuit on a different register");
  }
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit parse_qasm(std::istream& in) {
  Circuit circuit;
  std::string reg_name;
  bool have_qreg = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto slash = line.find("//"); slash != std::string::npos) {
      line.erase(slash);
    }
    if (!trim(line).empty() && trim(line).find(';') == std::string::npos) {
      fail(line_no, "statement does not end with ';'");
    }
    std::istringstream statements(line);
    std::string statement;
    while (std::getline(statements, statement, ';')) {
      statement = trim(statement);
      if (statement.empty()) continue;

      std::istringstream words(statement);
      std::string head;
      words >> head;
      std::string op_name = head;
      std::string angle_text;
      if (const auto paren = head.find('('); paren != std::string::npos) {
        op_name = head.substr(0, paren);
        std::string rest = statement.substr(statement.find('(') + 1);
        const auto close = rest.find(')');
        if (close == std::string::npos) fail(line_no, "missing ')'");
        angle_text = rest.substr(0, close);
        // Re-point `words` at what follows the closing parenthesis.
        words.str(trim(rest.substr(close + 1)));
        words.clear();
      }

      if (op_name == "OPENQASM" || op_name == "include" ||
          op_name == "creg" || op_name == "barrier" || op_name == "measure") {
        continue;
      }
      if (op_name == "qreg") {
        if (have_qreg) fail(line_no, "multiple qreg declarations");
        std::string decl;
        if (!(words >> decl)) fail(line_no, "qreg needs '<name>[<n>]'");
        const auto open = decl.find('[');
        if (open == std::string::npos || decl.back() != ']') {
          fail(line_no, "qreg needs '<name>[<n>]'");
        }
        reg_name = decl.substr(0, open);
        const std::string size_text =
            decl.substr(open + 1, decl.size() - open - 2);
        if (size_text.empty() ||
            size_text.find_first_not_of("0123456789") != std::string::npos) {
          fail(line_no, "bad qreg size '" + size_text + "'");
        }
        const long size = std::strtol(size_text.c_str(), nullptr, 10);
        if (size < 1 || size > kMaxQubits) {
          fail(line_no, "qreg size must be 1 to " +
                            std::to_string(kMaxQubits));
        }
        circuit.n_qubits = static_cast<int>(size);
        have_qreg = true;
        continue;
      }

      if (!have_qreg) fail(line_no, "gate before qreg declaration");

      // Remaining text holds the operand list.
      std::string operands;
      std::getline(words, operands);
      operands = trim(operands);
      std::vector<std::string> args;
      {
        std::istringstream arg_stream(operands);
        std::string arg;
        while (std::getline(arg_stream, arg, ',')) {
          arg = trim(arg);
          if (!arg.empty()) args.push_back(arg);
        }
      }
      const auto one_qubit = [&]() {
        if (args.size() != 1) {
          fail(line_no, op_name + " takes exactly one qubit");
        }
        return parse_qubit_ref(args[0], reg_name, circuit.n_qubits, line_no);
      };

      if (op_name == "h") {
        circuit.add(Gate::h(one_qubit()));
      } else if (op_name == "x") {
        circuit.add(Gate::x(one_qubit()));
      } else if (op_name == "rx" || op_name == "ry" || op_name == "rz") {
        if (angle_text.empty()) fail(line_no, op_name + " needs an angle");
        const double angle = parse_angle(angle_text, line_no);
        const int q = one_qubit();
        if (op_name == "rx") {
          circuit.add(Gate::rx(angle, q));
        } else if (op_name == "ry") {
          circuit.add(Gate::ry(angle, q));
        } else {
          circuit.add(Gate::rz(angle, q));
        }
      } else if (op_name == "cx") {
        if (args.size() != 2) fail(line_no, "cx takes two qubits");
        const int control =
            parse_qubit_ref(args[0], reg_name, circuit.n_qubits, line_no);
        const int target =
            parse_qubit_ref(args[1], reg_name, circuit.n_qubits, line_no);
        if (control == target) fail(line_no, "cx qubits must differ");
        circuit.add(Gate::cx(control, target));
      } else {
        fail(line_no, "unsupported gate '" + op_name + "'");
      }
    }
  }
  if (!have_qreg) throw ParseError("no qreg declaration in circuit");
  return circuit;
}

Circuit parse_qasm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open circuit file: " + path);
  try {
    return parse_qasm(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

void write_qasm(std::ostream& out, const Circuit& circuit,
                bool with_measurement) {
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.n_qubits << "];\n";
  if (with_measurement) out << "creg c[" << circuit.n_qubits << "];\n";
  char angle_buf[64];
  for (const auto& gate : circuit.gates) {
    switch (gate.kind) {
      case GateKind::h:
      case GateKind::x:
        out << to_string(gate.kind) << " q[" << gate.target << "];\n";
        break;
      case GateKind::cx:
        out << "cx q[" << gate.control << "],q[" << gate.target << "];\n";
        break;
      case GateKind::rx:
      case GateKind::ry:
      case GateKind::rz:
        std::snprintf(angle_buf, sizeof(angle_buf), "%.17g", gate.angle);
        out << to_string(gate.kind) << '(' << angle_buf << ") q["
            << gate.target << "];\n";
        break;
    }
  }
  if (with_measurement) out << "measure q -> c;\n";
}

void write_qasm_file(const std::string& path, const Circuit& circuit,
                     bool with_measurement) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write circuit file: " + path);
  write_qasm(out, circuit, with_measurement);
}

}  // namespace fermimap
