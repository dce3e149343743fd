#pragma once

#include <string>
#include <vector>

#include "redex/model.hpp"

namespace redex {

enum class GateOp { And, Or, Neg, Id };

/// Wires 0..d-1 are the inputs x1..xd; wire d+g is the output of gates[g].
struct Gate {
  std::string name;
  GateOp op = GateOp::Id;
  std::vector<int> operands;
};

struct Circuit {
  int inputs = 0;
  std::vector<Gate> gates;  ///< topologically ordered
  int output = 0;           ///< wire id

  int size() const { return static_cast<int>(gates.size()); }
};

/// Netlist: one statement per line, `gK = OP a b` / `gK = OP a` / `out w`,
/// operands `xN` (1-based) or earlier gates, `#` starts a comment. OP is one
/// of AND, OR, NEG, ID, or XOR, which expands to (a OR b) AND NEG(a AND b).
/// The input count is the largest xN referenced. Throws ParseError.
Circuit parse_circuit(const std::string& text);

/// bits[i] is the value of x(i+1).
int eval_circuit(const Circuit& circuit, const std::vector<int>& bits);

struct CompiledCircuit {
  MultilayerModel model;  ///< constant 1, expressive mode
  int depth = 0;
  Eigen::Index max_width = 0;  ///< max_t n_t
  double alpha = 0.0;          ///< depth / T
  double beta = 0.0;           ///< max_t n_t / T
};

/// Gadget construction: the constant-picker row plus affine rows (ID, NEG,
/// second half of OR) and product row pairs (AND, first half of OR); live
/// wires are carried by ID rows and everything else is dropped each layer.
CompiledCircuit compile_circuit(const Circuit& circuit);

/// Exhaustive check over all 2^d inputs (d <= 16, else InvalidInput).
bool verify_compilation(const Circuit& circuit, const MultilayerModel& model, double tol = 1e-9);

}  // namespace redex
