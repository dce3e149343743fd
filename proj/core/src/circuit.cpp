#include "redex/circuit.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "redex/errors.hpp"
#include "redex/parallel.hpp"

namespace redex {

namespace {

bool parse_index(const std::string& tok, char prefix, int& out) {
  if (tok.size() < 2 || tok[0] != prefix) return false;
  for (std::size_t i = 1; i < tok.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
  try {
    out = std::stoi(tok.substr(1));
  } catch (const std::out_of_range&) {
    return false;
  }
  return true;
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
  struct Pending {
    std::string name;
    std::string op;
    std::vector<std::string> operands;
    int line;
  };
  std::vector<Pending> statements;
  std::string out_name;
  int out_line = 0;
  int max_input = 0;

  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (out_line) throw ParseError(number, "statement after 'out'");
    if (tok[0] == "out") {
      if (tok.size() != 2) throw ParseError(number, "expected 'out <wire>'");
      out_name = tok[1];
      out_line = number;
      continue;
    }
    int gate_index = 0;
    if (!parse_index(tok[0], 'g', gate_index)) throw ParseError(number, "gate names must look like gK, got '" + tok[0] + "'");
    if (tok.size() < 3 || tok[1] != "=") throw ParseError(number, "expected 'gK = OP operands'");
    const std::string& op = tok[2];
    const std::size_t arity = (op == "NEG" || op == "ID") ? 1 : (op == "AND" || op == "OR" || op == "XOR") ? 2 : 0;
    if (arity == 0) throw ParseError(number, "unknown operation '" + op + "'");
    if (tok.size() != 3 + arity)
      throw ParseError(number, op + " takes " + std::to_string(arity) + " operand" + (arity == 1 ? "" : "s"));
    statements.push_back({tok[0], op, {tok.begin() + 3, tok.end()}, number});
    for (const auto& operand : statements.back().operands) {
      int idx = 0;
      if (parse_index(operand, 'x', idx)) {
        if (idx < 1) throw ParseError(number, "inputs are numbered from x1");
        max_input = std::max(max_input, idx);
      }
    }
  }
  if (!out_line) throw ParseError(0, "missing 'out' statement");
  {
    int idx = 0;
    if (parse_index(out_name, 'x', idx)) {
      if (idx < 1) throw ParseError(out_line, "inputs are numbered from x1");
      max_input = std::max(max_input, idx);
    }
  }
  if (max_input == 0) throw ParseError(0, "circuit reads no inputs");

  Circuit c;
  c.inputs = max_input;
  std::map<std::string, int> wires;  // gate name -> wire id
  auto resolve = [&](const std::string& name, int line_no, const std::string& self) {
    int idx = 0;
    if (parse_index(name, 'x', idx)) return idx - 1;
    if (name == self) throw ParseError(line_no, "gate '" + self + "' depends on itself (cycle)");
    const auto it = wires.find(name);
    if (it == wires.end()) {
      const bool later = std::any_of(statements.begin(), statements.end(), [&](const Pending& p) { return p.name == name; });
      throw ParseError(line_no, later ? "operand '" + name + "' is used before its definition (cycle or misordering)"
                                      : "undefined operand '" + name + "'");
    }
    return it->second;
  };
  auto add = [&](const std::string& name, GateOp op, std::vector<int> operands) {
    c.gates.push_back({name, op, std::move(operands)});
    return c.inputs + static_cast<int>(c.gates.size()) - 1;
  };

  for (const auto& st : statements) {
    if (wires.count(st.name)) throw ParseError(st.line, "gate '" + st.name + "' defined twice");
    std::vector<int> ops;
    for (const auto& o : st.operands) ops.push_back(resolve(o, st.line, st.name));
    int wire = 0;
    if (st.op == "AND") wire = add(st.name, GateOp::And, ops);
    else if (st.op == "OR") wire = add(st.name, GateOp::Or, ops);
    else if (st.op == "NEG") wire = add(st.name, GateOp::Neg, ops);
    else if (st.op == "ID") wire = add(st.name, GateOp::Id, ops);
    else {
      const int either = add(st.name + ".or", GateOp::Or, ops);
      const int both = add(st.name + ".and", GateOp::And, ops);
      const int neither = add(st.name + ".neg", GateOp::Neg, {both});
      wire = add(st.name, GateOp::And, {either, neither});
    }
    wires[st.name] = wire;
  }
  c.output = resolve(out_name, out_line, "");
  return c;
}

int eval_circuit(const Circuit& circuit, const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != circuit.inputs) throw DimError("eval_circuit: wrong number of input bits");
  std::vector<int> value(bits.begin(), bits.end());
  for (int& b : value)
    if (b != 0 && b != 1) throw InvalidInput("eval_circuit: inputs must be 0 or 1");
  for (const auto& g : circuit.gates) {
    const int a = value[static_cast<std::size_t>(g.operands[0])];
    switch (g.op) {
      case GateOp::And: value.push_back(a & value[static_cast<std::size_t>(g.operands[1])]); break;
      case GateOp::Or: value.push_back(a | value[static_cast<std::size_t>(g.operands[1])]); break;
      case GateOp::Neg: value.push_back(1 - a); break;
      case GateOp::Id: value.push_back(a); break;
    }
  }
  return value[static_cast<std::size_t>(circuit.output)];
}

namespace {

// Layer-level operations. AFFINE reads entry (0, row) of the expansion, which
// holds bias + Σ coeff·w since row 0 always evaluates to the constant 1.
// PRODUCT reads entry (row_a, row_b) = a·b.
struct LayerOp {
  bool product = false;
  double bias = 0.0;
  std::vector<std::pair<int, double>> terms;  // (wire, coeff) for AFFINE
  int a = -1, b = -1;                         // wires for PRODUCT
  int out = -1;
};

}  // namespace

CompiledCircuit compile_circuit(const Circuit& circuit) {
  const int d = circuit.inputs;
  const int T = circuit.size();
  int next_wire = d + T;  // scratch wires for OR products
  std::vector<int> stage(static_cast<std::size_t>(d + 2 * T + 1), 0);
  std::map<int, std::vector<LayerOp>> ops_at;  // layer -> ops computed there

  for (int g = 0; g < T; ++g) {
    const Gate& gate = circuit.gates[static_cast<std::size_t>(g)];
    const int w = d + g;
    int base = 0;
    for (int o : gate.operands) base = std::max(base, stage[static_cast<std::size_t>(o)]);
    const int a = gate.operands[0];
    switch (gate.op) {
      case GateOp::And: {
        LayerOp op;
        op.product = true;
        op.a = a;
        op.b = gate.operands[1];
        op.out = w;
        ops_at[base + 1].push_back(op);
        stage[static_cast<std::size_t>(w)] = base + 1;
        break;
      }
      case GateOp::Neg:
        ops_at[base + 1].push_back({false, 1.0, {{a, -1.0}}, -1, -1, w});
        stage[static_cast<std::size_t>(w)] = base + 1;
        break;
      case GateOp::Id:
        ops_at[base + 1].push_back({false, 0.0, {{a, 1.0}}, -1, -1, w});
        stage[static_cast<std::size_t>(w)] = base + 1;
        break;
      case GateOp::Or: {
        const int b = gate.operands[1];
        const int h = next_wire++;
        LayerOp prod;
        prod.product = true;
        prod.a = a;
        prod.b = b;
        prod.out = h;
        ops_at[base + 1].push_back(prod);
        stage[static_cast<std::size_t>(h)] = base + 1;
        ops_at[base + 2].push_back({false, 0.0, {{a, 1.0}, {b, 1.0}, {h, -1.0}}, -1, -1, w});
        stage[static_cast<std::size_t>(w)] = base + 2;
        break;
      }
    }
  }

  const int depth = std::max(1, stage[static_cast<std::size_t>(circuit.output)]);

  // last_use[w] = last layer whose ops read w (or depth + 1 for the output).
  std::map<int, int> last_use;
  for (const auto& [layer, ops] : ops_at)
    for (const auto& op : ops) {
      if (op.product) {
        last_use[op.a] = std::max(last_use[op.a], layer);
        last_use[op.b] = std::max(last_use[op.b], layer);
      } else {
        for (const auto& term : op.terms) last_use[term.first] = std::max(last_use[term.first], layer);
      }
    }
  last_use[circuit.output] = depth + 1;

  CompiledCircuit result;
  result.model.constant = 1.0;
  result.model.expressive = true;

  // Position of each live wire in the current feature vector; constant at 0.
  std::map<int, Eigen::Index> pos;
  for (int i = 0; i < d; ++i) pos[i] = i + 1;
  Eigen::Index prev_dim = d + 1;
  std::pair<Eigen::Index, Eigen::Index> out_entry{0, 0};

  for (int t = 1; t <= depth; ++t) {
    std::vector<LayerOp> ops = ops_at.count(t) ? ops_at[t] : std::vector<LayerOp>{};
    // Carry wires that are produced before t and still needed after t.
    for (const auto& [w, p] : pos) {
      (void)p;
      if (last_use.count(w) && last_use[w] > t) ops.push_back({false, 0.0, {{w, 1.0}}, -1, -1, w});
    }

    std::vector<Vector> rows;
    std::map<std::vector<double>, Eigen::Index> row_index;
    auto row_of = [&](const Vector& r) {
      std::vector<double> key(r.data(), r.data() + r.size());
      const auto it = row_index.find(key);
      if (it != row_index.end()) return it->second;
      const auto idx = static_cast<Eigen::Index>(rows.size());
      rows.push_back(r);
      row_index.emplace(std::move(key), idx);
      return idx;
    };
    auto pick = [&](int w) {
      Vector r = Vector::Zero(prev_dim);
      r(pos.at(w)) = 1.0;
      return r;
    };
    Vector constant_row = Vector::Zero(prev_dim);
    constant_row(0) = 1.0;
    row_of(constant_row);

    std::map<int, std::pair<Eigen::Index, Eigen::Index>> entry;
    for (const auto& op : ops) {
      if (op.product) {
        const Eigen::Index ra = row_of(pick(op.a));
        const Eigen::Index rb = row_of(pick(op.b));
        entry[op.out] = {ra, rb};
      } else {
        Vector r = Vector::Zero(prev_dim);
        r(0) = op.bias;
        for (const auto& [w, coeff] : op.terms) r(pos.at(w)) += coeff;
        entry[op.out] = {0, row_of(r)};
      }
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix extractor(n, prev_dim);
    for (Eigen::Index r = 0; r < n; ++r) extractor.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    result.model.extractors.push_back(std::move(extractor));
    result.max_width = std::max(result.max_width, n);

    pos.clear();
    for (const auto& [w, e] : entry) pos[w] = e.first * n + e.second;
    if (t == depth) out_entry = entry.at(circuit.output);
    prev_dim = n * n;
  }

  const Eigen::Index n = result.model.extractors.back().rows();
  Matrix head = Matrix::Zero(n, n);
  head(out_entry.first, out_entry.second) += 0.5;
  head(out_entry.second, out_entry.first) += 0.5;
  result.model.heads.emplace_back(head);
  result.model.validate();

  result.depth = depth;
  const double size = std::max(1, T);
  result.alpha = depth / size;
  result.beta = static_cast<double>(result.max_width) / size;
  return result;
}

bool verify_compilation(const Circuit& circuit, const MultilayerModel& model, double tol) {
  const int d = circuit.inputs;
  if (d > 16) throw InvalidInput("exhaustive verification supports at most 16 inputs");
  if (model.input_dim() != d || model.output_dim() != 1) return false;
  const std::size_t total = std::size_t{1} << d;
  std::vector<char> ok(total, 0);
  parallel_for(total, [&](std::size_t mask) {
    std::vector<int> bits(static_cast<std::size_t>(d));
    Vector x(d);
    for (int i = 0; i < d; ++i) {
      bits[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1u);
      x(i) = bits[static_cast<std::size_t>(i)];
    }
    const double got = forward_multilayer(model, x)(0);
    ok[mask] = std::abs(got - eval_circuit(circuit, bits)) <= tol;
  });
  return std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
}

}  // namespace redex
