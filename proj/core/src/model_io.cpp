#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "redex/errors.hpp"
#include "redex/io.hpp"

namespace redex {

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[40];
  if (std::abs(value) < 1e15 && value == std::floor(value)) {
    std::snprintf(buf, sizeof buf, "%.0f", value);
    return buf;
  }
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

bool file_exists(const std::string& path) { return static_cast<bool>(std::ifstream(path)); }

namespace {

using nlohmann::json;

// Hand-rolled emitter; non-integral numbers always carry 17 significant digits.
class Emitter {
 public:
  void key(const std::string& k) {
    comma();
    out_ += "\"" + k + "\": ";
    fresh_ = true;
  }
  void open(char c) {
    comma();
    out_ += c;
    fresh_ = true;
  }
  void close(char c) {
    out_ += c;
    fresh_ = false;
  }
  void raw(const std::string& s) {
    comma();
    out_ += s;
    fresh_ = false;
  }
  void number(double v) {
    if (v == 0.0 || (std::abs(v) < 1e15 && v == std::floor(v))) {
      raw(format_real(v));
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    raw(buf);
  }
  void string(const std::string& s) { raw("\"" + s + "\""); }
  void matrix(const Matrix& m) {
    open('[');
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      open('[');
      for (Eigen::Index c = 0; c < m.cols(); ++c) number(m(r, c));
      close(']');
    }
    close(']');
  }
  void heads(const std::vector<SymMatrix>& hs) {
    open('[');
    for (const auto& h : hs) matrix(h.matrix());
    close(']');
  }
  std::string str() const { return out_ + "\n"; }

 private:
  void comma() {
    if (!fresh_ && !out_.empty()) out_ += ", ";
    fresh_ = false;
  }
  std::string out_;
  bool fresh_ = true;
};

Matrix matrix_from(const json& j) {
  if (!j.is_array()) throw InvalidInput("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw InvalidInput("matrix entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

std::vector<SymMatrix> heads_from(const json& j) {
  std::vector<SymMatrix> out;
  for (const auto& h : j) {
    const Matrix m = matrix_from(h);
    if (m.rows() != m.cols()) throw InvalidInput("head matrices must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw InvalidInput("head matrices must be symmetric");
    out.emplace_back(m);
  }
  return out;
}

}  // namespace

std::string model_to_json(const AnyModel& any) {
  Emitter e;
  e.open('{');
  e.key("format");
  e.string("redex-model");
  e.key("version");
  e.number(1);
  if (const auto* layer = std::get_if<RedExLayer>(&any)) {
    e.key("mode");
    e.string("layer");
    e.key("width_bound");
    e.number(layer->width_bound);
    e.key("extractor");
    e.matrix(layer->extractor);
    e.key("heads");
    e.heads(layer->heads);
  } else if (const auto* model = std::get_if<MultilayerModel>(&any)) {
    e.key("mode");
    e.string("multilayer");
    e.key("constant");
    e.number(model->constant);
    e.key("expressive");
    e.raw(model->expressive ? "true" : "false");
    e.key("training_size");
    e.number(static_cast<double>(model->training_size));
    e.key("extractors");
    e.open('[');
    for (const auto& v : model->extractors) e.matrix(v);
    e.close(']');
    e.key("heads");
    e.heads(model->heads);
  } else {
    const auto& conv = std::get<ConvRedExLayer>(any);
    e.key("mode");
    e.string("conv");
    e.key("width_bound");
    e.number(conv.width_bound);
    e.key("patch_count");
    e.number(static_cast<double>(conv.patch_count));
    e.key("extractor");
    e.matrix(conv.extractor);
    e.key("heads");
    e.open('[');
    for (const auto& row : conv.heads) e.heads(row);
    e.close(']');
  }
  e.close('}');
  return e.str();
}

AnyModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("model file is not valid JSON: ") + ex.what());
  }
  try {
    if (j.value("format", "") != "redex-model") throw InvalidInput("not a model file");
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "layer")
      return RedExLayer::make(matrix_from(j.at("extractor")), heads_from(j.at("heads")),
                              j.at("width_bound").get<double>());
    if (mode == "multilayer") {
      MultilayerModel m;
      m.constant = j.at("constant").get<double>();
      m.expressive = j.value("expressive", false);
      m.training_size = j.value("training_size", 0);
      for (const auto& v : j.at("extractors")) m.extractors.push_back(matrix_from(v));
      m.heads = heads_from(j.at("heads"));
      m.validate();
      return m;
    }
    if (mode == "conv") {
      HeadGrid grid;
      for (const auto& row : j.at("heads")) grid.push_back(heads_from(row));
      ConvRedExLayer layer = ConvRedExLayer::make(matrix_from(j.at("extractor")), std::move(grid),
                                                  j.at("width_bound").get<double>());
      if (layer.patch_count != j.at("patch_count").get<Eigen::Index>())
        throw InvalidInput("patch_count does not match the head grid");
      return layer;
    }
    throw InvalidInput("unknown model mode '" + mode + "'");
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("malformed model file: ") + ex.what());
  } catch (const DimError& ex) {
    throw InvalidInput(std::string("malformed model file: ") + ex.what());
  }
}

AnyModel read_model(const std::string& path) { return model_from_json(read_text_file(path)); }
void write_model(const std::string& path, const AnyModel& model) { write_text_file(path, model_to_json(model)); }

Predictor make_predictor(const AnyModel& any) {
  return std::visit(
      [](const auto& m) -> Predictor {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RedExLayer>)
          return [m](const Vector& x) { return m(x); };
        else if constexpr (std::is_same_v<T, MultilayerModel>)
          return [m](const Vector& x) { return forward_multilayer(m, x); };
        else
          return [m](const Vector& x) { return conv_forward(m, x); };
      },
      any);
}

Eigen::Index model_input_dim(const AnyModel& any) {
  if (const auto* l = std::get_if<RedExLayer>(&any)) return l->input_dim();
  if (const auto* m = std::get_if<MultilayerModel>(&any)) return m->input_dim();
  const auto& c = std::get<ConvRedExLayer>(any);
  return c.patch_count * c.patch_dim();
}

std::string task_to_json(const KravchukTask& task) {
  Emitter e;
  e.open('{');
  e.key("d");
  e.number(task.d);
  e.key("k");
  e.number(task.k);
  e.key("I");
  e.open('[');
  for (int i : task.hidden) e.number(i);
  e.close(']');
  e.key("seed");
  e.raw(std::to_string(task.seed));
  e.close('}');
  return e.str();
}

KravchukTask task_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::optional<std::vector<int>> hidden;
    if (j.contains("I")) hidden = j.at("I").get<std::vector<int>>();
    return KravchukTask::make(j.at("d").get<int>(), j.at("k").get<int>(), j.value("seed", std::uint64_t{0}), hidden);
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("malformed task spec: ") + ex.what());
  }
}

std::vector<SymMatrix> matrices_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const json& body = j.is_object() ? j.at("matrices") : j;
    if (!body.is_array() || body.empty()) throw InvalidInput("expected a non-empty array of matrices");
    // A single matrix is an array of arrays of numbers.
    if (body[0].is_array() && !body[0].empty() && body[0][0].is_number()) return heads_from(json::array({body}));
    return heads_from(body);
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("malformed matrix file: ") + ex.what());
  }
}

}  // namespace redex
