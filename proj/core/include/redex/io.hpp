#pragma once

#include <string>
#include <variant>

#include "redex/conv.hpp"
#include "redex/kravchuk.hpp"
#include "redex/model.hpp"

namespace redex {

/// Shortest round-trip rendering used by every text artifact (with
/// integral values printed without exponent where exact).
std::string format_real(double value);

/// Throws InvalidInput when the file cannot be read or written.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

/// CSV with header x_1..x_D,y_1..y_K. A `<path>.meta.json` sidecar holding
/// {"d", "k", "p"} declares the patch layout (D = p·d); it is optional for p = 1.
LabeledDataset read_dataset(const std::string& path);
void write_dataset(const std::string& path, const LabeledDataset& data);
std::string dataset_csv(const LabeledDataset& data);

/// A trained or compiled model as stored on disk.
using AnyModel = std::variant<RedExLayer, MultilayerModel, ConvRedExLayer>;

std::string model_to_json(const AnyModel& model);
/// Throws InvalidInput on malformed files or violated invariants.
AnyModel model_from_json(const std::string& text);
AnyModel read_model(const std::string& path);
void write_model(const std::string& path, const AnyModel& model);

Predictor make_predictor(const AnyModel& model);
Eigen::Index model_input_dim(const AnyModel& model);

/// Task spec files: {"d", "k", "I" (0-based, optional), "seed"}.
std::string task_to_json(const KravchukTask& task);
KravchukTask task_from_json(const std::string& text);

/// Symmetric matrices stored as a JSON array of matrices (each an array of
/// rows) or a single matrix.
std::vector<SymMatrix> matrices_from_json(const std::string& text);

}  // namespace redex
