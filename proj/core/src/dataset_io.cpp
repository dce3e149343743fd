#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "redex/errors.hpp"
#include "redex/io.hpp"

namespace redex {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\r')) ++end;
  if (end == begin || *end != '\0')
    throw InvalidInput("line " + std::to_string(line) + ": '" + cell + "' is not a number");
  return v;
}

}  // namespace

LabeledDataset read_dataset(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  Eigen::Index d = 0, k = 0;
  for (const auto& h : header) {
    if (h.rfind("x_", 0) == 0) {
      if (k > 0) throw InvalidInput("line 1: input columns must precede target columns");
      ++d;
    } else if (h.rfind("y_", 0) == 0) {
      ++k;
    } else {
      throw InvalidInput("line 1: unexpected column '" + h + "'");
    }
  }
  if (d == 0 || k == 0) throw InvalidInput("line 1: need at least one x_ and one y_ column");

  std::vector<std::vector<double>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != d + k)
      throw InvalidInput("line " + std::to_string(number) + ": expected " + std::to_string(d + k) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_cell(c, number));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("'" + path + "' has no samples");

  LabeledDataset data;
  const auto m = static_cast<Eigen::Index>(rows.size());
  data.inputs.resize(m, d);
  data.targets.resize(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < d + k; ++j) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (j < d)
        data.inputs(i, j) = v;
      else
        data.targets(i, j - d) = v;
    }

  const std::string meta = path + ".meta.json";
  if (file_exists(meta)) {
    try {
      const auto j = nlohmann::json::parse(read_text_file(meta));
      const Eigen::Index p = j.value("p", 1);
      const Eigen::Index pd = j.value("d", d / std::max<Eigen::Index>(p, 1));
      if (p < 1 || pd * p != d) throw InvalidInput("sidecar patch layout does not match the CSV columns");
      if (j.contains("k") && j.at("k").get<Eigen::Index>() != k)
        throw InvalidInput("sidecar k does not match the CSV columns");
      data.patch_count = p;
    } catch (const nlohmann::json::exception& ex) {
      throw InvalidInput(std::string("malformed sidecar: ") + ex.what());
    }
  }
  data.validate();
  return data;
}

std::string dataset_csv(const LabeledDataset& data) {
  std::string out;
  for (Eigen::Index j = 0; j < data.input_dim(); ++j) out += (j ? ",x_" : "x_") + std::to_string(j + 1);
  for (Eigen::Index j = 0; j < data.output_dim(); ++j) out += ",y_" + std::to_string(j + 1);
  out += "\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.input_dim(); ++j) out += (j ? "," : "") + format_real(data.inputs(i, j));
    for (Eigen::Index j = 0; j < data.output_dim(); ++j) out += "," + format_real(data.targets(i, j));
    out += "\n";
  }
  return out;
}

void write_dataset(const std::string& path, const LabeledDataset& data) {
  write_text_file(path, dataset_csv(data));
  const std::string meta = "{\"d\": " + std::to_string(data.patch_dim()) + ", \"k\": " +
                           std::to_string(data.output_dim()) + ", \"p\": " + std::to_string(data.patch_count) + "}\n";
  write_text_file(path + ".meta.json", meta);
}

}  // namespace redex
