#include "gpnam/model.hpp"

#include <cmath>
#include <ostream>

#include "gpnam/error.hpp"
#include "gpnam/io.hpp"

namespace gpnam {
namespace {

using ordered_json = nlohmann::ordered_json;

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::invariant_violation, "model invariant violated: " + what);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void GPNAMModel::validate() const {
  const std::size_t d = num_features();
  const std::size_t S = basis.size();
  require(weights.rows() == d && weights.cols() == S, "W must be d x S");
  require(widths.size() == d, "one kernel width per feature");
  for (double b : widths) require(std::isfinite(b) && b > 0.0, "kernel widths must be > 0");
  require(standardization.means.size() == d && standardization.scales.size() == d,
          "standardization must have d entries");
  for (double s : standardization.scales) {
    require(std::isfinite(s) && s > 0.0, "standardization scales must be > 0");
  }
  for (double m : standardization.means) require(std::isfinite(m), "means must be finite");
  require(centering_offsets.size() == d, "one centering offset per feature");
  require(std::isfinite(w0), "w0 must be finite");
  for (double w : weights.data()) require(std::isfinite(w), "weights must be finite");
  for (const auto& term : interactions) {
    require(basis.has_pairs(), "interactions need pairwise frequencies");
    require(term.i < term.j && term.j < d, "interaction indices must satisfy i < j < d");
    require(term.w.size() == S, "interaction weights must have length S");
  }
  require(encodings.empty() || encodings.size() == d, "encodings must be empty or d");
  require(feature_ranges.empty() || feature_ranges.size() == d, "ranges must be empty or d");
  if (task == Task::binary_classification) {
    require(class_labels.empty() || class_labels.size() == 2, "two class labels");
  }
}

GPNAMModel make_zero_model(FeatureBasis basis, std::size_t d, Task task) {
  GPNAMModel model{.basis = std::move(basis)};
  const std::size_t S = model.basis.size();
  model.task = task;
  model.weights = Matrix(d, S);
  model.widths.assign(d, 1.0);
  for (std::size_t i = 0; i < d; ++i) model.feature_names.push_back("x" + std::to_string(i + 1));
  model.standardization.means.assign(d, 0.0);
  model.standardization.scales.assign(d, 1.0);
  model.centering_offsets.assign(d, 0.0);
  return model;
}

double shape_value(const GPNAMModel& model, std::size_t i, double x) {
  std::vector<double> phi(model.basis.size());
  feature_map_into(model.basis, model.standardization.forward(i, x), model.widths[i], phi);
  return dot(phi, model.weights.row(i));
}

double interaction_value(const GPNAMModel& model, const Interaction& term, double x_i,
                         double x_j) {
  std::vector<double> phi(model.basis.size());
  const double u = model.standardization.forward(term.i, x_i) / model.widths[term.i];
  const double v = model.standardization.forward(term.j, x_j) / model.widths[term.j];
  pair_feature_map_into(model.basis, u, v, 1.0, phi);
  return dot(phi, term.w);
}

double predict_raw(const GPNAMModel& model, std::span<const double> x) {
  const std::size_t d = model.num_features();
  if (x.size() != d) {
    fail(ErrorKind::invalid_argument, "predict_raw: expected " + std::to_string(d) +
                                          " features, got " + std::to_string(x.size()));
  }
  std::vector<double> phi(model.basis.size());
  double g = model.w0;
  for (std::size_t i = 0; i < d; ++i) {
    feature_map_into(model.basis, model.standardization.forward(i, x[i]), model.widths[i], phi);
    g += dot(phi, model.weights.row(i));
  }
  for (const auto& term : model.interactions) {
    g += interaction_value(model, term, x[term.i], x[term.j]);
  }
  return g;
}

double sigmoid(double g) {
  if (g >= 0.0) return 1.0 / (1.0 + std::exp(-g));
  const double e = std::exp(g);
  return e / (1.0 + e);
}

std::vector<double> predict(const GPNAMModel& model, const Matrix& X) {
  if (X.cols() != model.num_features()) {
    fail(ErrorKind::invalid_argument, "predict: column count does not match the model");
  }
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const double g = predict_raw(model, X.row(r));
    out[r] = model.task == Task::binary_classification ? sigmoid(g) : g;
  }
  return out;
}

void compute_centering(GPNAMModel& model, const Matrix& X_original) {
  const std::size_t d = model.num_features();
  if (X_original.cols() != d) {
    fail(ErrorKind::invalid_argument, "compute_centering: column count mismatch");
  }
  if (X_original.rows() == 0) {
    fail(ErrorKind::invalid_argument, "compute_centering: no rows");
  }
  const double n = static_cast<double>(X_original.rows());
  model.centering_offsets.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < X_original.rows(); ++r) sum += shape_value(model, i, X_original(r, i));
    model.centering_offsets[i] = sum / n;
  }
  for (auto& term : model.interactions) {
    double sum = 0.0;
    for (std::size_t r = 0; r < X_original.rows(); ++r) {
      sum += interaction_value(model, term, X_original(r, term.i), X_original(r, term.j));
    }
    term.offset = sum / n;
  }
}

double centered_intercept(const GPNAMModel& model) {
  double intercept = model.w0;
  for (double offset : model.centering_offsets) intercept += offset;
  for (const auto& term : model.interactions) intercept += term.offset;
  return intercept;
}

ShapeTable shape_function(const GPNAMModel& model, std::size_t i, std::span<const double> grid,
                          bool centered) {
  if (i >= model.num_features()) {
    fail(ErrorKind::invalid_argument, "shape_function: feature index out of range");
  }
  ShapeTable table;
  table.feature_index = i;
  table.feature_name = model.feature_names[i];
  table.grid.assign(grid.begin(), grid.end());
  table.offset = centered ? model.centering_offsets[i] : 0.0;
  table.values.reserve(grid.size());
  for (double x : grid) {
    if (!std::isfinite(x)) fail(ErrorKind::invalid_argument, "shape_function: grid not finite");
    table.values.push_back(shape_value(model, i, x) - table.offset);
  }
  return table;
}

std::vector<double> default_shape_grid(const GPNAMModel& model, std::size_t i,
                                       std::size_t points) {
  if (points < 2) fail(ErrorKind::invalid_argument, "shape grid needs at least 2 points");
  if (i >= model.num_features() || model.feature_ranges.size() != model.num_features()) {
    fail(ErrorKind::invalid_argument, "shape grid: no training range for feature");
  }
  const auto [lo, hi] = model.feature_ranges[i];
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) grid[k] = lo + step * static_cast<double>(k);
  grid.back() = hi;
  return grid;
}

std::size_t param_count(std::size_t sample_size, std::size_t d, std::size_t interactions) {
  return sample_size * d + 1 + sample_size * interactions;
}

std::size_t param_count(const GPNAMModel& model) {
  return param_count(model.basis.size(), model.num_features(), model.interactions.size());
}

nlohmann::ordered_json to_json(const GPNAMModel& model) {
  ordered_json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["task"] = to_string(model.task);
  doc["S"] = model.basis.size();
  doc["mode"] = to_string(model.basis.mode());
  doc["seed"] = model.basis.seed();
  doc["d"] = model.num_features();
  doc["feature_names"] = model.feature_names;
  doc["standardization"] = {{"means", model.standardization.means},
                            {"scales", model.standardization.scales}};
  doc["b"] = model.widths;
  doc["w0"] = model.w0;
  doc["W"] = model.weights.data();
  doc["centering_offsets"] = model.centering_offsets;
  if (!model.interactions.empty()) {
    ordered_json terms = ordered_json::array();
    for (const auto& term : model.interactions) {
      terms.push_back({{"i", term.i}, {"j", term.j}, {"w", term.w}, {"offset", term.offset}});
    }
    doc["interactions"] = std::move(terms);
  }
  doc["target"] = model.target;
  doc["class_labels"] = model.class_labels;
  ordered_json encodings = ordered_json::array();
  for (const auto& enc : model.encodings) {
    encodings.push_back({{"categorical", enc.categorical}, {"categories", enc.categories}});
  }
  doc["encodings"] = std::move(encodings);
  ordered_json ranges = ordered_json::array();
  for (const auto& range : model.feature_ranges) ranges.push_back({range.min, range.max});
  doc["feature_ranges"] = std::move(ranges);
  doc["bandwidth_scale"] = model.bandwidth_scale;
  doc["lambda"] = model.lambda;
  doc["config"] = model.config;
  return doc;
}

GPNAMModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version")) {
    fail(ErrorKind::malformed_file, "model file: missing schema_version");
  }
  if (!doc["schema_version"].is_number_integer()) {
    fail(ErrorKind::malformed_file, "model file: schema_version must be an integer");
  }
  const int version = doc["schema_version"].get<int>();
  if (version != kModelSchemaVersion) {
    fail(ErrorKind::version_mismatch,
         "model file: unsupported schema_version " + std::to_string(version));
  }
  try {
    const auto S = doc.at("S").get<std::size_t>();
    const auto d = doc.at("d").get<std::size_t>();
    require(S >= 1, "S must be >= 1");
    const BasisMode mode = parse_basis_mode(doc.at("mode").get<std::string>());
    const auto seed = doc.at("seed").get<std::uint64_t>();
    const bool has_interactions = doc.contains("interactions") && !doc["interactions"].empty();

    GPNAMModel model{.basis = build_basis(S, mode, seed, has_interactions)};
    model.task = parse_task(doc.at("task").get<std::string>());
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.standardization.means = doc.at("standardization").at("means").get<std::vector<double>>();
    model.standardization.scales =
        doc.at("standardization").at("scales").get<std::vector<double>>();
    model.widths = doc.at("b").get<std::vector<double>>();
    model.w0 = doc.at("w0").get<double>();
    auto flat = doc.at("W").get<std::vector<double>>();
    if (flat.size() != d * S || model.feature_names.size() != d) {
      fail(ErrorKind::malformed_file, "model file: W / feature_names do not match d and S");
    }
    model.weights = Matrix(d, S, std::move(flat));
    model.centering_offsets = doc.at("centering_offsets").get<std::vector<double>>();
    if (has_interactions) {
      for (const auto& term : doc["interactions"]) {
        model.interactions.push_back({.i = term.at("i").get<std::size_t>(),
                                      .j = term.at("j").get<std::size_t>(),
                                      .w = term.at("w").get<std::vector<double>>(),
                                      .offset = term.at("offset").get<double>()});
      }
    }
    model.target = doc.value("target", std::string{});
    model.class_labels = doc.value("class_labels", std::vector<std::string>{});
    if (doc.contains("encodings")) {
      for (const auto& enc : doc["encodings"]) {
        model.encodings.push_back(
            {.categorical = enc.at("categorical").get<bool>(),
             .categories = enc.at("categories").get<std::vector<std::string>>()});
      }
    }
    if (doc.contains("feature_ranges")) {
      for (const auto& range : doc["feature_ranges"]) {
        model.feature_ranges.push_back({range.at(0).get<double>(), range.at(1).get<double>()});
      }
    }
    model.bandwidth_scale = doc.value("bandwidth_scale", 1.0);
    model.lambda = doc.value("lambda", 1.0);
    if (doc.contains("config")) model.config = doc["config"];
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_file, std::string("model file: ") + e.what());
  }
}

std::string serialize_model(const GPNAMModel& model) {
  model.validate();
  const bool has_pairs = !model.interactions.empty();
  if (build_basis(model.basis.size(), model.basis.mode(), model.basis.seed(), has_pairs) !=
      model.basis) {
    fail(ErrorKind::invalid_argument,
         "save: basis is not reproducible from (S, mode, seed) and cannot be serialized");
  }
  return to_json(model).dump(1) + "\n";
}

GPNAMModel parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::malformed_file, std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model(const GPNAMModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

GPNAMModel load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path));
}

void write_shape_csv(std::ostream& out, std::span<const ShapeTable> tables) {
  out << "feature,x,f\n";
  for (const auto& table : tables) {
    const std::string name = csv_field(table.feature_name);
    for (std::size_t k = 0; k < table.grid.size(); ++k) {
      out << name << ',' << format_real(table.grid[k], 9) << ','
          << format_real(table.values[k], 9) << '\n';
    }
  }
}

}  // namespace gpnam
