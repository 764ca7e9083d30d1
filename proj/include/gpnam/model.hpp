#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpnam/common.hpp"
#include "gpnam/matrix.hpp"
#include "gpnam/rff.hpp"

namespace gpnam {

inline constexpr int kModelSchemaVersion = 1;

/// Pairwise term f_ij(x_i, x_j) = phi(x_i, x_j)^T w.
struct Interaction {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<double> w;
  double offset = 0.0;
  bool operator==(const Interaction&) const = default;
};

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const FeatureRange&) const = default;
};

/// A trained additive model
///   g(x) = w0 + sum_i phi(s_i(x_i); b_i)^T W_i + sum_(i,j) phi(s_i(x_i)/b_i, s_j(x_j)/b_j)^T w_ij
/// where s_i is the stored standardization and W_i is row i of W (d x S).
///
/// `centering_offsets[i]` is the training mean of f_i; the centered shape
/// functions are f_i - offset_i and the matching intercept is
/// w0 + sum(offsets). Offsets never change g.
struct GPNAMModel {
  FeatureBasis basis;
  Task task = Task::regression;
  double w0 = 0.0;
  Matrix weights;                // d x S
  std::vector<double> widths;    // b_i
  std::vector<std::string> feature_names;
  Standardization standardization;
  std::vector<double> centering_offsets;
  std::vector<Interaction> interactions;

  // Provenance and ingestion metadata carried in the model file.
  std::string target;
  std::vector<std::string> class_labels;  // [negative, positive] for classification
  std::vector<FeatureEncoding> encodings;
  std::vector<FeatureRange> feature_ranges;
  double bandwidth_scale = 1.0;
  double lambda = 1.0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();

  std::size_t num_features() const noexcept { return feature_names.size(); }
  std::size_t basis_size() const noexcept { return basis.size(); }

  /// Throws invariant_violation when shapes disagree or a width/scale is not > 0.
  void validate() const;
};

/// Builds a model with zero weights, identity standardization, unit widths and
/// feature names x1..xd around an existing basis.
GPNAMModel make_zero_model(FeatureBasis basis, std::size_t d, Task task);

/// Uncentered shape value f_i at x given in original units.
double shape_value(const GPNAMModel& model, std::size_t i, double x);
double interaction_value(const GPNAMModel& model, const Interaction& term, double x_i,
                         double x_j);

double predict_raw(const GPNAMModel& model, std::span<const double> x);

/// Row-wise predict_raw; classification applies the logistic sigmoid.
std::vector<double> predict(const GPNAMModel& model, const Matrix& X);

double sigmoid(double g);

/// Recomputes centering offsets as the mean of each f_i (and each f_ij) over
/// the given rows, in original units.
void compute_centering(GPNAMModel& model, const Matrix& X_original);

/// w0 + sum of all offsets: the bias that pairs with centered shape functions.
double centered_intercept(const GPNAMModel& model);

struct ShapeTable {
  std::size_t feature_index = 0;
  std::string feature_name;
  std::vector<double> grid;    // original units
  std::vector<double> values;  // f_i on grid, minus offset when centered
  double offset = 0.0;
};

ShapeTable shape_function(const GPNAMModel& model, std::size_t i, std::span<const double> grid,
                          bool centered = true);

/// `points` evenly spaced values spanning the stored training range of feature i.
std::vector<double> default_shape_grid(const GPNAMModel& model, std::size_t i,
                                       std::size_t points);

/// S d + 1 + S per interaction.
std::size_t param_count(std::size_t sample_size, std::size_t d, std::size_t interactions = 0);
std::size_t param_count(const GPNAMModel& model);

nlohmann::ordered_json to_json(const GPNAMModel& model);
GPNAMModel model_from_json(const nlohmann::json& doc);

std::string serialize_model(const GPNAMModel& model);
GPNAMModel parse_model(const std::string& text);

/// Writes atomically (temp file + rename).
void save_model(const GPNAMModel& model, const std::filesystem::path& path);
GPNAMModel load_model(const std::filesystem::path& path);

/// Concatenated `feature,x,f` CSV, 9 significant digits, LF endings.
void write_shape_csv(std::ostream& out, std::span<const ShapeTable> tables);

}  // namespace gpnam
