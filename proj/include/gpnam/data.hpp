#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpnam/common.hpp"
#include "gpnam/matrix.hpp"

namespace gpnam {

/// Ground-truth univariate shapes used by the synthetic generator.
enum class ShapeKind { sine3, square, tanh2, abs, identity };

std::string_view to_string(ShapeKind kind);
double evaluate_shape(ShapeKind kind, double x);

struct Dataset {
  Matrix X;
  std::vector<double> y;
  std::vector<std::string> feature_names;
  Task task = Task::regression;
  std::vector<FeatureEncoding> encodings;
  std::optional<Standardization> standardization;  // set once X is standardized
  std::string target;
  std::vector<std::string> class_labels;  // label text for codes 0 and 1
  std::vector<ShapeKind> true_shapes;     // synthetic data only

  std::size_t n() const noexcept { return X.rows(); }
  std::size_t d() const noexcept { return X.cols(); }
};

/// Raw RFC-4180 table: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::vector<std::string> feature_names;
  std::vector<FeatureEncoding> encodings;
};

nlohmann::ordered_json to_json(const IngestReport& report);

/// Numeric columns parse directly; any column with a non-numeric non-missing
/// cell becomes categorical with first-appearance ordinal codes. Rows with a
/// missing cell (empty, NA, NaN, ?, non-finite) are dropped and counted.
/// Classification targets must have exactly two distinct values, mapped to
/// {0, 1} in sorted order (numeric order when both parse as numbers).
Dataset load_csv(const std::filesystem::path& path, const std::string& target, Task task,
                 IngestReport* report = nullptr);
Dataset dataset_from_table(const CsvTable& table, const std::string& target, Task task,
                           IngestReport* report = nullptr);

/// Feature matrix from a table using known feature names and encodings, as
/// needed at predict time. Throws column_mismatch for a missing column and
/// invalid_argument for unknown categories or missing cells.
Matrix features_from_table(const CsvTable& table, std::span<const std::string> feature_names,
                           std::span<const FeatureEncoding> encodings);

bool is_missing_cell(std::string_view cell);
std::optional<double> parse_real(std::string_view cell);

/// Population mean / std per column; constant columns get scale 1.
Standardization fit_standardization(const Matrix& X);
Matrix apply_standardization(const Matrix& X, const Standardization& params);
Matrix invert_standardization(const Matrix& Z, const Standardization& params);

/// Standardized copy with the parameters attached.
Dataset standardize(const Dataset& data);

/// b_i = scale_factor * population std of standardized column i, or
/// scale_factor for constant columns. Requires a standardized dataset.
std::vector<double> kernel_widths(const Dataset& data, double scale_factor = 1.0);

struct DataSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> validation_index;
  std::vector<std::size_t> test_index;
};

/// Seeded permutation then contiguous slicing; part sizes are
/// round(f_train n), round(f_val n) and the remainder. Classification splits
/// slice each class separately so class rates carry over to every part.
DataSplit split(const Dataset& data, std::array<double, 3> fractions, std::uint64_t seed);

Dataset subset(const Dataset& data, std::span<const std::size_t> index);

/// X ~ U[-2, 2]^d, y = sum_i h_i(x_i) + N(0, noise_sd^2), h_i cycling through
/// sin(3x), x^2, tanh(2x), |x|, x.
Dataset synth_additive(std::size_t n, std::size_t d, double noise_sd, std::uint64_t seed);
Dataset synth_additive(std::size_t n, std::span<const ShapeKind> shapes, double noise_sd,
                       std::uint64_t seed);

/// Plain CSV with the feature names and the target as the last column.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace gpnam
