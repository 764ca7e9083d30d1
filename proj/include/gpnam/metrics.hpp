#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace gpnam {

enum class Metric { auc, error_rate, mse, rmse };

std::string_view to_string(Metric metric);

struct EvalResult {
  Metric metric = Metric::rmse;
  double value = 0.0;
  std::size_t n = 0;
};

/// {metric, value, n, dataset, model}
nlohmann::ordered_json to_json(const EvalResult& result, const std::string& dataset,
                               const std::string& model);

/// Mann-Whitney U / (n_pos n_neg) via average ranks, ties scored 1/2.
/// Throws undefined_metric when only one class is present.
double auc(std::span<const double> scores, std::span<const double> labels);

/// Fraction of rows where (score >= threshold) disagrees with the label.
double error_rate(std::span<const double> scores, std::span<const double> labels,
                  double threshold = 0.5);

double mse(std::span<const double> pred, std::span<const double> y);
double rmse(std::span<const double> pred, std::span<const double> y);

EvalResult evaluate(Metric metric, std::span<const double> pred, std::span<const double> y);

}  // namespace gpnam
