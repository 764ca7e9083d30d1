#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gpnam/data.hpp"
#include "gpnam/metrics.hpp"
#include "gpnam/model.hpp"
#include "gpnam/rff.hpp"
#include "gpnam/solvers.hpp"

namespace gpnam {

inline const std::vector<double> kDefaultBandwidthGrid = {0.25, 0.5, 1.0, 2.0, 4.0};

struct TrainOptions {
  std::size_t sample_size = 100;
  BasisMode mode = BasisMode::grid;
  std::uint64_t seed = 0;
  std::optional<double> bandwidth_scale = 1.0;  // nullopt: search the grid on validation
  std::vector<double> bandwidth_grid = kDefaultBandwidthGrid;
  FitConfig fit;
  std::vector<std::pair<std::size_t, std::size_t>> interactions;
};

struct BandwidthTrial {
  double scale = 0.0;
  double validation_metric = 0.0;
};

struct TrainOutcome {
  GPNAMModel model;
  SolverReport report;
  std::optional<EvalResult> validation;
  std::vector<BandwidthTrial> trials;
};

/// RMSE for regression, AUC for classification.
Metric primary_metric(Task task);

/// Standardize on the training rows, set widths, build the basis, stack
/// features, then solve with CG (regression) or logistic SGD (classification).
/// Both `train` and `validation` are in original units.
TrainOutcome train_gpnam(const Dataset& train, const Dataset* validation,
                         const TrainOptions& options);

/// Regression: mse and rmse. Classification: auc (when both classes occur)
/// and error_rate.
std::vector<EvalResult> evaluate_model(const GPNAMModel& model, const Dataset& data);

}  // namespace gpnam
