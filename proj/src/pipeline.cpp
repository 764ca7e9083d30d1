#include "gpnam/pipeline.hpp"

#include <algorithm>

#include "gpnam/error.hpp"

namespace gpnam {
namespace {

bool better(Metric metric, double candidate, double incumbent) {
  return metric == Metric::auc ? candidate > incumbent : candidate < incumbent;
}

EvalResult validation_score(const GPNAMModel& model, const Dataset& validation) {
  const std::vector<double> pred = predict(model, validation.X);
  const Metric metric = primary_metric(model.task);
  if (metric == Metric::auc) {
    const auto positives = std::count(validation.y.begin(), validation.y.end(), 1.0);
    if (positives == 0 || static_cast<std::size_t>(positives) == validation.y.size()) {
      return evaluate(Metric::error_rate, pred, validation.y);
    }
  }
  return evaluate(metric, pred, validation.y);
}

TrainOutcome fit_once(const Dataset& train, const Dataset* validation, const TrainOptions& options,
                      double scale) {
  const Dataset standardized = standardize(train);
  const std::vector<double> widths = kernel_widths(standardized, scale);
  FeatureBasis basis =
      build_basis(options.sample_size, options.mode, options.seed, !options.interactions.empty());
  const StackedFeatures features =
      stack_features(basis, widths, standardized.X, options.interactions);

  FitResult fit;
  if (train.task == Task::regression) {
    fit = solve_ridge_cg(features, train.y, options.fit);
  } else if (validation != nullptr) {
    const Matrix val_std = apply_standardization(validation->X, *standardized.standardization);
    const StackedFeatures val_features =
        stack_features(basis, widths, val_std, options.interactions);
    fit = fit_logistic_sgd(features, train.y, options.fit,
                           ValidationSet{val_features, validation->y});
  } else {
    fit = fit_logistic_sgd(features, train.y, options.fit);
  }

  const std::size_t S = options.sample_size;
  const std::size_t d = train.d();
  GPNAMModel model = make_zero_model(std::move(basis), d, train.task);
  model.w0 = fit.w[0];
  for (std::size_t i = 0; i < d; ++i) {
    std::copy_n(fit.w.begin() + static_cast<std::ptrdiff_t>(1 + S * i), S, model.weights.row(i).begin());
  }
  for (std::size_t k = 0; k < options.interactions.size(); ++k) {
    const auto begin = fit.w.begin() + static_cast<std::ptrdiff_t>(1 + S * (d + k));
    model.interactions.push_back({.i = options.interactions[k].first,
                                  .j = options.interactions[k].second,
                                  .w = std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(S))});
  }
  model.widths = widths;
  model.feature_names = train.feature_names;
  model.standardization = *standardized.standardization;
  model.target = train.target;
  model.class_labels = train.class_labels;
  model.encodings = train.encodings;
  model.bandwidth_scale = scale;
  model.lambda = options.fit.lambda;
  for (std::size_t i = 0; i < d; ++i) {
    const std::vector<double> column = train.X.column(i);
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    model.feature_ranges.push_back({*lo, *hi});
  }
  compute_centering(model, train.X);
  model.validate();

  TrainOutcome outcome{.model = std::move(model), .report = std::move(fit.report)};
  if (validation != nullptr && validation->n() > 0) {
    outcome.validation = validation_score(outcome.model, *validation);
  }
  return outcome;
}

}  // namespace

Metric primary_metric(Task task) {
  return task == Task::regression ? Metric::rmse : Metric::auc;
}

TrainOutcome train_gpnam(const Dataset& train, const Dataset* validation,
                         const TrainOptions& options) {
  if (train.n() == 0) fail(ErrorKind::invalid_argument, "train: no training rows");
  if (options.sample_size == 0) fail(ErrorKind::invalid_argument, "train: S must be >= 1");
  for (const auto& [i, j] : options.interactions) {
    if (i >= j || j >= train.d()) {
      fail(ErrorKind::invalid_argument, "train: interaction pairs need i < j < d");
    }
  }
  if (options.bandwidth_scale) {
    return fit_once(train, validation, options, *options.bandwidth_scale);
  }
  if (validation == nullptr || validation->n() == 0) {
    fail(ErrorKind::configuration, "train: automatic bandwidth needs a validation split");
  }
  if (options.bandwidth_grid.empty()) {
    fail(ErrorKind::configuration, "train: empty bandwidth grid");
  }

  std::optional<TrainOutcome> best;
  std::vector<BandwidthTrial> trials;
  for (double scale : options.bandwidth_grid) {
    TrainOutcome candidate = fit_once(train, validation, options, scale);
    trials.push_back({scale, candidate.validation->value});
    if (!best || better(candidate.validation->metric, candidate.validation->value,
                        best->validation->value)) {
      best = std::move(candidate);
    }
  }
  best->trials = std::move(trials);
  return std::move(*best);
}

std::vector<EvalResult> evaluate_model(const GPNAMModel& model, const Dataset& data) {
  const std::vector<double> pred = predict(model, data.X);
  std::vector<EvalResult> results;
  if (model.task == Task::regression) {
    results.push_back(evaluate(Metric::mse, pred, data.y));
    results.push_back(evaluate(Metric::rmse, pred, data.y));
    return results;
  }
  const auto positives = std::count(data.y.begin(), data.y.end(), 1.0);
  if (positives > 0 && static_cast<std::size_t>(positives) < data.y.size()) {
    results.push_back(evaluate(Metric::auc, pred, data.y));
  }
  results.push_back(evaluate(Metric::error_rate, pred, data.y));
  return results;
}

}  // namespace gpnam
