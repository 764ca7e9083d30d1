#include "gpnam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gpnam/error.hpp"

namespace gpnam {
namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* where) {
  if (a.size() != b.size()) {
    fail(ErrorKind::invalid_argument, std::string(where) + ": length mismatch");
  }
  if (a.empty()) fail(ErrorKind::invalid_argument, std::string(where) + ": empty input");
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::auc: return "auc";
    case Metric::error_rate: return "error_rate";
    case Metric::mse: return "mse";
    case Metric::rmse: return "rmse";
  }
  return "?";
}

nlohmann::ordered_json to_json(const EvalResult& result, const std::string& dataset,
                               const std::string& model) {
  return {{"metric", to_string(result.metric)},
          {"value", result.value},
          {"n", result.n},
          {"dataset", dataset},
          {"model", model}};
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  check_lengths(scores, labels, "auc");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    // ranks start+1 .. end share their average
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) {
      if (labels[order[k]] == 1.0) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    start = end;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    fail(ErrorKind::undefined_metric, "auc: both classes must be present");
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double error_rate(std::span<const double> scores, std::span<const double> labels,
                  double threshold) {
  check_lengths(scores, labels, "error_rate");
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const double predicted = scores[k] >= threshold ? 1.0 : 0.0;
    if (predicted != labels[k]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

double mse(std::span<const double> pred, std::span<const double> y) {
  check_lengths(pred, y, "mse");
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double diff = pred[k] - y[k];
    sum += diff * diff;
  }
  return sum / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> y) {
  return std::sqrt(mse(pred, y));
}

EvalResult evaluate(Metric metric, std::span<const double> pred, std::span<const double> y) {
  EvalResult result{.metric = metric, .n = pred.size()};
  switch (metric) {
    case Metric::auc: result.value = auc(pred, y); break;
    case Metric::error_rate: result.value = error_rate(pred, y); break;
    case Metric::mse: result.value = mse(pred, y); break;
    case Metric::rmse: result.value = rmse(pred, y); break;
  }
  return result;
}

}  // namespace gpnam
