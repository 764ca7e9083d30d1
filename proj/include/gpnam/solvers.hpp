#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpnam/matrix.hpp"
#include "gpnam/rff.hpp"

namespace gpnam {

/// Rows phi_n = [1, phi(x_1n), ..., phi(x_dn), phi(x_in, x_jn) for each pair].
/// Column 0 is the bias coordinate.
struct StackedFeatures {
  Matrix rows;

  std::size_t n() const noexcept { return rows.rows(); }
  std::size_t dim() const noexcept { return rows.cols(); }
};

/// `X_std` holds standardized inputs, one column per width. Pairs index into
/// those columns and use per-coordinate widths (x_i / b_i, x_j / b_j).
StackedFeatures stack_features(const FeatureBasis& basis, std::span<const double> widths,
                               const Matrix& X_std,
                               std::span<const std::pair<std::size_t, std::size_t>> pairs = {});

struct FitConfig {
  double lambda = 1.0;
  double cg_tol = 1e-8;
  std::size_t cg_max_iter = 0;  // 0 means 2 * D*
  double sgd_lr = 0.1;
  std::size_t sgd_batch = 256;
  std::size_t sgd_epochs = 100;
  double sgd_lr_decay = 0.99;
  double sgd_tol = 1e-3;          // minimum training-loss improvement per epoch
  std::size_t sgd_tol_epochs = 5; // consecutive epochs below sgd_tol that end SGD
  std::size_t sgd_patience = 10;  // epochs without validation improvement
  std::uint64_t sgd_seed = 0;
  bool regularize_bias = false;
  std::size_t threads = 1;
  std::size_t chunk_rows = 1024;  // reduction granularity; fixes summation order

  void validate() const;
};

enum class SolverMethod { cg, sgd };
enum class StopReason { tolerance, early_stopping, max_iterations, trivial };

std::string_view to_string(SolverMethod method);
std::string_view to_string(StopReason reason);

struct SolverReport {
  SolverMethod method = SolverMethod::cg;
  std::size_t iterations = 0;  // CG iterations or SGD epochs
  double final_residual_or_loss = 0.0;
  double tolerance = 0.0;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iterations;
  bool degenerate = false;     // single-class logistic data
  double wall_time = 0.0;      // seconds
  std::vector<double> trace;   // relative residuals (CG) or per-epoch losses (SGD)
};

nlohmann::ordered_json to_json(const SolverReport& report);

struct FitResult {
  std::vector<double> w;
  SolverReport report;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  std::vector<double> w;
  std::size_t iterations = 0;
  double residual = 0.0;  // relative: ||A w - v|| / ||v||
  std::vector<double> trace;
};

/// Plain conjugate gradients from w = 0 on an SPD operator. Stops when the
/// recurrence residual satisfies ||r|| <= tol ||v|| or after max_iter steps.
/// Throws numeric_breakdown on a non-finite or non-positive curvature step.
CgResult conjugate_gradients(const LinearOperator& apply_A, std::span<const double> v,
                             double tol, std::size_t max_iter);

/// Matrix-free (lambda I' + sum_n phi_n phi_n^T) with I' excluding the bias
/// coordinate unless regularize_bias. Partial sums are taken over fixed row
/// chunks and added in chunk order, so results do not depend on thread count.
class GramOperator {
 public:
  GramOperator(const StackedFeatures& features, double lambda, bool regularize_bias,
               std::size_t threads = 1, std::size_t chunk_rows = 1024);

  void apply(std::span<const double> p, std::span<double> out) const;
  std::size_t dim() const noexcept { return features_.dim(); }

 private:
  const StackedFeatures& features_;
  double lambda_;
  bool regularize_bias_;
  std::size_t threads_;
  std::size_t chunk_rows_;
};

/// sum_n y_n phi_n, chunked like GramOperator.
std::vector<double> weighted_feature_sum(const StackedFeatures& features,
                                         std::span<const double> y, std::size_t chunk_rows = 1024);

FitResult solve_ridge_cg(const StackedFeatures& features, std::span<const double> y,
                         const FitConfig& cfg);

/// (1/|B|) sum_{n in B} log(1 + exp(-t_n w^T phi_n)) + lambda / (2 n_total) ||w_reg||^2
/// with t_n = 2 y_n - 1 and w_reg excluding the bias unless regularize_bias.
/// An empty `batch` means all rows.
double logistic_loss(const StackedFeatures& features, std::span<const double> labels,
                     std::span<const double> w, double lambda, bool regularize_bias,
                     std::span<const std::size_t> batch = {});

std::vector<double> logistic_gradient(const StackedFeatures& features,
                                      std::span<const double> labels, std::span<const double> w,
                                      double lambda, bool regularize_bias,
                                      std::span<const std::size_t> batch = {});

struct ValidationSet {
  const StackedFeatures& features;
  std::span<const double> labels;
};

/// Mini-batch SGD with per-epoch reshuffling (seeded) and multiplicative
/// learning-rate decay. Stops when the full training objective has failed to
/// beat its best value by more than sgd_tol for sgd_tol_epochs consecutive
/// epochs, or when a validation set is given and its loss has not improved for
/// sgd_patience epochs (best weights restored).
FitResult fit_logistic_sgd(const StackedFeatures& features, std::span<const double> labels,
                           const FitConfig& cfg,
                           std::optional<ValidationSet> validation = std::nullopt,
                           std::span<const double> initial_w = {});

}  // namespace gpnam
