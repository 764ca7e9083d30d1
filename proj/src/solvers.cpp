#include "gpnam/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <thread>

#include "gpnam/error.hpp"
#include "gpnam/rng.hpp"

namespace gpnam {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// log(1 + exp(u)) without overflow.
double softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_labels(std::span<const double> labels, std::size_t n) {
  if (labels.size() != n) fail(ErrorKind::invalid_argument, "labels/features row mismatch");
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) fail(ErrorKind::invalid_argument, "labels must be 0 or 1");
  }
}

double regularizer_value(std::span<const double> w, double lambda, bool regularize_bias,
                         std::size_t n_total) {
  double sq = 0.0;
  for (std::size_t k = regularize_bias ? 0 : 1; k < w.size(); ++k) sq += w[k] * w[k];
  return lambda / (2.0 * static_cast<double>(n_total)) * sq;
}

template <typename Fn>
void for_each_row(std::span<const std::size_t> batch, std::size_t n, Fn&& fn) {
  if (batch.empty()) {
    for (std::size_t r = 0; r < n; ++r) fn(r);
  } else {
    for (std::size_t r : batch) fn(r);
  }
}

// Accumulates the data part of the batch gradient into `grad` (already sized).
void accumulate_logistic_gradient(const StackedFeatures& features,
                                  std::span<const double> labels, std::span<const double> w,
                                  std::span<const std::size_t> batch, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  std::size_t count = 0;
  for_each_row(batch, features.n(), [&](std::size_t r) {
    const auto phi = features.rows.row(r);
    const double t = 2.0 * labels[r] - 1.0;
    const double coef = -t * logistic(-t * dot(w, phi));
    for (std::size_t k = 0; k < phi.size(); ++k) grad[k] += coef * phi[k];
    ++count;
  });
  const double inv = 1.0 / static_cast<double>(count);
  for (double& g : grad) g *= inv;
}

}  // namespace

StackedFeatures stack_features(const FeatureBasis& basis, std::span<const double> widths,
                               const Matrix& X_std,
                               std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  const std::size_t d = X_std.cols();
  const std::size_t S = basis.size();
  if (widths.size() != d) fail(ErrorKind::invalid_argument, "stack_features: one width per column");
  for (double b : widths) {
    if (!(b > 0.0)) fail(ErrorKind::invalid_argument, "stack_features: widths must be > 0");
  }
  for (const auto& [i, j] : pairs) {
    if (i >= d || j >= d || i == j) {
      fail(ErrorKind::invalid_argument, "stack_features: bad interaction pair");
    }
  }
  const std::size_t dim = 1 + S * d + S * pairs.size();
  StackedFeatures out{Matrix(X_std.rows(), dim)};
  for (std::size_t r = 0; r < X_std.rows(); ++r) {
    auto row = out.rows.row(r);
    row[0] = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      feature_map_into(basis, X_std(r, i), widths[i], row.subspan(1 + S * i, S));
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      pair_feature_map_into(basis, X_std(r, i) / widths[i], X_std(r, j) / widths[j], 1.0,
                            row.subspan(1 + S * (d + k), S));
    }
  }
  return out;
}

void FitConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::invalid_argument, "lambda must be finite and >= 0");
  }
  if (!(sgd_lr > 0.0)) fail(ErrorKind::invalid_argument, "learning rate must be > 0");
  if (!(cg_tol > 0.0)) fail(ErrorKind::invalid_argument, "cg_tol must be > 0");
  if (sgd_batch == 0) fail(ErrorKind::invalid_argument, "batch size must be >= 1");
  if (!(sgd_lr_decay > 0.0)) fail(ErrorKind::invalid_argument, "lr decay must be > 0");
  if (chunk_rows == 0) fail(ErrorKind::invalid_argument, "chunk_rows must be >= 1");
  if (!(sgd_tol >= 0.0)) fail(ErrorKind::invalid_argument, "sgd_tol must be >= 0");
  if (sgd_tol_epochs == 0) fail(ErrorKind::invalid_argument, "sgd_tol_epochs must be >= 1");
}

std::string_view to_string(SolverMethod method) {
  return method == SolverMethod::cg ? "cg" : "sgd";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::early_stopping: return "early_stopping";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::trivial: return "trivial";
  }
  return "unknown";
}

nlohmann::ordered_json to_json(const SolverReport& report) {
  return {{"method", to_string(report.method)},
          {"iterations", report.iterations},
          {"final_residual_or_loss", report.final_residual_or_loss},
          {"tolerance", report.tolerance},
          {"converged", report.converged},
          {"stop_reason", to_string(report.stop_reason)},
          {"degenerate", report.degenerate},
          {"wall_time", report.wall_time}};
}

CgResult conjugate_gradients(const LinearOperator& apply_A, std::span<const double> v,
                             double tol, std::size_t max_iter) {
  const std::size_t dim = v.size();
  CgResult result;
  result.w.assign(dim, 0.0);
  const double v_norm = norm(v);
  if (v_norm == 0.0) return result;

  std::vector<double> r(v.begin(), v.end());
  std::vector<double> p = r;
  std::vector<double> Ap(dim);
  double rs = dot(r, r);
  result.residual = 1.0;

  while (result.iterations < max_iter && std::sqrt(rs) > tol * v_norm) {
    apply_A(p, Ap);
    const double curvature = dot(p, Ap);
    if (!std::isfinite(curvature) || curvature <= 0.0) {
      fail(ErrorKind::numeric_breakdown, "conjugate_gradients: non-positive or non-finite p^T A p");
    }
    const double alpha = rs / curvature;
    for (std::size_t k = 0; k < dim; ++k) {
      result.w[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    const double rs_next = dot(r, r);
    if (!std::isfinite(rs_next)) {
      fail(ErrorKind::numeric_breakdown, "conjugate_gradients: residual became non-finite");
    }
    ++result.iterations;
    result.residual = std::sqrt(rs_next) / v_norm;
    result.trace.push_back(result.residual);
    const double beta = rs_next / rs;
    rs = rs_next;
    for (std::size_t k = 0; k < dim; ++k) p[k] = r[k] + beta * p[k];
  }
  return result;
}

GramOperator::GramOperator(const StackedFeatures& features, double lambda, bool regularize_bias,
                           std::size_t threads, std::size_t chunk_rows)
    : features_(features),
      lambda_(lambda),
      regularize_bias_(regularize_bias),
      threads_(std::max<std::size_t>(threads, 1)),
      chunk_rows_(std::max<std::size_t>(chunk_rows, 1)) {}

void GramOperator::apply(std::span<const double> p, std::span<double> out) const {
  const std::size_t dim = features_.dim();
  const std::size_t n = features_.n();
  const std::size_t chunks = (n + chunk_rows_ - 1) / chunk_rows_;
  std::vector<double> partial(chunks * dim, 0.0);

  auto work = [&](std::size_t first_chunk, std::size_t stride) {
    for (std::size_t c = first_chunk; c < chunks; c += stride) {
      double* acc = partial.data() + c * dim;
      const std::size_t end = std::min(n, (c + 1) * chunk_rows_);
      for (std::size_t r = c * chunk_rows_; r < end; ++r) {
        const auto phi = features_.rows.row(r);
        const double t = dot(phi, p);
        for (std::size_t k = 0; k < dim; ++k) acc[k] += t * phi[k];
      }
    }
  };

  const std::size_t workers = std::min(threads_, chunks);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
  }

  for (std::size_t k = 0; k < dim; ++k) out[k] = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* acc = partial.data() + c * dim;
    for (std::size_t k = 0; k < dim; ++k) out[k] += acc[k];
  }
  for (std::size_t k = regularize_bias_ ? 0 : 1; k < dim; ++k) out[k] += lambda_ * p[k];
}

std::vector<double> weighted_feature_sum(const StackedFeatures& features,
                                         std::span<const double> y, std::size_t chunk_rows) {
  const std::size_t dim = features.dim();
  const std::size_t n = features.n();
  chunk_rows = std::max<std::size_t>(chunk_rows, 1);
  std::vector<double> out(dim, 0.0);
  std::vector<double> acc(dim);
  for (std::size_t start = 0; start < n; start += chunk_rows) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const std::size_t end = std::min(n, start + chunk_rows);
    for (std::size_t r = start; r < end; ++r) {
      const auto phi = features.rows.row(r);
      for (std::size_t k = 0; k < dim; ++k) acc[k] += y[r] * phi[k];
    }
    for (std::size_t k = 0; k < dim; ++k) out[k] += acc[k];
  }
  return out;
}

FitResult solve_ridge_cg(const StackedFeatures& features, std::span<const double> y,
                         const FitConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  if (features.n() == 0) fail(ErrorKind::invalid_argument, "solve_ridge_cg: no rows");
  if (y.size() != features.n()) {
    fail(ErrorKind::invalid_argument, "solve_ridge_cg: y length does not match rows");
  }
  for (double value : y) {
    if (!std::isfinite(value)) fail(ErrorKind::invalid_argument, "solve_ridge_cg: y not finite");
  }

  const std::size_t dim = features.dim();
  const std::size_t max_iter = cfg.cg_max_iter > 0 ? cfg.cg_max_iter : 2 * dim;
  FitResult result;
  result.report.method = SolverMethod::cg;
  result.report.tolerance = cfg.cg_tol;

  const std::vector<double> v = weighted_feature_sum(features, y, cfg.chunk_rows);
  const double v_norm = norm(v);
  result.w.assign(dim, 0.0);
  if (v_norm == 0.0) {
    result.report.converged = true;
    result.report.stop_reason = StopReason::trivial;
    result.report.wall_time = seconds_since(start);
    return result;
  }

  const GramOperator gram(features, cfg.lambda, cfg.regularize_bias, cfg.threads, cfg.chunk_rows);
  const LinearOperator op = [&gram](std::span<const double> p, std::span<double> out) {
    gram.apply(p, out);
  };

  // CG on the current residual; restarted when round-off lets the recurrence
  // residual drift below the true one.
  std::vector<double> Aw(dim);
  std::vector<double> residual(v);
  double true_rel = 1.0;
  for (int pass = 0; pass < 4; ++pass) {
    const std::size_t budget = max_iter - result.report.iterations;
    if (budget == 0) break;
    const CgResult step = conjugate_gradients(op, residual, cfg.cg_tol * v_norm / norm(residual),
                                              budget);
    for (std::size_t k = 0; k < dim; ++k) result.w[k] += step.w[k];
    result.report.iterations += step.iterations;
    const double scale = norm(residual) / v_norm;
    for (double rel : step.trace) result.report.trace.push_back(rel * scale);

    gram.apply(result.w, Aw);
    for (std::size_t k = 0; k < dim; ++k) residual[k] = v[k] - Aw[k];
    true_rel = norm(residual) / v_norm;
    if (true_rel <= cfg.cg_tol || step.iterations == 0) break;
  }

  result.report.final_residual_or_loss = true_rel;
  result.report.converged = true_rel <= cfg.cg_tol;
  result.report.stop_reason =
      result.report.converged ? StopReason::tolerance : StopReason::max_iterations;
  result.report.wall_time = seconds_since(start);
  return result;
}

double logistic_loss(const StackedFeatures& features, std::span<const double> labels,
                     std::span<const double> w, double lambda, bool regularize_bias,
                     std::span<const std::size_t> batch) {
  if (w.size() != features.dim()) fail(ErrorKind::invalid_argument, "logistic_loss: bad w size");
  double sum = 0.0;
  std::size_t count = 0;
  for_each_row(batch, features.n(), [&](std::size_t r) {
    const double t = 2.0 * labels[r] - 1.0;
    sum += softplus(-t * dot(w, features.rows.row(r)));
    ++count;
  });
  if (count == 0) fail(ErrorKind::invalid_argument, "logistic_loss: empty batch");
  return sum / static_cast<double>(count) +
         regularizer_value(w, lambda, regularize_bias, features.n());
}

std::vector<double> logistic_gradient(const StackedFeatures& features,
                                      std::span<const double> labels, std::span<const double> w,
                                      double lambda, bool regularize_bias,
                                      std::span<const std::size_t> batch) {
  if (w.size() != features.dim()) {
    fail(ErrorKind::invalid_argument, "logistic_gradient: bad w size");
  }
  if (features.n() == 0) fail(ErrorKind::invalid_argument, "logistic_gradient: no rows");
  std::vector<double> grad(w.size());
  accumulate_logistic_gradient(features, labels, w, batch, grad);
  const double reg = lambda / static_cast<double>(features.n());
  for (std::size_t k = regularize_bias ? 0 : 1; k < w.size(); ++k) grad[k] += reg * w[k];
  return grad;
}

FitResult fit_logistic_sgd(const StackedFeatures& features, std::span<const double> labels,
                           const FitConfig& cfg, std::optional<ValidationSet> validation,
                           std::span<const double> initial_w) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = features.n();
  const std::size_t dim = features.dim();
  if (n == 0) fail(ErrorKind::invalid_argument, "fit_logistic_sgd: no rows");
  check_labels(labels, n);
  if (validation) check_labels(validation->labels, validation->features.n());
  if (!initial_w.empty() && initial_w.size() != dim) {
    fail(ErrorKind::invalid_argument, "fit_logistic_sgd: initial weights have wrong size");
  }

  FitResult result;
  SolverReport& report = result.report;
  report.method = SolverMethod::sgd;
  report.tolerance = cfg.sgd_tol;
  const double positives = std::accumulate(labels.begin(), labels.end(), 0.0);
  report.degenerate = positives == 0.0 || positives == static_cast<double>(n);

  std::vector<double>& w = result.w;
  if (initial_w.empty()) {
    w.assign(dim, 0.0);
  } else {
    w.assign(initial_w.begin(), initial_w.end());
  }

  Rng rng(cfg.sgd_seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(dim);
  const double reg = cfg.lambda / static_cast<double>(n);
  double lr = cfg.sgd_lr;
  double best_loss = logistic_loss(features, labels, w, cfg.lambda, cfg.regularize_bias);
  std::size_t flat_epochs = 0;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_w;
  std::size_t stale_epochs = 0;
  report.stop_reason = StopReason::max_iterations;

  for (std::size_t epoch = 1; epoch <= cfg.sgd_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t first = 0; first < n; first += cfg.sgd_batch) {
      const std::size_t count = std::min(cfg.sgd_batch, n - first);
      const std::span<const std::size_t> batch(order.data() + first, count);
      accumulate_logistic_gradient(features, labels, w, batch, grad);
      for (std::size_t k = 0; k < dim; ++k) {
        const double penalty = (k == 0 && !cfg.regularize_bias) ? 0.0 : reg * w[k];
        w[k] -= lr * (grad[k] + penalty);
      }
    }
    for (double value : w) {
      if (!std::isfinite(value)) {
        fail(ErrorKind::numeric_breakdown, "fit_logistic_sgd: weights became non-finite");
      }
    }
    lr *= cfg.sgd_lr_decay;
    const double loss = logistic_loss(features, labels, w, cfg.lambda, cfg.regularize_bias);
    report.trace.push_back(loss);
    report.iterations = epoch;
    report.final_residual_or_loss = loss;

    if (validation) {
      const double val_loss =
          logistic_loss(validation->features, validation->labels, w, 0.0, false);
      if (val_loss < best_val) {
        best_val = val_loss;
        best_w = w;
        stale_epochs = 0;
      } else if (++stale_epochs >= cfg.sgd_patience) {
        w = best_w;
        report.final_residual_or_loss =
            logistic_loss(features, labels, w, cfg.lambda, cfg.regularize_bias);
        report.stop_reason = StopReason::early_stopping;
        break;
      }
    }
    if (loss < best_loss - cfg.sgd_tol) {
      flat_epochs = 0;
    } else if (++flat_epochs >= cfg.sgd_tol_epochs) {
      report.stop_reason = StopReason::tolerance;
      break;
    }
    best_loss = std::min(best_loss, loss);
  }
  report.converged = report.stop_reason != StopReason::max_iterations;
  report.wall_time = seconds_since(start);
  return result;
}

}  // namespace gpnam
