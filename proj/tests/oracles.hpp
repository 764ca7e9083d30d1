#pragma once

// Independent reference computations used by the tests. None of these call
// into the library code they check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpnam/model.hpp"

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Quantile by bisection on the erf-based CDF.
inline double inverse_normal_cdf(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 2) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_mse(std::span<const double> pred, std::span<const double> y) {
  std::vector<double> sq(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) sq[i] = (pred[i] - y[i]) * (pred[i] - y[i]);
  return pairwise_sum(sq) / static_cast<double>(sq.size());
}

// O(n_pos n_neg) pair counting.
inline double auc_by_pairs(std::span<const double> scores, std::span<const double> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1.0) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0.0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline Eigen::MatrixXd to_eigen(const gpnam::Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  }
  return out;
}

// Dense solve of (lambda I' + Phi^T Phi) w = Phi^T y.
inline std::vector<double> dense_ridge(const gpnam::Matrix& phi, std::span<const double> y,
                                       double lambda, bool regularize_bias) {
  const Eigen::MatrixXd P = to_eigen(phi);
  Eigen::VectorXd yy(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) yy(i) = y[i];
  Eigen::MatrixXd A = P.transpose() * P;
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    if (k > 0 || regularize_bias) A(k, k) += lambda;
  }
  const Eigen::VectorXd w = A.ldlt().solve(P.transpose() * yy);
  return {w.data(), w.data() + w.size()};
}

// Full-batch Newton on the regularized logistic objective
//   (1/n) sum log(1 + exp(-t w.phi)) + lambda/(2n) ||w without bias||^2.
inline std::vector<double> newton_logistic(const gpnam::Matrix& phi, std::span<const double> y,
                                           double lambda, int iterations = 50) {
  const auto n = static_cast<Eigen::Index>(phi.rows());
  const auto D = static_cast<Eigen::Index>(phi.cols());
  const Eigen::MatrixXd P = to_eigen(phi);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd reg = Eigen::VectorXd::Constant(D, lambda / static_cast<double>(n));
  reg(0) = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd grad = reg.cwiseProduct(w);
    Eigen::MatrixXd hess = reg.asDiagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = 2.0 * y[i] - 1.0;
      const double m = t * P.row(i).dot(w);
      const double s = 1.0 / (1.0 + std::exp(m));
      grad -= (t * s / static_cast<double>(n)) * P.row(i).transpose();
      hess += (s * (1.0 - s) / static_cast<double>(n)) * P.row(i).transpose() * P.row(i);
    }
    hess.diagonal().array() += 1e-12;
    w -= hess.ldlt().solve(grad);
  }
  return {w.data(), w.data() + w.size()};
}

// g(x) evaluated by plain loops straight from the model fields.
inline double naive_predict_raw(const gpnam::GPNAMModel& m, std::span<const double> x) {
  const std::size_t S = m.basis.size();
  const auto z = m.basis.z();
  const auto c = m.basis.c();
  const double scale = std::sqrt(2.0 / static_cast<double>(S));
  double g = m.w0;
  for (std::size_t i = 0; i < m.num_features(); ++i) {
    const double s = (x[i] - m.standardization.means[i]) / m.standardization.scales[i];
    for (std::size_t k = 0; k < S; ++k) {
      g += m.weights(i, k) * scale * std::cos(z[k] * s / m.widths[i] + c[k]);
    }
  }
  for (const auto& term : m.interactions) {
    const double si = (x[term.i] - m.standardization.means[term.i]) /
                      m.standardization.scales[term.i] / m.widths[term.i];
    const double sj = (x[term.j] - m.standardization.means[term.j]) /
                      m.standardization.scales[term.j] / m.widths[term.j];
    const auto pz = m.basis.pair_z();
    for (std::size_t k = 0; k < S; ++k) {
      g += term.w[k] * scale * std::cos(pz[2 * k] * si + pz[2 * k + 1] * sj + c[k]);
    }
  }
  return g;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Variance of h(U), U ~ U[-2, 2], by composite Simpson on 4000 panels.
template <typename F>
double uniform_variance(F h) {
  constexpr int kPanels = 4000;
  const double step = 4.0 / kPanels;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int k = 0; k <= kPanels; ++k) {
    const double x = -2.0 + step * k;
    const double weight = (k == 0 || k == kPanels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    m1 += weight * h(x);
    m2 += weight * h(x) * h(x);
  }
  m1 *= step / 3.0 / 4.0;
  m2 *= step / 3.0 / 4.0;
  return m2 - m1 * m1;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gpnam_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
