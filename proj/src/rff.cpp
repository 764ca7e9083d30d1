#include "gpnam/rff.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpnam/error.hpp"
#include "gpnam/rng.hpp"

namespace gpnam {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_width(double b, const char* where) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    fail(ErrorKind::invalid_argument,
         std::string(where) + ": kernel width must be finite and > 0");
  }
}

void check_finite(double x, const char* where) {
  if (!std::isfinite(x)) {
    fail(ErrorKind::invalid_argument, std::string(where) + ": input is not finite");
  }
}

double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771810e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::vector<double> grid_frequencies(std::size_t S) {
  std::vector<double> z(S, 0.0);
  const double n = static_cast<double>(S);
  // Lower half computed, upper half mirrored, so z[S-1-j] == -z[j] exactly.
  for (std::size_t j = 0; j < S / 2; ++j) {
    z[j] = inverse_normal_cdf((static_cast<double>(j) + 0.5) / n);
    z[S - 1 - j] = -z[j];
  }
  return z;
}

std::vector<double> grid_phases(std::size_t S) {
  std::vector<double> c(S);
  const double n = static_cast<double>(S);
  for (std::size_t k = 0; k < S; ++k) {
    c[k] = std::fmod(kTwoPi * (static_cast<double>(k) + 0.5) / n + std::numbers::pi / 4.0,
                     kTwoPi);
  }
  return c;
}

}  // namespace

std::string_view to_string(BasisMode mode) {
  return mode == BasisMode::grid ? "grid" : "mc";
}

BasisMode parse_basis_mode(std::string_view text) {
  if (text == "grid") return BasisMode::grid;
  if (text == "mc" || text == "monte_carlo") return BasisMode::monte_carlo;
  fail(ErrorKind::invalid_argument, "unknown basis mode '" + std::string(text) + "'");
}

FeatureBasis::FeatureBasis(std::vector<double> z, std::vector<double> c, BasisMode mode,
                           std::uint64_t seed, std::vector<double> pair_z)
    : z_(std::move(z)), c_(std::move(c)), mode_(mode), seed_(seed), pair_z_(std::move(pair_z)) {
  if (z_.empty()) fail(ErrorKind::invalid_argument, "FeatureBasis: S must be >= 1");
  if (z_.size() != c_.size()) {
    fail(ErrorKind::invalid_argument, "FeatureBasis: z and c lengths differ");
  }
  for (double phase : c_) {
    if (!(phase >= 0.0 && phase < kTwoPi)) {
      fail(ErrorKind::invalid_argument, "FeatureBasis: phase outside [0, 2pi)");
    }
  }
  for (double freq : z_) check_finite(freq, "FeatureBasis");
  if (!pair_z_.empty() && pair_z_.size() != 2 * z_.size()) {
    fail(ErrorKind::invalid_argument, "FeatureBasis: pair_z must be S x 2");
  }
}

FeatureBasis build_basis(std::size_t S, BasisMode mode, std::uint64_t seed, bool with_pairs) {
  if (S == 0) fail(ErrorKind::invalid_argument, "build_basis: S must be >= 1");
  Rng rng(seed);
  std::vector<double> z;
  std::vector<double> c;
  std::vector<double> pair_z;

  if (mode == BasisMode::monte_carlo) {
    z.resize(S);
    c.resize(S);
    for (double& v : z) v = rng.normal();
    for (double& v : c) {
      v = kTwoPi * rng.uniform();
      if (v >= kTwoPi) v = 0.0;  // rounding guard for the half-open interval
    }
    if (with_pairs) {
      pair_z.resize(2 * S);
      for (double& v : pair_z) v = rng.normal();
    }
  } else {
    z = grid_frequencies(S);
    const std::vector<double> phase_grid = grid_phases(S);
    c.assign(S, 0.0);
    const std::size_t half = S / 2;
    const std::vector<std::size_t> order = rng.permutation(half);
    for (std::size_t j = 0; j < half; ++j) {
      const std::size_t k = order[j];
      double lo = phase_grid[k];
      double hi = phase_grid[S - 1 - k];
      if (rng.coin()) std::swap(lo, hi);
      c[j] = lo;
      c[S - 1 - j] = hi;
    }
    if (S % 2 == 1) c[half] = phase_grid[half];  // 5pi/4: cos^2 = 1/2 at z = 0
    if (with_pairs) {
      pair_z.assign(2 * S, 0.0);
      for (std::size_t j = 0; j < half; ++j) {
        for (std::size_t axis = 0; axis < 2; ++axis) {
          const double draw = rng.normal();
          pair_z[2 * j + axis] = draw;
          pair_z[2 * (S - 1 - j) + axis] = -draw;
        }
      }
    }
  }
  return FeatureBasis(std::move(z), std::move(c), mode, seed, std::move(pair_z));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorKind::invalid_argument, "inverse_normal_cdf: p must lie in (0, 1)");
  }
  double x = acklam_quantile(p);
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  x -= (normal_cdf(x) - p) / density;
  return x;
}

double rbf_kernel(std::span<const double> x, std::span<const double> x_prime, double b) {
  if (!(b > 0.0)) fail(ErrorKind::invalid_argument, "rbf_kernel: b must be > 0");
  if (x.size() != x_prime.size()) {
    fail(ErrorKind::invalid_argument, "rbf_kernel: dimension mismatch");
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - x_prime[k];
    sq += diff * diff;
  }
  return std::exp(-sq / (2.0 * b * b));
}

double rbf_kernel(double x, double x_prime, double b) {
  return rbf_kernel(std::span<const double>(&x, 1), std::span<const double>(&x_prime, 1), b);
}

void feature_map_into(const FeatureBasis& basis, double x, double b, std::span<double> out) {
  check_width(b, "feature_map");
  check_finite(x, "feature_map");
  const std::size_t S = basis.size();
  if (out.size() != S) fail(ErrorKind::invalid_argument, "feature_map: output size != S");
  const double scale = std::sqrt(2.0 / static_cast<double>(S));
  const double u = x / b;
  const auto z = basis.z();
  const auto c = basis.c();
  for (std::size_t s = 0; s < S; ++s) out[s] = scale * std::cos(z[s] * u + c[s]);
}

std::vector<double> feature_map(const FeatureBasis& basis, double x, double b) {
  std::vector<double> out(basis.size());
  feature_map_into(basis, x, b, out);
  return out;
}

double approx_kernel(const FeatureBasis& basis, double x, double x_prime, double b) {
  const std::vector<double> lhs = feature_map(basis, x, b);
  const std::vector<double> rhs = feature_map(basis, x_prime, b);
  double dot = 0.0;
  for (std::size_t s = 0; s < lhs.size(); ++s) dot += lhs[s] * rhs[s];
  return dot;
}

void pair_feature_map_into(const FeatureBasis& basis, double x_i, double x_j, double b,
                           std::span<double> out) {
  if (!basis.has_pairs()) {
    fail(ErrorKind::configuration, "pair_feature_map: basis has no pairwise frequencies");
  }
  check_width(b, "pair_feature_map");
  check_finite(x_i, "pair_feature_map");
  check_finite(x_j, "pair_feature_map");
  const std::size_t S = basis.size();
  if (out.size() != S) fail(ErrorKind::invalid_argument, "pair_feature_map: output size != S");
  const double scale = std::sqrt(2.0 / static_cast<double>(S));
  const double u = x_i / b;
  const double v = x_j / b;
  const auto pz = basis.pair_z();
  const auto c = basis.c();
  for (std::size_t s = 0; s < S; ++s) {
    out[s] = scale * std::cos(pz[2 * s] * u + pz[2 * s + 1] * v + c[s]);
  }
}

std::vector<double> pair_feature_map(const FeatureBasis& basis, double x_i, double x_j,
                                     double b) {
  std::vector<double> out(basis.size());
  pair_feature_map_into(basis, x_i, x_j, b, out);
  return out;
}

double mc_verify_integral_identity(double b, double x, double x_prime, std::size_t n_samples,
                                   std::uint64_t seed) {
  check_width(b, "mc_verify_integral_identity");
  check_finite(x, "mc_verify_integral_identity");
  check_finite(x_prime, "mc_verify_integral_identity");
  if (n_samples == 0) {
    fail(ErrorKind::invalid_argument, "mc_verify_integral_identity: n_samples must be >= 1");
  }
  Rng rng(seed);
  const double u = x / b;
  const double v = x_prime / b;
  double sum = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double z = rng.normal();
    const double c = kTwoPi * rng.uniform();
    // (1/pi) * 2pi * E_c[...] = 2 E[...]
    sum += 2.0 * std::cos(z * u + c) * std::cos(z * v + c);
  }
  return sum / static_cast<double>(n_samples);
}

}  // namespace gpnam
