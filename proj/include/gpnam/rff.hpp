#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gpnam {

enum class BasisMode { monte_carlo, grid };

std::string_view to_string(BasisMode mode);
BasisMode parse_basis_mode(std::string_view text);

/// Shared random Fourier feature sample set {(z_s, c_s)}, s = 1..S.
///
/// The same frequencies and phases serve every feature's shape function; the
/// per-feature kernel width enters only through the x / b scaling. Optional
/// two-dimensional frequencies (`pair_z`, S x 2 row-major) drive the pairwise
/// interaction maps. Immutable once built.
class FeatureBasis {
 public:
  FeatureBasis(std::vector<double> z, std::vector<double> c, BasisMode mode,
               std::uint64_t seed, std::vector<double> pair_z = {});

  std::size_t size() const noexcept { return z_.size(); }
  std::span<const double> z() const noexcept { return z_; }
  std::span<const double> c() const noexcept { return c_; }
  BasisMode mode() const noexcept { return mode_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool has_pairs() const noexcept { return !pair_z_.empty(); }
  std::span<const double> pair_z() const noexcept { return pair_z_; }

  bool operator==(const FeatureBasis&) const = default;

 private:
  std::vector<double> z_;
  std::vector<double> c_;
  BasisMode mode_;
  std::uint64_t seed_;
  std::vector<double> pair_z_;
};

/// Builds the basis from (S, mode, seed); the result is bit-reproducible.
///
/// monte_carlo: z_s ~ N(0,1) then c_s ~ U[0, 2pi), i.i.d. from one stream.
///
/// grid: z_s = Phi^-1((s - 0.5) / S). Phases come from the equally spaced grid
/// 2pi (k - 0.5) / S + pi/4 (mod 2pi). The grid is symmetric, z_s = -z_{S+1-s},
/// and each mirrored frequency pair receives a phase pair (k, S+1-k), whose sum
/// is pi/2 (mod pi). The seeded permutation decides which phase pair lands on
/// which frequency pair and in which orientation. With that pairing the cross
/// terms cos(z(x + x')/b + 2c) cancel pairwise, so
///   phi(x)^T phi(x') = (1/S) sum_s cos(z_s (x - x') / b)
/// exactly, a midpoint quadrature of the RBF kernel with phi(x)^T phi(x) = 1.
///
/// With `with_pairs`, S two-dimensional frequencies are drawn after the 1-D
/// sample: i.i.d. N(0, I) in monte_carlo mode; in grid mode mirrored the same
/// way as z (row S+1-s = -row s, zero middle row for odd S).
FeatureBasis build_basis(std::size_t sample_size, BasisMode mode, std::uint64_t seed,
                         bool with_pairs = false);

double normal_cdf(double x);

/// Standard normal quantile: Acklam's rational approximation polished with one
/// Newton step on the erfc-based CDF. Absolute error well below 1e-9 on (0, 1).
double inverse_normal_cdf(double p);

/// exp(-||x - x'||^2 / (2 b^2)).
double rbf_kernel(std::span<const double> x, std::span<const double> x_prime, double b);
double rbf_kernel(double x, double x_prime, double b);

/// sqrt(2/S) [cos(z_s x / b + c_s)]_s. Rejects b <= 0 and non-finite x.
std::vector<double> feature_map(const FeatureBasis& basis, double x, double b);
void feature_map_into(const FeatureBasis& basis, double x, double b, std::span<double> out);

double approx_kernel(const FeatureBasis& basis, double x, double x_prime, double b);

/// sqrt(2/S) [cos((z_s1 x_i + z_s2 x_j) / b + c_s)]_s using basis.pair_z().
std::vector<double> pair_feature_map(const FeatureBasis& basis, double x_i, double x_j,
                                     double b);
void pair_feature_map_into(const FeatureBasis& basis, double x_i, double x_j, double b,
                           std::span<double> out);

/// Monte Carlo estimate of
///   (1/pi) int_0^{2pi} int_R cos(z x / b + c) cos(z x' / b + c) N(z | 0, 1) dz dc
/// with `n_samples` joint draws of (z, c). Diagnostic only.
double mc_verify_integral_identity(double b, double x, double x_prime, std::size_t n_samples,
                                   std::uint64_t seed);

}  // namespace gpnam
