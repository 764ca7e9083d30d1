#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gpnam {

enum class Task { regression, binary_classification };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

/// Per-feature affine map applied at ingestion: standardized = (x - mean) / scale.
struct Standardization {
  std::vector<double> means;
  std::vector<double> scales;

  double forward(std::size_t i, double x) const { return (x - means[i]) / scales[i]; }
  double inverse(std::size_t i, double z) const { return z * scales[i] + means[i]; }
  bool operator==(const Standardization&) const = default;
};

/// How a raw CSV column was turned into a real. Categorical columns get ordinal
/// codes in order of first appearance; `categories[k]` is the label with code k.
struct FeatureEncoding {
  bool categorical = false;
  std::vector<std::string> categories;
  bool operator==(const FeatureEncoding&) const = default;
};

}  // namespace gpnam
