#include "gpnam/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "gpnam/error.hpp"
#include "gpnam/io.hpp"
#include "gpnam/rng.hpp"

namespace gpnam {
namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

std::vector<std::string> default_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::sine3: return "sin(3x)";
    case ShapeKind::square: return "x^2";
    case ShapeKind::tanh2: return "tanh(2x)";
    case ShapeKind::abs: return "|x|";
    case ShapeKind::identity: return "x";
  }
  return "?";
}

double evaluate_shape(ShapeKind kind, double x) {
  switch (kind) {
    case ShapeKind::sine3: return std::sin(3.0 * x);
    case ShapeKind::square: return x * x;
    case ShapeKind::tanh2: return std::tanh(2.0 * x);
    case ShapeKind::abs: return std::abs(x);
    case ShapeKind::identity: return x;
  }
  return 0.0;
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool first_record = true;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (first_record) {
        table.header = std::move(record);
        first_record = false;
      } else {
        table.rows.push_back(std::move(record));
      }
    }
    record.clear();
  };

  char ch;
  bool at_start = true;
  while (in.get(ch)) {
    if (at_start) {
      at_start = false;
      // UTF-8 byte order mark
      if (static_cast<unsigned char>(ch) == 0xEF) {
        char bom[2];
        if (in.read(bom, 2) && static_cast<unsigned char>(bom[0]) == 0xBB &&
            static_cast<unsigned char>(bom[1]) == 0xBF) {
          continue;
        }
        fail(ErrorKind::malformed_file, "csv: unexpected leading bytes");
      }
    }
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started || field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field += ch;
        }
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        if (in.peek() == '\n') in.get(ch);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += ch;
        field_started = true;
    }
  }
  if (in_quotes) fail(ErrorKind::malformed_file, "csv: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
  return parse_csv(in);
}

nlohmann::ordered_json to_json(const IngestReport& report) {
  nlohmann::ordered_json encodings = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < report.encodings.size(); ++i) {
    const auto& enc = report.encodings[i];
    const std::string& name = i < report.feature_names.size() ? report.feature_names[i] : "";
    if (enc.categorical) {
      nlohmann::ordered_json codes = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < enc.categories.size(); ++k) codes[enc.categories[k]] = k;
      encodings[name] = {{"type", "ordinal"}, {"codes", std::move(codes)}};
    } else {
      encodings[name] = {{"type", "numeric"}};
    }
  }
  return {{"rows_read", report.rows_read},
          {"rows_dropped", report.rows_dropped},
          {"encodings", std::move(encodings)}};
}

bool is_missing_cell(std::string_view cell) {
  const std::string text = lower(trim(cell));
  if (text.empty() || text == "na" || text == "n/a" || text == "nan" || text == "?" ||
      text == "null") {
    return true;
  }
  // Non-finite numerics count as missing.
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size() && !std::isfinite(value);
}

std::optional<double> parse_real(std::string_view cell) {
  std::string_view text = trim(cell);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

Dataset dataset_from_table(const CsvTable& table, const std::string& target, Task task,
                           IngestReport* report) {
  if (table.header.empty()) fail(ErrorKind::empty_file, "csv: file is empty");
  if (table.rows.empty()) fail(ErrorKind::empty_file, "csv: no data rows");
  const auto target_it = std::find(table.header.begin(), table.header.end(), target);
  if (target_it == table.header.end()) {
    fail(ErrorKind::missing_target, "csv: target column '" + target + "' not found");
  }
  const std::size_t width = table.header.size();
  const auto target_col = static_cast<std::size_t>(target_it - table.header.begin());
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (c != target_col) feature_cols.push_back(c);
  }

  std::vector<const std::vector<std::string>*> kept;
  for (const auto& row : table.rows) {
    if (row.size() != width) continue;
    if (std::any_of(row.begin(), row.end(), [](const auto& cell) { return is_missing_cell(cell); })) {
      continue;
    }
    if (task == Task::regression && !parse_real(row[target_col])) continue;
    kept.push_back(&row);
  }

  Dataset data;
  data.task = task;
  data.target = target;
  for (std::size_t c : feature_cols) data.feature_names.push_back(table.header[c]);
  const std::size_t n = kept.size();
  const std::size_t d = feature_cols.size();

  if (report) {
    report->rows_read = table.rows.size();
    report->rows_dropped = table.rows.size() - n;
  }
  if (n == 0) fail(ErrorKind::empty_file, "csv: no complete rows after dropping missing values");

  data.X = Matrix(n, d);
  data.encodings.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t c = feature_cols[i];
    const bool numeric = std::all_of(kept.begin(), kept.end(),
                                     [c](const auto* row) { return parse_real((*row)[c]).has_value(); });
    if (numeric) {
      for (std::size_t r = 0; r < n; ++r) data.X(r, i) = *parse_real((*kept[r])[c]);
      continue;
    }
    auto& enc = data.encodings[i];
    enc.categorical = true;
    std::unordered_map<std::string, std::size_t> codes;
    for (std::size_t r = 0; r < n; ++r) {
      const std::string label(trim((*kept[r])[c]));
      auto [it, inserted] = codes.emplace(label, enc.categories.size());
      if (inserted) enc.categories.push_back(label);
      data.X(r, i) = static_cast<double>(it->second);
    }
  }

  data.y.resize(n);
  if (task == Task::regression) {
    for (std::size_t r = 0; r < n; ++r) data.y[r] = *parse_real((*kept[r])[target_col]);
  } else {
    std::vector<std::string> labels;
    for (const auto* row : kept) {
      const std::string label(trim((*row)[target_col]));
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
      if (labels.size() > 2) {
        fail(ErrorKind::invalid_argument,
             "csv: classification target has more than two classes");
      }
    }
    if (labels.size() < 2) {
      fail(ErrorKind::too_few_classes, "csv: classification target needs two classes");
    }
    const auto a = parse_real(labels[0]);
    const auto b = parse_real(labels[1]);
    const bool swap = (a && b) ? *b < *a : labels[1] < labels[0];
    if (swap) std::swap(labels[0], labels[1]);
    for (std::size_t r = 0; r < n; ++r) {
      data.y[r] = std::string(trim((*kept[r])[target_col])) == labels[1] ? 1.0 : 0.0;
    }
    data.class_labels = labels;
  }
  if (report) {
    report->feature_names = data.feature_names;
    report->encodings = data.encodings;
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target, Task task,
                 IngestReport* report) {
  return dataset_from_table(read_csv(path), target, task, report);
}

Matrix features_from_table(const CsvTable& table, std::span<const std::string> feature_names,
                           std::span<const FeatureEncoding> encodings) {
  if (table.header.empty()) fail(ErrorKind::empty_file, "csv: file is empty");
  std::vector<std::size_t> cols;
  for (const auto& name : feature_names) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      fail(ErrorKind::column_mismatch, "csv: feature column '" + name + "' not found");
    }
    cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  Matrix X(table.rows.size(), cols.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      fail(ErrorKind::malformed_file, "csv: row " + std::to_string(r + 1) + " has wrong width");
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::string_view cell = row[cols[i]];
      if (is_missing_cell(cell)) {
        fail(ErrorKind::malformed_file, "csv: row " + std::to_string(r + 1) + " has a missing value");
      }
      if (i < encodings.size() && encodings[i].categorical) {
        const auto& cats = encodings[i].categories;
        const auto it = std::find(cats.begin(), cats.end(), std::string(trim(cell)));
        if (it == cats.end()) {
          fail(ErrorKind::malformed_file, "csv: unknown category '" + std::string(cell) +
                                              "' for feature '" + feature_names[i] + "'");
        }
        X(r, i) = static_cast<double>(it - cats.begin());
      } else {
        const auto value = parse_real(cell);
        if (!value) {
          fail(ErrorKind::malformed_file, "csv: row " + std::to_string(r + 1) +
                                              " has a non-numeric value for '" +
                                              feature_names[i] + "'");
        }
        X(r, i) = *value;
      }
    }
  }
  return X;
}

Standardization fit_standardization(const Matrix& X) {
  Standardization params;
  const std::size_t n = X.rows();
  if (n == 0) fail(ErrorKind::invalid_argument, "standardize: no rows");
  for (std::size_t i = 0; i < X.cols(); ++i) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += X(r, i);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (X(r, i) - mean) * (X(r, i) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    params.means.push_back(mean);
    params.scales.push_back(sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0);
  }
  return params;
}

Matrix apply_standardization(const Matrix& X, const Standardization& params) {
  if (params.means.size() != X.cols()) {
    fail(ErrorKind::invalid_argument, "standardization does not match column count");
  }
  Matrix Z(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t i = 0; i < X.cols(); ++i) Z(r, i) = params.forward(i, X(r, i));
  }
  return Z;
}

Matrix invert_standardization(const Matrix& Z, const Standardization& params) {
  if (params.means.size() != Z.cols()) {
    fail(ErrorKind::invalid_argument, "standardization does not match column count");
  }
  Matrix X(Z.rows(), Z.cols());
  for (std::size_t r = 0; r < Z.rows(); ++r) {
    for (std::size_t i = 0; i < Z.cols(); ++i) X(r, i) = params.inverse(i, Z(r, i));
  }
  return X;
}

Dataset standardize(const Dataset& data) {
  Dataset out = data;
  const Standardization params = fit_standardization(data.X);
  out.X = apply_standardization(data.X, params);
  out.standardization = params;
  return out;
}

std::vector<double> kernel_widths(const Dataset& data, double scale_factor) {
  if (!(scale_factor > 0.0) || !std::isfinite(scale_factor)) {
    fail(ErrorKind::invalid_argument, "kernel_widths: scale factor must be > 0");
  }
  if (!data.standardization) {
    fail(ErrorKind::precondition, "kernel_widths: dataset must be standardized first");
  }
  const Standardization spread = fit_standardization(data.X);
  std::vector<double> widths;
  for (std::size_t i = 0; i < data.d(); ++i) {
    // fit_standardization reports scale 1 for constant columns
    widths.push_back(scale_factor * spread.scales[i]);
  }
  return widths;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> index) {
  Dataset out = data;
  out.X = Matrix(index.size(), data.d());
  out.y.resize(index.size());
  for (std::size_t k = 0; k < index.size(); ++k) {
    const auto src = data.X.row(index[k]);
    std::copy(src.begin(), src.end(), out.X.row(k).begin());
    out.y[k] = data.y[index[k]];
  }
  return out;
}

DataSplit split(const Dataset& data, std::array<double, 3> fractions, std::uint64_t seed) {
  for (double f : fractions) {
    if (!(f > 0.0)) fail(ErrorKind::invalid_argument, "split: fractions must be positive");
  }
  if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
    fail(ErrorKind::invalid_argument, "split: fractions must sum to 1");
  }
  Rng rng(seed);
  DataSplit parts;
  auto slice = [&](std::span<const std::size_t> order) {
    const auto n = static_cast<double>(order.size());
    const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * n));
    const auto n_val = std::min(order.size() - std::min(order.size(), n_train),
                                static_cast<std::size_t>(std::llround(fractions[1] * n)));
    const std::size_t train_end = std::min(order.size(), n_train);
    parts.train_index.insert(parts.train_index.end(), order.begin(), order.begin() + train_end);
    parts.validation_index.insert(parts.validation_index.end(), order.begin() + train_end,
                                  order.begin() + train_end + n_val);
    parts.test_index.insert(parts.test_index.end(), order.begin() + train_end + n_val, order.end());
  };

  if (data.task == Task::binary_classification) {
    for (double label : {0.0, 1.0}) {
      std::vector<std::size_t> members;
      for (std::size_t r = 0; r < data.n(); ++r) {
        if (data.y[r] == label) members.push_back(r);
      }
      rng.shuffle(std::span<std::size_t>(members));
      slice(members);
    }
    rng.shuffle(std::span<std::size_t>(parts.train_index));
    rng.shuffle(std::span<std::size_t>(parts.validation_index));
    rng.shuffle(std::span<std::size_t>(parts.test_index));
  } else {
    slice(rng.permutation(data.n()));
  }

  if (parts.train_index.empty() || parts.validation_index.empty() || parts.test_index.empty()) {
    fail(ErrorKind::invalid_argument, "split: a partition would be empty");
  }
  parts.train = subset(data, parts.train_index);
  parts.validation = subset(data, parts.validation_index);
  parts.test = subset(data, parts.test_index);
  return parts;
}

Dataset synth_additive(std::size_t n, std::span<const ShapeKind> shapes, double noise_sd,
                       std::uint64_t seed) {
  const std::size_t d = shapes.size();
  if (n == 0 || d == 0) fail(ErrorKind::invalid_argument, "synth_additive: n and d must be >= 1");
  if (!(noise_sd >= 0.0)) fail(ErrorKind::invalid_argument, "synth_additive: noise_sd < 0");
  Rng rng(seed);
  Dataset data;
  data.task = Task::regression;
  data.target = "y";
  data.feature_names = default_names(d);
  data.encodings.resize(d);
  data.true_shapes.assign(shapes.begin(), shapes.end());
  data.X = Matrix(n, d);
  for (double& x : data.X.data()) x = rng.uniform(-2.0, 2.0);
  data.y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double value = 0.0;
    for (std::size_t i = 0; i < d; ++i) value += evaluate_shape(shapes[i], data.X(r, i));
    data.y[r] = value + noise_sd * rng.normal();
  }
  return data;
}

Dataset synth_additive(std::size_t n, std::size_t d, double noise_sd, std::uint64_t seed) {
  static constexpr ShapeKind cycle[] = {ShapeKind::sine3, ShapeKind::square, ShapeKind::tanh2,
                                        ShapeKind::abs, ShapeKind::identity};
  std::vector<ShapeKind> shapes;
  for (std::size_t i = 0; i < d; ++i) shapes.push_back(cycle[i % 5]);
  return synth_additive(n, shapes, noise_sd, seed);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (const auto& name : data.feature_names) out << csv_field(name) << ',';
  out << csv_field(data.target.empty() ? "y" : data.target) << '\n';
  for (std::size_t r = 0; r < data.n(); ++r) {
    for (std::size_t i = 0; i < data.d(); ++i) out << format_real(data.X(r, i), 17) << ',';
    out << format_real(data.y[r], 17) << '\n';
  }
}

}  // namespace gpnam
