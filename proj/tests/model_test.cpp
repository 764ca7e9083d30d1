#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "gpnam/data.hpp"
#include "gpnam/error.hpp"
#include "gpnam/io.hpp"
#include "gpnam/model.hpp"
#include "gpnam/pipeline.hpp"
#include "gpnam/rng.hpp"
#include "oracles.hpp"

using namespace gpnam;

namespace {

GPNAMModel random_model(std::size_t S, std::size_t d, std::uint64_t seed, bool with_pairs = false,
                        Task task = Task::regression) {
  GPNAMModel m = make_zero_model(build_basis(S, BasisMode::monte_carlo, seed, with_pairs), d, task);
  Rng rng(seed + 1000);
  m.feature_ranges.resize(d);
  m.encodings.resize(d);
  m.w0 = rng.normal();
  for (double& w : m.weights.data()) w = rng.normal();
  for (std::size_t i = 0; i < d; ++i) {
    m.widths[i] = rng.uniform(0.3, 2.0);
    m.standardization.means[i] = rng.uniform(-5.0, 5.0);
    m.standardization.scales[i] = rng.uniform(0.5, 3.0);
    m.feature_ranges[i] = {m.standardization.means[i] - 2.0, m.standardization.means[i] + 2.0};
  }
  if (with_pairs && d >= 2) {
    Interaction term{.i = 0, .j = d - 1};
    for (std::size_t s = 0; s < S; ++s) term.w.push_back(rng.normal());
    m.interactions.push_back(term);
  }
  Matrix X(64, d);
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t i = 0; i < d; ++i) X(r, i) = m.standardization.inverse(i, rng.uniform(-2.0, 2.0));
  }
  compute_centering(m, X);
  return m;
}

std::vector<double> random_row(const GPNAMModel& m, Rng& rng) {
  std::vector<double> x;
  for (std::size_t i = 0; i < m.num_features(); ++i) {
    x.push_back(m.standardization.inverse(i, rng.uniform(-3.0, 3.0)));
  }
  return x;
}

}  // namespace

TEST_CASE("predict_raw analytic cases") {
  GPNAMModel zero = make_zero_model(build_basis(10, BasisMode::grid, 0), 3, Task::regression);
  zero.w0 = 0.25;
  const std::vector<double> x = {1.0, -7.0, 3.0};
  CHECK(predict_raw(zero, x) == 0.25);

  GPNAMModel tiny = make_zero_model(FeatureBasis({0.0}, {0.0}, BasisMode::monte_carlo, 0), 1,
                                    Task::regression);
  tiny.weights(0, 0) = 2.0;
  for (double v : {-100.0, 0.0, 3.3}) {
    const std::vector<double> row = {v};
    CHECK(predict_raw(tiny, row) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  }
}

TEST_CASE("predict_raw matches the loop oracle") {
  Rng rng(4);
  for (bool pairs : {false, true}) {
    const GPNAMModel m = random_model(40, 4, 17, pairs);
    for (int k = 0; k < 50; ++k) {
      const auto x = random_row(m, rng);
      CHECK(std::abs(predict_raw(m, x) - oracle::naive_predict_raw(m, x)) <= 1e-12);
    }
  }
}

TEST_CASE("predict_raw rejects bad input") {
  const GPNAMModel m = random_model(10, 3, 1);
  const std::vector<double> short_row = {1.0, 2.0};
  try {
    predict_raw(m, short_row);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
  const std::vector<double> nan_row = {1.0, std::nan(""), 0.0};
  CHECK_THROWS_AS(predict_raw(m, nan_row), Error);
  CHECK_THROWS_AS(predict(m, Matrix(2, 4)), Error);
}

TEST_CASE("batched predict") {
  const GPNAMModel zero_clf =
      make_zero_model(build_basis(20, BasisMode::grid, 0), 2, Task::binary_classification);
  for (double p : predict(zero_clf, Matrix(5, 2, 1.5))) CHECK(p == 0.5);

  const GPNAMModel m = random_model(30, 3, 2);
  Matrix same(3, 3);
  for (std::size_t r = 0; r < 3; ++r) {
    same(r, 0) = 0.1;
    same(r, 1) = -0.4;
    same(r, 2) = 2.0;
  }
  const auto out = predict(m, same);
  CHECK(out[0] == out[1]);
  CHECK(out[1] == out[2]);

  Rng rng(6);
  Matrix X(40, 3);
  for (std::size_t r = 0; r < 40; ++r) {
    const auto x = random_row(m, rng);
    std::copy(x.begin(), x.end(), X.row(r).begin());
  }
  const auto batch = predict(m, X);
  for (std::size_t r = 0; r < 40; ++r) CHECK(std::abs(batch[r] - predict_raw(m, X.row(r))) <= 1e-12);

  GPNAMModel clf = random_model(30, 3, 2, false, Task::binary_classification);
  for (double p : predict(clf, X)) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("sigmoid is strictly increasing") {
  double prev = sigmoid(-30.0);
  for (double g = -29.9; g <= 30.0; g += 0.1) {
    const double p = sigmoid(g);
    CHECK(p > prev);
    prev = p;
  }
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) <= 1.0);
}

TEST_CASE("shape functions") {
  GPNAMModel zero = make_zero_model(build_basis(16, BasisMode::grid, 0), 2, Task::regression);
  const std::vector<double> grid = {-1.0, 0.0, 2.5};
  const ShapeTable t = shape_function(zero, 1, grid);
  CHECK(t.feature_index == 1);
  CHECK(t.grid.size() == t.values.size());
  for (double v : t.values) CHECK(v == 0.0);
  CHECK(t.offset == 0.0);

  GPNAMModel flat = make_zero_model(FeatureBasis({0.0}, {0.0}, BasisMode::monte_carlo, 0), 1,
                                    Task::regression);
  flat.weights(0, 0) = 0.75;
  const ShapeTable c = shape_function(flat, 0, grid, false);
  for (double v : c.values) CHECK(v == doctest::Approx(std::sqrt(2.0) * 0.75).epsilon(1e-15));

  try {
    shape_function(zero, 2, grid);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
}

TEST_CASE("additivity and centering invariance") {
  Rng rng(12);
  const GPNAMModel m = random_model(50, 4, 9);
  for (int k = 0; k < 40; ++k) {
    auto x = random_row(m, rng);
    const std::size_t i = rng.below(4);
    const double before = predict_raw(m, x);
    const double old_value = x[i];
    x[i] = m.standardization.inverse(i, rng.uniform(-3.0, 3.0));
    const double after = predict_raw(m, x);
    const double delta = shape_value(m, i, x[i]) - shape_value(m, i, old_value);
    CHECK(std::abs((after - before) - delta) <= 1e-10);

    double centered = centered_intercept(m);
    for (std::size_t f = 0; f < 4; ++f) {
      const std::vector<double> point = {x[f]};
      centered += shape_function(m, f, point).values[0];
    }
    CHECK(std::abs(centered - predict_raw(m, x)) <= 1e-10);
  }
}

TEST_CASE("centered shape functions have zero training mean") {
  const GPNAMModel base = random_model(30, 3, 4);
  GPNAMModel m = base;
  Rng rng(3);
  Matrix X(500, 3);
  for (std::size_t r = 0; r < 500; ++r) {
    for (std::size_t i = 0; i < 3; ++i) X(r, i) = m.standardization.inverse(i, rng.normal());
  }
  compute_centering(m, X);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto column = X.column(i);
    const ShapeTable t = shape_function(m, i, column);
    double mean = 0.0;
    for (double v : t.values) mean += v;
    CHECK(std::abs(mean / 500.0) <= 1e-8);
  }
  for (std::size_t r = 0; r < 20; ++r) {
    CHECK(std::abs(predict_raw(m, X.row(r)) - predict_raw(base, X.row(r))) == 0.0);
  }
}

TEST_CASE("parameter count") {
  CHECK(param_count(100, 39) == 3901);
  CHECK(param_count(100, 5) == 501);
  CHECK(param_count(100, 0) == 1);
  CHECK(param_count(100, 3, 2) == 501);
  CHECK(param_count(random_model(20, 3, 1, true)) == 81);
}

TEST_CASE("model file round trip") {
  oracle::TempDir dir("model");
  Rng rng(77);
  for (bool pairs : {false, true}) {
    GPNAMModel m = random_model(25, 3, 5, pairs, pairs ? Task::binary_classification : Task::regression);
    m.feature_names = {"age", "income, net", "zip\"code"};
    m.encodings[2] = {.categorical = true, .categories = {"a", "b"}};
    m.target = "y";
    if (pairs) m.class_labels = {"no", "yes"};
    m.lambda = 0.3;
    const auto path = dir / "m.json";
    save_model(m, path);
    const GPNAMModel back = load_model(path);
    CHECK(back.basis == m.basis);
    CHECK(back.weights == m.weights);
    CHECK(back.widths == m.widths);
    CHECK(back.w0 == m.w0);
    CHECK(back.standardization == m.standardization);
    CHECK(back.centering_offsets == m.centering_offsets);
    CHECK(back.interactions == m.interactions);
    CHECK(back.feature_names == m.feature_names);
    CHECK(back.encodings == m.encodings);
    CHECK(back.class_labels == m.class_labels);
    CHECK(back.feature_ranges == m.feature_ranges);
    CHECK(serialize_model(back) == serialize_model(m));
    for (int k = 0; k < 20; ++k) {
      const auto x = random_row(m, rng);
      CHECK(predict_raw(back, x) == predict_raw(m, x));
    }
  }
}

TEST_CASE("model file errors") {
  oracle::TempDir dir("model_err");
  const GPNAMModel m = random_model(10, 2, 3);
  const std::string text = serialize_model(m);

  const auto expect_kind = [](const std::string& body, ErrorKind kind) {
    try {
      parse_model(body);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == kind);
    }
  };
  expect_kind(text.substr(0, text.size() / 2), ErrorKind::malformed_file);
  expect_kind("", ErrorKind::malformed_file);
  expect_kind("[1,2]", ErrorKind::malformed_file);

  auto doc = nlohmann::json::parse(text);
  doc["b"] = {-1.0, 1.0};
  expect_kind(doc.dump(), ErrorKind::invariant_violation);

  doc = nlohmann::json::parse(text);
  doc["schema_version"] = 2;
  expect_kind(doc.dump(), ErrorKind::version_mismatch);

  doc = nlohmann::json::parse(text);
  doc["W"] = {1.0, 2.0};
  expect_kind(doc.dump(), ErrorKind::malformed_file);

  doc = nlohmann::json::parse(text);
  doc.erase("w0");
  expect_kind(doc.dump(), ErrorKind::malformed_file);

  write_file_atomic(dir / "trunc.json", text.substr(0, 40));
  CHECK_THROWS_AS(load_model(dir / "trunc.json"), Error);
  CHECK_THROWS_AS(load_model(dir / "missing.json"), Error);
}

TEST_CASE("model file has the documented fields") {
  const auto doc = nlohmann::json::parse(serialize_model(random_model(5, 2, 1, true)));
  for (const char* key : {"schema_version", "task", "S", "mode", "seed", "d", "feature_names",
                          "standardization", "b", "w0", "W", "centering_offsets", "interactions"}) {
    CHECK_MESSAGE(doc.contains(key), key);
  }
  CHECK(doc["W"].size() == 10);
  CHECK(doc["standardization"].contains("means"));
  CHECK(doc["standardization"].contains("scales"));
}

TEST_CASE("shape csv format") {
  GPNAMModel m = make_zero_model(FeatureBasis({0.0}, {0.0}, BasisMode::monte_carlo, 0), 1,
                                 Task::regression);
  m.weights(0, 0) = 1.0 / 3.0;
  const std::vector<double> grid = {0.0, 1.0};
  const std::vector<ShapeTable> tables = {shape_function(m, 0, grid, false)};
  std::ostringstream out;
  write_shape_csv(out, tables);
  CHECK(out.str() == "feature,x,f\nx1,0,0.471404521\nx1,1,0.471404521\n");
}

TEST_CASE("sin shape is recovered") {
  const std::vector<ShapeKind> shapes = {ShapeKind::sine3};
  const Dataset data = synth_additive(4000, shapes, 0.1, 8);
  const DataSplit parts = split(data, {0.8, 0.1, 0.1}, 8);
  TrainOptions options;
  options.bandwidth_scale = 0.5;
  const TrainOutcome out = train_gpnam(parts.train, &parts.validation, options);
  std::vector<double> grid;
  std::vector<double> truth;
  for (int k = 0; k <= 200; ++k) {
    grid.push_back(-2.0 + 0.02 * k);
    truth.push_back(std::sin(3.0 * grid.back()));
  }
  const ShapeTable t = shape_function(out.model, 0, grid);
  CHECK(oracle::pearson(t.values, truth) >= 0.95);
}
