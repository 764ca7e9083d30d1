#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "gpnam/error.hpp"
#include "gpnam/metrics.hpp"
#include "gpnam/rng.hpp"
#include "oracles.hpp"

using namespace gpnam;

TEST_CASE("auc examples") {
  const std::vector<double> perfect = {0.9, 0.8, 0.2, 0.1};
  const std::vector<double> labels = {1, 1, 0, 0};
  CHECK(auc(perfect, labels) == 1.0);
  const std::vector<double> ties(4, 0.3);
  CHECK(auc(ties, labels) == 0.5);
  const std::vector<double> s = {0.1, 0.9, 0.8, 0.3};
  const std::vector<double> l = {0, 1, 0, 1};
  CHECK(auc(s, l) == 0.75);
  CHECK(oracle::auc_by_pairs(s, l) == 0.75);

  const std::vector<double> one_class = {1, 1, 1, 1};
  try {
    auc(perfect, one_class);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undefined_metric);
  }
}

TEST_CASE("auc agrees with pair counting and is rank invariant") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.below(200);
    std::vector<double> scores(n);
    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse rounding makes ties common.
      scores[i] = std::round(rng.normal() * 4.0) / 4.0;
      labels[i] = i < 2 ? static_cast<double>(i) : (rng.coin() ? 1.0 : 0.0);
    }
    const double a = auc(scores, labels);
    CHECK(std::abs(a - oracle::auc_by_pairs(scores, labels)) <= 1e-12);
    std::vector<double> exp_scores(n);
    std::vector<double> affine(n);
    for (std::size_t i = 0; i < n; ++i) {
      exp_scores[i] = std::exp(scores[i]);
      affine[i] = 3.0 * scores[i] + 7.0;
    }
    CHECK(auc(exp_scores, labels) == a);
    CHECK(auc(affine, labels) == a);
  }
}

TEST_CASE("auc complement without ties") {
  Rng rng(2);
  std::vector<double> scores(300);
  std::vector<double> labels(300);
  for (std::size_t i = 0; i < 300; ++i) {
    scores[i] = rng.normal();
    labels[i] = i % 3 == 0 ? 1.0 : 0.0;
  }
  std::vector<double> negated(300);
  std::transform(scores.begin(), scores.end(), negated.begin(), [](double s) { return -s; });
  CHECK(std::abs(auc(scores, labels) + auc(negated, labels) - 1.0) <= 1e-12);
}

TEST_CASE("error rate") {
  const std::vector<double> labels = {1, 0, 1, 0};
  const std::vector<double> good = {0.9, 0.1, 0.7, 0.2};
  const std::vector<double> bad = {0.1, 0.9, 0.3, 0.8};
  CHECK(error_rate(good, labels) == 0.0);
  CHECK(error_rate(bad, labels) == 1.0);
  const std::vector<double> s = {0.6, 0.4, 0.5};
  const std::vector<double> l = {1, 1, 0};
  CHECK(error_rate(s, l) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const std::vector<double> single = {1, 1, 1};
  CHECK(error_rate(s, single) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mse and rmse") {
  const std::vector<double> y = {1.0, 2.0, 3.0};
  CHECK(mse(y, y) == 0.0);
  CHECK(rmse(y, y) == 0.0);
  const std::vector<double> p = {2.0, 1.0};
  const std::vector<double> t = {1.0, 2.0};
  CHECK(mse(p, t) == 1.0);
  CHECK(rmse(p, t) == 1.0);
  try {
    mse(p, y);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(1000 + trial * 37);
    std::vector<double> b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    const double m = mse(a, b);
    CHECK(std::abs(m - oracle::pairwise_mse(a, b)) <= 1e-12);
    const double r = rmse(a, b);
    CHECK(r > 0.0);
    CHECK(std::abs(r * r - m) <= 1e-10);
  }
}

TEST_CASE("evaluate and json record") {
  const std::vector<double> p = {2.0, 1.0};
  const std::vector<double> t = {1.0, 2.0};
  const EvalResult r = evaluate(Metric::rmse, p, t);
  CHECK(r.n == 2);
  CHECK(r.value == 1.0);
  const auto doc = to_json(r, "test", "m.json");
  CHECK(doc.dump() == R"({"metric":"rmse","value":1.0,"n":2,"dataset":"test","model":"m.json"})");
}
