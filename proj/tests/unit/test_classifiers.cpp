#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "moralvig/classifiers.hpp"
#include "moralvig/error.hpp"
#include "moralvig/rng.hpp"

using namespace moralvig;

namespace {

Matrix matrix_of(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

struct Blobs {
  Matrix x;
  std::vector<int> y;
};

Blobs blobs(int per_class, int classes, int dim, double spread, std::uint64_t seed) {
  Rng rng(seed);
  Blobs b;
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(classes));
  for (auto& c : centers) {
    for (int j = 0; j < dim; ++j) c.push_back(6.0 * rng.normal());
  }
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> row;
      for (int j = 0; j < dim; ++j) row.push_back(centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] + spread * rng.normal());
      b.x.append_row(row);
      b.y.push_back(c);
    }
  }
  return b;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

TEST_SUITE("classifiers") {
  TEST_CASE("standardization of two points") {
    const Matrix train = matrix_of({{1.0}, {3.0}});
    const auto s = fit_standardization(train);
    const Matrix z = s.apply(train);
    CHECK(z(0, 0) == doctest::Approx(-1.0));
    CHECK(z(1, 0) == doctest::Approx(1.0));
  }

  TEST_CASE("constant columns pass through and are flagged") {
    const Matrix train = matrix_of({{4.0, 1.0}, {4.0, 2.0}, {4.0, 3.0}});
    const auto split = standardize_fit_apply(train, matrix_of({{4.0, 2.0}, {7.0, 2.0}}));
    CHECK(split.standardization.zero_variance == std::vector<bool>{true, false});
    CHECK(split.train(0, 0) == 4.0);
    CHECK(split.test(1, 0) == 7.0);
    CHECK(split.test(0, 1) == doctest::Approx(0.0));
  }

  TEST_CASE("standardized random columns have zero mean and unit variance") {
    Rng rng(21);
    Matrix m(10, 4);
    for (double& v : m.data()) v = 5.0 + 3.0 * rng.normal();
    const Matrix z = fit_standardization(m).apply(m);
    for (std::size_t j = 0; j < 4; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 10; ++i) mean += z(i, j);
      mean /= 10.0;
      double var = 0.0;
      for (std::size_t i = 0; i < 10; ++i) var += (z(i, j) - mean) * (z(i, j) - mean);
      CHECK(std::abs(mean) < 1e-12);
      CHECK(std::abs(var / 10.0 - 1.0) < 1e-9);
    }
  }

  TEST_CASE("gnb one-dimensional example") {
    const Matrix x = matrix_of({{0.0}, {0.2}, {10.0}, {10.2}});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto model = fit_gnb(x, y, 2);
    CHECK(predict_gnb(model, std::vector<double>{0.1}) == 0);
    CHECK(predict_gnb(model, std::vector<double>{10.1}) == 1);
  }

  TEST_CASE("gnb with one class always predicts it; absent classes never win") {
    const Matrix x = matrix_of({{1.0, 2.0}, {2.0, 1.0}, {3.0, 0.0}});
    const std::vector<int> y = {2, 2, 2};
    const auto model = fit_gnb(x, y, 4);
    for (double q : {-100.0, 0.0, 2.0, 100.0}) CHECK(predict_gnb(model, std::vector<double>{q, q}) == 2);
  }

  TEST_CASE("gnb agrees with the density oracle on random queries") {
    Rng rng(4);
    const auto b = blobs(15, 3, 3, 4.0, 8);
    oracle::Rows rows;
    for (std::size_t i = 0; i < b.x.rows(); ++i) rows.emplace_back(b.x.row(i).begin(), b.x.row(i).end());
    const auto model = fit_gnb(b.x, b.y, 3);
    for (int q = 0; q < 200; ++q) {
      std::vector<double> query;
      for (int j = 0; j < 3; ++j) query.push_back(12.0 * rng.normal());
      CHECK(predict_gnb(model, query) == oracle::gnb_predict(rows, b.y, 3, query));
    }
  }

  TEST_CASE("knn basics") {
    const Matrix x = matrix_of({{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}});
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    Hyperparams hp;
    hp.knn_k = 1;
    const auto model = fit_knn(x, y, 2, hp);
    CHECK(predict_knn(model, std::vector<double>{5, 5}, 1) == 1);
    CHECK(predict_knn(model, std::vector<double>{1, 0}, 1) == 0);
    CHECK_THROWS_AS(predict_knn(model, std::vector<double>{0, 0}, 7), Error);
    hp.knn_k = 7;
    CHECK_THROWS_AS(fit_knn(x, y, 2, hp), Error);
  }

  TEST_CASE("knn majority of five among six planar points") {
    // Query at the origin: the three class-0 points at distance 1 and two of
    // the three class-1 points (distances 2 and 2.5) are the five nearest.
    const Matrix x = matrix_of({{1, 0}, {0, 1}, {-1, 0}, {2, 0}, {0, 2.5}, {9, 9}});
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    const auto model = fit_knn(x, y, 2);
    CHECK(predict_knn(model, std::vector<double>{0, 0}, 5) == 0);
    oracle::Rows rows;
    for (std::size_t i = 0; i < x.rows(); ++i) rows.emplace_back(x.row(i).begin(), x.row(i).end());
    CHECK(oracle::knn_predict(rows, y, 2, 5, {0, 0}) == 0);
  }

  TEST_CASE("knn vote ties go to the nearest tied class") {
    const Matrix x = matrix_of({{0.0}, {1.0}, {-3.0}, {4.0}});
    const std::vector<int> y = {1, 0, 0, 1};
    Hyperparams hp;
    hp.knn_k = 2;
    const auto model = fit_knn(x, y, 2, hp);
    CHECK(predict_knn(model, std::vector<double>{0.1}, 2) == 1);
    CHECK(predict_knn(model, std::vector<double>{0.9}, 2) == 0);
  }

  TEST_CASE("knn with identical labels") {
    const Matrix x = matrix_of({{0.0}, {1.0}, {2.0}});
    const std::vector<int> y = {1, 1, 1};
    Hyperparams hp;
    hp.knn_k = 3;
    const auto model = fit_knn(x, y, 3, hp);
    CHECK(predict_knn(model, std::vector<double>{50.0}, 3) == 1);
  }

  TEST_CASE("logreg with zero parameters gives uniform probabilities") {
    const Matrix x = matrix_of({{1.0, 2.0}, {3.0, -1.0}});
    const std::vector<int> y = {0, 1};
    auto model = fit_logreg(x, y, 4);
    auto& params = std::get<LinearParams>(model.params);
    std::fill(params.weights.data().begin(), params.weights.data().end(), 0.0);
    std::fill(params.bias.begin(), params.bias.end(), 0.0);
    const auto p = predict_logreg(model, std::vector<double>{7.0, 7.0});
    for (double v : p.probabilities) CHECK(v == doctest::Approx(0.25));
    CHECK(p.label == 0);
  }

  TEST_CASE("logreg separates two points with little regularisation") {
    const Matrix x = matrix_of({{-1.0}, {1.0}});
    const std::vector<int> y = {0, 1};
    Hyperparams hp;
    hp.logreg_l2 = 1e-6;
    const auto model = fit_logreg(x, y, 2, hp);
    CHECK(predict_logreg(model, std::vector<double>{-1.0}).label == 0);
    CHECK(predict_logreg(model, std::vector<double>{1.0}).label == 1);
  }

  TEST_CASE("logreg gradient matches central differences") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
      Matrix x(8, 3);
      for (double& v : x.data()) v = rng.normal();
      std::vector<int> y;
      for (int i = 0; i < 8; ++i) y.push_back(static_cast<int>(rng.below(3)));
      LinearParams p{Matrix(3, 3), std::vector<double>(3)};
      for (double& v : p.weights.data()) v = rng.normal();
      for (double& v : p.bias) v = rng.normal();

      LinearParams grad;
      logreg_objective(p, x, y, 0.7, &grad);
      const double h = 1e-5;
      double worst = 0.0;
      for (std::size_t i = 0; i < p.weights.data().size(); ++i) {
        LinearParams plus = p;
        LinearParams minus = p;
        plus.weights.data()[i] += h;
        minus.weights.data()[i] -= h;
        const double fd = (logreg_objective(plus, x, y, 0.7) - logreg_objective(minus, x, y, 0.7)) / (2 * h);
        worst = std::max(worst, relative_error(grad.weights.data()[i], fd));
      }
      for (std::size_t c = 0; c < 3; ++c) {
        LinearParams plus = p;
        LinearParams minus = p;
        plus.bias[c] += h;
        minus.bias[c] -= h;
        const double fd = (logreg_objective(plus, x, y, 0.7) - logreg_objective(minus, x, y, 0.7)) / (2 * h);
        worst = std::max(worst, relative_error(grad.bias[c], fd));
      }
      CHECK(worst < 1e-5);
    }
  }

  TEST_CASE("logreg objective never increases across accepted steps") {
    const auto b = blobs(10, 3, 4, 3.0, 2);
    const auto model = fit_logreg(b.x, b.y, 3);
    REQUIRE(model.trace.objective.size() > 2);
    for (std::size_t i = 1; i < model.trace.objective.size(); ++i) {
      CHECK(model.trace.objective[i] <= model.trace.objective[i - 1]);
    }
    CHECK(model.trace.converged);
  }

  TEST_CASE("svm one-dimensional separable case") {
    const Matrix x = matrix_of({{-1.0}, {1.0}});
    const std::vector<int> y = {0, 1};
    const auto model = fit_svm(x, y, 2);
    CHECK(predict_svm(model, std::vector<double>{-2.0}) == 0);
    CHECK(predict_svm(model, std::vector<double>{2.0}) == 1);
  }

  TEST_CASE("svm objective ends below its value at w = 0") {
    const auto b = blobs(12, 3, 4, 4.0, 17);
    const auto model = fit_svm(b.x, b.y, 3);
    const Matrix z = model.standardization.apply(b.x);
    const auto& p = std::get<LinearParams>(model.params);
    for (int c = 0; c < 3; ++c) {
      std::vector<int> t;
      for (int label : b.y) t.push_back(label == c ? 1 : -1);
      const std::vector<double> zero(z.cols(), 0.0);
      const double at_zero = svm_objective(zero, 0.0, z, t, 1.0);
      const auto w = p.weights.row(static_cast<std::size_t>(c));
      CHECK(svm_objective(w, p.bias[static_cast<std::size_t>(c)], z, t, 1.0) < at_zero);
    }
  }

  TEST_CASE("svm and logreg agree on well separated binary blobs") {
    const auto b = blobs(30, 2, 2, 0.5, 23);
    const auto svm = fit_svm(b.x, b.y, 2);
    const auto lr = fit_logreg(b.x, b.y, 2);
    int agree = 0;
    for (std::size_t i = 0; i < b.x.rows(); ++i) {
      agree += predict_svm(svm, b.x.row(i)) == predict_logreg(lr, b.x.row(i)).label ? 1 : 0;
    }
    CHECK(agree >= static_cast<int>(0.95 * static_cast<double>(b.x.rows())));
  }

  TEST_CASE("svm training is seed-deterministic") {
    const auto b = blobs(10, 3, 3, 2.0, 5);
    Hyperparams hp;
    hp.seed = 99;
    const auto a = fit_svm(b.x, b.y, 3, hp);
    const auto c = fit_svm(b.x, b.y, 3, hp);
    CHECK(std::get<LinearParams>(a.params).weights == std::get<LinearParams>(c.params).weights);
  }

  TEST_CASE("softmax is stable for large scores") {
    const auto p = softmax(std::vector<double>{1000.0, 1000.0});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(std::isfinite(softmax(std::vector<double>{-1e308, 0.0})[0]));
  }

  TEST_CASE("models survive a JSON round trip") {
    const auto b = blobs(8, 3, 3, 2.0, 31);
    for (ClassifierKind kind : kAllClassifiers) {
      const auto model = fit(kind, b.x, b.y, 3);
      const auto back = model_from_json(model_to_json(model));
      CHECK(back.kind == kind);
      CHECK(model_to_json(back) == model_to_json(model));
      for (std::size_t i = 0; i < b.x.rows(); ++i) CHECK(predict(back, b.x.row(i)) == predict(model, b.x.row(i)));
    }
    auto j = model_to_json(fit(ClassifierKind::gnb, b.x, b.y, 3));
    j["version"] = kModelFormatVersion + 1;
    CHECK_THROWS_AS(model_from_json(j), Error);
  }

  TEST_CASE("hyperparameter validation") {
    Hyperparams hp;
    CHECK_NOTHROW(validate(hp));
    hp.knn_k = 0;
    CHECK_THROWS_AS(validate(hp), Error);
    hp = {};
    hp.logreg_l2 = -1.0;
    CHECK_THROWS_AS(validate(hp), Error);
    CHECK(hyperparams_from_json(to_json(Hyperparams{})) == Hyperparams{});
  }

  TEST_CASE("training input errors") {
    const Matrix x = matrix_of({{1.0}, {2.0}});
    CHECK_THROWS_AS(fit_gnb(x, std::vector<int>{0}, 2), Error);
    CHECK_THROWS_AS(fit_gnb(x, std::vector<int>{0, 5}, 2), Error);
    CHECK_THROWS_AS(fit_gnb(Matrix(), std::vector<int>{}, 2), Error);
    CHECK_THROWS_AS(fit_logreg(x, std::vector<int>{0, 0}, 1), Error);
  }
}
