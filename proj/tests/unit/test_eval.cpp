#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "moralvig/error.hpp"
#include "moralvig/eval.hpp"
#include "moralvig/rng.hpp"

using namespace moralvig;

namespace {

std::string id_of(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "v%04d", i);
  return buf;
}

struct Dataset1 {
  std::vector<std::string> ids;
  std::vector<int> labels;
};

Dataset1 balanced(const std::vector<int>& counts) {
  Dataset1 d;
  int next = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (int i = 0; i < counts[c]; ++i) {
      d.ids.push_back(id_of(next++));
      d.labels.push_back(static_cast<int>(c));
    }
  }
  return d;
}

FeatureMatrix noisy_matrix(const Dataset1& d, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m;
  m.ids = d.ids;
  m.labels = d.labels;
  for (int label : d.labels) {
    const std::vector<double> row = {label + 0.8 * rng.normal(), -label + 0.8 * rng.normal()};
    m.values.append_row(row);
  }
  return m;
}

Learner memorizing() {
  return [](const FeatureMatrix& m, std::span<const std::size_t>, int, std::uint64_t) -> Predictor {
    return [&m](std::size_t row) { return m.labels[row]; };
  };
}

Learner majority() {
  return [](const FeatureMatrix& m, std::span<const std::size_t> train, int classes,
            std::uint64_t) -> Predictor {
    std::vector<int> counts(static_cast<std::size_t>(classes), 0);
    for (std::size_t r : train) ++counts[static_cast<std::size_t>(m.labels[r])];
    const int best = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    return [best](std::size_t) { return best; };
  };
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("perfect stratification of two classes of five") {
    const auto d = balanced({5, 5});
    const auto folds = stratified_kfold(d.ids, d.labels, 5, 0);
    std::map<int, std::vector<int>> per_fold;
    for (std::size_t i = 0; i < d.ids.size(); ++i) per_fold[folds.fold_of(d.ids[i])].push_back(d.labels[i]);
    REQUIRE(per_fold.size() == 5);
    for (auto& [f, labels] : per_fold) {
      std::sort(labels.begin(), labels.end());
      CHECK(labels == std::vector<int>{0, 1});
    }
  }

  TEST_CASE("fold assignment is seed-deterministic") {
    const auto d = balanced({7, 9, 4});
    CHECK(stratified_kfold(d.ids, d.labels, 5, 3).assignments ==
          stratified_kfold(d.ids, d.labels, 5, 3).assignments);
    CHECK(stratified_kfold(d.ids, d.labels, 5, 3).assignments !=
          stratified_kfold(d.ids, d.labels, 5, 4).assignments);
  }

  TEST_CASE("fold assignment ignores input order") {
    auto d = balanced({6, 6, 6});
    const auto a = stratified_kfold(d.ids, d.labels, 5, 1);
    std::reverse(d.ids.begin(), d.ids.end());
    std::reverse(d.labels.begin(), d.labels.end());
    CHECK(stratified_kfold(d.ids, d.labels, 5, 1).assignments == a.assignments);
  }

  TEST_CASE("132 items in five classes") {
    const auto d = balanced({30, 28, 26, 25, 23});
    REQUIRE(d.ids.size() == 132);
    const auto folds = stratified_kfold(d.ids, d.labels, 5, 0);
    std::map<int, int> sizes;
    std::map<std::pair<int, int>, int> per_class;
    for (std::size_t i = 0; i < d.ids.size(); ++i) {
      const int f = folds.fold_of(d.ids[i]);
      ++sizes[f];
      ++per_class[{d.labels[i], f}];
    }
    for (const auto& [f, n] : sizes) CHECK((n == 26 || n == 27));
    for (int c = 0; c < 5; ++c) {
      int lo = 1000;
      int hi = 0;
      for (int f = 0; f < 5; ++f) {
        lo = std::min(lo, per_class[{c, f}]);
        hi = std::max(hi, per_class[{c, f}]);
      }
      CHECK(hi - lo <= 1);
    }
    CHECK(folds.warnings.empty());
  }

  TEST_CASE("small classes warn") {
    const auto d = balanced({2, 8});
    CHECK(stratified_kfold(d.ids, d.labels, 5, 0).warnings.size() == 1);
    CHECK_THROWS_AS(stratified_kfold(d.ids, d.labels, 1, 0), Error);
  }

  TEST_CASE("memorizing stub scores one on every fold") {
    const auto d = balanced({5, 5, 5});
    const auto m = noisy_matrix(d, 1);
    const auto cv = cross_validate(m, 3, memorizing(), stratified_kfold(d.ids, d.labels, 5, 0));
    for (double a : cv.fold_accuracies) CHECK(a == 1.0);
  }

  TEST_CASE("majority stub sits at chance on a balanced ten-class set") {
    const auto d = balanced(std::vector<int>(10, 50));
    const auto m = noisy_matrix(d, 2);
    const auto cv = cross_validate(m, 10, majority(), stratified_kfold(d.ids, d.labels, 5, 0));
    CHECK(std::abs(cv.mean_accuracy() - 0.10) <= 0.02);
  }

  TEST_CASE("accuracy is independent of matrix row order") {
    const auto d = balanced({12, 12, 12});
    const auto m = noisy_matrix(d, 3);
    const auto folds = stratified_kfold(d.ids, d.labels, 5, 0);
    std::vector<std::size_t> order(m.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng(8).shuffle(std::span<std::size_t>(order));
    FeatureMatrix shuffled;
    shuffled.values = m.values.select_rows(order);
    for (std::size_t r : order) {
      shuffled.ids.push_back(m.ids[r]);
      shuffled.labels.push_back(m.labels[r]);
    }
    for (ClassifierKind kind : kAllClassifiers) {
      Hyperparams hp;
      hp.seed = 77;
      const auto a = cross_validate(m, 3, kind, hp, folds);
      const auto b = cross_validate(shuffled, 3, kind, hp, folds);
      CHECK(a.fold_accuracies == b.fold_accuracies);
    }
  }

  TEST_CASE("accuracies are proportions") {
    const auto d = balanced({9, 9, 9});
    const auto m = noisy_matrix(d, 4);
    const auto folds = stratified_kfold(d.ids, d.labels, 5, 0);
    for (ClassifierKind kind : kAllClassifiers) {
      const auto cv = cross_validate(m, 3, kind, Hyperparams{}, folds);
      for (double a : cv.fold_accuracies) CHECK((a >= 0.0 && a <= 1.0));
      CHECK(cv.predictions.size() == m.rows());
    }
  }

  TEST_CASE("summaries use the population standard deviation") {
    const auto chad = summarize(std::vector<double>{44.80, 46.20, 51.80, 50.00});
    CHECK(std::abs(chad.mean - 48.20) <= 0.01);
    CHECK(std::abs(chad.sd - 2.81) <= 0.01);
    const auto cliff = summarize(std::vector<double>{58.68, 51.68, 65.79, 54.63});
    CHECK(std::abs(cliff.mean - 57.70) <= 0.01);
    CHECK(std::abs(cliff.sd - 5.29) <= 0.01);
    CHECK(summarize(std::vector<double>{0.3, 0.3, 0.3, 0.3}).sd == 0.0);
  }

  TEST_CASE("row summaries need every classifier") {
    std::map<CellKey, CellResult> cells;
    for (ClassifierKind k : kAllClassifiers) cells[{Dataset::clifford, Scheme::emotion, k}] = {{}, 0.5};
    CHECK(summarize(cells).size() == 1);
    cells.erase({Dataset::clifford, Scheme::emotion, ClassifierKind::svm});
    CHECK_THROWS_AS(summarize(cells), Error);
  }

  TEST_CASE("error reports") {
    const auto d = balanced({6, 6, 6});
    const auto m = noisy_matrix(d, 5);
    std::vector<Vignette> corpus;
    for (std::size_t i = 0; i < d.ids.size(); ++i) {
      corpus.push_back({d.ids[i], Dataset::mccurrie, "text " + d.ids[i],
                        std::vector<std::string>{"care", "fairness", "purity"}[static_cast<std::size_t>(d.labels[i])],
                        Polarity::negative});
    }
    const auto labels = label_space(corpus, Dataset::mccurrie);
    const auto folds = stratified_kfold(d.ids, d.labels, 5, 0);

    const auto perfect = cross_validate(m, 3, memorizing(), folds);
    CHECK(error_report(m, perfect, corpus, labels, ClassifierKind::logreg).empty());

    const auto cv = cross_validate(m, 3, majority(), folds);
    const auto errors = error_report(m, cv, corpus, labels, ClassifierKind::logreg);
    double expected = 0.0;
    for (std::size_t f = 0; f < cv.fold_accuracies.size(); ++f) {
      expected += (1.0 - cv.fold_accuracies[f]) * static_cast<double>(cv.fold_sizes[f]);
    }
    CHECK(static_cast<double>(errors.size()) == doctest::Approx(expected));
    CHECK(std::is_sorted(errors.begin(), errors.end(), [](const ErrorRecord& a, const ErrorRecord& b) {
      return a.vignette_id < b.vignette_id;
    }));
    for (const auto& e : errors) CHECK(e.predicted != e.truth);
  }

  TEST_CASE("display labels") {
    CHECK(display_label("unfriendly") == "Unfriendly");
    CHECK(display_label("care_vice") == "Care vice");
  }
}
