#include "moralvig/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <set>

#include "moralvig/error.hpp"
#include "moralvig/rng.hpp"

namespace moralvig {

int FoldSpec::fold_of(const std::string& id) const {
  const auto it = assignments.find(id);
  if (it == assignments.end()) {
    throw Error(ErrorCode::missing_vector, "vignette '" + id + "' has no fold assignment");
  }
  return it->second;
}

FoldSpec stratified_kfold(std::span<const std::string> ids, std::span<const int> labels, int k,
                          std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "k must be at least 2");
  if (ids.size() != labels.size()) {
    throw Error(ErrorCode::invalid_argument, "ids and labels differ in length");
  }
  std::map<int, std::vector<std::string>> by_class;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!seen.insert(ids[i]).second) {
      throw Error(ErrorCode::duplicate_id, "duplicate id '" + ids[i] + "' in fold assignment");
    }
    by_class[labels[i]].push_back(ids[i]);
  }

  FoldSpec spec;
  spec.seed = seed;
  spec.k = k;
  Rng rng(seed);
  std::size_t next_fold = 0;
  for (auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(k)) {
      spec.warnings.push_back("class " + std::to_string(label) + " has " +
                              std::to_string(members.size()) + " members, fewer than k = " +
                              std::to_string(k));
    }
    std::sort(members.begin(), members.end());
    rng.shuffle(std::span<std::string>(members));
    for (const auto& id : members) {
      spec.assignments[id] = static_cast<int>(next_fold);
      next_fold = (next_fold + 1) % static_cast<std::size_t>(k);
    }
  }
  return spec;
}

Learner classifier_learner(ClassifierKind kind, const Hyperparams& hp) {
  return [kind, hp](const FeatureMatrix& matrix, std::span<const std::size_t> train_rows,
                    int class_count, std::uint64_t seed) -> Predictor {
    // Training order follows vignette ids, not matrix positions.
    std::vector<std::size_t> rows(train_rows.begin(), train_rows.end());
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return matrix.ids[a] < matrix.ids[b]; });
    const Matrix x = matrix.values.select_rows(rows);
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back(matrix.labels[r]);
    Hyperparams cell_hp = hp;
    cell_hp.seed = seed;
    auto model = std::make_shared<TrainedModel>(fit(kind, x, y, class_count, cell_hp));
    return [model, &matrix](std::size_t row) { return predict(*model, matrix.values.row(row)); };
  };
}

double CvResult::mean_accuracy() const {
  double sum = 0.0;
  int count = 0;
  for (double a : fold_accuracies) {
    if (std::isnan(a)) continue;
    sum += a;
    ++count;
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count;
}

CvResult cross_validate(const FeatureMatrix& matrix, int class_count, const Learner& learner,
                        const FoldSpec& folds, std::uint64_t seed) {
  if (matrix.rows() == 0) throw Error(ErrorCode::invalid_argument, "feature matrix is empty");
  std::vector<int> fold_of_row(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) fold_of_row[r] = folds.fold_of(matrix.ids[r]);

  CvResult result;
  result.fold_accuracies.assign(static_cast<std::size_t>(folds.k),
                                std::numeric_limits<double>::quiet_NaN());
  result.fold_sizes.assign(static_cast<std::size_t>(folds.k), 0);
  for (int f = 0; f < folds.k; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      (fold_of_row[r] == f ? test_rows : train_rows).push_back(r);
    }
    if (test_rows.empty()) {
      result.warnings.push_back("fold " + std::to_string(f) + " has no rows");
      continue;
    }
    if (train_rows.empty()) {
      throw Error(ErrorCode::empty_class, "fold " + std::to_string(f) + " leaves no training rows");
    }
    std::set<int> train_classes;
    for (std::size_t r : train_rows) train_classes.insert(matrix.labels[r]);
    for (std::size_t r : test_rows) {
      if (!train_classes.contains(matrix.labels[r])) {
        result.warnings.push_back("fold " + std::to_string(f) + ": class " +
                                  std::to_string(matrix.labels[r]) + " absent from training");
        break;
      }
    }
    const Predictor predictor =
        learner(matrix, train_rows, class_count, derive_seed(seed, "fold" + std::to_string(f)));
    std::size_t correct = 0;
    for (std::size_t r : test_rows) {
      const int predicted = predictor(r);
      if (predicted == matrix.labels[r]) ++correct;
      result.predictions.push_back({r, f, predicted});
    }
    result.fold_sizes[static_cast<std::size_t>(f)] = test_rows.size();
    result.fold_accuracies[static_cast<std::size_t>(f)] =
        static_cast<double>(correct) / static_cast<double>(test_rows.size());
  }
  std::sort(result.predictions.begin(), result.predictions.end(),
            [](const RowPrediction& a, const RowPrediction& b) { return a.row < b.row; });
  return result;
}

CvResult cross_validate(const FeatureMatrix& matrix, int class_count, ClassifierKind kind,
                        const Hyperparams& hp, const FoldSpec& folds) {
  return cross_validate(matrix, class_count, classifier_learner(kind, hp), folds, hp.seed);
}

RowSummary summarize(std::span<const double> classifier_means) {
  if (classifier_means.empty()) throw Error(ErrorCode::missing_cell, "nothing to summarize");
  const double n = static_cast<double>(classifier_means.size());
  const double mean = std::accumulate(classifier_means.begin(), classifier_means.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : classifier_means) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::map<std::pair<Dataset, Scheme>, RowSummary> summarize(
    const std::map<CellKey, CellResult>& cells, std::span<const ClassifierKind> classifiers) {
  std::set<std::pair<Dataset, Scheme>> rows;
  for (const auto& [key, cell] : cells) rows.insert({key.dataset, key.scheme});
  std::map<std::pair<Dataset, Scheme>, RowSummary> out;
  for (const auto& [dataset, scheme] : rows) {
    std::vector<double> means;
    for (ClassifierKind kind : classifiers) {
      const auto it = cells.find({dataset, scheme, kind});
      if (it == cells.end()) {
        throw Error(ErrorCode::missing_cell, "missing cell " + std::string(to_string(dataset)) + "/" +
                                                 std::string(to_string(scheme)) + "/" +
                                                 std::string(to_string(kind)));
      }
      means.push_back(it->second.mean);
    }
    out[{dataset, scheme}] = summarize(means);
  }
  return out;
}

std::vector<ErrorRecord> error_report(const FeatureMatrix& matrix, const CvResult& cv,
                                      std::span<const Vignette> corpus, const LabelSpace& labels,
                                      ClassifierKind classifier) {
  std::map<std::string_view, const Vignette*> by_id;
  for (const auto& v : corpus) by_id[v.id] = &v;

  std::vector<ErrorRecord> out;
  for (const auto& p : cv.predictions) {
    const int truth = matrix.labels[p.row];
    if (p.predicted == truth) continue;
    const auto it = by_id.find(matrix.ids[p.row]);
    if (it == by_id.end()) {
      throw Error(ErrorCode::missing_vector, "vignette '" + matrix.ids[p.row] + "' not in corpus");
    }
    ErrorRecord rec;
    rec.dataset = it->second->dataset;
    rec.vignette_id = it->second->id;
    rec.text = it->second->text;
    rec.predicted = labels.classes.at(static_cast<std::size_t>(p.predicted));
    rec.truth = labels.classes.at(static_cast<std::size_t>(truth));
    rec.classifier = classifier;
    rec.scheme = matrix.scheme;
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const ErrorRecord& a, const ErrorRecord& b) {
    return std::tie(a.dataset, a.vignette_id) < std::tie(b.dataset, b.vignette_id);
  });
  return out;
}

std::vector<ErrorRecord> error_report(const FeatureMatrix& matrix, std::span<const Vignette> corpus,
                                      const LabelSpace& labels, ClassifierKind kind,
                                      const Hyperparams& hp, const FoldSpec& folds) {
  const auto cv = cross_validate(matrix, static_cast<int>(labels.size()), kind, hp, folds);
  return error_report(matrix, cv, corpus, labels, kind);
}

std::string display_label(std::string_view label) {
  std::string out(label);
  for (char& c : out) {
    if (c == '_') c = ' ';
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

}  // namespace moralvig
