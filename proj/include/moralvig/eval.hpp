#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "moralvig/classifiers.hpp"
#include "moralvig/corpus.hpp"
#include "moralvig/features.hpp"

namespace moralvig {

struct FoldSpec {
  std::uint64_t seed = 0;
  int k = 5;
  std::map<std::string, int> assignments;  // vignette id -> fold
  std::vector<std::string> warnings;

  int fold_of(const std::string& id) const;  // throws missing_vector when unassigned
};

/// Stratified k-fold assignment. Members of each class are ordered by id,
/// shuffled with the seed and dealt round-robin; each class starts where the
/// previous one stopped so fold sizes stay within one of each other. Classes
/// with fewer than k members produce a warning.
FoldSpec stratified_kfold(std::span<const std::string> ids, std::span<const int> labels, int k,
                          std::uint64_t seed);

/// Prediction for matrix row `row`.
using Predictor = std::function<int(std::size_t row)>;

/// Trains on the listed rows of the matrix and returns a predictor.
using Learner =
    std::function<Predictor(const FeatureMatrix& matrix, std::span<const std::size_t> train_rows,
                            int class_count, std::uint64_t seed)>;

Learner classifier_learner(ClassifierKind kind, const Hyperparams& hp);

struct RowPrediction {
  std::size_t row = 0;
  int fold = 0;
  int predicted = 0;
};

struct CvResult {
  std::vector<double> fold_accuracies;  // NaN for folds with no rows
  std::vector<std::size_t> fold_sizes;
  std::vector<RowPrediction> predictions;  // matrix row order
  std::vector<std::string> warnings;

  // Mean over non-empty folds.
  double mean_accuracy() const;
};

/// k-fold cross-validation. The learner's seed for fold f is
/// derive_seed(seed, "fold<f>").
CvResult cross_validate(const FeatureMatrix& matrix, int class_count, const Learner& learner,
                        const FoldSpec& folds, std::uint64_t seed = 0);
CvResult cross_validate(const FeatureMatrix& matrix, int class_count, ClassifierKind kind,
                        const Hyperparams& hp, const FoldSpec& folds);

struct RowSummary {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
};

RowSummary summarize(std::span<const double> classifier_means);

struct CellKey {
  Dataset dataset = Dataset::chadwick;
  Scheme scheme = Scheme::contextual;
  ClassifierKind classifier = ClassifierKind::gnb;

  auto operator<=>(const CellKey&) const = default;
};

struct CellResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
};

/// Mean and population SD over the classifier means of every (dataset,
/// scheme) row. Each row must carry all of `classifiers`; otherwise throws
/// missing_cell.
std::map<std::pair<Dataset, Scheme>, RowSummary> summarize(
    const std::map<CellKey, CellResult>& cells,
    std::span<const ClassifierKind> classifiers = kAllClassifiers);

struct ErrorRecord {
  Dataset dataset = Dataset::chadwick;
  std::string vignette_id;
  std::string text;
  std::string predicted;
  std::string truth;
  ClassifierKind classifier = ClassifierKind::logreg;
  Scheme scheme = Scheme::contextual;
};

/// Every misclassification of a cross-validation run, sorted by dataset then
/// vignette id.
std::vector<ErrorRecord> error_report(const FeatureMatrix& matrix, const CvResult& cv,
                                      std::span<const Vignette> corpus, const LabelSpace& labels,
                                      ClassifierKind classifier);

std::vector<ErrorRecord> error_report(const FeatureMatrix& matrix, std::span<const Vignette> corpus,
                                      const LabelSpace& labels, ClassifierKind kind,
                                      const Hyperparams& hp, const FoldSpec& folds);

// "Unfriendly", "Fairness": first letter capitalised, underscores to spaces.
std::string display_label(std::string_view label);

}  // namespace moralvig
