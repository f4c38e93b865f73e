#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "moralvig/matrix.hpp"

namespace moralvig {

enum class ClassifierKind { gnb, knn, logreg, svm };

inline constexpr ClassifierKind kAllClassifiers[] = {ClassifierKind::gnb, ClassifierKind::knn,
                                                     ClassifierKind::logreg, ClassifierKind::svm};

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view name);
// Column header in the accuracy grid: NB, kNN, LR, SVC.
std::string_view display_name(ClassifierKind kind);

struct Hyperparams {
  int knn_k = 5;
  double logreg_l2 = 1.0;
  double logreg_tol = 1e-6;
  int logreg_max_iter = 1000;
  double svm_l2 = 1.0;
  int svm_epochs = 200;
  std::uint64_t seed = 0;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

nlohmann::json to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const nlohmann::json& j);
void validate(const Hyperparams& hp);

/// Per-feature z-score fitted on training rows. Features whose population
/// standard deviation is (numerically) zero are flagged and passed through
/// unchanged (mean 0, stddev 1).
struct Standardization {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> zero_variance;

  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply(const Matrix& x) const;
};

Standardization fit_standardization(const Matrix& train);

struct StandardizedSplit {
  Matrix train;
  Matrix test;
  Standardization standardization;
};

StandardizedSplit standardize_fit_apply(const Matrix& train, const Matrix& test);

struct GnbParams {
  Matrix means;      // classes x features
  Matrix variances;  // floored
  std::vector<double> log_priors;  // -inf for classes absent from training
  double variance_floor = 0.0;
};

struct KnnParams {
  Matrix points;  // standardized training rows
  std::vector<int> labels;
};

// Shared by logistic regression and the one-vs-rest SVM: score_c = w_c . x + b_c.
struct LinearParams {
  Matrix weights;  // classes x features
  std::vector<double> bias;
};

struct FitTrace {
  std::vector<double> objective;  // logreg: per accepted step; svm: final per class
  int iterations = 0;
  bool converged = false;
};

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::gnb;
  int class_count = 0;
  Hyperparams hyperparams;
  Standardization standardization;
  std::variant<GnbParams, KnnParams, LinearParams> params;
  FitTrace trace;
};

// All fit functions take raw features; standardization is fitted inside and
// stored in the model. Labels are class indices in [0, class_count).

TrainedModel fit_gnb(const Matrix& x, std::span<const int> y, int class_count);
int predict_gnb(const TrainedModel& model, std::span<const double> x);
// Per-class joint log-likelihood on already standardized input.
std::vector<double> gnb_log_joint(const GnbParams& params, std::span<const double> z);

TrainedModel fit_knn(const Matrix& x, std::span<const int> y, int class_count,
                     const Hyperparams& hp = {});
int predict_knn(const TrainedModel& model, std::span<const double> x, int k);

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

TrainedModel fit_logreg(const Matrix& x, std::span<const int> y, int class_count,
                        const Hyperparams& hp = {});
Prediction predict_logreg(const TrainedModel& model, std::span<const double> x);

TrainedModel fit_svm(const Matrix& x, std::span<const int> y, int class_count,
                     const Hyperparams& hp = {});
int predict_svm(const TrainedModel& model, std::span<const double> x);

TrainedModel fit(ClassifierKind kind, const Matrix& x, std::span<const int> y, int class_count,
                 const Hyperparams& hp = {});
int predict(const TrainedModel& model, std::span<const double> x);

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> scores);

/// Mean cross-entropy + (l2/2)||W||^2 on the given (standardized) rows. When
/// `gradient` is non-null it receives dJ/dW and dJ/db.
double logreg_objective(const LinearParams& params, const Matrix& x, std::span<const int> y,
                        double l2, LinearParams* gradient = nullptr);

/// (l2/2)||w||^2 + mean hinge loss for targets in {-1, +1}.
double svm_objective(std::span<const double> w, double b, const Matrix& x,
                     std::span<const int> targets, double l2);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace moralvig
