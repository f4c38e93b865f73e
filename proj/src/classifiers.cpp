#include "moralvig/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "moralvig/error.hpp"
#include "moralvig/lexicons.hpp"
#include "moralvig/rng.hpp"

namespace moralvig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_training_set(const Matrix& x, std::span<const int> y, int class_count) {
  if (x.rows() == 0) throw Error(ErrorCode::empty_class, "training set is empty");
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::invalid_argument, "feature rows and labels differ in length");
  }
  if (class_count < 1) throw Error(ErrorCode::invalid_argument, "class_count must be positive");
  for (int label : y) {
    if (label < 0 || label >= class_count) {
      throw Error(ErrorCode::invalid_argument, "label " + std::to_string(label) + " out of range");
    }
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "training features are not finite");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Strict '>' keeps the lowest index among ties.
int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

TrainedModel make_model(ClassifierKind kind, int class_count, const Hyperparams& hp,
                        Standardization standardization) {
  TrainedModel model;
  model.kind = kind;
  model.class_count = class_count;
  model.hyperparams = hp;
  model.standardization = std::move(standardization);
  return model;
}

void require_kind(const TrainedModel& model, ClassifierKind kind) {
  if (model.kind != kind) {
    throw Error(ErrorCode::invalid_argument, "model is " + std::string(to_string(model.kind)) +
                                                 ", not " + std::string(to_string(kind)));
  }
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::gnb: return "gnb";
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::logreg: return "logreg";
    case ClassifierKind::svm: return "svm";
  }
  return "unknown";
}

ClassifierKind parse_classifier(std::string_view name) {
  const std::string key = ascii_lower(name);
  for (ClassifierKind k : kAllClassifiers) {
    if (to_string(k) == key) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown classifier '" + std::string(name) + "'");
}

std::string_view display_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::gnb: return "NB";
    case ClassifierKind::knn: return "kNN";
    case ClassifierKind::logreg: return "LR";
    case ClassifierKind::svm: return "SVC";
  }
  return "unknown";
}

nlohmann::json to_json(const Hyperparams& hp) {
  return {{"knn_k", hp.knn_k},
          {"logreg_l2", hp.logreg_l2},
          {"logreg_tol", hp.logreg_tol},
          {"logreg_max_iter", hp.logreg_max_iter},
          {"svm_l2", hp.svm_l2},
          {"svm_epochs", hp.svm_epochs},
          {"seed", hp.seed}};
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
  Hyperparams hp;
  hp.knn_k = j.value("knn_k", hp.knn_k);
  hp.logreg_l2 = j.value("logreg_l2", hp.logreg_l2);
  hp.logreg_tol = j.value("logreg_tol", hp.logreg_tol);
  hp.logreg_max_iter = j.value("logreg_max_iter", hp.logreg_max_iter);
  hp.svm_l2 = j.value("svm_l2", hp.svm_l2);
  hp.svm_epochs = j.value("svm_epochs", hp.svm_epochs);
  hp.seed = j.value("seed", hp.seed);
  validate(hp);
  return hp;
}

void validate(const Hyperparams& hp) {
  if (hp.knn_k < 1) throw Error(ErrorCode::invalid_argument, "knn_k must be positive");
  if (!(hp.logreg_l2 >= 0.0)) throw Error(ErrorCode::invalid_argument, "logreg_l2 must be >= 0");
  if (!(hp.logreg_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "logreg_tol must be > 0");
  if (hp.logreg_max_iter < 1) throw Error(ErrorCode::invalid_argument, "logreg_max_iter must be positive");
  if (!(hp.svm_l2 >= 0.0)) throw Error(ErrorCode::invalid_argument, "svm_l2 must be >= 0");
  if (hp.svm_epochs < 1) throw Error(ErrorCode::invalid_argument, "svm_epochs must be positive");
}

// ---------------------------------------------------------------------------
// Standardization

std::vector<double> Standardization::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorCode::invalid_argument, "expected " + std::to_string(mean.size()) +
                                                 " features, got " + std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / stddev[j];
  return out;
}

Matrix Standardization::apply(const Matrix& x) const {
  if (x.rows() > 0 && x.cols() != mean.size()) {
    throw Error(ErrorCode::invalid_argument, "column count differs from the fitted standardization");
  }
  Matrix out(x.rows(), mean.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < mean.size(); ++j) dst[j] = (src[j] - mean[j]) / stddev[j];
  }
  return out;
}

Standardization fit_standardization(const Matrix& train) {
  if (train.rows() == 0) throw Error(ErrorCode::invalid_argument, "cannot standardize an empty matrix");
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  Standardization s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  s.zero_variance.assign(d, false);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = r[j] - s.mean[j];
      var[j] += diff * diff;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    if (sd <= 1e-12 * std::max(1.0, std::abs(s.mean[j]))) {
      s.zero_variance[j] = true;
      s.mean[j] = 0.0;
      s.stddev[j] = 1.0;
    } else {
      s.stddev[j] = sd;
    }
  }
  return s;
}

StandardizedSplit standardize_fit_apply(const Matrix& train, const Matrix& test) {
  if (test.rows() > 0 && test.cols() != train.cols()) {
    throw Error(ErrorCode::invalid_argument, "train and test column counts differ");
  }
  StandardizedSplit out;
  out.standardization = fit_standardization(train);
  out.train = out.standardization.apply(train);
  out.test = out.standardization.apply(test);
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

TrainedModel fit_gnb(const Matrix& x, std::span<const int> y, int class_count) {
  check_training_set(x, y, class_count);
  auto standardization = fit_standardization(x);
  const Matrix z = standardization.apply(x);
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const auto k = static_cast<std::size_t>(class_count);

  GnbParams p;
  p.means = Matrix(k, d);
  p.variances = Matrix(k, d);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    ++counts[c];
    auto r = z.row(i);
    for (std::size_t j = 0; j < d; ++j) p.means(c, j) += r[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) p.means(c, j) /= static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    auto r = z.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = r[j] - p.means(c, j);
      p.variances(c, j) += diff * diff;
    }
  }

  // Floor relative to the largest per-feature variance of the training set.
  double max_feature_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += z(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (z(i, j) - mean) * (z(i, j) - mean);
    max_feature_var = std::max(max_feature_var, var / static_cast<double>(n));
  }
  p.variance_floor = max_feature_var > 0.0 ? 1e-9 * max_feature_var : 1e-9;

  p.log_priors.assign(k, kNegInf);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    p.log_priors[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
      p.variances(c, j) = std::max(p.variances(c, j) / static_cast<double>(counts[c]),
                                   p.variance_floor);
    }
  }

  TrainedModel model = make_model(ClassifierKind::gnb, class_count, {}, std::move(standardization));
  model.params = std::move(p);
  return model;
}

std::vector<double> gnb_log_joint(const GnbParams& p, std::span<const double> z) {
  const std::size_t k = p.log_priors.size();
  std::vector<double> out(k, kNegInf);
  for (std::size_t c = 0; c < k; ++c) {
    if (p.log_priors[c] == kNegInf) continue;
    double s = p.log_priors[c];
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double var = p.variances(c, j);
      const double diff = z[j] - p.means(c, j);
      s += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
    }
    out[c] = s;
  }
  return out;
}

int predict_gnb(const TrainedModel& model, std::span<const double> x) {
  require_kind(model, ClassifierKind::gnb);
  const auto z = model.standardization.apply(x);
  const auto joint = gnb_log_joint(std::get<GnbParams>(model.params), z);
  return argmax(joint);
}

// ---------------------------------------------------------------------------
// k nearest neighbours

TrainedModel fit_knn(const Matrix& x, std::span<const int> y, int class_count,
                     const Hyperparams& hp) {
  check_training_set(x, y, class_count);
  if (hp.knn_k < 1) throw Error(ErrorCode::invalid_argument, "k must be positive");
  if (static_cast<std::size_t>(hp.knn_k) > x.rows()) {
    throw Error(ErrorCode::k_too_large, "k = " + std::to_string(hp.knn_k) + " exceeds " +
                                            std::to_string(x.rows()) + " training rows");
  }
  auto standardization = fit_standardization(x);
  KnnParams p;
  p.points = standardization.apply(x);
  p.labels.assign(y.begin(), y.end());
  TrainedModel model = make_model(ClassifierKind::knn, class_count, hp, std::move(standardization));
  model.params = std::move(p);
  return model;
}

int predict_knn(const TrainedModel& model, std::span<const double> x, int k) {
  require_kind(model, ClassifierKind::knn);
  const auto& p = std::get<KnnParams>(model.params);
  const std::size_t n = p.points.rows();
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be positive");
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::k_too_large,
                "k = " + std::to_string(k) + " exceeds " + std::to_string(n) + " training rows");
  }
  const auto z = model.standardization.apply(x);

  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = p.points.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double diff = z[j] - r[j];
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  // (distance, row index) ordering breaks distance ties by lower row index.
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  std::vector<int> votes(static_cast<std::size_t>(model.class_count), 0);
  for (int i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(p.labels[dist[static_cast<std::size_t>(i)].second])];
  const int top = *std::max_element(votes.begin(), votes.end());
  // Vote ties go to the class of the nearest neighbour among the tied classes.
  for (int i = 0; i < k; ++i) {
    const int label = p.labels[dist[static_cast<std::size_t>(i)].second];
    if (votes[static_cast<std::size_t>(label)] == top) return label;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  if (out.empty()) return out;
  const double m = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

double logreg_objective(const LinearParams& params, const Matrix& x, std::span<const int> y,
                        double l2, LinearParams* gradient) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t k = params.bias.size();
  if (gradient != nullptr) {
    gradient->weights = Matrix(k, d);
    gradient->bias.assign(k, 0.0);
  }
  std::vector<double> scores(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t c = 0; c < k; ++c) scores[c] = dot(params.weights.row(c), xi) + params.bias[c];
    const auto yi = static_cast<std::size_t>(y[i]);
    const double lse = log_sum_exp(scores);
    loss += lse - scores[yi];
    if (gradient != nullptr) {
      for (std::size_t c = 0; c < k; ++c) {
        const double residual = std::exp(scores[c] - lse) - (c == yi ? 1.0 : 0.0);
        gradient->bias[c] += residual;
        auto g = gradient->weights.row(c);
        for (std::size_t j = 0; j < d; ++j) g[j] += residual * xi[j];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double penalty = 0.0;
  for (double w : params.weights.data()) penalty += w * w;
  if (gradient != nullptr) {
    for (double& g : gradient->bias) g *= inv_n;
    auto& gw = gradient->weights.data();
    const auto& w = params.weights.data();
    for (std::size_t i = 0; i < gw.size(); ++i) gw[i] = gw[i] * inv_n + l2 * w[i];
  }
  return loss * inv_n + 0.5 * l2 * penalty;
}

TrainedModel fit_logreg(const Matrix& x, std::span<const int> y, int class_count,
                        const Hyperparams& hp) {
  check_training_set(x, y, class_count);
  if (class_count < 2) throw Error(ErrorCode::invalid_argument, "logistic regression needs >= 2 classes");
  validate(hp);
  auto standardization = fit_standardization(x);
  const Matrix z = standardization.apply(x);
  const auto k = static_cast<std::size_t>(class_count);

  LinearParams params{Matrix(k, z.cols()), std::vector<double>(k, 0.0)};
  LinearParams grad;
  LinearParams trial = params;
  double objective = logreg_objective(params, z, y, hp.logreg_l2, &grad);
  if (!std::isfinite(objective)) throw Error(ErrorCode::non_finite, "logistic objective is not finite");

  TrainedModel model = make_model(ClassifierKind::logreg, class_count, hp, std::move(standardization));
  model.trace.objective.push_back(objective);

  auto max_abs = [](const LinearParams& g) {
    double m = 0.0;
    for (double v : g.weights.data()) m = std::max(m, std::abs(v));
    for (double v : g.bias) m = std::max(m, std::abs(v));
    return m;
  };
  auto squared_norm = [](const LinearParams& g) {
    double s = 0.0;
    for (double v : g.weights.data()) s += v * v;
    for (double v : g.bias) s += v * v;
    return s;
  };

  double step = 1.0;
  int iter = 0;
  for (; iter < hp.logreg_max_iter; ++iter) {
    if (max_abs(grad) < hp.logreg_tol) {
      model.trace.converged = true;
      break;
    }
    const double g2 = squared_norm(grad);
    bool accepted = false;
    double trial_objective = objective;
    // Backtracking line search with the Armijo sufficient-decrease test.
    for (int halvings = 0; halvings < 60; ++halvings) {
      auto& tw = trial.weights.data();
      const auto& w = params.weights.data();
      const auto& gw = grad.weights.data();
      for (std::size_t i = 0; i < tw.size(); ++i) tw[i] = w[i] - step * gw[i];
      for (std::size_t c = 0; c < k; ++c) trial.bias[c] = params.bias[c] - step * grad.bias[c];
      trial_objective = logreg_objective(trial, z, y, hp.logreg_l2);
      if (!std::isfinite(trial_objective)) {
        throw Error(ErrorCode::non_finite, "logistic objective became non-finite; check feature scaling");
      }
      if (trial_objective <= objective - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left
    std::swap(params, trial);
    objective = logreg_objective(params, z, y, hp.logreg_l2, &grad);
    model.trace.objective.push_back(objective);
    step = std::min(step * 2.0, 1e6);
  }
  if (!model.trace.converged && max_abs(grad) < hp.logreg_tol) model.trace.converged = true;
  model.trace.iterations = iter;
  model.params = std::move(params);
  return model;
}

Prediction predict_logreg(const TrainedModel& model, std::span<const double> x) {
  require_kind(model, ClassifierKind::logreg);
  const auto& p = std::get<LinearParams>(model.params);
  const auto z = model.standardization.apply(x);
  std::vector<double> scores(p.bias.size());
  for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = dot(p.weights.row(c), z) + p.bias[c];
  Prediction out;
  out.probabilities = softmax(scores);
  out.label = argmax(out.probabilities);
  return out;
}

// ---------------------------------------------------------------------------
// One-vs-rest linear SVM

double svm_objective(std::span<const double> w, double b, const Matrix& x,
                     std::span<const int> targets, double l2) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double margin = static_cast<double>(targets[i]) * (dot(w, x.row(i)) + b);
    hinge += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * l2 * dot(w, w) + hinge / static_cast<double>(x.rows());
}

TrainedModel fit_svm(const Matrix& x, std::span<const int> y, int class_count,
                     const Hyperparams& hp) {
  check_training_set(x, y, class_count);
  if (class_count < 2) throw Error(ErrorCode::invalid_argument, "SVM needs >= 2 classes");
  validate(hp);
  auto standardization = fit_standardization(x);
  const Matrix z = standardization.apply(x);
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const auto k = static_cast<std::size_t>(class_count);

  // One data order for every binary problem, drawn once from the seed.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hp.seed);
  rng.shuffle(std::span<std::size_t>(order));

  const double l2 = hp.svm_l2;
  const double radius = l2 > 0.0 ? 1.0 / std::sqrt(l2) : std::numeric_limits<double>::infinity();

  LinearParams params{Matrix(k, d), std::vector<double>(k, 0.0)};
  TrainedModel model = make_model(ClassifierKind::svm, class_count, hp, std::move(standardization));
  std::vector<int> targets(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) targets[i] = y[i] == static_cast<int>(c) ? 1 : -1;
    auto w = params.weights.row(c);
    double& b = params.bias[c];
    std::size_t t = 0;
    for (int epoch = 0; epoch < hp.svm_epochs; ++epoch) {
      for (std::size_t i : order) {
        ++t;
        const double eta = l2 > 0.0 ? 1.0 / (l2 * static_cast<double>(t))
                                    : 1.0 / static_cast<double>(t);
        const auto xi = z.row(i);
        const double yi = targets[i];
        const double margin = yi * (dot(w, xi) + b);
        const double shrink = 1.0 - eta * l2;
        for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
        if (margin < 1.0) {
          for (std::size_t j = 0; j < d; ++j) w[j] += eta * yi * xi[j];
          b += eta * yi;
        }
        const double norm = std::sqrt(dot(w, w));
        if (norm > radius) {
          for (std::size_t j = 0; j < d; ++j) w[j] *= radius / norm;
        }
      }
    }
    const double objective = svm_objective(w, b, z, targets, l2);
    if (!std::isfinite(objective)) throw Error(ErrorCode::non_finite, "SVM objective is not finite");
    model.trace.objective.push_back(objective);
  }
  model.trace.iterations = hp.svm_epochs;
  model.trace.converged = true;
  model.params = std::move(params);
  return model;
}

int predict_svm(const TrainedModel& model, std::span<const double> x) {
  require_kind(model, ClassifierKind::svm);
  const auto& p = std::get<LinearParams>(model.params);
  const auto z = model.standardization.apply(x);
  std::vector<double> scores(p.bias.size());
  for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = dot(p.weights.row(c), z) + p.bias[c];
  return argmax(scores);
}

// ---------------------------------------------------------------------------

TrainedModel fit(ClassifierKind kind, const Matrix& x, std::span<const int> y, int class_count,
                 const Hyperparams& hp) {
  switch (kind) {
    case ClassifierKind::gnb: {
      auto model = fit_gnb(x, y, class_count);
      model.hyperparams = hp;
      return model;
    }
    case ClassifierKind::knn: return fit_knn(x, y, class_count, hp);
    case ClassifierKind::logreg: return fit_logreg(x, y, class_count, hp);
    case ClassifierKind::svm: return fit_svm(x, y, class_count, hp);
  }
  throw Error(ErrorCode::invalid_argument, "unknown classifier kind");
}

int predict(const TrainedModel& model, std::span<const double> x) {
  switch (model.kind) {
    case ClassifierKind::gnb: return predict_gnb(model, x);
    case ClassifierKind::knn: return predict_knn(model, x, model.hyperparams.knn_k);
    case ClassifierKind::logreg: return predict_logreg(model, x).label;
    case ClassifierKind::svm: return predict_svm(model, x);
  }
  throw Error(ErrorCode::invalid_argument, "unknown classifier kind");
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) {
    throw Error(ErrorCode::dim_mismatch, "matrix payload size does not match its shape");
  }
  m.data() = std::move(data);
  return m;
}

// JSON has no infinity; absent classes are written as null.
nlohmann::json priors_json(const std::vector<double>& priors) {
  nlohmann::json out = nlohmann::json::array();
  for (double p : priors) out.push_back(std::isinf(p) ? nlohmann::json(nullptr) : nlohmann::json(p));
  return out;
}

}  // namespace

nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["format"] = "moralvig-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model.kind);
  j["class_count"] = model.class_count;
  j["hyperparams"] = to_json(model.hyperparams);
  std::vector<int> zero_var(model.standardization.zero_variance.begin(),
                            model.standardization.zero_variance.end());
  j["standardization"] = {{"mean", model.standardization.mean},
                          {"stddev", model.standardization.stddev},
                          {"zero_variance", zero_var}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GnbParams>) {
          j["params"] = {{"means", matrix_json(p.means)},
                         {"variances", matrix_json(p.variances)},
                         {"log_priors", priors_json(p.log_priors)},
                         {"variance_floor", p.variance_floor}};
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          j["params"] = {{"points", matrix_json(p.points)}, {"labels", p.labels}};
        } else {
          j["params"] = {{"weights", matrix_json(p.weights)}, {"bias", p.bias}};
        }
      },
      model.params);
  return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "moralvig-model") {
      throw Error(ErrorCode::invalid_argument, "not a moralvig model payload");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::invalid_argument, "unsupported model version");
    }
    TrainedModel model;
    model.kind = parse_classifier(j.at("kind").get<std::string>());
    model.class_count = j.at("class_count").get<int>();
    model.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    const auto& s = j.at("standardization");
    model.standardization.mean = s.at("mean").get<std::vector<double>>();
    model.standardization.stddev = s.at("stddev").get<std::vector<double>>();
    for (int z : s.at("zero_variance").get<std::vector<int>>()) {
      model.standardization.zero_variance.push_back(z != 0);
    }
    const auto& p = j.at("params");
    switch (model.kind) {
      case ClassifierKind::gnb: {
        GnbParams g;
        g.means = matrix_from(p.at("means"));
        g.variances = matrix_from(p.at("variances"));
        for (const auto& v : p.at("log_priors")) g.log_priors.push_back(v.is_null() ? kNegInf : v.get<double>());
        g.variance_floor = p.at("variance_floor").get<double>();
        model.params = std::move(g);
        break;
      }
      case ClassifierKind::knn: {
        KnnParams kp;
        kp.points = matrix_from(p.at("points"));
        kp.labels = p.at("labels").get<std::vector<int>>();
        model.params = std::move(kp);
        break;
      }
      case ClassifierKind::logreg:
      case ClassifierKind::svm: {
        LinearParams lp;
        lp.weights = matrix_from(p.at("weights"));
        lp.bias = p.at("bias").get<std::vector<double>>();
        model.params = std::move(lp);
        break;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed model payload: ") + e.what());
  }
}

}  // namespace moralvig
