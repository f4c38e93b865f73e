#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "moralvig/classifiers.hpp"
#include "moralvig/corpus.hpp"
#include "moralvig/eval.hpp"
#include "moralvig/features.hpp"
#include "moralvig/lexicons.hpp"
#include "moralvig/projection.hpp"

namespace moralvig {

/// Environment variable naming the directory that relative resource paths
/// are resolved against (falls back to the config file's directory).
inline constexpr const char* kResourceDirEnv = "MORALVIG_RESOURCE_DIR";

struct ErrorCell {
  Scheme scheme = Scheme::contextual;
  ClassifierKind classifier = ClassifierKind::logreg;
};

struct RunConfig {
  std::map<Dataset, std::filesystem::path> corpora;
  std::map<Dataset, std::filesystem::path> contextual;
  std::map<Dataset, std::filesystem::path> parses;
  std::filesystem::path embeddings;
  std::filesystem::path mfd;
  std::filesystem::path affect;
  AffectColumns affect_columns;

  std::vector<Dataset> datasets{std::begin(kAllDatasets), std::end(kAllDatasets)};
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<ClassifierKind> classifiers{std::begin(kAllClassifiers), std::end(kAllClassifiers)};
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  int folds = 5;
  bool exclude_flagged = false;
  bool l2_normalize = false;
  ErrorCell error_cell;
  TsneOptions tsne;
  bool group_positive = false;

  // Not part of the fingerprint.
  std::filesystem::path out = "results";
  int jobs = 1;
  bool write_features = false;
};

/// Reads a JSON config. Relative paths resolve against `$MORALVIG_RESOURCE_DIR`
/// when set, otherwise against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

enum class Command { evaluate, project, errors };

/// Throws invalid_config listing every missing or inconsistent input for the
/// requested command before any computation starts.
void validate(const RunConfig& config, Command command);

/// Canonical description of a run: every setting that affects results plus
/// the SHA-256 of each resource file used.
nlohmann::json describe(const RunConfig& config, Command command);
std::string fingerprint(const nlohmann::json& description);

// Seed derivation from the top-level seed.
std::uint64_t fold_seed(std::uint64_t seed, Dataset dataset);
std::uint64_t cell_seed(std::uint64_t seed, Dataset dataset, Scheme scheme, ClassifierKind kind);
std::uint64_t tsne_seed(std::uint64_t seed, Dataset dataset);

struct DatasetSummary {
  Dataset dataset = Dataset::chadwick;
  LabelSpace labels;
  std::size_t vignettes = 0;
  std::size_t liberty_excluded = 0;
  std::vector<std::string> fold_warnings;
};

struct CellFailure {
  CellKey key;
  std::string message;
};

struct EvalReport {
  nlohmann::json config;
  std::string fingerprint;
  std::vector<DatasetSummary> datasets;
  std::map<CellKey, CellResult> cells;
  std::map<CellKey, std::vector<std::string>> cell_warnings;
  std::vector<CellFailure> failures;
  std::map<std::pair<Dataset, Scheme>, RowSummary> summaries;  // complete rows only
  std::vector<ErrorRecord> errors;
  ErrorCell error_cell;
  std::vector<nlohmann::json> feature_sidecars;

  bool ok() const noexcept { return failures.empty(); }
};

/// Runs every requested (dataset x scheme x classifier) cell. Failures are
/// recorded per cell rather than thrown; configuration errors still throw.
EvalReport run_evaluation(const RunConfig& config);

// Runs only the error cell and fills `errors`.
EvalReport run_error_analysis(const RunConfig& config);

nlohmann::json report_json(const EvalReport& report);
// Accuracy grid: Dataset, Representation, NB, kNN, LR, SVC, Mean accuracy (SD).
void write_grid_csv(std::ostream& out, const EvalReport& report);
// Dataset | Vignette | Prediction | Truth
void write_error_markdown(std::ostream& out, const EvalReport& report);

// Writes report.json, grid.csv, errors.md and, on failure, failures.json.
void write_reports(const EvalReport& report, const std::filesystem::path& out_dir);

struct DatasetFeatures {
  std::vector<Vignette> vignettes;  // liberty removed
  LabelSpace labels;
  FeatureBuild build;
};

// Feature matrix of one dataset under one scheme, using the config's resources.
DatasetFeatures load_features(const RunConfig& config, Dataset dataset, Scheme scheme);

struct ProjectionResult {
  Dataset dataset = Dataset::chadwick;
  EmbeddingLayout layout;
  LayoutExport info;
  nlohmann::json sidecar;
};

std::vector<ProjectionResult> run_projection(const RunConfig& config);
void write_projections(const std::vector<ProjectionResult>& results,
                       const std::filesystem::path& out_dir);

}  // namespace moralvig
