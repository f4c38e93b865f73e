#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "moralvig/classifiers.hpp"
#include "moralvig/csv.hpp"
#include "moralvig/error.hpp"
#include "moralvig/pipeline.hpp"

namespace {

using namespace moralvig;
using nlohmann::json;

constexpr int kExitCellFailure = 1;
constexpr int kExitError = 2;

struct Overrides {
  std::string config;
  std::vector<std::string> datasets;
  std::vector<std::string> schemes;
  std::vector<std::string> classifiers;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> jobs;
  bool group_positive = false;
  bool write_features = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--datasets", o.datasets, "chadwick, mccurrie, clifford")->delimiter(',');
  cmd->add_option("--seed", o.seed, "Top-level seed");
  cmd->add_option("--out", o.out, "Output directory");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig c = load_config(o.config);
  auto parse_all = [](const std::vector<std::string>& names, auto parse) {
    std::vector<decltype(parse(std::string_view{}))> out;
    for (const auto& n : names) out.push_back(parse(n));
    return out;
  };
  if (!o.datasets.empty()) c.datasets = parse_all(o.datasets, parse_dataset);
  if (!o.schemes.empty()) c.schemes = parse_all(o.schemes, parse_scheme);
  if (!o.classifiers.empty()) c.classifiers = parse_all(o.classifiers, parse_classifier);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.group_positive) c.group_positive = true;
  if (o.write_features) c.write_features = true;
  return c;
}

int report_cells(const EvalReport& report, const RunConfig& c) {
  write_reports(report, c.out);
  std::cout << report.cells.size() << " cells written to " << c.out.string() << " (config "
            << report.fingerprint.substr(0, 12) << ")\n";
  for (const auto& f : report.failures) {
    std::cerr << "cell " << to_string(f.key.dataset) << '/' << to_string(f.key.scheme) << '/'
              << to_string(f.key.classifier) << " failed: " << f.message << '\n';
  }
  return report.ok() ? 0 : kExitCellFailure;
}

int cmd_train(const Overrides& o, const std::string& dataset, const std::string& scheme,
              const std::string& classifier, const std::string& model_path) {
  const RunConfig c = resolve_config(o);
  const Dataset d = parse_dataset(dataset);
  const Scheme s = parse_scheme(scheme);
  const ClassifierKind k = parse_classifier(classifier);
  const DatasetFeatures f = load_features(c, d, s);
  Hyperparams hp = c.hyperparams;
  hp.seed = cell_seed(c.seed, d, s, k);
  const TrainedModel model = fit(k, f.build.matrix.values, f.build.matrix.labels,
                                 static_cast<int>(f.labels.size()), hp);
  json j = {{"model", model_to_json(model)},
            {"dataset", to_string(d)},
            {"scheme", to_string(s)},
            {"classes", f.labels.classes},
            {"training_rows", f.build.matrix.rows()}};
  std::ofstream out(model_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + model_path);
  out << j.dump(2) << '\n';
  std::cout << "trained " << to_string(k) << " on " << f.build.matrix.rows() << " rows -> "
            << model_path << '\n';
  return 0;
}

// Reads a feature CSV (`vignette_id,label,f0..`) and prints `vignette_id,predicted`.
int cmd_predict(const std::string& model_path, const std::string& features_path) {
  std::ifstream min(model_path);
  if (!min) throw Error(ErrorCode::missing_file, "cannot open " + model_path);
  const json j = json::parse(min);
  const TrainedModel model = model_from_json(j.at("model"));
  const auto classes = j.at("classes").get<std::vector<std::string>>();

  std::ifstream fin(features_path);
  if (!fin) throw Error(ErrorCode::missing_file, "cannot open " + features_path);
  const auto records = csv::read(fin);
  if (records.empty()) throw Error(ErrorCode::empty_file, features_path + " is empty");
  const std::size_t dims = model.standardization.mean.size();
  std::cout << "vignette_id,predicted\n";
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    if (fields.size() != dims + 2) {
      throw Error(ErrorCode::dim_mismatch,
                  "expected " + std::to_string(dims) + " features", records[r].line);
    }
    std::vector<double> x;
    for (std::size_t i = 2; i < fields.size(); ++i) x.push_back(std::stod(fields[i]));
    const int label = predict(model, x);
    std::vector<std::string> row = {fields[0], classes.at(static_cast<std::size_t>(label))};
    csv::write_row(std::cout, row);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moral vignette classification benchmark"};
  app.require_subcommand(1);

  Overrides eval;
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate the dataset x scheme x classifier grid");
  add_common(evaluate, eval);
  evaluate->add_option("--schemes", eval.schemes, "contextual, avg_embed, verb_embed, moral_sentiment, emotion")
      ->delimiter(',');
  evaluate->add_option("--classifiers", eval.classifiers, "gnb, knn, logreg, svm")->delimiter(',');
  evaluate->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);
  evaluate->add_flag("--write-features", eval.write_features, "Also write feature matrices");

  Overrides err;
  auto* errors = app.add_subcommand("errors", "Misclassification table for one cell");
  add_common(errors, err);
  std::string err_scheme;
  std::string err_classifier;
  errors->add_option("--scheme", err_scheme, "Representation (default contextual)");
  errors->add_option("--classifier", err_classifier, "Classifier (default logreg)");
  errors->add_option("--jobs", err.jobs, "Worker threads")->check(CLI::PositiveNumber);

  Overrides proj;
  auto* project = app.add_subcommand("project", "t-SNE layouts of the contextual embeddings");
  add_common(project, proj);
  project->add_flag("--group-positive", proj.group_positive, "Group positive Chadwick traits");

  Overrides tr;
  auto* train = app.add_subcommand("train", "Fit one classifier on a whole dataset");
  add_common(train, tr);
  std::string tr_dataset;
  std::string tr_scheme = "contextual";
  std::string tr_classifier = "logreg";
  std::string tr_model;
  train->add_option("--dataset", tr_dataset)->required();
  train->add_option("--scheme", tr_scheme);
  train->add_option("--classifier", tr_classifier);
  train->add_option("--model", tr_model, "Model JSON to write")->required();

  std::string pr_model;
  std::string pr_features;
  auto* pred = app.add_subcommand("predict", "Predict labels for a feature CSV");
  pred->add_option("--model", pr_model)->required()->check(CLI::ExistingFile);
  pred->add_option("--features", pr_features)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version keep CLI11's zero status; usage errors share the error code.
    const int status = app.exit(e);
    return status == 0 ? 0 : kExitError;
  }

  try {
    if (*evaluate) {
      const RunConfig c = resolve_config(eval);
      return report_cells(run_evaluation(c), c);
    }
    if (*errors) {
      RunConfig c = resolve_config(err);
      if (!err_scheme.empty()) c.error_cell.scheme = parse_scheme(err_scheme);
      if (!err_classifier.empty()) c.error_cell.classifier = parse_classifier(err_classifier);
      return report_cells(run_error_analysis(c), c);
    }
    if (*project) {
      const RunConfig c = resolve_config(proj);
      const auto results = run_projection(c);
      write_projections(results, c.out);
      for (const auto& r : results) {
        std::cout << to_string(r.dataset) << ": " << r.layout.coords.rows() << " points, final KL "
                  << r.layout.kl_trace.back().kl << '\n';
      }
      return 0;
    }
    if (*train) return cmd_train(tr, tr_dataset, tr_scheme, tr_classifier, tr_model);
    if (*pred) return cmd_predict(pr_model, pr_features);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
