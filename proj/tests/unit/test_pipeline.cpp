#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"

#include "moralvig/error.hpp"
#include "moralvig/pipeline.hpp"

using namespace moralvig;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config() { return load_config(testing::fixture("config.json")); }

std::string message_of(const RunConfig& config, Command command) {
  try {
    validate(config, command);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
    return e.what();
  }
  FAIL("expected a validation error");
  return "";
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("fixture config resolves against its directory") {
    const auto config = fixture_config();
    CHECK(config.corpora.size() == 3);
    CHECK(config.corpora.at(Dataset::clifford) == testing::fixture("clifford.csv"));
    CHECK(config.tsne.perplexity == 5.0);
    CHECK(config.folds == 5);
    CHECK_NOTHROW(validate(config, Command::evaluate));
    CHECK_NOTHROW(validate(config, Command::project));
  }

  TEST_CASE("unknown keys and bad values are rejected") {
    const fs::path base = testing::fixture("");
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"corpra", nlohmann::json::object()}}, base), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"schemes", nlohmann::json::array()}}, base), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"schemes", {"emotion", "emotion"}}}, base), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"datasets", {"haidt"}}}, base), Error);
  }

  TEST_CASE("validation lists every missing input") {
    auto config = fixture_config();
    config.embeddings = testing::fixture("absent_vectors.txt");
    config.contextual.erase(Dataset::mccurrie);
    const std::string msg = message_of(config, Command::evaluate);
    CHECK(msg.find("absent_vectors.txt") != std::string::npos);
    CHECK(msg.find("mccurrie") != std::string::npos);

    auto emotion_only = fixture_config();
    emotion_only.schemes = {Scheme::emotion};
    emotion_only.embeddings = testing::fixture("absent_vectors.txt");
    CHECK_NOTHROW(validate(emotion_only, Command::evaluate));

    auto bad_folds = fixture_config();
    bad_folds.folds = 1;
    message_of(bad_folds, Command::evaluate);
  }

  TEST_CASE("fingerprint tracks results-affecting settings only") {
    auto a = fixture_config();
    auto b = fixture_config();
    b.out = "elsewhere";
    b.jobs = 4;
    const auto fa = fingerprint(describe(a, Command::evaluate));
    CHECK(fa.size() == 64);
    CHECK(fa == fingerprint(describe(b, Command::evaluate)));
    b.seed = 1;
    CHECK(fa != fingerprint(describe(b, Command::evaluate)));
  }

  TEST_CASE("seeds differ per dataset and cell") {
    CHECK(fold_seed(0, Dataset::chadwick) != fold_seed(0, Dataset::clifford));
    CHECK(cell_seed(0, Dataset::chadwick, Scheme::emotion, ClassifierKind::gnb) !=
          cell_seed(0, Dataset::chadwick, Scheme::emotion, ClassifierKind::knn));
    CHECK(tsne_seed(3, Dataset::mccurrie) == tsne_seed(3, Dataset::mccurrie));
  }

  TEST_CASE("full fixture evaluation") {
    const auto report = run_evaluation(fixture_config());
    REQUIRE(report.ok());
    CHECK(report.cells.size() == 60);
    CHECK(report.summaries.size() == 15);
    for (const auto& ds : report.datasets) {
      const auto ctx = report.summaries.at({ds.dataset, Scheme::contextual}).mean;
      for (Scheme s : kAllSchemes) {
        if (s != Scheme::contextual) CHECK(ctx > report.summaries.at({ds.dataset, s}).mean);
      }
    }
    const auto mc = std::find_if(report.datasets.begin(), report.datasets.end(),
                                 [](const DatasetSummary& d) { return d.dataset == Dataset::mccurrie; });
    REQUIRE(mc != report.datasets.end());
    CHECK(mc->liberty_excluded == 2);
    CHECK(mc->vignettes == 25);
  }

  TEST_CASE("evaluation is deterministic and independent of jobs") {
    auto config = fixture_config();
    config.schemes = {Scheme::contextual, Scheme::emotion};
    const auto a = run_evaluation(config);
    config.jobs = 4;
    const auto b = run_evaluation(config);
    REQUIRE(a.cells.size() == b.cells.size());
    for (const auto& [key, cell] : a.cells) CHECK(b.cells.at(key).fold_accuracies == cell.fold_accuracies);
    std::ostringstream ga;
    std::ostringstream gb;
    write_grid_csv(ga, a);
    write_grid_csv(gb, b);
    CHECK(ga.str() == gb.str());
  }

  TEST_CASE("filtered grid") {
    auto config = fixture_config();
    config.schemes = {Scheme::emotion};
    config.datasets = {Dataset::clifford};
    const auto report = run_evaluation(config);
    CHECK(report.cells.size() == 4);
    std::ostringstream grid;
    write_grid_csv(grid, report);
    CHECK(grid.str().rfind("Dataset,Representation,NB,kNN,LR,SVC,Mean accuracy (SD)\n", 0) == 0);
    CHECK(count_lines(grid.str()) == 2);
  }

  TEST_CASE("error analysis defaults to contextual logistic regression") {
    const auto report = run_error_analysis(fixture_config());
    CHECK(report.error_cell.scheme == Scheme::contextual);
    CHECK(report.error_cell.classifier == ClassifierKind::logreg);
    for (const auto& e : report.errors) {
      CHECK(e.scheme == Scheme::contextual);
      CHECK(e.classifier == ClassifierKind::logreg);
    }
    std::ostringstream md;
    write_error_markdown(md, report);
    CHECK(md.str().rfind("<!-- config fingerprint: " + report.fingerprint, 0) == 0);
    CHECK(md.str().find("| Dataset | Vignette | Prediction | Truth |") != std::string::npos);
  }

  TEST_CASE("failed cells are recorded and reported") {
    testing::ScratchDir dir("pipeline_failure");
    const fs::path broken = dir.path() / "broken.jsonl";
    std::ofstream(broken) << "{not json\n";
    auto config = fixture_config();
    config.datasets = {Dataset::clifford};
    config.schemes = {Scheme::contextual, Scheme::emotion};
    config.contextual[Dataset::clifford] = broken;
    const auto report = run_evaluation(config);
    CHECK_FALSE(report.ok());
    CHECK(report.failures.size() == 4);
    for (const auto& f : report.failures) CHECK(f.key.scheme == Scheme::contextual);
    CHECK(report.cells.contains({Dataset::clifford, Scheme::emotion, ClassifierKind::svm}));
    write_reports(report, dir.path() / "out");
    CHECK(fs::exists(dir.path() / "out" / "failures.json"));
    CHECK(testing::slurp(dir.path() / "out" / "grid.csv").find("failed") != std::string::npos);
  }

  TEST_CASE("projection layouts follow the corpus") {
    auto config = fixture_config();
    config.datasets = {Dataset::clifford};
    config.tsne.iterations = 300;
    const auto results = run_projection(config);
    REQUIRE(results.size() == 1);
    CHECK(results[0].layout.coords.rows() == 30);
    testing::ScratchDir dir("pipeline_projection");
    write_projections(results, dir.path());
    const std::string csv = testing::slurp(dir.path() / "projection_clifford.csv");
    CHECK(count_lines(csv) == 31);
    write_projections(run_projection(config), dir.path());
    CHECK(testing::slurp(dir.path() / "projection_clifford.csv") == csv);
  }
}
