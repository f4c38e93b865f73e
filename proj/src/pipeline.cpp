#include "moralvig/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "moralvig/csv.hpp"
#include "moralvig/error.hpp"
#include "moralvig/hash.hpp"
#include "moralvig/rng.hpp"

namespace moralvig {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {
    "corpora",     "contextual",     "parses",          "embeddings", "mfd",
    "affect",      "affect_columns", "datasets",        "schemes",    "classifiers",
    "hyperparams", "seed",           "folds",           "out",        "jobs",
    "exclude_flagged", "l2_normalize", "error_cell",    "tsne",       "group_positive",
    "write_features"};

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::map<Dataset, fs::path> dataset_paths(const json& j, const fs::path& base, const char* key) {
  std::map<Dataset, fs::path> out;
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, std::string(key) + " must be an object");
  for (const auto& [name, value] : j.items()) {
    out[parse_dataset(name)] = resolve(base, value.get<std::string>());
  }
  return out;
}

template <typename T, typename Parse>
std::vector<T> name_list(const json& j, Parse parse, const char* key) {
  if (!j.is_array()) throw Error(ErrorCode::invalid_config, std::string(key) + " must be a list");
  std::vector<T> out;
  for (const auto& item : j) {
    const T value = parse(item.get<std::string>());
    if (std::find(out.begin(), out.end(), value) != out.end()) {
      throw Error(ErrorCode::invalid_config, std::string(key) + " lists '" +
                                                 item.get<std::string>() + "' twice");
    }
    out.push_back(value);
  }
  if (out.empty()) throw Error(ErrorCode::invalid_config, std::string(key) + " is empty");
  return out;
}

TsneOptions tsne_from_json(const json& j) {
  TsneOptions o;
  o.perplexity = j.value("perplexity", o.perplexity);
  o.iterations = j.value("iterations", o.iterations);
  o.learning_rate = j.value("learning_rate", o.learning_rate);
  o.exaggeration = j.value("exaggeration", o.exaggeration);
  o.exaggeration_iterations = j.value("exaggeration_iterations", o.exaggeration_iterations);
  o.initial_momentum = j.value("initial_momentum", o.initial_momentum);
  o.final_momentum = j.value("final_momentum", o.final_momentum);
  o.momentum_switch = j.value("momentum_switch", o.momentum_switch);
  o.kl_every = j.value("kl_every", o.kl_every);
  return o;
}

bool contains(const std::vector<Scheme>& schemes, Scheme s) {
  return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

bool needs_embeddings(const std::vector<Scheme>& schemes) {
  return contains(schemes, Scheme::avg_embed) || contains(schemes, Scheme::verb_embed) ||
         contains(schemes, Scheme::moral_sentiment);
}

std::string dataset_title(Dataset d) {
  switch (d) {
    case Dataset::chadwick: return "Chadwick";
    case Dataset::mccurrie: return "McCurrie";
    case Dataset::clifford: return "Clifford";
  }
  return {};
}

std::string cell_name(const CellKey& key) {
  return std::string(to_string(key.dataset)) + "/" + std::string(to_string(key.scheme)) + "/" +
         std::string(to_string(key.classifier));
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

void run_pool(std::vector<std::function<void()>>& jobs, int workers) {
  const std::size_t count =
      std::min<std::size_t>(jobs.size(), static_cast<std::size_t>(std::max(1, workers)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) jobs[i]();
  };
  if (count <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> threads;
  for (std::size_t t = 0; t < count; ++t) threads.emplace_back(work);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  return out;
}

json fold_accuracy_json(const std::vector<double>& accs) {
  json a = json::array();
  for (double v : accs) a.push_back(std::isnan(v) ? json(nullptr) : json(v));
  return a;
}

}  // namespace

RunConfig config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.contains(key)) {
      throw Error(ErrorCode::invalid_config, "unknown config key '" + key + "'");
    }
  }
  fs::path base = base_dir;
  if (const char* env = std::getenv(kResourceDirEnv); env != nullptr && *env != '\0') base = env;

  RunConfig c;
  try {
    if (j.contains("corpora")) c.corpora = dataset_paths(j["corpora"], base, "corpora");
    if (j.contains("contextual")) c.contextual = dataset_paths(j["contextual"], base, "contextual");
    if (j.contains("parses")) c.parses = dataset_paths(j["parses"], base, "parses");
    c.embeddings = resolve(base, j.value("embeddings", std::string()));
    c.mfd = resolve(base, j.value("mfd", std::string()));
    c.affect = resolve(base, j.value("affect", std::string()));
    if (j.contains("affect_columns")) {
      const auto& a = j["affect_columns"];
      c.affect_columns.word = a.value("word", c.affect_columns.word);
      c.affect_columns.valence = a.value("valence", c.affect_columns.valence);
      c.affect_columns.arousal = a.value("arousal", c.affect_columns.arousal);
      c.affect_columns.dominance = a.value("dominance", c.affect_columns.dominance);
    }
    if (j.contains("datasets")) {
      c.datasets = name_list<Dataset>(j["datasets"], parse_dataset, "datasets");
    }
    if (j.contains("schemes")) c.schemes = name_list<Scheme>(j["schemes"], parse_scheme, "schemes");
    if (j.contains("classifiers")) {
      c.classifiers = name_list<ClassifierKind>(j["classifiers"], parse_classifier, "classifiers");
    }
    if (j.contains("hyperparams")) c.hyperparams = hyperparams_from_json(j["hyperparams"]);
    c.seed = j.value("seed", c.seed);
    c.folds = j.value("folds", c.folds);
    c.jobs = j.value("jobs", c.jobs);
    c.exclude_flagged = j.value("exclude_flagged", c.exclude_flagged);
    c.l2_normalize = j.value("l2_normalize", c.l2_normalize);
    c.group_positive = j.value("group_positive", c.group_positive);
    c.write_features = j.value("write_features", c.write_features);
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("error_cell")) {
      const auto& e = j["error_cell"];
      c.error_cell.scheme = parse_scheme(e.value("scheme", std::string(to_string(c.error_cell.scheme))));
      c.error_cell.classifier = parse_classifier(
          e.value("classifier", std::string(to_string(c.error_cell.classifier))));
    }
    if (j.contains("tsne")) c.tsne = tsne_from_json(j["tsne"]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void validate(const RunConfig& c, Command command) {
  std::vector<std::string> problems;
  auto need = [&](const fs::path& p, const std::string& what) {
    if (p.empty()) {
      problems.push_back(what + " is not configured");
    } else if (!fs::is_regular_file(p)) {
      problems.push_back(what + " not found: " + p.string());
    }
  };
  auto need_for = [&](const std::map<Dataset, fs::path>& m, Dataset d, const std::string& what) {
    const auto it = m.find(d);
    need(it == m.end() ? fs::path() : it->second, what + " for " + std::string(to_string(d)));
  };

  if (c.datasets.empty()) problems.push_back("no datasets selected");
  if (c.folds < 2) problems.push_back("folds must be at least 2");
  if (c.jobs < 1) problems.push_back("jobs must be at least 1");
  try {
    validate(c.hyperparams);
  } catch (const Error& e) {
    problems.push_back(e.what());
  }

  std::vector<Scheme> schemes = c.schemes;
  if (command == Command::errors) schemes = {c.error_cell.scheme};
  if (command == Command::project) schemes = {Scheme::contextual};
  if (command == Command::evaluate && (c.schemes.empty() || c.classifiers.empty())) {
    problems.push_back("no schemes or classifiers selected");
  }

  for (Dataset d : c.datasets) {
    need_for(c.corpora, d, "corpus");
    if (contains(schemes, Scheme::contextual)) need_for(c.contextual, d, "contextual embeddings");
    if (contains(schemes, Scheme::verb_embed)) {
      const auto it = c.parses.find(d);
      if (it != c.parses.end()) need(it->second, "parses for " + std::string(to_string(d)));
    }
  }
  if (needs_embeddings(schemes)) need(c.embeddings, "word embeddings");
  if (contains(schemes, Scheme::moral_sentiment)) need(c.mfd, "moral foundations dictionary");
  if (contains(schemes, Scheme::emotion)) need(c.affect, "affect norms");
  if (command == Command::project) {
    if (c.tsne.iterations < 1) problems.push_back("tsne.iterations must be positive");
    if (!(c.tsne.perplexity >= 3.0)) problems.push_back("tsne.perplexity must be at least 3");
  }

  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::invalid_config, msg);
  }
}

json describe(const RunConfig& c, Command command) {
  std::vector<Scheme> schemes = c.schemes;
  std::vector<ClassifierKind> classifiers = c.classifiers;
  if (command == Command::errors) {
    schemes = {c.error_cell.scheme};
    classifiers = {c.error_cell.classifier};
  }
  if (command == Command::project) {
    schemes = {Scheme::contextual};
    classifiers.clear();
  }

  json d;
  d["command"] = command == Command::evaluate ? "evaluate"
                 : command == Command::project ? "project"
                                                : "errors";
  d["seed"] = c.seed;
  json ds = json::array();
  for (Dataset x : c.datasets) ds.push_back(to_string(x));
  d["datasets"] = ds;

  json res = json::object();
  auto add = [&](const std::string& name, const fs::path& p) {
    res[name] = {{"file", p.filename().string()}, {"sha256", sha256_file(p)}};
  };
  for (Dataset x : c.datasets) {
    const std::string n(to_string(x));
    add("corpus/" + n, c.corpora.at(x));
    if (contains(schemes, Scheme::contextual)) add("contextual/" + n, c.contextual.at(x));
    if (contains(schemes, Scheme::verb_embed) && c.parses.contains(x)) {
      add("parses/" + n, c.parses.at(x));
    }
  }
  if (needs_embeddings(schemes)) add("embeddings", c.embeddings);
  if (contains(schemes, Scheme::moral_sentiment)) add("mfd", c.mfd);
  if (contains(schemes, Scheme::emotion)) {
    add("affect", c.affect);
    d["affect_columns"] = {{"word", c.affect_columns.word},
                           {"valence", c.affect_columns.valence},
                           {"arousal", c.affect_columns.arousal},
                           {"dominance", c.affect_columns.dominance}};
  }
  d["resources"] = res;

  if (command == Command::project) {
    json t = to_json(c.tsne);
    t.erase("seed");
    d["tsne"] = t;
    d["group_positive"] = c.group_positive;
    return d;
  }
  json sc = json::array();
  for (Scheme s : schemes) sc.push_back(to_string(s));
  json cl = json::array();
  for (ClassifierKind k : classifiers) cl.push_back(to_string(k));
  d["schemes"] = sc;
  d["classifiers"] = cl;
  json hp = to_json(c.hyperparams);
  hp.erase("seed");
  d["hyperparams"] = hp;
  d["folds"] = c.folds;
  d["exclude_flagged"] = c.exclude_flagged;
  d["l2_normalize"] = c.l2_normalize;
  d["error_cell"] = {{"scheme", to_string(c.error_cell.scheme)},
                     {"classifier", to_string(c.error_cell.classifier)}};
  return d;
}

std::string fingerprint(const json& description) { return sha256_hex(description.dump()); }

std::uint64_t fold_seed(std::uint64_t seed, Dataset dataset) {
  return derive_seed(seed, "folds/" + std::string(to_string(dataset)));
}

std::uint64_t cell_seed(std::uint64_t seed, Dataset dataset, Scheme scheme, ClassifierKind kind) {
  return derive_seed(seed, std::string(to_string(dataset)) + "/" + std::string(to_string(scheme)) +
                               "/" + std::string(to_string(kind)));
}

std::uint64_t tsne_seed(std::uint64_t seed, Dataset dataset) {
  return derive_seed(seed, "tsne/" + std::string(to_string(dataset)));
}

namespace {

struct DatasetContext {
  DatasetSummary summary;
  std::vector<Vignette> vignettes;
  FoldSpec folds;
};

struct SchemeContext {
  const DatasetContext* dataset = nullptr;
  Scheme scheme = Scheme::contextual;
  std::optional<FeatureBuild> build;
  std::string error;
};

struct CellOutcome {
  CellKey key;
  const SchemeContext* source = nullptr;
  std::optional<CvResult> cv;
  std::string error;
};

EvalReport evaluate(const RunConfig& c, Command command) {
  validate(c, command);
  std::vector<Scheme> schemes = c.schemes;
  std::vector<ClassifierKind> classifiers = c.classifiers;
  if (command == Command::errors) {
    schemes = {c.error_cell.scheme};
    classifiers = {c.error_cell.classifier};
  }

  EvalReport report;
  report.config = describe(c, command);
  report.fingerprint = fingerprint(report.config);
  report.error_cell = c.error_cell;

  std::optional<EmbeddingTable> embeddings;
  std::optional<Centroids> centroids;
  std::optional<AffectLexicon> affect;
  if (needs_embeddings(schemes)) embeddings = load_embeddings(c.embeddings);
  if (contains(schemes, Scheme::moral_sentiment)) {
    centroids = foundation_centroids(load_mfd(c.mfd), *embeddings, c.l2_normalize);
  }
  if (contains(schemes, Scheme::emotion)) affect = load_affect_norms(c.affect, c.affect_columns);

  std::deque<DatasetContext> datasets;
  for (Dataset d : c.datasets) {
    DatasetContext ctx;
    auto all = load_vignettes(c.corpora.at(d), d);
    const std::size_t before = all.size();
    ctx.vignettes = exclude_liberty(std::move(all));
    ctx.summary.dataset = d;
    ctx.summary.vignettes = ctx.vignettes.size();
    ctx.summary.liberty_excluded = before - ctx.vignettes.size();
    ctx.summary.labels = label_space(ctx.vignettes, d);
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (const auto& v : ctx.vignettes) {
      ids.push_back(v.id);
      labels.push_back(ctx.summary.labels.require_index(v.category));
    }
    ctx.folds = stratified_kfold(ids, labels, c.folds, fold_seed(c.seed, d));
    ctx.summary.fold_warnings = ctx.folds.warnings;
    datasets.push_back(std::move(ctx));
  }

  std::deque<SchemeContext> scheme_contexts;
  for (const auto& ctx : datasets) {
    const Dataset d = ctx.summary.dataset;
    std::optional<ContextualStore> store;
    std::optional<ParseBank> parses;
    for (Scheme s : schemes) {
      SchemeContext sc;
      sc.dataset = &ctx;
      sc.scheme = s;
      try {
        FeatureResources r;
        r.embeddings = embeddings ? &*embeddings : nullptr;
        r.centroids = centroids ? &*centroids : nullptr;
        r.affect = affect ? &*affect : nullptr;
        if (s == Scheme::contextual) {
          store = load_contextual(c.contextual.at(d));
          r.contextual = &*store;
        }
        if (s == Scheme::verb_embed && c.parses.contains(d)) {
          parses = load_conllu(c.parses.at(d));
          r.parses = &*parses;
        }
        FeatureOptions opt;
        opt.exclude_flagged = c.exclude_flagged;
        sc.build = build_feature_matrix(ctx.vignettes, ctx.summary.labels, s, r, opt);
      } catch (const std::exception& e) {
        sc.error = e.what();
      }
      scheme_contexts.push_back(std::move(sc));
    }
  }

  std::vector<CellOutcome> outcomes;
  for (const auto& sc : scheme_contexts) {
    for (ClassifierKind k : classifiers) {
      CellOutcome o;
      o.key = {sc.dataset->summary.dataset, sc.scheme, k};
      o.source = &sc;
      outcomes.push_back(std::move(o));
    }
  }
  std::vector<std::function<void()>> jobs;
  for (auto& o : outcomes) {
    jobs.push_back([&o, &c] {
      if (!o.source->build) {
        o.error = "feature construction failed: " + o.source->error;
        return;
      }
      try {
        Hyperparams hp = c.hyperparams;
        hp.seed = cell_seed(c.seed, o.key.dataset, o.key.scheme, o.key.classifier);
        o.cv = cross_validate(o.source->build->matrix,
                              static_cast<int>(o.source->dataset->summary.labels.size()),
                              o.key.classifier, hp, o.source->dataset->folds);
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    });
  }
  run_pool(jobs, c.jobs);

  for (const auto& ctx : datasets) report.datasets.push_back(ctx.summary);
  for (const auto& o : outcomes) {
    if (!o.cv) {
      report.failures.push_back({o.key, o.error});
      continue;
    }
    report.cells[o.key] = {o.cv->fold_accuracies, o.cv->mean_accuracy()};
    if (!o.cv->warnings.empty()) report.cell_warnings[o.key] = o.cv->warnings;
    if (o.key.scheme == c.error_cell.scheme && o.key.classifier == c.error_cell.classifier) {
      const auto& ctx = *o.source->dataset;
      auto records = error_report(o.source->build->matrix, *o.cv, ctx.vignettes, ctx.summary.labels,
                                  o.key.classifier);
      report.errors.insert(report.errors.end(), records.begin(), records.end());
    }
  }
  std::sort(report.errors.begin(), report.errors.end(),
            [](const ErrorRecord& a, const ErrorRecord& b) {
              return std::tie(a.dataset, a.vignette_id) < std::tie(b.dataset, b.vignette_id);
            });

  for (Dataset d : c.datasets) {
    for (Scheme s : schemes) {
      std::vector<double> means;
      for (ClassifierKind k : kAllClassifiers) {
        const auto it = report.cells.find({d, s, k});
        if (it != report.cells.end()) means.push_back(it->second.mean);
      }
      if (means.size() == std::size(kAllClassifiers)) report.summaries[{d, s}] = summarize(means);
    }
  }

  for (const auto& sc : scheme_contexts) {
    if (!sc.build) continue;
    json side = feature_sidecar(*sc.build, {});
    side["dataset"] = to_string(sc.dataset->summary.dataset);
    side["config_fingerprint"] = report.fingerprint;
    report.feature_sidecars.push_back(side);
  }

  if (c.write_features) {
    const fs::path dir = c.out / "features";
    fs::create_directories(dir);
    std::size_t i = 0;
    for (const auto& sc : scheme_contexts) {
      if (!sc.build) continue;
      const std::string stem = std::string(to_string(sc.dataset->summary.dataset)) + "_" +
                               std::string(to_string(sc.scheme));
      auto csv = open_out(dir / (stem + ".csv"));
      write_feature_csv(csv, sc.build->matrix, sc.dataset->summary.labels);
      auto side = open_out(dir / (stem + ".json"));
      side << report.feature_sidecars.at(i++).dump(2) << '\n';
    }
  }
  return report;
}

}  // namespace

EvalReport run_evaluation(const RunConfig& config) { return evaluate(config, Command::evaluate); }

EvalReport run_error_analysis(const RunConfig& config) { return evaluate(config, Command::errors); }

json report_json(const EvalReport& r) {
  json j;
  j["config_fingerprint"] = r.fingerprint;
  j["config"] = r.config;
  json ds = json::array();
  for (const auto& d : r.datasets) {
    ds.push_back({{"dataset", to_string(d.dataset)},
                  {"vignettes", d.vignettes},
                  {"liberty_excluded", d.liberty_excluded},
                  {"classes", d.labels.classes},
                  {"counts", d.labels.counts},
                  {"chance_rate", d.labels.chance_rate},
                  {"chance_basis", to_string(d.labels.chance_basis)},
                  {"fold_warnings", d.fold_warnings}});
  }
  j["datasets"] = ds;
  json cells = json::array();
  for (const auto& [key, cell] : r.cells) {
    json e = {{"dataset", to_string(key.dataset)},
              {"scheme", to_string(key.scheme)},
              {"classifier", to_string(key.classifier)},
              {"fold_accuracies", fold_accuracy_json(cell.fold_accuracies)},
              {"mean", cell.mean}};
    if (const auto it = r.cell_warnings.find(key); it != r.cell_warnings.end()) {
      e["warnings"] = it->second;
    }
    cells.push_back(e);
  }
  j["cells"] = cells;
  json rows = json::array();
  for (const auto& [key, s] : r.summaries) {
    rows.push_back({{"dataset", to_string(key.first)},
                    {"scheme", to_string(key.second)},
                    {"mean", s.mean},
                    {"sd", s.sd}});
  }
  j["summaries"] = rows;
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"cell", cell_name(f.key)}, {"message", f.message}});
  }
  j["failures"] = failures;
  j["error_cell"] = {{"scheme", to_string(r.error_cell.scheme)},
                     {"classifier", to_string(r.error_cell.classifier)},
                     {"misclassified", r.errors.size()}};
  j["features"] = r.feature_sidecars;
  return j;
}

void write_grid_csv(std::ostream& out, const EvalReport& r) {
  out << "Dataset,Representation";
  for (ClassifierKind k : kAllClassifiers) out << ',' << display_name(k);
  out << ",Mean accuracy (SD)\n";

  std::set<CellKey> failed;
  for (const auto& f : r.failures) failed.insert(f.key);
  std::set<std::pair<Dataset, Scheme>> rows;
  for (const auto& [key, cell] : r.cells) rows.insert({key.dataset, key.scheme});
  for (const auto& key : failed) rows.insert({key.dataset, key.scheme});

  for (const auto& [d, s] : rows) {
    out << dataset_title(d) << ',' << csv::escape(display_name(s));
    for (ClassifierKind k : kAllClassifiers) {
      out << ',';
      if (const auto it = r.cells.find({d, s, k}); it != r.cells.end()) {
        out << percent(it->second.mean);
      } else if (failed.contains({d, s, k})) {
        out << "failed";
      }
    }
    out << ',';
    if (const auto it = r.summaries.find({d, s}); it != r.summaries.end()) {
      out << percent(it->second.mean) << " (" << percent(it->second.sd) << ')';
    }
    out << '\n';
  }
}

void write_error_markdown(std::ostream& out, const EvalReport& r) {
  auto cell = [](std::string text) {
    std::string o;
    for (char ch : text) {
      if (ch == '|') o += "\\|";
      else if (ch == '\n' || ch == '\r') o += ' ';
      else o += ch;
    }
    return o;
  };
  out << "<!-- config fingerprint: " << r.fingerprint << " -->\n";
  out << "Misclassified vignettes, " << display_name(r.error_cell.scheme) << " with "
      << display_name(r.error_cell.classifier) << ".\n\n";
  out << "| Dataset | Vignette | Prediction | Truth |\n";
  out << "|---|---|---|---|\n";
  for (const auto& e : r.errors) {
    out << "| " << dataset_title(e.dataset) << " | " << cell(e.text) << " | "
        << display_label(e.predicted) << " | " << display_label(e.truth) << " |\n";
  }
}

void write_reports(const EvalReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "report.json");
    out << report_json(r).dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "grid.csv");
    write_grid_csv(out, r);
  }
  {
    auto out = open_out(dir / "errors.md");
    write_error_markdown(out, r);
  }
  const fs::path manifest = dir / "failures.json";
  if (r.ok()) {
    fs::remove(manifest);
    return;
  }
  json j;
  j["config_fingerprint"] = r.fingerprint;
  json f = json::array();
  for (const auto& x : r.failures) f.push_back({{"cell", cell_name(x.key)}, {"message", x.message}});
  j["failures"] = f;
  auto out = open_out(manifest);
  out << j.dump(2) << '\n';
}

DatasetFeatures load_features(const RunConfig& config, Dataset dataset, Scheme scheme) {
  RunConfig c = config;
  c.datasets = {dataset};
  c.schemes = {scheme};
  validate(c, Command::evaluate);

  DatasetFeatures out;
  out.vignettes = exclude_liberty(load_vignettes(c.corpora.at(dataset), dataset));
  out.labels = label_space(out.vignettes, dataset);
  std::optional<EmbeddingTable> embeddings;
  std::optional<Centroids> centroids;
  std::optional<AffectLexicon> affect;
  std::optional<ContextualStore> store;
  std::optional<ParseBank> parses;
  FeatureResources r;
  if (needs_embeddings(c.schemes)) r.embeddings = &embeddings.emplace(load_embeddings(c.embeddings));
  if (scheme == Scheme::moral_sentiment) {
    r.centroids = &centroids.emplace(foundation_centroids(load_mfd(c.mfd), *embeddings, c.l2_normalize));
  }
  if (scheme == Scheme::emotion) r.affect = &affect.emplace(load_affect_norms(c.affect, c.affect_columns));
  if (scheme == Scheme::contextual) r.contextual = &store.emplace(load_contextual(c.contextual.at(dataset)));
  if (scheme == Scheme::verb_embed && c.parses.contains(dataset)) {
    r.parses = &parses.emplace(load_conllu(c.parses.at(dataset)));
  }
  FeatureOptions opt;
  opt.exclude_flagged = c.exclude_flagged;
  out.build = build_feature_matrix(out.vignettes, out.labels, scheme, r, opt);
  return out;
}

std::vector<ProjectionResult> run_projection(const RunConfig& c) {
  validate(c, Command::project);
  const json description = describe(c, Command::project);
  const std::string fp = fingerprint(description);

  std::vector<ProjectionResult> results;
  for (Dataset d : c.datasets) {
    const auto vignettes = exclude_liberty(load_vignettes(c.corpora.at(d), d));
    const LabelSpace labels = label_space(vignettes, d);
    const ContextualStore store = load_contextual(c.contextual.at(d));
    require_coverage(store, vignettes);

    Matrix points(vignettes.size(), store.dim());
    std::vector<int> y;
    ProjectionResult res;
    res.dataset = d;
    for (std::size_t i = 0; i < vignettes.size(); ++i) {
      const auto* v = store.find(vignettes[i].id);
      std::copy(v->begin(), v->end(), points.row(i).begin());
      y.push_back(labels.require_index(vignettes[i].category));
      res.info.ids.push_back(vignettes[i].id);
    }
    TsneOptions opt = c.tsne;
    opt.seed = tsne_seed(c.seed, d);
    res.layout = tsne_fit(points, y, opt);
    res.info.classes = labels.classes;
    res.info.dataset = d;
    res.info.group_positive = c.group_positive;
    res.info.title = dataset_title(d);

    json kl = json::array();
    for (const auto& s : res.layout.kl_trace) kl.push_back({{"iteration", s.iteration}, {"kl", s.kl}});
    res.sidecar = {{"config_fingerprint", fp},
                   {"config", description},
                   {"dataset", to_string(d)},
                   {"points", vignettes.size()},
                   {"model_id", store.model_id()},
                   {"tsne", to_json(opt)},
                   {"kl_trace", kl}};
    results.push_back(std::move(res));
  }
  return results;
}

void write_projections(const std::vector<ProjectionResult>& results, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& r : results) {
    const std::string stem = "projection_" + std::string(to_string(r.dataset));
    export_layout(r.layout, r.info, dir / (stem + ".csv"), LayoutFormat::csv);
    export_layout(r.layout, r.info, dir / (stem + ".svg"), LayoutFormat::svg);
    auto out = open_out(dir / (stem + ".json"));
    out << r.sidecar.dump(2) << '\n';
  }
}

}  // namespace moralvig
