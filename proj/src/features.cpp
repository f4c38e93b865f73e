#include "moralvig/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "moralvig/error.hpp"

namespace moralvig {

namespace {

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Lowercased alphanumeric characters only; used to align parses with text.
std::string letters_only(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (is_alnum(c)) out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<double> normalized(std::span<const float> v) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  std::vector<double> out(v.begin(), v.end());
  if (norm > 0.0) {
    for (double& x : out) x /= norm;
  }
  return out;
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::contextual: return "contextual";
    case Scheme::avg_embed: return "avg_embed";
    case Scheme::verb_embed: return "verb_embed";
    case Scheme::moral_sentiment: return "moral_sentiment";
    case Scheme::emotion: return "emotion";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  const std::string key = ascii_lower(trim(name));
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == key) return s;
  }
  throw Error(ErrorCode::invalid_argument, "unknown scheme '" + std::string(name) + "'");
}

std::string_view display_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::contextual: return "Context. Embed.";
    case Scheme::avg_embed: return "Avg. Embed.";
    case Scheme::verb_embed: return "Verb Embed.";
    case Scheme::moral_sentiment: return "Moral Sentiment";
    case Scheme::emotion: return "Emotion";
  }
  return "unknown";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_alnum(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

PooledVector avg_embedding(std::span<const std::string> tokens, const EmbeddingTable& table) {
  PooledVector out;
  out.values.assign(table.dim(), 0.0);
  for (const auto& token : tokens) {
    const auto vec = table.find(token);
    if (!vec) continue;
    for (std::size_t j = 0; j < vec->size(); ++j) out.values[j] += (*vec)[j];
    ++out.matched;
  }
  if (out.matched > 0) {
    for (double& v : out.values) v /= static_cast<double>(out.matched);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CoNLL-U

const ParseToken* SentenceParse::root() const {
  for (const auto& t : tokens) {
    if (t.head == 0) return &t;
  }
  return nullptr;
}

void ParseBank::add(SentenceParse parse) {
  const std::string id = parse.sent_id;
  if (!parses_.emplace(id, std::move(parse)).second) {
    throw Error(ErrorCode::duplicate_id, "two parses for sentence id '" + id + "'");
  }
}

const SentenceParse* ParseBank::find(std::string_view vignette_id) const {
  const auto it = parses_.find(vignette_id);
  return it == parses_.end() ? nullptr : &it->second;
}

ParseBank parse_conllu(std::istream& in) {
  ParseBank bank;
  SentenceParse current;
  bool open = false;
  std::size_t block_start = 0;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (!open) return;
    if (current.sent_id.empty()) {
      throw Error(ErrorCode::missing_header, "sentence block without '# sent_id'", block_start);
    }
    if (current.tokens.empty()) {
      throw Error(ErrorCode::malformed_row, "sentence '" + current.sent_id + "' has no tokens",
                  block_start);
    }
    int roots = 0;
    for (const auto& t : current.tokens) roots += t.head == 0 ? 1 : 0;
    if (roots != 1) {
      throw Error(ErrorCode::malformed_row,
                  "sentence '" + current.sent_id + "' has " + std::to_string(roots) + " roots",
                  block_start);
    }
    try {
      bank.add(std::move(current));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), block_start);
    }
    current = SentenceParse{};
    open = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      block_start = line_no;
    }
    if (line.front() == '#') {
      const auto body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(body.substr(0, eq));
      const auto value = trim(body.substr(eq + 1));
      if (key == "sent_id") current.sent_id = std::string(value);
      if (key == "text") current.text = std::string(value);
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 10) {
      throw Error(ErrorCode::malformed_row,
                  "expected 10 tab-separated columns, found " + std::to_string(cols.size()), line_no);
    }
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    ParseToken token;
    try {
      token.id = std::stoi(cols[0]);
      token.head = cols[6] == "_" ? -1 : std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::non_numeric, "bad ID or HEAD column", line_no);
    }
    token.form = cols[1];
    token.lemma = cols[2];
    token.upos = cols[3];
    token.deprel = cols[7];
    current.tokens.push_back(std::move(token));
  }
  flush();
  return bank;
}

ParseBank load_conllu(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open parse file " + path.string());
  return parse_conllu(in);
}

// ---------------------------------------------------------------------------
// Verbs

std::string_view to_string(VerbSource source) {
  switch (source) {
    case VerbSource::parse: return "parse";
    case VerbSource::word_list: return "word_list";
    case VerbSource::none: return "none";
  }
  return "none";
}

RootVerb root_verb(const Vignette& vignette, const SentenceParse* parse) {
  if (parse != nullptr) {
    std::string spelled;
    for (const auto& t : parse->tokens) spelled += letters_only(t.form);
    if (spelled != letters_only(vignette.text)) {
      throw Error(ErrorCode::parse_misalignment,
                  "parse '" + parse->sent_id + "' does not match the text of vignette '" +
                      vignette.id + "'");
    }
    if (const ParseToken* root = parse->root()) {
      const bool verbal = root->upos == "VERB" || root->upos == "AUX" || root->upos == "_" ||
                          root->upos.empty();
      const std::string form = ascii_lower(root->form);
      if (verbal && !letters_only(form).empty()) {
        RootVerb out;
        out.form = form;
        out.lemma = root->lemma == "_" || root->lemma.empty() ? form : ascii_lower(root->lemma);
        out.source = VerbSource::parse;
        return out;
      }
    }
  }
  for (const auto& token : tokenize(vignette.text)) {
    if (auto lemma = verb_lemma(token)) {
      return RootVerb{token, *lemma, VerbSource::word_list};
    }
  }
  return RootVerb{};
}

VerbVector verb_embedding(const RootVerb& verb, const EmbeddingTable& table) {
  VerbVector out;
  out.values.assign(table.dim(), 0.0);
  if (!verb.found()) return out;
  for (const std::string* candidate : {&verb.form, &verb.lemma}) {
    if (candidate->empty()) continue;
    if (const auto vec = table.find(*candidate)) {
      out.values.assign(vec->begin(), vec->end());
      out.matched = ascii_lower(*candidate);
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moral sentiment

Centroids foundation_centroids(const FoundationLexicon& lexicon, const EmbeddingTable& table,
                               bool l2_normalize) {
  if (table.empty()) throw Error(ErrorCode::invalid_argument, "embedding table is empty");
  const auto& categories = lexicon.categories();
  const std::size_t dim = table.dim();

  Matrix sums(categories.size(), dim);
  std::vector<std::size_t> counts(categories.size(), 0);
  auto position = [&](int id) {
    for (std::size_t i = 0; i < categories.size(); ++i) {
      if (categories[i].id == id) return i;
    }
    return categories.size();
  };

  for (std::size_t t = 0; t < table.size(); ++t) {
    const std::string& token = table.token(t);
    if (ascii_lower(token) != token) continue;
    const auto matched = lexicon.match(token);
    if (matched.empty()) continue;
    const auto raw = table.vector(t);
    std::vector<double> vec = l2_normalize ? normalized(raw)
                                           : std::vector<double>(raw.begin(), raw.end());
    for (int id : matched) {
      const std::size_t row = position(id);
      auto dst = sums.row(row);
      for (std::size_t j = 0; j < dim; ++j) dst[j] += vec[j];
      ++counts[row];
    }
  }

  Centroids out;
  out.l2_normalized = l2_normalize;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    if (counts[c] == 0) {
      out.dropped.push_back(categories[c].id);
      continue;
    }
    std::vector<double> centroid(sums.row(c).begin(), sums.row(c).end());
    for (double& v : centroid) v /= static_cast<double>(counts[c]);
    out.category_ids.push_back(categories[c].id);
    out.names.push_back(categories[c].name);
    out.counts.push_back(counts[c]);
    out.vectors.append_row(centroid);
  }
  if (out.category_ids.empty()) {
    throw Error(ErrorCode::empty_class, "no lexicon category matches any embedding token");
  }
  return out;
}

PooledVector moral_sentiment_features(std::span<const std::string> tokens,
                                      const Centroids& centroids, const EmbeddingTable& table) {
  if (centroids.size() == 0) throw Error(ErrorCode::invalid_argument, "no centroids");
  PooledVector out;
  out.values.assign(centroids.size(), 0.0);
  for (const auto& token : tokens) {
    const auto raw = table.find(token);
    if (!raw) continue;
    const std::vector<double> vec =
        centroids.l2_normalized ? normalized(*raw) : std::vector<double>(raw->begin(), raw->end());
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const auto centroid = centroids.vectors.row(c);
      double sq = 0.0;
      for (std::size_t j = 0; j < vec.size(); ++j) {
        const double d = vec[j] - centroid[j];
        sq += d * d;
      }
      out.values[c] += std::sqrt(sq);
    }
    ++out.matched;
  }
  if (out.matched > 0) {
    for (double& v : out.values) v /= static_cast<double>(out.matched);
  }
  return out;
}

PooledVector emotion_features(std::span<const std::string> tokens, const AffectLexicon& affect) {
  PooledVector out;
  out.values.assign(3, 0.0);
  for (const auto& token : tokens) {
    const AffectRating* r = affect.find(token);
    if (r == nullptr) continue;
    out.values[0] += r->valence;
    out.values[1] += r->arousal;
    out.values[2] += r->dominance;
    ++out.matched;
  }
  if (out.matched == 0) {
    out.values.assign(3, kAffectScaleMidpoint);
  } else {
    for (double& v : out.values) v /= static_cast<double>(out.matched);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contextual store

ContextualStore::ContextualStore(std::string model_id, std::size_t dim)
    : model_id_(std::move(model_id)), dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::invalid_argument, "contextual dimension must be positive");
}

const std::vector<double>* ContextualStore::find(std::string_view id) const {
  const auto it = vectors_.find(id);
  return it == vectors_.end() ? nullptr : &it->second;
}

void ContextualStore::add(std::string id, std::vector<double> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::dim_mismatch, "vector for '" + id + "' has " +
                                             std::to_string(values.size()) + " components, expected " +
                                             std::to_string(dim_));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "vector for '" + id + "' is not finite");
  }
  std::string key = id;
  if (!vectors_.emplace(std::move(key), std::move(values)).second) {
    throw Error(ErrorCode::duplicate_id, "duplicate contextual vector id '" + id + "'");
  }
}

ContextualStore parse_contextual(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<ContextualStore> store;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::malformed_row, std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw Error(ErrorCode::malformed_row, "record is not an object", line_no);
    if (!store) {
      if (!record.contains("model_id") || !record.contains("dim") ||
          !record["dim"].is_number_integer() || record["dim"].get<long long>() <= 0) {
        throw Error(ErrorCode::missing_header,
                    "first record must be {\"model_id\": ..., \"dim\": <positive int>}", line_no);
      }
      store.emplace(record["model_id"].get<std::string>(), record["dim"].get<std::size_t>());
      std::optional<std::size_t> count;
      std::optional<std::string> corpus_hash;
      if (record.contains("count")) count = record["count"].get<std::size_t>();
      if (record.contains("corpus_sha256")) corpus_hash = record["corpus_sha256"].get<std::string>();
      store->set_manifest(count, corpus_hash);
      continue;
    }
    if (!record.contains("id") || !record.contains("vec") || !record["vec"].is_array()) {
      throw Error(ErrorCode::malformed_row, "record must have \"id\" and \"vec\"", line_no);
    }
    std::vector<double> values;
    for (const auto& v : record["vec"]) {
      if (!v.is_number()) throw Error(ErrorCode::non_numeric, "non-numeric vector component", line_no);
      values.push_back(v.get<double>());
    }
    try {
      store->add(record["id"].get<std::string>(), std::move(values));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no);
    }
  }
  if (!store) throw Error(ErrorCode::missing_header, "contextual file has no header record");
  if (store->declared_count() && *store->declared_count() != store->size()) {
    throw Error(ErrorCode::dim_mismatch, "header declares " + std::to_string(*store->declared_count()) +
                                             " records, file has " + std::to_string(store->size()));
  }
  return *std::move(store);
}

ContextualStore load_contextual(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open contextual file " + path.string());
  return parse_contextual(in);
}

void require_coverage(const ContextualStore& store, std::span<const Vignette> vignettes) {
  for (const auto& v : vignettes) {
    if (store.find(v.id) == nullptr) {
      throw Error(ErrorCode::missing_vector, "no contextual vector for vignette '" + v.id + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Feature matrices

FeatureBuild build_feature_matrix(std::span<const Vignette> vignettes, const LabelSpace& labels,
                                  Scheme scheme, const FeatureResources& resources,
                                  const FeatureOptions& options) {
  auto require = [&](const void* resource, std::string_view what) {
    if (resource == nullptr) {
      throw Error(ErrorCode::scheme_resource_mismatch,
                  std::string(to_string(scheme)) + " scheme needs " + std::string(what));
    }
  };
  switch (scheme) {
    case Scheme::contextual:
      require(resources.contextual, "contextual embeddings");
      require_coverage(*resources.contextual, vignettes);
      break;
    case Scheme::avg_embed:
    case Scheme::verb_embed:
      require(resources.embeddings, "a word embedding table");
      break;
    case Scheme::moral_sentiment:
      require(resources.embeddings, "a word embedding table");
      require(resources.centroids, "foundation centroids");
      break;
    case Scheme::emotion:
      require(resources.affect, "affect norms");
      break;
  }

  FeatureBuild build;
  build.matrix.scheme = scheme;
  for (const auto& v : vignettes) {
    const int label = labels.require_index(v.category);
    std::vector<double> row;
    bool flagged = false;
    std::string reason;
    bool exclude = false;

    switch (scheme) {
      case Scheme::contextual:
        row = *resources.contextual->find(v.id);
        break;
      case Scheme::avg_embed: {
        auto pooled = avg_embedding(tokenize(v.text), *resources.embeddings);
        flagged = pooled.flagged();
        reason = "all tokens out of vocabulary";
        row = std::move(pooled.values);
        break;
      }
      case Scheme::verb_embed: {
        const SentenceParse* parse =
            resources.parses != nullptr ? resources.parses->find(v.id) : nullptr;
        const RootVerb verb = root_verb(v, parse);
        build.verb_sources[v.id] = verb.source;
        if (!verb.found()) {
          exclude = true;
          reason = "no root verb";
          break;
        }
        auto vec = verb_embedding(verb, *resources.embeddings);
        if (vec.oov()) {
          exclude = true;
          reason = "root verb '" + verb.form + "' out of vocabulary";
          break;
        }
        row = std::move(vec.values);
        break;
      }
      case Scheme::moral_sentiment: {
        auto pooled = moral_sentiment_features(tokenize(v.text), *resources.centroids,
                                               *resources.embeddings);
        flagged = pooled.flagged();
        reason = "all tokens out of vocabulary";
        row = std::move(pooled.values);
        break;
      }
      case Scheme::emotion: {
        auto pooled = emotion_features(tokenize(v.text), *resources.affect);
        flagged = pooled.flagged();
        reason = "no token in affect norms";
        row = std::move(pooled.values);
        break;
      }
    }

    if (flagged && options.exclude_flagged) exclude = true;
    if (exclude) {
      build.exclusions.push_back({v.id, reason});
      continue;
    }
    if (flagged) build.flagged.push_back(v.id);
    build.matrix.ids.push_back(v.id);
    build.matrix.labels.push_back(label);
    build.matrix.values.append_row(row);
  }
  return build;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix, const LabelSpace& labels) {
  out << "vignette_id,label";
  for (std::size_t j = 0; j < matrix.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out << matrix.ids[i] << ',' << labels.classes.at(static_cast<std::size_t>(matrix.labels[i]));
    for (double v : matrix.values.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

nlohmann::json feature_sidecar(const FeatureBuild& build,
                               const std::map<std::string, std::string>& fingerprints) {
  nlohmann::json j;
  j["scheme"] = to_string(build.matrix.scheme);
  j["rows"] = build.matrix.rows();
  j["dims"] = build.matrix.cols();
  j["exclusions"] = nlohmann::json::array();
  for (const auto& e : build.exclusions) {
    j["exclusions"].push_back({{"vignette_id", e.vignette_id}, {"reason", e.reason}});
  }
  j["flagged"] = build.flagged;
  if (!build.verb_sources.empty()) {
    nlohmann::json sources = nlohmann::json::object();
    for (const auto& [id, source] : build.verb_sources) sources[id] = to_string(source);
    j["verb_sources"] = sources;
  }
  j["resources"] = fingerprints;
  return j;
}

}  // namespace moralvig
