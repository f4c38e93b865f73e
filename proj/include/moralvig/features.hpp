#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "moralvig/corpus.hpp"
#include "moralvig/lexicons.hpp"
#include "moralvig/matrix.hpp"

namespace moralvig {

enum class Scheme { contextual, avg_embed, verb_embed, moral_sentiment, emotion };

inline constexpr Scheme kAllSchemes[] = {Scheme::contextual, Scheme::avg_embed,
                                         Scheme::verb_embed, Scheme::moral_sentiment,
                                         Scheme::emotion};

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);
// Row label used in the accuracy grid, e.g. "Context. Embed.".
std::string_view display_name(Scheme scheme);

/// Lowercases ASCII, turns every non-alphanumeric byte into a separator and
/// splits. "Don't lie!" -> {don, t, lie}.
std::vector<std::string> tokenize(std::string_view text);

/// Mean-pooled feature vector; `matched` counts the tokens that contributed.
/// A row with matched == 0 is flagged.
struct PooledVector {
  std::vector<double> values;
  std::size_t matched = 0;
  bool flagged() const noexcept { return matched == 0; }
};

PooledVector avg_embedding(std::span<const std::string> tokens, const EmbeddingTable& table);

// -- dependency parses ------------------------------------------------------

struct ParseToken {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;
  std::string deprel;
};

struct SentenceParse {
  std::string sent_id;
  std::string text;  // from "# text =" when present
  std::vector<ParseToken> tokens;

  // Token with head 0, or nullptr.
  const ParseToken* root() const;
};

class ParseBank {
 public:
  void add(SentenceParse parse);  // throws duplicate_id
  const SentenceParse* find(std::string_view vignette_id) const;
  std::size_t size() const noexcept { return parses_.size(); }

 private:
  std::map<std::string, SentenceParse, std::less<>> parses_;
};

/// CoNLL-U reader. Each block must carry a `# sent_id = <vignette id>` comment.
/// Multiword-token ranges ("3-4") and empty nodes ("5.1") are skipped.
ParseBank parse_conllu(std::istream& in);
ParseBank load_conllu(const std::filesystem::path& path);

enum class VerbSource { parse, word_list, none };
std::string_view to_string(VerbSource source);

struct RootVerb {
  std::string form;   // lowercased surface form
  std::string lemma;  // lowercased lemma, may equal form
  VerbSource source = VerbSource::none;
  bool found() const noexcept { return source != VerbSource::none; }
};

// Lemma of `word` when it is a form of a verb in the bundled word list.
std::optional<std::string> verb_lemma(std::string_view word);

/// Root verb of a vignette. With a parse, the head-0 token is used when it is
/// tagged VERB or AUX (or untagged); otherwise the first token of the text
/// found in the bundled verb list. Throws parse_misalignment when the parse
/// does not spell the vignette's text.
RootVerb root_verb(const Vignette& vignette, const SentenceParse* parse);

struct VerbVector {
  std::vector<double> values;
  std::string matched;  // table token that was used; empty when OOV
  bool oov() const noexcept { return matched.empty(); }
};

/// Looks up the verb form, then its lemma. OOV verbs come back flagged.
VerbVector verb_embedding(const RootVerb& verb, const EmbeddingTable& table);

// -- moral sentiment ---------------------------------------------------------

/// Per-category mean embedding of the table vocabulary matched by each
/// category, with wildcard stems expanded against the vocabulary. Only
/// tokens already in lowercase take part. Categories that match nothing are
/// listed in `dropped` and have no centroid.
struct Centroids {
  std::vector<int> category_ids;     // kept categories, lexicon order
  std::vector<std::string> names;    // parallel to category_ids
  std::vector<std::size_t> counts;   // matched vocabulary size per category
  Matrix vectors;                    // one row per kept category
  std::vector<int> dropped;
  bool l2_normalized = false;

  std::size_t size() const noexcept { return category_ids.size(); }
};

Centroids foundation_centroids(const FoundationLexicon& lexicon, const EmbeddingTable& table,
                               bool l2_normalize = false);

/// Mean Euclidean distance from each in-vocabulary token vector to each
/// centroid; one component per kept category.
PooledVector moral_sentiment_features(std::span<const std::string> tokens,
                                      const Centroids& centroids, const EmbeddingTable& table);

/// Mean (valence, arousal, dominance) over covered tokens. All-absent rows
/// are flagged and get the scale midpoint on every axis.
PooledVector emotion_features(std::span<const std::string> tokens, const AffectLexicon& affect);

// -- contextual sentence embeddings -----------------------------------------

class ContextualStore {
 public:
  ContextualStore() = default;
  ContextualStore(std::string model_id, std::size_t dim);

  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  std::optional<std::size_t> declared_count() const noexcept { return declared_count_; }
  const std::optional<std::string>& corpus_sha256() const noexcept { return corpus_sha256_; }

  const std::vector<double>* find(std::string_view id) const;
  void add(std::string id, std::vector<double> values);  // throws dim_mismatch / duplicate_id

  void set_manifest(std::optional<std::size_t> count, std::optional<std::string> corpus_sha256) {
    declared_count_ = count;
    corpus_sha256_ = std::move(corpus_sha256);
  }

 private:
  std::string model_id_;
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
  std::optional<std::size_t> declared_count_;
  std::optional<std::string> corpus_sha256_;
};

/// JSON-lines: header `{"model_id", "dim"}` (optionally "count" and
/// "corpus_sha256"), then `{"id", "vec"}` records.
ContextualStore parse_contextual(std::istream& in);
ContextualStore load_contextual(const std::filesystem::path& path);

// Throws missing_vector naming the first corpus id without a vector.
void require_coverage(const ContextualStore& store, std::span<const Vignette> vignettes);

// -- feature matrices ---------------------------------------------------------

struct FeatureMatrix {
  Scheme scheme = Scheme::contextual;
  std::vector<std::string> ids;
  std::vector<int> labels;
  Matrix values;

  std::size_t rows() const noexcept { return ids.size(); }
  std::size_t cols() const noexcept { return values.cols(); }
};

struct FeatureResources {
  const EmbeddingTable* embeddings = nullptr;
  const Centroids* centroids = nullptr;
  const AffectLexicon* affect = nullptr;
  const ContextualStore* contextual = nullptr;
  const ParseBank* parses = nullptr;
};

struct FeatureOptions {
  // Drop all-OOV rows of the pooled schemes instead of keeping their
  // placeholder vectors. Verb rows without a usable verb are always dropped.
  bool exclude_flagged = false;
};

struct Exclusion {
  std::string vignette_id;
  std::string reason;
};

struct FeatureBuild {
  FeatureMatrix matrix;
  std::vector<Exclusion> exclusions;       // rows left out of the matrix
  std::vector<std::string> flagged;        // rows kept with placeholder vectors
  std::map<std::string, VerbSource> verb_sources;  // verb scheme only
};

FeatureBuild build_feature_matrix(std::span<const Vignette> vignettes, const LabelSpace& labels,
                                  Scheme scheme, const FeatureResources& resources,
                                  const FeatureOptions& options = {});

// `vignette_id,label,f0..fK`; values printed with 17 significant digits.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix,
                       const LabelSpace& labels);

nlohmann::json feature_sidecar(const FeatureBuild& build,
                               const std::map<std::string, std::string>& fingerprints);

}  // namespace moralvig
