#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace moralvig {

std::string ascii_lower(std::string_view text);

/// Token -> dense vector table in the plain-text GloVe layout.
///
/// Vectors are stored as float in one contiguous block so that a
/// 400k x 300 table fits comfortably in memory. Tokens keep their file
/// spelling; find() folds the query to lowercase first.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  const std::string& token(std::size_t index) const { return tokens_[index]; }
  std::span<const float> vector(std::size_t index) const {
    return {values_.data() + index * dim_, dim_};
  }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Lookup after lowercasing the query. Absent tokens give nullopt, which is
  // distinct from a present token whose vector happens to be zero.
  std::optional<std::span<const float>> find(std::string_view token) const;
  std::optional<std::span<const float>> find_exact(std::string_view token) const;

  // Throws duplicate_token / inconsistent_dim / non_finite.
  void add(std::string token, std::span<const float> values);
  void add(std::string token, std::span<const double> values);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Streams `<token> <f1> ... <fD>` lines. The dimension comes from line 1.
EmbeddingTable parse_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

struct LexiconCategory {
  int id = 0;
  std::string name;
};

struct LexiconEntry {
  std::string pattern;  // lowercase, without the trailing '*'
  bool prefix_wildcard = false;
  std::vector<int> categories;
};

/// Moral foundations dictionary in the `.dic` layout.
class FoundationLexicon {
 public:
  FoundationLexicon() = default;
  explicit FoundationLexicon(std::vector<LexiconCategory> categories);

  const std::vector<LexiconCategory>& categories() const noexcept { return categories_; }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  bool has_category(int id) const;
  const LexiconCategory& category(int id) const;

  // Adds `pattern` (a trailing '*' marks a prefix wildcard) under the given
  // category ids. Throws undeclared_category for unknown ids.
  void add_entry(std::string_view pattern, std::vector<int> categories);

  /// Union of categories of exact entries equal to `token` and wildcard
  /// entries whose stem is a prefix of it. Sorted ascending.
  std::vector<int> match(std::string_view token) const;

 private:
  std::vector<LexiconCategory> categories_;
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> exact_;
  std::unordered_map<std::string, std::vector<std::size_t>> prefixes_;
  std::size_t longest_prefix_ = 0;
};

FoundationLexicon parse_mfd(std::istream& in);
FoundationLexicon load_mfd(const std::filesystem::path& path);

inline std::vector<int> mfd_match(const FoundationLexicon& lexicon, std::string_view token) {
  return lexicon.match(token);
}

struct AffectRating {
  double valence = 0.0;
  double arousal = 0.0;
  double dominance = 0.0;

  friend bool operator==(const AffectRating&, const AffectRating&) = default;
};

struct AffectColumns {
  std::string word = "Word";
  std::string valence = "V.Mean.Sum";
  std::string arousal = "A.Mean.Sum";
  std::string dominance = "D.Mean.Sum";
};

inline constexpr double kAffectScaleMin = 1.0;
inline constexpr double kAffectScaleMax = 9.0;
inline constexpr double kAffectScaleMidpoint = 5.0;

/// Valence/arousal/dominance norms on the raw 1-9 rating scale.
/// Words are stored lowercased.
class AffectLexicon {
 public:
  std::size_t size() const noexcept { return entries_.size(); }
  const AffectRating* find(std::string_view word) const;
  void add(std::string word, AffectRating rating);  // throws on duplicate or range error
  const std::map<std::string, AffectRating>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, AffectRating> entries_;
};

AffectLexicon parse_affect_norms(std::istream& in, const AffectColumns& columns = {});
AffectLexicon load_affect_norms(const std::filesystem::path& path,
                                const AffectColumns& columns = {});

}  // namespace moralvig
