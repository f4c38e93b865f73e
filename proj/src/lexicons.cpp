#include "moralvig/lexicons.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "moralvig/csv.hpp"
#include "moralvig/error.hpp"

namespace moralvig {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// ---------------------------------------------------------------------------
// EmbeddingTable

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::invalid_argument, "embedding dimension must be positive");
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view token) const {
  return find_exact(ascii_lower(token));
}

std::optional<std::span<const float>> EmbeddingTable::find_exact(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return vector(it->second);
}

void EmbeddingTable::add(std::string token, std::span<const float> values) {
  if (token.empty()) throw Error(ErrorCode::invalid_argument, "empty embedding token");
  if (dim_ == 0) dim_ = values.size();
  if (values.size() != dim_) {
    throw Error(ErrorCode::inconsistent_dim, "token '" + token + "' has " +
                                                 std::to_string(values.size()) +
                                                 " components, expected " + std::to_string(dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite, "token '" + token + "' has a non-finite component");
    }
  }
  const auto index = static_cast<std::uint32_t>(tokens_.size());
  if (!index_.emplace(token, index).second) {
    throw Error(ErrorCode::duplicate_token, "duplicate token '" + token + "'");
  }
  tokens_.push_back(std::move(token));
  values_.insert(values_.end(), values.begin(), values.end());
}

void EmbeddingTable::add(std::string token, std::span<const double> values) {
  std::vector<float> narrowed(values.begin(), values.end());
  add(std::move(token), std::span<const float>(narrowed));
}

EmbeddingTable parse_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = split_ws(line);
    if (parts.empty()) continue;
    if (parts.size() < 2) {
      throw Error(ErrorCode::inconsistent_dim, "token without components", line_no);
    }
    values.clear();
    for (std::size_t i = 1; i < parts.size(); ++i) {
      float v = 0.0f;
      if (!parse_number(parts[i], v)) {
        throw Error(ErrorCode::non_numeric,
                    "component " + std::to_string(i) + " of '" + std::string(parts[0]) +
                        "' is not a number: '" + std::string(parts[i]) + "'",
                    line_no);
      }
      values.push_back(v);
    }
    try {
      table.add(std::string(parts[0]), std::span<const float>(values));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no);
    }
  }
  if (table.empty()) throw Error(ErrorCode::empty_file, "embedding file has no entries");
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open embedding file " + path.string());
  return parse_embeddings(in);
}

// ---------------------------------------------------------------------------
// FoundationLexicon

FoundationLexicon::FoundationLexicon(std::vector<LexiconCategory> categories)
    : categories_(std::move(categories)) {
  std::set<int> ids;
  for (const auto& c : categories_) {
    if (!ids.insert(c.id).second) {
      throw Error(ErrorCode::invalid_argument, "category id " + std::to_string(c.id) + " declared twice");
    }
  }
}

bool FoundationLexicon::has_category(int id) const {
  return std::any_of(categories_.begin(), categories_.end(),
                     [id](const LexiconCategory& c) { return c.id == id; });
}

const LexiconCategory& FoundationLexicon::category(int id) const {
  for (const auto& c : categories_) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::undeclared_category, "category id " + std::to_string(id) + " not declared");
}

void FoundationLexicon::add_entry(std::string_view pattern, std::vector<int> categories) {
  std::string text = ascii_lower(trim(pattern));
  LexiconEntry entry;
  if (!text.empty() && text.back() == '*') {
    entry.prefix_wildcard = true;
    text.pop_back();
  }
  if (text.empty()) throw Error(ErrorCode::invalid_argument, "empty lexicon pattern");
  if (categories.empty()) {
    throw Error(ErrorCode::undeclared_category, "pattern '" + text + "' has no category");
  }
  for (int id : categories) {
    if (!has_category(id)) {
      throw Error(ErrorCode::undeclared_category,
                  "pattern '" + text + "' references undeclared category " + std::to_string(id));
    }
  }
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
  entry.pattern = text;
  entry.categories = std::move(categories);

  const std::size_t index = entries_.size();
  if (entry.prefix_wildcard) {
    prefixes_[entry.pattern].push_back(index);
    longest_prefix_ = std::max(longest_prefix_, entry.pattern.size());
  } else {
    exact_[entry.pattern].push_back(index);
  }
  entries_.push_back(std::move(entry));
}

std::vector<int> FoundationLexicon::match(std::string_view token) const {
  std::vector<int> out;
  auto collect = [&](const std::vector<std::size_t>& indices) {
    for (std::size_t i : indices) {
      const auto& cats = entries_[i].categories;
      out.insert(out.end(), cats.begin(), cats.end());
    }
  };
  const std::string key(token);
  if (auto it = exact_.find(key); it != exact_.end()) collect(it->second);
  const std::size_t limit = std::min(longest_prefix_, key.size());
  for (std::size_t len = 1; len <= limit; ++len) {
    if (auto it = prefixes_.find(key.substr(0, len)); it != prefixes_.end()) collect(it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FoundationLexicon parse_mfd(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  if (!next_content_line() || trim(line) != "%") {
    throw Error(ErrorCode::missing_category_block, "dictionary must open with a '%' category block",
                line_no == 0 ? 1 : line_no);
  }
  std::vector<LexiconCategory> categories;
  bool closed = false;
  while (next_content_line()) {
    if (trim(line) == "%") {
      closed = true;
      break;
    }
    const auto parts = split_ws(line);
    int id = 0;
    if (parts.size() < 2 || !parse_number(parts[0], id)) {
      throw Error(ErrorCode::missing_category_block, "expected '<id> <name>' in category block",
                  line_no);
    }
    std::string name(parts[1]);
    for (std::size_t i = 2; i < parts.size(); ++i) name += "_" + std::string(parts[i]);
    categories.push_back({id, std::move(name)});
  }
  if (!closed) {
    throw Error(ErrorCode::missing_category_block, "category block is not closed by '%'", line_no);
  }
  if (categories.empty()) {
    throw Error(ErrorCode::missing_category_block, "category block declares no categories", line_no);
  }

  FoundationLexicon lexicon(std::move(categories));
  while (next_content_line()) {
    const auto parts = split_ws(line);
    if (parts.size() < 2) {
      throw Error(ErrorCode::undeclared_category,
                  "entry '" + std::string(parts[0]) + "' lists no category", line_no);
    }
    std::vector<int> ids;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      int id = 0;
      if (!parse_number(parts[i], id)) {
        throw Error(ErrorCode::non_numeric, "category id '" + std::string(parts[i]) + "' is not an integer",
                    line_no);
      }
      ids.push_back(id);
    }
    try {
      lexicon.add_entry(parts[0], std::move(ids));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no);
    }
  }
  return lexicon;
}

FoundationLexicon load_mfd(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open dictionary " + path.string());
  return parse_mfd(in);
}

// ---------------------------------------------------------------------------
// AffectLexicon

const AffectRating* AffectLexicon::find(std::string_view word) const {
  const auto it = entries_.find(ascii_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void AffectLexicon::add(std::string word, AffectRating rating) {
  word = ascii_lower(trim(word));
  if (word.empty()) throw Error(ErrorCode::invalid_argument, "empty affect word");
  for (double v : {rating.valence, rating.arousal, rating.dominance}) {
    if (!(v >= kAffectScaleMin && v <= kAffectScaleMax)) {
      throw Error(ErrorCode::out_of_range, "rating " + std::to_string(v) + " for '" + word +
                                               "' outside [1, 9]");
    }
  }
  if (!entries_.emplace(word, rating).second) {
    throw Error(ErrorCode::duplicate_token, "duplicate affect word '" + word + "'");
  }
}

AffectLexicon parse_affect_norms(std::istream& in, const AffectColumns& columns) {
  const auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::empty_file, "affect norms file is empty");

  const auto& header = records.front().fields;
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw Error(ErrorCode::missing_column, "affect norms lack column '" + name + "'",
                records.front().line);
  };
  const std::size_t word_col = column(columns.word);
  const std::size_t v_col = column(columns.valence);
  const std::size_t a_col = column(columns.arousal);
  const std::size_t d_col = column(columns.dominance);
  const std::size_t needed = std::max({word_col, v_col, a_col, d_col}) + 1;

  AffectLexicon lexicon;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() < needed) {
      throw Error(ErrorCode::malformed_row, "too few columns", rec.line);
    }
    AffectRating rating;
    double* targets[] = {&rating.valence, &rating.arousal, &rating.dominance};
    const std::size_t cols[] = {v_col, a_col, d_col};
    for (int k = 0; k < 3; ++k) {
      const auto text = trim(rec.fields[cols[k]]);
      if (!parse_number(text, *targets[k])) {
        throw Error(ErrorCode::non_numeric, "rating '" + std::string(text) + "' is not a number",
                    rec.line);
      }
    }
    try {
      lexicon.add(rec.fields[word_col], rating);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), rec.line);
    }
  }
  return lexicon;
}

AffectLexicon load_affect_norms(const std::filesystem::path& path, const AffectColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open affect norms " + path.string());
  return parse_affect_norms(in, columns);
}

}  // namespace moralvig
