#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moralvig {

enum class Dataset { chadwick, mccurrie, clifford };
enum class Polarity { positive, negative };

inline constexpr Dataset kAllDatasets[] = {Dataset::chadwick, Dataset::mccurrie,
                                           Dataset::clifford};

std::string_view to_string(Dataset dataset);
Dataset parse_dataset(std::string_view name);

// CSV spelling: "pos" / "neg".
std::string_view to_string(Polarity polarity);
Polarity parse_polarity(std::string_view text);

struct Vignette {
  std::string id;
  Dataset dataset = Dataset::chadwick;
  std::string text;
  std::string category;
  Polarity polarity = Polarity::negative;

  friend bool operator==(const Vignette&, const Vignette&) = default;
};

/// Lowercase ASCII, trimmed, with spaces and hyphens folded to underscores.
std::string normalize_label(std::string_view label);

/// Labels a dataset may carry. Chadwick uses the ten trait-by-polarity labels;
/// the two foundation sets use the five foundations plus `liberty`, which is
/// accepted on load and removed by exclude_liberty().
std::span<const std::string_view> declared_categories(Dataset dataset);

// Polarity implied by a Chadwick label (honest -> positive, dishonest -> negative).
Polarity chadwick_polarity(std::string_view label);

/// Parses the vignette CSV (`id,dataset,text,category,polarity`).
/// Errors carry the 1-based data row number.
std::vector<Vignette> parse_vignettes(std::istream& in, Dataset dataset);
std::vector<Vignette> load_vignettes(const std::filesystem::path& path, Dataset dataset);

void write_vignettes(std::ostream& out, std::span<const Vignette> vignettes);

std::vector<Vignette> exclude_liberty(std::vector<Vignette> vignettes);

enum class ChanceBasis { uniform, majority };
std::string_view to_string(ChanceBasis basis);

struct LabelSpace {
  Dataset dataset = Dataset::chadwick;
  std::vector<std::string> classes;  // sorted lexicographically
  std::vector<std::size_t> counts;   // parallel to classes
  double chance_rate = 0.0;
  ChanceBasis chance_basis = ChanceBasis::uniform;

  std::size_t size() const noexcept { return classes.size(); }
  // Index of a label, or -1 when absent.
  int index_of(std::string_view label) const;
  int require_index(std::string_view label) const;
};

/// chance_rate is 1/|classes| when every class has the same count, otherwise
/// the largest class prior; chance_basis says which.
LabelSpace label_space(std::span<const Vignette> vignettes, Dataset dataset);

}  // namespace moralvig
