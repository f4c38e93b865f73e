#include "moralvig/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "moralvig/csv.hpp"
#include "moralvig/error.hpp"

namespace moralvig {

namespace {

constexpr std::array<std::string_view, 10> kChadwickLabels = {
    "charitable", "cooperative", "dishonest",    "disloyal",      "friendly",
    "honest",     "loyal",       "uncharitable", "uncooperative", "unfriendly"};
constexpr std::array<std::string_view, 5> kChadwickPositive = {
    "charitable", "cooperative", "friendly", "honest", "loyal"};
constexpr std::array<std::string_view, 6> kFoundationLabels = {
    "authority", "care", "fairness", "liberty", "loyalty", "purity"};

constexpr std::array<std::string_view, 5> kHeader = {"id", "dataset", "text", "category",
                                                     "polarity"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_declared(Dataset dataset, std::string_view label) {
  const auto labels = declared_categories(dataset);
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

}  // namespace

std::string_view to_string(Dataset dataset) {
  switch (dataset) {
    case Dataset::chadwick: return "chadwick";
    case Dataset::mccurrie: return "mccurrie";
    case Dataset::clifford: return "clifford";
  }
  return "unknown";
}

Dataset parse_dataset(std::string_view name) {
  const std::string normalized = normalize_label(name);
  for (Dataset d : kAllDatasets) {
    if (to_string(d) == normalized) return d;
  }
  throw Error(ErrorCode::invalid_argument, "unknown dataset '" + std::string(name) + "'");
}

std::string_view to_string(Polarity polarity) {
  return polarity == Polarity::positive ? "pos" : "neg";
}

Polarity parse_polarity(std::string_view text) {
  const std::string normalized = normalize_label(text);
  if (normalized == "pos" || normalized == "positive") return Polarity::positive;
  if (normalized == "neg" || normalized == "negative") return Polarity::negative;
  throw Error(ErrorCode::invalid_polarity, "polarity must be pos or neg, got '" +
                                               std::string(text) + "'");
}

std::string normalize_label(std::string_view label) {
  std::string out;
  for (char c : trim(label)) {
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::span<const std::string_view> declared_categories(Dataset dataset) {
  if (dataset == Dataset::chadwick) return kChadwickLabels;
  return kFoundationLabels;
}

Polarity chadwick_polarity(std::string_view label) {
  const bool positive =
      std::find(kChadwickPositive.begin(), kChadwickPositive.end(), label) !=
      kChadwickPositive.end();
  return positive ? Polarity::positive : Polarity::negative;
}

std::vector<Vignette> parse_vignettes(std::istream& in, Dataset dataset) {
  const auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::malformed_header, "missing header");

  const auto& header = records.front().fields;
  bool header_ok = header.size() == kHeader.size();
  for (std::size_t i = 0; header_ok && i < header.size(); ++i) {
    header_ok = trim(header[i]) == kHeader[i];
  }
  if (!header_ok) {
    throw Error(ErrorCode::malformed_header,
                "expected header id,dataset,text,category,polarity", records.front().line);
  }
  if (records.size() == 1) throw Error(ErrorCode::no_vignettes, "no vignettes");

  std::vector<Vignette> out;
  out.reserve(records.size() - 1);
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    const std::size_t row = r;
    if (fields.size() != kHeader.size()) {
      throw Error(ErrorCode::malformed_row,
                  "row " + std::to_string(row) + ": expected 5 columns, found " +
                      std::to_string(fields.size()),
                  row);
    }
    Vignette v;
    v.id = std::string(trim(fields[0]));
    if (v.id.empty()) throw Error(ErrorCode::malformed_row, "row " + std::to_string(row) + ": empty id", row);
    if (!seen.insert(v.id).second) {
      throw Error(ErrorCode::duplicate_id,
                  "row " + std::to_string(row) + ": duplicate id '" + v.id + "'", row);
    }
    const std::string file_dataset = normalize_label(fields[1]);
    if (file_dataset != to_string(dataset)) {
      throw Error(ErrorCode::dataset_mismatch,
                  "row " + std::to_string(row) + ": dataset '" + fields[1] + "' but loading " +
                      std::string(to_string(dataset)),
                  row);
    }
    v.dataset = dataset;
    if (trim(fields[2]).empty()) {
      throw Error(ErrorCode::empty_text, "row " + std::to_string(row) + ": empty text", row);
    }
    v.text = fields[2];
    v.category = normalize_label(fields[3]);
    if (!is_declared(dataset, v.category)) {
      throw Error(ErrorCode::unknown_category,
                  "row " + std::to_string(row) + ": unknown category '" + fields[3] + "' for " +
                      std::string(to_string(dataset)),
                  row);
    }
    try {
      v.polarity = parse_polarity(fields[4]);
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid_polarity, "row " + std::to_string(row) + ": " + e.what(), row);
    }
    const Polarity expected =
        dataset == Dataset::chadwick ? chadwick_polarity(v.category) : Polarity::negative;
    if (v.polarity != expected) {
      throw Error(ErrorCode::invalid_polarity,
                  "row " + std::to_string(row) + ": category '" + v.category + "' requires polarity " +
                      std::string(to_string(expected)),
                  row);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vignette> load_vignettes(const std::filesystem::path& path, Dataset dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open vignette file " + path.string());
  return parse_vignettes(in, dataset);
}

void write_vignettes(std::ostream& out, std::span<const Vignette> vignettes) {
  csv::write_row(out, {"id", "dataset", "text", "category", "polarity"});
  for (const auto& v : vignettes) {
    csv::write_row(out, {v.id, std::string(to_string(v.dataset)), v.text, v.category,
                         std::string(to_string(v.polarity))});
  }
}

std::vector<Vignette> exclude_liberty(std::vector<Vignette> vignettes) {
  std::erase_if(vignettes, [](const Vignette& v) { return v.category == "liberty"; });
  return vignettes;
}

std::string_view to_string(ChanceBasis basis) {
  return basis == ChanceBasis::uniform ? "uniform" : "majority";
}

int LabelSpace::index_of(std::string_view label) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return -1;
  return static_cast<int>(it - classes.begin());
}

int LabelSpace::require_index(std::string_view label) const {
  const int index = index_of(label);
  if (index < 0) {
    throw Error(ErrorCode::unknown_category, "label '" + std::string(label) + "' not in label space");
  }
  return index;
}

LabelSpace label_space(std::span<const Vignette> vignettes, Dataset dataset) {
  if (vignettes.empty()) throw Error(ErrorCode::no_vignettes, "no vignettes");
  std::map<std::string, std::size_t> counts;
  for (const auto& v : vignettes) {
    if (!is_declared(dataset, v.category)) {
      throw Error(ErrorCode::unknown_category, "vignette '" + v.id + "' has category '" +
                                                   v.category + "' outside the " +
                                                   std::string(to_string(dataset)) + " label set");
    }
    ++counts[v.category];
  }
  LabelSpace space;
  space.dataset = dataset;
  std::size_t largest = 0;
  for (const auto& [label, count] : counts) {
    space.classes.push_back(label);
    space.counts.push_back(count);
    largest = std::max(largest, count);
  }
  const bool uniform = std::all_of(space.counts.begin(), space.counts.end(),
                                   [&](std::size_t c) { return c == space.counts.front(); });
  if (uniform) {
    space.chance_rate = 1.0 / static_cast<double>(space.classes.size());
    space.chance_basis = ChanceBasis::uniform;
  } else {
    space.chance_rate = static_cast<double>(largest) / static_cast<double>(vignettes.size());
    space.chance_basis = ChanceBasis::majority;
  }
  return space;
}

}  // namespace moralvig
