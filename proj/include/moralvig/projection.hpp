#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "moralvig/corpus.hpp"
#include "moralvig/matrix.hpp"

namespace moralvig {

struct AffinityMatrix {
  std::size_t n = 0;
  Matrix p;                        // symmetric joint probabilities, zero diagonal
  std::vector<double> entropies;   // per-point conditional entropy, bits
  std::vector<double> precisions;  // per-point Gaussian precision (1 / 2 sigma^2)
};

/// Exact-duplicate rows after the first occurrence are nudged by seeded
/// uniform noise of amplitude 1e-8 per component. Returns the number moved.
std::size_t jitter_duplicates(Matrix& points, std::uint64_t seed);

/// Conditional Gaussian affinities with a per-point precision found by
/// bisection so that each row's entropy equals log2(perplexity), then
/// symmetrised as p_ij = (p_j|i + p_i|j) / 2n. Requires 1 < perplexity <= n - 1.
AffinityMatrix perplexity_affinities(const Matrix& points, double perplexity,
                                     std::uint64_t seed = 0);

struct TsneOptions {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  std::uint64_t seed = 0;
  double exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  int kl_every = 50;
};

nlohmann::json to_json(const TsneOptions& options);

struct KlSample {
  int iteration = 0;
  double kl = 0.0;
};

struct EmbeddingLayout {
  Matrix coords;  // n x 2
  std::vector<int> labels;
  std::vector<KlSample> kl_trace;
};

// KL(P || Q) for a layout under the Student-t kernel.
double kl_divergence(const AffinityMatrix& affinities, const Matrix& layout);

/// Exact t-SNE: gradient descent with momentum, per-parameter gains, early
/// exaggeration, and N(0, 1e-4^2) initialisation drawn from the seed.
/// KL against the true affinities is recorded every `kl_every` iterations.
EmbeddingLayout tsne_fit(const Matrix& points, std::span<const int> labels,
                         const TsneOptions& options = {});

/// Legend label per class. With `group_positive` the five positive Chadwick
/// traits collapse into one "positive" group.
std::vector<std::string> legend_labels(std::span<const std::string> classes, Dataset dataset,
                                       bool group_positive);

enum class LayoutFormat { csv, svg };

struct LayoutExport {
  std::vector<std::string> ids;      // parallel to layout rows
  std::vector<std::string> classes;  // label index -> class name
  Dataset dataset = Dataset::chadwick;
  bool group_positive = false;
  std::string title;
};

// `vignette_id,x,y,label`
void write_layout_csv(std::ostream& out, const EmbeddingLayout& layout, const LayoutExport& info);
// Self-contained scatter plot with a colour legend.
void write_layout_svg(std::ostream& out, const EmbeddingLayout& layout, const LayoutExport& info);

void export_layout(const EmbeddingLayout& layout, const LayoutExport& info,
                   const std::filesystem::path& path, LayoutFormat format);

}  // namespace moralvig
