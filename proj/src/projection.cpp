#include "moralvig/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include "moralvig/csv.hpp"
#include "moralvig/error.hpp"
#include "moralvig/rng.hpp"

namespace moralvig {

namespace {

Matrix squared_distances(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      auto a = x.row(i);
      auto b = x.row(j);
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

// Conditional distribution of row i at precision beta; returns entropy in nats.
double conditional_row(const Matrix& dist, std::size_t i, double beta, double offset,
                       std::vector<double>& row) {
  const std::size_t n = dist.rows();
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      row[j] = 0.0;
      continue;
    }
    const double shifted = dist(i, j) - offset;
    row[j] = std::exp(-beta * shifted);
    sum += row[j];
    weighted += shifted * row[j];
  }
  for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
  return std::log(sum) + beta * weighted / sum;
}

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::string full_precision(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                    "#393b79", "#637939"};

}  // namespace

std::size_t jitter_duplicates(Matrix& points, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "jitter"));
  std::map<std::vector<double>, std::size_t> seen;
  std::size_t moved = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto r = points.row(i);
    std::vector<double> key(r.begin(), r.end());
    if (seen.emplace(std::move(key), i).second) continue;
    for (double& v : r) v += 1e-8 * (2.0 * rng.uniform() - 1.0);
    ++moved;
  }
  return moved;
}

AffinityMatrix perplexity_affinities(const Matrix& points, double perplexity, std::uint64_t seed) {
  const std::size_t n = points.rows();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "need at least two points");
  if (!(perplexity > 1.0)) throw Error(ErrorCode::invalid_argument, "perplexity must exceed 1");
  if (perplexity > static_cast<double>(n - 1)) {
    throw Error(ErrorCode::invalid_argument, "perplexity " + full_precision(perplexity) +
                                                 " is not attainable with " + std::to_string(n) +
                                                 " points (max n - 1)");
  }
  for (double v : points.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "input points are not finite");
  }

  Matrix jittered = points;
  jitter_duplicates(jittered, seed);
  const Matrix dist = squared_distances(jittered);
  const double target = std::log2(perplexity);

  AffinityMatrix out;
  out.n = n;
  out.entropies.assign(n, 0.0);
  out.precisions.assign(n, 1.0);
  Matrix conditional(n, n);
  std::vector<double> row(n);

  for (std::size_t i = 0; i < n; ++i) {
    double offset = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) offset = std::min(offset, dist(i, j));
    }
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double entropy_bits = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      entropy_bits = conditional_row(dist, i, beta, offset, row) / std::numbers::ln2;
      const double diff = entropy_bits - target;
      if (std::abs(diff) < 1e-10) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    out.entropies[i] = entropy_bits;
    out.precisions[i] = beta;
    for (std::size_t j = 0; j < n; ++j) conditional(i, j) = row[j];
  }

  out.p = Matrix(n, n);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.p(i, j) = i == j ? 0.0 : (conditional(i, j) + conditional(j, i)) / denom;
    }
  }
  return out;
}

nlohmann::json to_json(const TsneOptions& o) {
  return {{"perplexity", o.perplexity},
          {"iterations", o.iterations},
          {"learning_rate", o.learning_rate},
          {"seed", o.seed},
          {"exaggeration", o.exaggeration},
          {"exaggeration_iterations", o.exaggeration_iterations},
          {"initial_momentum", o.initial_momentum},
          {"final_momentum", o.final_momentum},
          {"momentum_switch", o.momentum_switch},
          {"kl_every", o.kl_every},
          {"init_stddev", 1e-4}};
}

double kl_divergence(const AffinityMatrix& affinities, const Matrix& y) {
  const std::size_t n = affinities.n;
  Matrix num(n, n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0);
      const double dy = y(i, 1) - y(j, 1);
      const double q = 1.0 / (1.0 + dx * dx + dy * dy);
      num(i, j) = q;
      num(j, i) = q;
      z += 2.0 * q;
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = affinities.p(i, j);
      if (i == j || p <= 0.0) continue;
      const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
      kl += p * std::log(p / q);
    }
  }
  return std::max(kl, 0.0);
}

EmbeddingLayout tsne_fit(const Matrix& points, std::span<const int> labels,
                         const TsneOptions& options) {
  const std::size_t n = points.rows();
  if (n < 5) throw Error(ErrorCode::invalid_argument, "t-SNE needs at least 5 points");
  if (!labels.empty() && labels.size() != n) {
    throw Error(ErrorCode::invalid_argument, "labels and points differ in length");
  }
  if (options.iterations < 1 || !(options.learning_rate > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "iterations and learning rate must be positive");
  }
  const AffinityMatrix affinities = perplexity_affinities(points, options.perplexity, options.seed);

  Rng rng(options.seed);
  Matrix y(n, 2);
  for (double& v : y.data()) v = 1e-4 * rng.normal();
  Matrix update(n, 2);
  Matrix gains(n, 2, 1.0);
  Matrix grad(n, 2);
  Matrix num(n, n);

  EmbeddingLayout layout;
  layout.labels.assign(labels.begin(), labels.end());

  for (int iter = 0; iter < options.iterations; ++iter) {
    const double exaggeration = iter < options.exaggeration_iterations ? options.exaggeration : 1.0;
    const double momentum =
        iter < options.momentum_switch ? options.initial_momentum : options.final_momentum;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y(i, 0) - y(j, 0);
        const double dy = y(i, 1) - y(j, 1);
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num(i, j) = q;
        num(j, i) = q;
        z += 2.0 * q;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double mult = (exaggeration * affinities.p(i, j) - num(i, j) / z) * num(i, j);
        gx += mult * (y(i, 0) - y(j, 0));
        gy += mult * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    }

    auto& g = grad.data();
    auto& u = update.data();
    auto& gn = gains.data();
    auto& yv = y.data();
    for (std::size_t k = 0; k < g.size(); ++k) {
      const bool same_sign = (g[k] > 0.0) == (u[k] > 0.0);
      gn[k] = same_sign ? gn[k] * 0.8 : gn[k] + 0.2;
      gn[k] = std::max(gn[k], 0.01);
      u[k] = momentum * u[k] - options.learning_rate * gn[k] * g[k];
      yv[k] += u[k];
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y(i, 0);
      my += y(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) -= mx;
      y(i, 1) -= my;
    }

    const int done = iter + 1;
    if (options.kl_every > 0 && (done % options.kl_every == 0 || done == options.iterations)) {
      const double kl = kl_divergence(affinities, y);
      if (!std::isfinite(kl)) {
        throw Error(ErrorCode::non_finite,
                    "KL divergence became non-finite at iteration " + std::to_string(done));
      }
      layout.kl_trace.push_back({done, kl});
    }
  }
  for (double v : y.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "t-SNE layout is not finite");
  }
  layout.coords = std::move(y);
  return layout;
}

std::vector<std::string> legend_labels(std::span<const std::string> classes, Dataset dataset,
                                       bool group_positive) {
  std::vector<std::string> out(classes.begin(), classes.end());
  if (dataset == Dataset::chadwick && group_positive) {
    for (auto& label : out) {
      if (chadwick_polarity(label) == Polarity::positive) label = "positive";
    }
  }
  return out;
}

void write_layout_csv(std::ostream& out, const EmbeddingLayout& layout, const LayoutExport& info) {
  if (info.ids.size() != layout.coords.rows()) {
    throw Error(ErrorCode::invalid_argument, "layout ids and coordinates differ in length");
  }
  const auto legend = legend_labels(info.classes, info.dataset, info.group_positive);
  csv::write_row(out, {"vignette_id", "x", "y", "label"});
  for (std::size_t i = 0; i < layout.coords.rows(); ++i) {
    const std::string label =
        layout.labels.empty() ? "" : legend.at(static_cast<std::size_t>(layout.labels[i]));
    csv::write_row(out, {info.ids[i], full_precision(layout.coords(i, 0)),
                         full_precision(layout.coords(i, 1)), label});
  }
}

void write_layout_svg(std::ostream& out, const EmbeddingLayout& layout, const LayoutExport& info) {
  const auto legend = legend_labels(info.classes, info.dataset, info.group_positive);
  // Legend groups in first-appearance order of the class list.
  std::vector<std::string> groups;
  for (const auto& g : legend) {
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::stable_partition(groups.begin(), groups.end(),
                        [](const std::string& g) { return g == "positive"; });
  auto colour_of = [&](const std::string& group) {
    const auto pos = static_cast<std::size_t>(
        std::find(groups.begin(), groups.end(), group) - groups.begin());
    return kPalette[pos % std::size(kPalette)];
  };

  constexpr double width = 720.0;
  constexpr double height = 540.0;
  constexpr double margin = 30.0;
  constexpr double legend_width = 170.0;
  double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
  if (layout.coords.rows() > 0) {
    min_x = max_x = layout.coords(0, 0);
    min_y = max_y = layout.coords(0, 1);
    for (std::size_t i = 1; i < layout.coords.rows(); ++i) {
      min_x = std::min(min_x, layout.coords(i, 0));
      max_x = std::max(max_x, layout.coords(i, 0));
      min_y = std::min(min_y, layout.coords(i, 1));
      max_y = std::max(max_y, layout.coords(i, 1));
    }
  }
  const double span_x = max_x > min_x ? max_x - min_x : 1.0;
  const double span_y = max_y > min_y ? max_y - min_y : 1.0;
  const double plot_w = width - legend_width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\""
      << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0) << ' ' << fixed(height, 0)
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!info.title.empty()) {
    out << "<text x=\"" << fixed(margin, 0) << "\" y=\"20\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << xml_escape(info.title) << "</text>\n";
  }
  out << "<g id=\"points\">\n";
  for (std::size_t i = 0; i < layout.coords.rows(); ++i) {
    const double px = margin + (layout.coords(i, 0) - min_x) / span_x * plot_w;
    const double py = margin + (max_y - layout.coords(i, 1)) / span_y * plot_h;
    const std::string group =
        layout.labels.empty() ? "" : legend.at(static_cast<std::size_t>(layout.labels[i]));
    out << "<circle cx=\"" << fixed(px, 2) << "\" cy=\"" << fixed(py, 2)
        << "\" r=\"3.5\" fill=\"" << (group.empty() ? "#444444" : colour_of(group))
        << "\" fill-opacity=\"0.8\">";
    if (i < info.ids.size()) out << "<title>" << xml_escape(info.ids[i]) << "</title>";
    out << "</circle>\n";
  }
  out << "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  const double lx = width - legend_width;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double ly = margin + 20.0 * static_cast<double>(g);
    out << "<circle cx=\"" << fixed(lx, 2) << "\" cy=\"" << fixed(ly, 2) << "\" r=\"5\" fill=\""
        << colour_of(groups[g]) << "\"/>";
    out << "<text x=\"" << fixed(lx + 12.0, 2) << "\" y=\"" << fixed(ly + 4.0, 2) << "\">"
        << xml_escape(groups[g]) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

void export_layout(const EmbeddingLayout& layout, const LayoutExport& info,
                   const std::filesystem::path& path, LayoutFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  if (format == LayoutFormat::csv) {
    write_layout_csv(out, layout, info);
  } else {
    write_layout_svg(out, layout, info);
  }
  out.flush();
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

}  // namespace moralvig
