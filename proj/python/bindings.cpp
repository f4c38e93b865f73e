#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "moralvig/classifiers.hpp"
#include "moralvig/error.hpp"
#include "moralvig/eval.hpp"
#include "moralvig/pipeline.hpp"
#include "moralvig/projection.hpp"

namespace py = pybind11;
using namespace moralvig;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data().begin());
  return m;
}

DoubleArray to_array(const Matrix& m) {
  DoubleArray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

// nlohmann::json -> Python objects through the stdlib parser.
py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

template <typename T, typename Parse>
std::vector<T> parse_names(const std::vector<std::string>& names, Parse parse) {
  std::vector<T> out;
  for (const auto& n : names) out.push_back(parse(n));
  return out;
}

RunConfig config_with(const std::string& path, const std::optional<std::vector<std::string>>& datasets,
                      const std::optional<std::vector<std::string>>& schemes,
                      const std::optional<std::vector<std::string>>& classifiers,
                      std::optional<std::uint64_t> seed, int jobs) {
  RunConfig c = load_config(path);
  if (datasets) c.datasets = parse_names<Dataset>(*datasets, parse_dataset);
  if (schemes) c.schemes = parse_names<Scheme>(*schemes, parse_scheme);
  if (classifiers) c.classifiers = parse_names<ClassifierKind>(*classifiers, parse_classifier);
  if (seed) c.seed = *seed;
  c.jobs = jobs;
  return c;
}

Hyperparams hyperparams_from(const py::dict& d) {
  return hyperparams_from_json(nlohmann::json::parse(py::str(py::module_::import("json").attr("dumps")(d))
                                                        .cast<std::string>()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the moral-vignette benchmark";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> error_type(m, "MoralvigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(e.what());
    }
  });

  m.def(
      "summarize",
      [](const std::vector<double>& values) {
        const auto s = summarize(values);
        return py::make_tuple(s.mean, s.sd);
      },
      py::arg("values"), "Mean and population standard deviation.");

  m.def(
      "stratified_kfold",
      [](const std::vector<std::string>& ids, const std::vector<int>& labels, int k, std::uint64_t seed) {
        if (ids.size() != labels.size()) throw py::value_error("ids and labels differ in length");
        return stratified_kfold(ids, labels, k, seed).assignments;
      },
      py::arg("ids"), py::arg("labels"), py::arg("k") = 5, py::arg("seed") = 0,
      "Map of id to fold index.");

  m.def(
      "fit",
      [](const std::string& kind, const DoubleArray& x, const std::vector<int>& y, int class_count,
         const py::dict& hyperparams) {
        const auto model = fit(parse_classifier(kind), to_matrix(x), y, class_count,
                               hyperparams_from(hyperparams));
        return model_to_json(model).dump();
      },
      py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("class_count"),
      py::arg("hyperparams") = py::dict(), "Train a classifier; returns the model as JSON text.");

  m.def(
      "predict",
      [](const std::string& model_json, const DoubleArray& x) {
        const auto model = model_from_json(nlohmann::json::parse(model_json));
        const Matrix q = to_matrix(x);
        std::vector<int> out;
        for (std::size_t i = 0; i < q.rows(); ++i) out.push_back(predict(model, q.row(i)));
        return out;
      },
      py::arg("model"), py::arg("x"));

  m.def(
      "cross_validate",
      [](const std::string& kind, const DoubleArray& x, const std::vector<int>& y,
         const std::vector<std::string>& ids, int k, std::uint64_t seed, const py::dict& hyperparams) {
        FeatureMatrix fm;
        fm.values = to_matrix(x);
        fm.labels = y;
        fm.ids = ids;
        if (fm.ids.size() != fm.rows() || fm.labels.size() != fm.rows()) {
          throw py::value_error("x, y and ids differ in length");
        }
        const int classes = y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1;
        Hyperparams hp = hyperparams_from(hyperparams);
        hp.seed = seed;
        const auto cv = cross_validate(fm, classes, parse_classifier(kind), hp,
                                       stratified_kfold(ids, y, k, seed));
        return cv.fold_accuracies;
      },
      py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("ids"), py::arg("k") = 5,
      py::arg("seed") = 0, py::arg("hyperparams") = py::dict(), "Per-fold accuracies.");

  m.def(
      "affinities",
      [](const DoubleArray& x, double perplexity) {
        return to_array(perplexity_affinities(to_matrix(x), perplexity).p);
      },
      py::arg("x"), py::arg("perplexity"), "Symmetric t-SNE input affinities.");

  m.def(
      "tsne",
      [](const DoubleArray& x, double perplexity, int iterations, std::uint64_t seed) {
        TsneOptions opt;
        opt.perplexity = perplexity;
        opt.iterations = iterations;
        opt.seed = seed;
        return to_array(tsne_fit(to_matrix(x), {}, opt).coords);
      },
      py::arg("x"), py::arg("perplexity") = 30.0, py::arg("iterations") = 1000, py::arg("seed") = 0);

  m.def(
      "kl_divergence",
      [](const DoubleArray& x, const DoubleArray& layout, double perplexity) {
        return kl_divergence(perplexity_affinities(to_matrix(x), perplexity), to_matrix(layout));
      },
      py::arg("x"), py::arg("layout"), py::arg("perplexity"));

  m.def(
      "evaluate",
      [](const std::string& config, std::optional<std::vector<std::string>> datasets,
         std::optional<std::vector<std::string>> schemes,
         std::optional<std::vector<std::string>> classifiers, std::optional<std::uint64_t> seed, int jobs) {
        const RunConfig c = config_with(config, datasets, schemes, classifiers, seed, jobs);
        EvalReport report;
        {
          py::gil_scoped_release release;
          report = run_evaluation(c);
        }
        return to_python(report_json(report));
      },
      py::arg("config"), py::arg("datasets") = py::none(), py::arg("schemes") = py::none(),
      py::arg("classifiers") = py::none(), py::arg("seed") = py::none(), py::arg("jobs") = 1,
      "Run the accuracy grid and return the report as a dict.");

  m.def(
      "project",
      [](const std::string& config, std::optional<std::vector<std::string>> datasets,
         std::optional<std::uint64_t> seed) {
        const RunConfig c = config_with(config, datasets, std::nullopt, std::nullopt, seed, 1);
        std::vector<ProjectionResult> results;
        {
          py::gil_scoped_release release;
          results = run_projection(c);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["dataset"] = std::string(to_string(r.dataset));
          d["ids"] = r.info.ids;
          d["coords"] = to_array(r.layout.coords);
          std::vector<std::string> labels;
          for (int l : r.layout.labels) labels.push_back(r.info.classes.at(static_cast<std::size_t>(l)));
          d["labels"] = labels;
          d["sidecar"] = to_python(r.sidecar);
          out.append(d);
        }
        return out;
      },
      py::arg("config"), py::arg("datasets") = py::none(), py::arg("seed") = py::none(),
      "t-SNE layouts of the contextual embeddings, one dict per dataset.");
}
