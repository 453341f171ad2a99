#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "renewal/core.hpp"
#include "renewal/eval.hpp"
#include "renewal/loss.hpp"
#include "renewal/models.hpp"
#include "renewal/policy.hpp"
#include "renewal/runner.hpp"
#include "renewal/similarity.hpp"
#include "renewal/simgen.hpp"

namespace py = pybind11;
using namespace renewal;

namespace {

Schema schema_from_py(const std::vector<std::tuple<std::string, std::string, double>>& items) {
  std::vector<Attribute> attrs;
  attrs.reserve(items.size());
  for (const auto& [name, kind, delta] : items) attrs.push_back({name, parse_attribute_kind(kind), delta});
  return Schema(std::move(attrs));
}

py::dict record_to_dict(const DecisionRecord& r) {
  py::dict d;
  d["batch_index"] = r.batch_index;
  d["rows"] = r.rows;
  d["similarity"] = r.similarity;
  if (r.loss) {
    d["lm"] = r.loss->lm;
    d["ln"] = r.loss->ln;
    d["lc"] = r.loss->lc;
  } else {
    d["lm"] = py::none();
    d["ln"] = py::none();
    d["lc"] = py::none();
  }
  d["flag"] = static_cast<int>(r.flag);
  d["post_metric"] = r.post_metric;
  return d;
}

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
  auto json_mod = py::module_::import("json");
  std::string text = py::str(json_mod.attr("dumps")(kwargs));
  return run_config_from_json(nlohmann::json::parse(text), RunConfig{});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Similarity and loss-change driven model renewal for data streams.";

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  py::enum_<RenewalFlag>(m, "RenewalFlag")
      .value("Retain", RenewalFlag::Retain)
      .value("Update", RenewalFlag::Update)
      .value("Retrain", RenewalFlag::Retrain);

  py::class_<Thresholds>(m, "Thresholds")
      .def(py::init([](double z, double x, double y, std::size_t l) {
             Thresholds t{z, x, y, l};
             t.validate();
             return t;
           }),
           py::arg("similarity") = 0.5, py::arg("lc_low") = 0.3, py::arg("lc_high") = 0.9,
           py::arg("min_rows") = 10000)
      .def_readonly("similarity", &Thresholds::similarity)
      .def_readonly("lc_low", &Thresholds::lc_low)
      .def_readonly("lc_high", &Thresholds::lc_high)
      .def_readonly("min_rows", &Thresholds::min_rows);

  py::class_<Schema>(m, "Schema")
      .def(py::init(&schema_from_py), py::arg("attributes"),
           "List of (name, kind, delta) tuples; kind is binary, numeric, target_numeric or target_binary.")
      .def_property_readonly("width", &Schema::width)
      .def_property_readonly("names",
                             [](const Schema& s) {
                               std::vector<std::string> out;
                               for (const auto& a : s.attributes()) out.push_back(a.name);
                               return out;
                             })
      .def_property_readonly("task", [](const Schema& s) { return std::string(to_string(s.task())); })
      .def("hash", &Schema::hash);

  py::class_<Batch>(m, "Batch")
      .def(py::init([](const std::vector<std::vector<double>>& rows, const Schema& schema) {
             return validate_batch(rows, schema);
           }),
           py::arg("rows"), py::arg("schema"))
      .def("__len__", &Batch::size)
      .def_property_readonly("schema", &Batch::schema)
      .def("column", &Batch::column)
      .def("rows", [](const Batch& b) {
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < b.size(); ++i) {
          auto r = b.rows().row(i);
          out.emplace_back(r.begin(), r.end());
        }
        return out;
      });

  m.def("binary_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
    return binary_similarity(a, b);
  });
  m.def("numeric_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
    return numeric_similarity(a, b);
  });
  m.def("weighted_similarity", [](const std::vector<double>& sims, const std::vector<double>& deltas) {
    return weighted_similarity(sims, deltas);
  });
  m.def(
      "batch_similarity",
      [](const Batch& prev, const Batch& next) {
        auto report = batch_similarity(prev, next);
        py::dict per;
        for (const auto& a : report.per_attribute)
          if (a.used) per[py::str(a.name)] = a.sim;
        return py::make_tuple(report.aggregate, per);
      },
      "Returns (aggregate, {attribute: similarity}) over the attributes that count.");

  m.def("rmse", [](const std::vector<double>& p, const std::vector<double>& t) { return rmse(p, t); });
  m.def(
      "perceptron_loss",
      [](const std::vector<double>& w, double b, const std::vector<std::vector<double>>& x,
         const std::vector<double>& y) { return perceptron_loss(w, b, Matrix::from_rows(x), y); },
      py::arg("weights"), py::arg("bias"), py::arg("features"), py::arg("labels"));
  m.def("loss_change_rate", &loss_change_rate, py::arg("lm"), py::arg("ln"));

  m.def(
      "flag_for",
      [](double p, std::optional<double> lc, const Thresholds& t) { return flag_for(p, lc, t); },
      py::arg("similarity"), py::arg("lc") = py::none(), py::arg("thresholds") = Thresholds{});

  m.def("auc", [](const std::vector<double>& s, const std::vector<double>& l) { return auc(s, l); });
  m.def(
      "relative_improvement",
      [](double before, double after, const std::string& metric) {
        if (metric == "rmse") return relative_improvement(before, after, MetricKind::Rmse);
        if (metric == "auc") return relative_improvement(before, after, MetricKind::Auc);
        throw ValidationError("metric must be rmse or auc");
      },
      py::arg("before"), py::arg("after"), py::arg("metric"));

  py::class_<Predictor, std::shared_ptr<Predictor>>(m, "Predictor")
      .def_property_readonly("task", [](const Predictor& p) { return std::string(to_string(p.task())); })
      .def("predict",
           [](const Predictor& p, const std::vector<std::vector<double>>& x) {
             return p.predict(Matrix::from_rows(x));
           })
      .def("loss_on", &Predictor::loss_on)
      .def("snapshot", &Predictor::snapshot)
      .def_property_readonly("training_rows", [](const Predictor& p) { return p.info().rows; });

  m.def("fit", [](const Batch& b) { return std::const_pointer_cast<Predictor>(fit_default(b)); },
        "Fresh ridge regressor or perceptron depending on the target kind.");
  m.def("restore", [](const std::string& blob, const Schema& schema) {
    return std::const_pointer_cast<Predictor>(restore_predictor(blob, schema));
  });

  m.def(
      "decide",
      [](const Batch& prev, const Batch& next, const Predictor& model, const Thresholds& t) {
        auto d = decide(prev, next, model, t);
        py::dict out;
        out["flag"] = d.flag;
        out["similarity"] = d.similarity.aggregate;
        out["lc"] = d.loss ? py::cast(d.loss->lc) : py::none();
        return out;
      },
      py::arg("prev"), py::arg("next"), py::arg("model"), py::arg("thresholds") = Thresholds{});

  m.def(
      "generate",
      [](const std::string& task, std::size_t rows, const std::string& drift, std::uint64_t seed) {
        auto spec = StreamSpec::make_default(parse_task_kind(task), rows, drift, seed);
        return generate(spec);
      },
      py::arg("task") = "regression", py::arg("rows") = 1000, py::arg("drift") = "none", py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const py::kwargs& kwargs) {
        RunConfig cfg = config_from_kwargs(kwargs);
        cfg.mode = "simulate";
        RunResult result = [&] {
          py::gil_scoped_release release;
          return simulate(cfg);
        }();
        py::list records;
        for (const auto& r : result.records) records.append(record_to_dict(r));
        return py::make_tuple(records, result.csv);
      },
      "Runs the pipeline on a generated stream. Keyword arguments mirror the JSON config keys; "
      "returns (records, csv_text).");
}
