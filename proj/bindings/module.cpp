// python bindings for the core operations; heavy lifting stays in the C++
// library, this layer only converts containers and JSON trees

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pheno/cohort.hpp"
#include "pheno/cv.hpp"
#include "pheno/errors.hpp"
#include "pheno/features.hpp"
#include "pheno/ingest.hpp"
#include "pheno/metrics.hpp"
#include "pheno/models.hpp"
#include "pheno/select.hpp"
#include "pheno/sessions.hpp"
#include "pheno/synth.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

json py_to_json(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    json out = json::object();
    for (auto item : h.cast<py::dict>())
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    return out;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    json out = json::array();
    for (auto item : h.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw py::type_error("unsupported value in config mapping");
}

pheno::Dataset make_dataset(const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y,
                            std::vector<std::string> names) {
  pheno::Dataset d;
  d.x = x;
  d.y = y;
  if (names.empty() && !x.empty())
    for (std::size_t i = 0; i < x.front().size(); ++i)
      names.push_back("f" + std::to_string(i));
  d.feature_names = std::move(names);
  for (std::size_t i = 0; i < d.x.size(); ++i) d.row_ids.push_back("r" + std::to_string(i));
  return d;
}

struct LoadedCohort {
  pheno::CohortManifest manifest;
  pheno::AppCatalog catalog;
  pheno::CohortLabels labels;
  pheno::IntervalsByParticipant intervals;
};

LoadedCohort load_cohort(const std::string& events, const std::string& manifest,
                         const std::string& catalog, const std::string& labels) {
  LoadedCohort c;
  c.manifest = pheno::load_manifest_file(manifest);
  c.catalog = pheno::load_catalog_file(catalog);
  c.labels = pheno::load_labels_file(labels);
  auto ev = pheno::parse_events_file(events, c.manifest);
  c.intervals = pheno::build_intervals(ev, c.manifest);
  return c;
}

pheno::FsConfig fs_from(py::object o) {
  if (o.is_none()) return {};
  return pheno::FsConfig::from_json(py_to_json(o));
}

pheno::ModelSpec spec_from(py::object o) {
  if (o.is_none()) return {};
  return pheno::ModelSpec::from_json(py_to_json(o));
}

pheno::CvOptions options_from(py::object o) {
  if (o.is_none()) return {};
  return pheno::CvOptions::from_json(py_to_json(o));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "screening pipeline core: features, selection, evaluation, attribution";

  py::register_exception<pheno::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<pheno::DataError>(m, "DataError", PyExc_RuntimeError);

  m.def(
      "entropy",
      [](const std::vector<double>& durations, double log_base) {
        return pheno::entropy(durations, log_base);
      },
      py::arg("durations"), py::arg("log_base") = 0.0,
      "Shannon entropy of a duration distribution (natural log by default)");

  m.def("hamming_ratio", &pheno::hamming_ratio, py::arg("target_apps"),
        py::arg("depressed_refs"), py::arg("nondepressed_refs"), py::arg("smoothed") = true,
        "min symmetric-difference distance ratio between reference groups");

  m.def(
      "score_phq9",
      [](const std::string& pid, const std::array<int, 9>& items) {
        pheno::Phq9Record r = pheno::score_phq9(pid, items);
        py::dict out;
        out["participant_id"] = r.participant_id;
        out["total"] = r.total;
        out["depressed"] = r.depressed;
        return out;
      },
      py::arg("participant_id"), py::arg("items"),
      "sum nine 0..3 items; positive screen at total >= 10");

  m.def(
      "classify_session",
      [](long long active_ms) { return std::string(pheno::to_string(pheno::classify_session(active_ms))); },
      py::arg("active_duration_ms"));

  m.def(
      "sessionize",
      [](const std::vector<std::pair<long long, long long>>& spans, long long gap_ms) {
        std::vector<pheno::UsageInterval> intervals;
        for (const auto& [start, end] : spans) {
          pheno::UsageInterval iv;
          iv.participant_id = "r0";
          iv.package = "app";
          iv.start_ms = start;
          iv.end_ms = end;
          intervals.push_back(iv);
        }
        py::list out;
        for (const auto& s : pheno::sessionize(intervals, gap_ms)) {
          py::dict d;
          d["start_ms"] = s.start_ms;
          d["end_ms"] = s.end_ms;
          d["active_duration_ms"] = s.active_duration_ms;
          d["kind"] = std::string(pheno::to_string(s.kind));
          d["members"] = s.members;
          out.append(d);
        }
        return out;
      },
      py::arg("spans"), py::arg("gap_ms") = pheno::kSessionGapMs,
      "group sorted (start_ms, end_ms) spans into sessions");

  m.def(
      "compute_metrics",
      [](const std::vector<int>& y_true, const std::vector<int>& y_pred,
         const std::vector<double>& proba) {
        return json_to_py(pheno::compute_metrics(y_true, y_pred, proba).to_json());
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("proba") = std::vector<double>{});

  py::class_<pheno::Model>(m, "Model")
      .def("kind", &pheno::Model::kind)
      .def("predict_proba", &pheno::Model::predict_proba, py::arg("x"))
      .def("predict", &pheno::Model::predict, py::arg("x"))
      .def("n_features", &pheno::Model::n_features)
      .def("to_json", [](const pheno::Model& model) { return model.to_json().dump(); });

  m.def(
      "fit_model",
      [](const std::string& kind, const std::vector<std::vector<double>>& x,
         const std::vector<int>& y, py::object params, std::uint64_t seed,
         const std::vector<std::string>& feature_names) {
        pheno::Hyper h;
        if (!params.is_none())
          for (auto item : params.cast<py::dict>())
            h[item.first.cast<std::string>()] = item.second.cast<double>();
        auto model = pheno::make_model(kind, h);
        model->fit(make_dataset(x, y, feature_names), seed);
        return model;
      },
      py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("params") = py::none(),
      py::arg("seed") = 0, py::arg("feature_names") = std::vector<std::string>{});

  m.def("model_from_json",
        [](const std::string& text) { return pheno::model_from_json(json::parse(text)); },
        py::arg("text"));

  m.def("model_kinds", [] { return pheno::model_kinds(); });

  m.def(
      "exact_shapley",
      [](const pheno::Model& model, const std::vector<std::string>& names,
         const std::vector<double>& x, const std::vector<std::vector<double>>& background,
         int d_max) {
        return json_to_py(pheno::exact_shapley(model, names, x, background, d_max).to_json());
      },
      py::arg("model"), py::arg("feature_names"), py::arg("x"), py::arg("background"),
      py::arg("d_max") = 20,
      "exact coalition-enumeration attributions against a background sample");

  m.def(
      "select_features",
      [](const std::vector<std::vector<double>>& x, const std::vector<int>& y,
         const std::vector<std::string>& names, py::object fs, std::uint64_t seed) {
        return json_to_py(
            pheno::run_selection(fs_from(fs), make_dataset(x, y, names), seed).to_json());
      },
      py::arg("x"), py::arg("y"), py::arg("feature_names") = std::vector<std::string>{},
      py::arg("fs") = py::none(), py::arg("seed") = 0);

  m.def(
      "generate_cohort",
      [](const std::string& out_dir, int n, double balance, std::uint64_t seed,
         const std::string& mode, int events_target, py::object effects) {
        pheno::SynthConfig cfg;
        cfg.n = n;
        cfg.balance = balance;
        cfg.seed = seed;
        cfg.mode = mode;
        cfg.events_target = events_target;
        if (!effects.is_none())
          for (auto item : effects.cast<py::dict>())
            cfg.effects[item.first.cast<std::string>()] = item.second.cast<double>();
        pheno::SynthCohort cohort = pheno::synth_generate(cfg);
        pheno::write_cohort_files(out_dir, cohort);
        py::dict out;
        out["n"] = cfg.n;
        out["events"] = cohort.events.size();
        out["planted"] = pheno::planted_feature_names(cfg);
        return out;
      },
      py::arg("out_dir"), py::arg("n") = 100, py::arg("balance") = 0.51, py::arg("seed") = 0,
      py::arg("mode") = "planted", py::arg("events_target") = 8000,
      py::arg("effects") = py::none(),
      "write a deterministic synthetic cohort (events, manifest, catalog, labels)");

  m.def(
      "featurize",
      [](const std::string& events, const std::string& manifest, const std::string& catalog,
         const std::string& labels, bool filter, bool scale, double min_user_fraction) {
        LoadedCohort c = load_cohort(events, manifest, catalog, labels);
        pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest);
        pheno::FeatureMatrix matrix = ws.assemble(c.labels.class_map());
        if (filter) matrix = pheno::prevalence_filter(matrix, min_user_fraction);
        if (scale)
          matrix = pheno::apply_scaler(matrix, pheno::fit_scaler(matrix, matrix.participants));
        py::dict out;
        out["participants"] = matrix.participants;
        out["feature_names"] = matrix.feature_names;
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
          auto row = matrix.row(r);
          rows.emplace_back(row.begin(), row.end());
        }
        out["values"] = rows;
        out["dropped"] = matrix.dropped.size();
        return out;
      },
      py::arg("events"), py::arg("manifest"), py::arg("catalog"), py::arg("labels"),
      py::arg("filter") = false, py::arg("scale") = false, py::arg("min_user_fraction") = 0.5);

  m.def(
      "evaluate",
      [](const std::string& events, const std::string& manifest, const std::string& catalog,
         const std::string& labels, py::object fs, py::object spec, py::object options) {
        LoadedCohort c = load_cohort(events, manifest, catalog, labels);
        pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest);
        return json_to_py(
            pheno::nested_lopocv(ws, c.labels, fs_from(fs), spec_from(spec), options_from(options))
                .to_json());
      },
      py::arg("events"), py::arg("manifest"), py::arg("catalog"), py::arg("labels"),
      py::arg("fs") = py::none(), py::arg("spec") = py::none(), py::arg("options") = py::none(),
      "nested leave-one-participant-out evaluation from cohort files");

  m.def(
      "stack_evaluate",
      [](const std::string& events, const std::string& manifest, const std::string& catalog,
         const std::string& labels, py::object fs, py::object bases, py::object options) {
        LoadedCohort c = load_cohort(events, manifest, catalog, labels);
        pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest);
        std::vector<pheno::ModelSpec> base_specs;
        if (bases.is_none()) {
          for (const char* kind : {"gbt", "random_forest", "adaboost", "logit", "knn"}) {
            pheno::ModelSpec s;
            s.kind = kind;
            base_specs.push_back(s);
          }
        } else {
          for (auto b : bases.cast<py::list>())
            base_specs.push_back(pheno::ModelSpec::from_json(py_to_json(b)));
        }
        return json_to_py(
            pheno::stacked_lopocv(ws, c.labels, fs_from(fs), base_specs, options_from(options))
                .to_json());
      },
      py::arg("events"), py::arg("manifest"), py::arg("catalog"), py::arg("labels"),
      py::arg("fs") = py::none(), py::arg("bases") = py::none(), py::arg("options") = py::none());

  m.def(
      "explain",
      [](const std::string& events, const std::string& manifest, const std::string& catalog,
         const std::string& labels, py::object fs, py::object spec, py::object options,
         const std::vector<std::string>& participants, std::size_t background_cap, int d_max) {
        LoadedCohort c = load_cohort(events, manifest, catalog, labels);
        pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest);
        return json_to_py(pheno::explain_cohort(ws, c.labels, fs_from(fs), spec_from(spec),
                                                options_from(options), participants,
                                                background_cap, d_max)
                              .to_json());
      },
      py::arg("events"), py::arg("manifest"), py::arg("catalog"), py::arg("labels"),
      py::arg("fs") = py::none(), py::arg("spec") = py::none(), py::arg("options") = py::none(),
      py::arg("participants") = std::vector<std::string>{}, py::arg("background_cap") = 32,
      py::arg("d_max") = 20);

  m.attr("SESSION_GAP_MS") = pheno::kSessionGapMs;
  m.attr("PHQ9_CUTOFF") = pheno::kPhq9Cutoff;
  m.attr("__version__") = "0.1.0";
}
