// command-line driver: each subcommand reads the previous stage's artifacts
// and writes its own, so every step can be re-run and diffed in isolation

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pheno/cohort.hpp"
#include "pheno/cv.hpp"
#include "pheno/errors.hpp"
#include "pheno/features.hpp"
#include "pheno/ingest.hpp"
#include "pheno/select.hpp"
#include "pheno/svg.hpp"
#include "pheno/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pheno::ConfigError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw pheno::ConfigError("config " + path + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pheno::ConfigError("cannot write " + path.string());
  out << content;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// shared cohort inputs for the stages that start from raw events
struct CohortPaths {
  std::string events, manifest, catalog, labels;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--events", events, "events JSONL path");
    cmd->add_option("--manifest", manifest, "cohort manifest JSON path");
    cmd->add_option("--catalog", catalog, "package-category CSV path");
    cmd->add_option("--labels", labels, "questionnaire CSV path");
  }
  void fill_from(const json& cfg) {
    auto take = [&](const char* key, std::string& dst) {
      if (dst.empty() && cfg.contains(key)) dst = cfg[key].get<std::string>();
    };
    take("events", events);
    take("manifest", manifest);
    take("catalog", catalog);
    take("labels", labels);
  }
  void require_all() const {
    for (const auto* p : {&events, &manifest, &catalog, &labels})
      if (p->empty())
        throw pheno::ConfigError("missing input path; need --events/--manifest/--catalog/--labels");
  }
};

struct LoadedCohort {
  pheno::CohortManifest manifest;
  pheno::AppCatalog catalog;
  pheno::CohortLabels labels;
  pheno::IntervalsByParticipant intervals;
  pheno::IngestReport ingest;
};

LoadedCohort load_cohort(const CohortPaths& paths) {
  paths.require_all();
  LoadedCohort c;
  c.manifest = pheno::load_manifest_file(paths.manifest);
  c.catalog = pheno::load_catalog_file(paths.catalog);
  c.labels = pheno::load_labels_file(paths.labels);
  auto events = pheno::parse_events_file(paths.events, c.manifest, &c.ingest);
  c.intervals = pheno::build_intervals(events, c.manifest, &c.ingest);
  return c;
}

// feature-selection flags shared by select/evaluate/stack-evaluate/explain
struct FsFlags {
  CLI::App* cmd = nullptr;
  std::string method;
  int k = 0, bins = 0, n_boot = 0, boruta_depth = 0, boruta_iter = 0;
  double threshold = 0, lambda_ratio = 0, alpha = 0;
  bool allow_any_k = false, depth_override = false;

  void add_options(CLI::App* c) {
    cmd = c;
    c->add_option("--fs", method, "selection method: none|ig|stable|rf|boruta");
    c->add_option("--k", k, "features kept by ig/rf");
    c->add_option("--bins", bins, "discretization bins for ig");
    c->add_flag("--allow-any-k", allow_any_k, "lift the 5..20 bound on k");
    c->add_option("--threshold", threshold, "stability frequency threshold");
    c->add_option("--n-boot", n_boot, "stability bootstrap count");
    c->add_option("--lambda-ratio", lambda_ratio, "stability lambda as a ratio of lambda_max");
    c->add_option("--boruta-depth", boruta_depth, "boruta estimator depth");
    c->add_option("--boruta-iter", boruta_iter, "boruta iteration cap");
    c->add_option("--alpha", alpha, "boruta significance level");
    c->add_flag("--allow-any-depth", depth_override, "lift the 3..7 bound on boruta depth");
  }

  pheno::FsConfig resolve(const json& cfg) const {
    pheno::FsConfig f = cfg.contains("fs") ? pheno::FsConfig::from_json(cfg["fs"])
                                           : pheno::FsConfig{};
    if (cmd->count("--fs")) f.method = method;
    if (cmd->count("--k")) f.k = k;
    if (cmd->count("--bins")) f.bins = bins;
    if (cmd->count("--allow-any-k")) f.allow_any_k = allow_any_k;
    if (cmd->count("--threshold")) f.threshold = threshold;
    if (cmd->count("--n-boot")) f.n_boot = n_boot;
    if (cmd->count("--lambda-ratio")) f.lambda_ratio = lambda_ratio;
    if (cmd->count("--boruta-depth")) f.boruta_depth = boruta_depth;
    if (cmd->count("--boruta-iter")) f.boruta_iter = boruta_iter;
    if (cmd->count("--alpha")) f.alpha = alpha;
    if (cmd->count("--allow-any-depth")) f.depth_override = depth_override;
    return f;
  }
};

struct SpecFlags {
  CLI::App* cmd = nullptr;
  std::string kind;
  int budget = 0;
  std::vector<std::string> params;  // key=value

  void add_options(CLI::App* c) {
    cmd = c;
    c->add_option("--spec", kind, "model kind: " + [] {
      std::string s;
      for (const auto& k : pheno::model_kinds()) s += (s.empty() ? "" : "|") + k;
      return s;
    }());
    c->add_option("--budget", budget, "random-search draws beyond the defaults");
    c->add_option("--param", params, "fixed hyperparameter as key=value (repeatable)");
  }

  pheno::ModelSpec resolve(const json& cfg) const {
    pheno::ModelSpec s = cfg.contains("spec") ? pheno::ModelSpec::from_json(cfg["spec"])
                                              : pheno::ModelSpec{};
    if (cmd->count("--spec")) s.kind = kind;
    if (cmd->count("--budget")) s.budget = budget;
    for (const auto& kv : params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw pheno::ConfigError("--param expects key=value, got " + kv);
      try {
        s.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw pheno::ConfigError("--param value is not a number: " + kv);
      }
    }
    return s;
  }
};

struct CvFlags {
  CLI::App* cmd = nullptr;
  int inner_folds = 0, meta_folds = 0, threads = 0;
  std::uint64_t seed = 0;
  bool hamming_global = false, paper_parity = false;
  double min_user_fraction = 0;

  void add_options(CLI::App* c) {
    cmd = c;
    c->add_option("--seed", seed, "run seed (no wall-clock seeding anywhere)");
    c->add_option("--inner-folds", inner_folds, "stratified tuning folds");
    c->add_option("--meta-folds", meta_folds, "stacking out-of-fold splits");
    c->add_option("--threads", threads, "parallel outer folds (default: all cores)");
    c->add_flag("--hamming-global", hamming_global,
                "reference groups include the held-out participant (parity mode)");
    c->add_flag("--paper-parity", paper_parity, "enforce the published fold counts");
    c->add_option("--min-user-fraction", min_user_fraction, "prevalence filter cutoff");
  }

  pheno::CvOptions resolve(const json& cfg) const {
    pheno::CvOptions o = cfg.contains("options") ? pheno::CvOptions::from_json(cfg["options"])
                                                 : pheno::CvOptions{};
    if (!cfg.contains("options")) {
      unsigned hc = std::thread::hardware_concurrency();
      o.threads = hc == 0 ? 1 : static_cast<int>(hc);
    }
    if (cmd->count("--seed")) o.seed = seed;
    if (cmd->count("--inner-folds")) o.inner_folds = inner_folds;
    if (cmd->count("--meta-folds")) o.meta_folds = meta_folds;
    if (cmd->count("--threads")) o.threads = threads;
    if (cmd->count("--hamming-global")) o.hamming_global = hamming_global;
    if (cmd->count("--paper-parity")) o.paper_parity = paper_parity;
    if (cmd->count("--min-user-fraction")) o.min_user_fraction = min_user_fraction;
    return o;
  }
};

pheno::Ms resolve_gap(CLI::App* cmd, const json& cfg, long long flag_value) {
  pheno::Ms gap = pheno::kSessionGapMs;
  if (cfg.contains("gap_ms")) gap = cfg["gap_ms"].get<pheno::Ms>();
  if (cmd->count("--gap-ms")) gap = flag_value;
  if (gap <= 0) throw pheno::ConfigError("gap_ms must be positive");
  return gap;
}

std::string metrics_line(const pheno::BinaryMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "precision %.3f  sensitivity %.3f  specificity %.3f  f1 %.3f  bal_acc %.3f",
                m.precision, m.sensitivity, m.specificity, m.f1, m.balanced_accuracy);
  return buf;
}

// ---- subcommand bodies ----

int run_synth(const std::string& out_dir, const json& cfg, CLI::App* cmd,
              pheno::SynthConfig& sc) {
  if (cfg.contains("n") && !cmd->count("--n")) sc.n = cfg["n"].get<int>();
  if (cfg.contains("balance") && !cmd->count("--balance"))
    sc.balance = cfg["balance"].get<double>();
  if (cfg.contains("seed") && !cmd->count("--seed"))
    sc.seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.contains("mode") && !cmd->count("--mode")) sc.mode = cfg["mode"].get<std::string>();
  if (cfg.contains("events_target") && !cmd->count("--events-target"))
    sc.events_target = cfg["events_target"].get<int>();
  if (cfg.contains("apps_per_category") && !cmd->count("--apps-per-category"))
    sc.apps_per_category = cfg["apps_per_category"].get<int>();
  if (cfg.contains("offset_min") && !cmd->count("--offset-min"))
    sc.offset_min = cfg["offset_min"].get<int>();
  if (cfg.contains("window_end_ms")) sc.window_end_ms = cfg["window_end_ms"].get<pheno::Ms>();
  if (cfg.contains("weekend_days")) {
    sc.weekend_days.clear();
    for (const auto& d : cfg["weekend_days"]) sc.weekend_days.insert(d.get<int>());
  }
  if (cfg.contains("effects"))
    for (const auto& [k, v] : cfg["effects"].items()) sc.effects[k] = v.get<double>();

  pheno::SynthCohort cohort = pheno::synth_generate(sc);
  pheno::write_cohort_files(out_dir, cohort);
  int pos = 0;
  for (const auto& r : cohort.labels.records()) pos += r.depressed ? 1 : 0;
  std::cout << "cohort: n=" << sc.n << " positive=" << pos
            << " events=" << cohort.events.size() << " -> " << out_dir << "\n";
  return 0;
}

int run_featurize(const CohortPaths& paths, const std::string& out_dir, pheno::Ms gap_ms,
                  bool raw_hamming, bool filter, double min_user_fraction, bool scale) {
  LoadedCohort c = load_cohort(paths);
  pheno::WorkspaceOptions wopt;
  wopt.session_gap_ms = gap_ms;
  wopt.smoothed_hamming = !raw_hamming;
  pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest, wopt);
  pheno::FeatureMatrix matrix = ws.assemble(c.labels.class_map());
  if (filter) matrix = pheno::prevalence_filter(matrix, min_user_fraction);
  if (scale) matrix = pheno::apply_scaler(matrix, pheno::fit_scaler(matrix, matrix.participants));

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "matrix.csv", std::ios::binary);
    if (!out) throw pheno::ConfigError("cannot write matrix.csv in " + out_dir);
    pheno::write_matrix_csv(out, matrix);
  }
  {
    std::ofstream out(fs::path(out_dir) / "matrix_meta.json", std::ios::binary);
    if (!out) throw pheno::ConfigError("cannot write matrix_meta.json in " + out_dir);
    pheno::write_matrix_meta(out, matrix);
  }
  std::cout << "matrix: " << matrix.n_rows() << " x " << matrix.n_cols() << " ("
            << matrix.dropped.size() << " columns dropped)"
            << "  intervals=" << [&] {
                 std::size_t n = 0;
                 for (const auto& [pid, iv] : c.intervals) n += iv.size();
                 return n;
               }()
            << " truncated=" << c.ingest.truncated_open << "\n";
  return 0;
}

int run_select(const std::string& matrix_path, const std::string& labels_path,
               const pheno::FsConfig& fsc, std::uint64_t seed, bool standardize,
               const std::string& out_path) {
  if (matrix_path.empty() || labels_path.empty())
    throw pheno::ConfigError("select needs --matrix and --labels");
  if (fsc.method == "none") throw pheno::ConfigError("select needs an actual --fs method");
  std::ifstream in(matrix_path, std::ios::binary);
  if (!in) throw pheno::ConfigError("cannot open " + matrix_path);
  pheno::FeatureMatrix matrix = pheno::read_matrix_csv(in);
  if (standardize)
    matrix = pheno::apply_scaler(matrix, pheno::fit_scaler(matrix, matrix.participants));
  pheno::CohortLabels labels = pheno::load_labels_file(labels_path);
  pheno::Dataset d = pheno::dataset_from(matrix, matrix.participants, labels);
  pheno::SelectionResult result = pheno::run_selection(fsc, d, seed);
  write_json_file(out_path, result.to_json());
  std::cout << result.method << ": " << result.selected.size() << " features -> " << out_path
            << "\n";
  return 0;
}

int run_evaluate(const CohortPaths& paths, pheno::Ms gap_ms, const pheno::FsConfig& fsc,
                 const pheno::ModelSpec& spec, const pheno::CvOptions& opt,
                 const std::string& out_path) {
  LoadedCohort c = load_cohort(paths);
  pheno::WorkspaceOptions wopt;
  wopt.session_gap_ms = gap_ms;
  pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest, wopt);
  pheno::EvalReport report = pheno::nested_lopocv(ws, c.labels, fsc, spec, opt);
  write_json_file(out_path, report.to_json());
  std::cout << spec.kind << " [" << fsc.method << "]: " << metrics_line(report.aggregate)
            << " -> " << out_path << "\n";
  return 0;
}

std::vector<pheno::ModelSpec> resolve_bases(const json& cfg, CLI::App* cmd,
                                            const std::string& bases_flag) {
  std::vector<pheno::ModelSpec> bases;
  if (cmd->count("--bases")) {
    std::stringstream ss(bases_flag);
    std::string kind;
    while (std::getline(ss, kind, ',')) {
      pheno::ModelSpec s;
      s.kind = kind;
      bases.push_back(s);
    }
  } else if (cfg.contains("bases")) {
    for (const auto& b : cfg["bases"]) bases.push_back(pheno::ModelSpec::from_json(b));
  } else {
    for (const char* kind : {"gbt", "random_forest", "adaboost", "logit", "knn"}) {
      pheno::ModelSpec s;
      s.kind = kind;
      bases.push_back(s);
    }
  }
  return bases;
}

int run_stack(const CohortPaths& paths, pheno::Ms gap_ms, const pheno::FsConfig& fsc,
              const std::vector<pheno::ModelSpec>& bases, const pheno::CvOptions& opt,
              const std::string& out_path) {
  LoadedCohort c = load_cohort(paths);
  pheno::WorkspaceOptions wopt;
  wopt.session_gap_ms = gap_ms;
  pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest, wopt);
  pheno::EvalReport report = pheno::stacked_lopocv(ws, c.labels, fsc, bases, opt);
  write_json_file(out_path, report.to_json());
  std::cout << "stacking [" << fsc.method << "]: " << metrics_line(report.aggregate) << " -> "
            << out_path << "\n";
  return 0;
}

int run_explain(const CohortPaths& paths, pheno::Ms gap_ms, const pheno::FsConfig& fsc,
                const pheno::ModelSpec& spec, const pheno::CvOptions& opt,
                const std::vector<std::string>& participants, std::size_t background_cap,
                int d_max, bool emit_plots, const std::string& out_dir) {
  LoadedCohort c = load_cohort(paths);
  pheno::WorkspaceOptions wopt;
  wopt.session_gap_ms = gap_ms;
  pheno::FeatureWorkspace ws(c.intervals, c.catalog, c.manifest, wopt);
  pheno::CohortExplanation ex =
      pheno::explain_cohort(ws, c.labels, fsc, spec, opt, participants, background_cap, d_max);

  fs::create_directories(out_dir);
  write_json_file(fs::path(out_dir) / "explanation.json", ex.to_json());
  if (emit_plots) {
    write_text_file(fs::path(out_dir) / "summary.svg", pheno::svg_summary_plot(ex.summary));
    for (const auto& row : ex.rows)
      write_text_file(fs::path(out_dir) / ("force_" + row.participant_id + ".svg"),
                      pheno::svg_force_plot(row));
  }
  std::cout << "explained " << ex.rows.size() << " participants -> " << out_dir << "\n";
  return 0;
}

struct ReportRow {
  std::string source, operation, fs_method, model;
  double precision = 0, sensitivity = 0, specificity = 0, f1 = 0, balanced_accuracy = 0,
         auc = 0;
};

ReportRow extract_row(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pheno::ConfigError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw pheno::DataError(path + ": " + e.what());
  }
  if (!j.contains("config") || !j.contains("metrics"))
    throw pheno::DataError(path + ": not an evaluation report");
  ReportRow row;
  row.source = path;
  const json& cfg = j["config"];
  row.operation = cfg.value("operation", "?");
  if (cfg.contains("fs")) row.fs_method = cfg["fs"].value("method", "?");
  if (cfg.contains("spec"))
    row.model = cfg["spec"].value("kind", "?");
  else if (cfg.contains("bases"))
    row.model = "stacking";
  const json& m = j["metrics"];
  row.precision = m.value("precision", 0.0);
  row.sensitivity = m.value("sensitivity", 0.0);
  row.specificity = m.value("specificity", 0.0);
  row.f1 = m.value("f1", 0.0);
  row.balanced_accuracy = m.value("balanced_accuracy", 0.0);
  row.auc = m.value("auc", 0.0);
  return row;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
  if (inputs.empty()) throw pheno::EmptyReport();
  std::vector<ReportRow> rows;
  for (const auto& path : inputs) rows.push_back(extract_row(path));

  std::map<std::string, const ReportRow*> best;
  for (const auto& r : rows) {
    auto it = best.find(r.fs_method);
    if (it == best.end() || r.f1 > it->second->f1) best[r.fs_method] = &r;
  }

  ordered_json j;
  ordered_json model_rows = ordered_json::array();
  auto row_json = [](const ReportRow& r) {
    ordered_json o;
    o["source"] = r.source;
    o["operation"] = r.operation;
    o["fs_method"] = r.fs_method;
    o["model"] = r.model;
    o["precision"] = r.precision;
    o["sensitivity"] = r.sensitivity;
    o["specificity"] = r.specificity;
    o["f1"] = r.f1;
    o["balanced_accuracy"] = r.balanced_accuracy;
    o["auc"] = r.auc;
    return o;
  };
  for (const auto& r : rows) model_rows.push_back(row_json(r));
  j["models"] = model_rows;
  ordered_json best_json = ordered_json::object();
  for (const auto& [method, r] : best) best_json[method] = row_json(*r);
  j["best_by_fs_method"] = best_json;

  std::ostringstream text;
  auto line = [&](const ReportRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-10s %-14s %7.3f %7.3f %7.3f %7.3f %7.3f %7.3f\n",
                  r.fs_method.c_str(), r.model.c_str(), r.precision, r.sensitivity,
                  r.specificity, r.f1, r.balanced_accuracy, r.auc);
    text << buf;
  };
  text << "all evaluated models\n";
  text << "fs         model             prec    sens    spec      f1  bal_acc     auc\n";
  for (const auto& r : rows) line(r);
  text << "\nbest model per selection method (by f1)\n";
  text << "fs         model             prec    sens    spec      f1  bal_acc     auc\n";
  for (const auto& [method, r] : best) line(*r);

  fs::create_directories(out_dir);
  write_json_file(fs::path(out_dir) / "report.json", j);
  write_text_file(fs::path(out_dir) / "report.txt", text.str());
  std::cout << "report over " << rows.size() << " runs -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screening pipeline over smartphone usage logs"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic cohort");
  std::string synth_out = "cohort";
  std::string synth_config;
  pheno::SynthConfig sc;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--config", synth_config, "JSON config (flags override)");
  synth->add_option("--seed", sc.seed, "generator seed");
  synth->add_option("--n", sc.n, "participants");
  synth->add_option("--balance", sc.balance, "positive-class fraction");
  synth->add_option("--mode", sc.mode, "planted|null");
  synth->add_option("--events-target", sc.events_target, "mean events per participant");
  synth->add_option("--apps-per-category", sc.apps_per_category, "catalog apps per category");
  synth->add_option("--offset-min", sc.offset_min, "local offset minutes");

  // featurize
  auto* featurize = app.add_subcommand("featurize", "events -> feature matrix CSV");
  CohortPaths fz_paths;
  fz_paths.add_options(featurize);
  std::string fz_out = "features", fz_config;
  long long fz_gap = pheno::kSessionGapMs;
  bool fz_raw_hamming = false, fz_filter = false, fz_scale = false;
  double fz_fraction = 0.5;
  featurize->add_option("--out", fz_out, "output directory");
  featurize->add_option("--config", fz_config, "JSON config (flags override)");
  featurize->add_option("--gap-ms", fz_gap, "session gap in ms");
  featurize->add_flag("--raw-hamming", fz_raw_hamming, "unsmoothed distance ratio");
  featurize->add_flag("--filter", fz_filter, "apply the prevalence filter");
  featurize->add_option("--min-user-fraction", fz_fraction, "prevalence filter cutoff");
  featurize->add_flag("--scale", fz_scale, "standardize over all rows");

  // select
  auto* select = app.add_subcommand("select", "feature selection on a persisted matrix");
  std::string sel_matrix, sel_labels, sel_out = "selection.json", sel_config;
  std::uint64_t sel_seed = 0;
  bool sel_standardize = false;
  FsFlags sel_fs;
  select->add_option("--matrix", sel_matrix, "matrix CSV from featurize");
  select->add_option("--labels", sel_labels, "questionnaire CSV path");
  select->add_option("--out", sel_out, "output JSON path");
  select->add_option("--config", sel_config, "JSON config (flags override)");
  select->add_option("--seed", sel_seed, "selection seed");
  select->add_flag("--standardize", sel_standardize, "standardize the matrix first");
  sel_fs.add_options(select);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "nested leave-one-participant-out run");
  CohortPaths ev_paths;
  ev_paths.add_options(evaluate);
  std::string ev_out = "eval_report.json", ev_config;
  long long ev_gap = pheno::kSessionGapMs;
  FsFlags ev_fs;
  SpecFlags ev_spec;
  CvFlags ev_cv;
  evaluate->add_option("--out", ev_out, "report JSON path");
  evaluate->add_option("--config", ev_config, "JSON config (flags override)");
  evaluate->add_option("--gap-ms", ev_gap, "session gap in ms");
  ev_fs.add_options(evaluate);
  ev_spec.add_options(evaluate);
  ev_cv.add_options(evaluate);

  // stack-evaluate
  auto* stack = app.add_subcommand("stack-evaluate", "stacked ensemble over five base models");
  CohortPaths st_paths;
  st_paths.add_options(stack);
  std::string st_out = "stack_report.json", st_config, st_bases;
  long long st_gap = pheno::kSessionGapMs;
  FsFlags st_fs;
  CvFlags st_cv;
  stack->add_option("--out", st_out, "report JSON path");
  stack->add_option("--config", st_config, "JSON config (flags override)");
  stack->add_option("--gap-ms", st_gap, "session gap in ms");
  stack->add_option("--bases", st_bases, "comma list of base model kinds");
  st_fs.add_options(stack);
  st_cv.add_options(stack);

  // explain
  auto* explain = app.add_subcommand("explain", "exact per-participant attributions");
  CohortPaths ex_paths;
  ex_paths.add_options(explain);
  std::string ex_out = "explanations", ex_config;
  long long ex_gap = pheno::kSessionGapMs;
  std::vector<std::string> ex_participants;
  std::size_t ex_background = 32;
  int ex_dmax = 20;
  bool ex_no_plots = false;
  FsFlags ex_fs;
  SpecFlags ex_spec;
  CvFlags ex_cv;
  explain->add_option("--out", ex_out, "output directory");
  explain->add_option("--config", ex_config, "JSON config (flags override)");
  explain->add_option("--gap-ms", ex_gap, "session gap in ms");
  explain->add_option("--participant", ex_participants, "participant id (repeatable; default all)");
  explain->add_option("--background-cap", ex_background, "background rows for the value function");
  explain->add_option("--max-features", ex_dmax, "refuse enumeration beyond this width");
  explain->add_flag("--no-plots", ex_no_plots, "skip SVG output");
  ex_fs.add_options(explain);
  ex_spec.add_options(explain);
  ex_cv.add_options(explain);

  // report
  auto* report = app.add_subcommand("report", "assemble evaluation reports into tables");
  std::vector<std::string> rp_inputs;
  std::string rp_out = "report";
  report->add_option("--in", rp_inputs, "evaluation report JSON (repeatable)")->required();
  report->add_option("--out", rp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      return run_synth(synth_out, load_config(synth_config), synth, sc);
    }
    if (featurize->parsed()) {
      json cfg = load_config(fz_config);
      fz_paths.fill_from(cfg);
      if (cfg.contains("min_user_fraction") && !featurize->count("--min-user-fraction"))
        fz_fraction = cfg["min_user_fraction"].get<double>();
      return run_featurize(fz_paths, fz_out, resolve_gap(featurize, cfg, fz_gap),
                           fz_raw_hamming, fz_filter, fz_fraction, fz_scale);
    }
    if (select->parsed()) {
      json cfg = load_config(sel_config);
      if (cfg.contains("matrix") && sel_matrix.empty())
        sel_matrix = cfg["matrix"].get<std::string>();
      if (cfg.contains("labels") && sel_labels.empty())
        sel_labels = cfg["labels"].get<std::string>();
      if (cfg.contains("seed") && !select->count("--seed"))
        sel_seed = cfg["seed"].get<std::uint64_t>();
      return run_select(sel_matrix, sel_labels, sel_fs.resolve(cfg), sel_seed, sel_standardize,
                        sel_out);
    }
    if (evaluate->parsed()) {
      json cfg = load_config(ev_config);
      ev_paths.fill_from(cfg);
      return run_evaluate(ev_paths, resolve_gap(evaluate, cfg, ev_gap), ev_fs.resolve(cfg),
                          ev_spec.resolve(cfg), ev_cv.resolve(cfg), ev_out);
    }
    if (stack->parsed()) {
      json cfg = load_config(st_config);
      st_paths.fill_from(cfg);
      return run_stack(st_paths, resolve_gap(stack, cfg, st_gap), st_fs.resolve(cfg),
                       resolve_bases(cfg, stack, st_bases), st_cv.resolve(cfg), st_out);
    }
    if (explain->parsed()) {
      json cfg = load_config(ex_config);
      ex_paths.fill_from(cfg);
      return run_explain(ex_paths, resolve_gap(explain, cfg, ex_gap), ex_fs.resolve(cfg),
                         ex_spec.resolve(cfg), ex_cv.resolve(cfg), ex_participants,
                         ex_background, ex_dmax, !ex_no_plots, ex_out);
    }
    if (report->parsed()) {
      return run_report(rp_inputs, rp_out);
    }
  } catch (const pheno::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const pheno::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
