#include "pheno/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "pheno/errors.hpp"
#include "pheno/rng.hpp"

namespace pheno {

namespace {

// leakage instrumentation: every train-side stage passes the row ids it is
// about to touch through here; a match aborts the run
void touch(const std::string& stage, const std::vector<std::string>& ids,
           const std::string& held_out, std::size_t* checks) {
  for (const auto& id : ids)
    if (id == held_out) throw LeakageDetected(held_out, stage);
  if (checks) *checks += ids.size();
}

Hyper overlay(const Hyper& base, const Hyper& extra) {
  Hyper out = base;
  for (const auto& [k, v] : extra) out[k] = v;
  return out;
}

nlohmann::ordered_json hyper_to_json(const Hyper& h) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : h) j[k] = v;
  return j;
}

Hyper hyper_from_json(const nlohmann::json& j) {
  Hyper h;
  for (const auto& [k, v] : j.items()) h[k] = v.get<double>();
  return h;
}

double fold_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i] && y_true[i]) ++tp;
    else if (y_pred[i]) ++fp;
    else if (y_true[i]) ++fn;
  }
  double den = 2.0 * tp + fp + fn;
  return den == 0 ? 0.0 : 2.0 * tp / den;
}

}  // namespace

// ---- config plumbing ----

nlohmann::ordered_json ModelSpec::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["params"] = hyper_to_json(params);
  nlohmann::ordered_json sp = nlohmann::ordered_json::object();
  for (const auto& [k, v] : space) sp[k] = v;
  j["space"] = sp;
  j["budget"] = budget;
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  ModelSpec s;
  s.kind = j.value("kind", std::string("gbt"));
  if (j.contains("params")) s.params = hyper_from_json(j.at("params"));
  if (j.contains("space"))
    for (const auto& [k, v] : j.at("space").items())
      s.space[k] = v.get<std::vector<double>>();
  s.budget = j.value("budget", 0);
  return s;
}

nlohmann::ordered_json FsConfig::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["k"] = k;
  j["bins"] = bins;
  j["allow_any_k"] = allow_any_k;
  j["threshold"] = threshold;
  j["n_boot"] = n_boot;
  j["lambda_ratio"] = lambda_ratio;
  j["boruta_depth"] = boruta_depth;
  j["boruta_iter"] = boruta_iter;
  j["alpha"] = alpha;
  j["depth_override"] = depth_override;
  j["forest"] = hyper_to_json(forest);
  return j;
}

FsConfig FsConfig::from_json(const nlohmann::json& j) {
  FsConfig f;
  f.method = j.value("method", std::string("none"));
  f.k = j.value("k", 5);
  f.bins = j.value("bins", 10);
  f.allow_any_k = j.value("allow_any_k", false);
  f.threshold = j.value("threshold", 0.77);
  f.n_boot = j.value("n_boot", 1000);
  f.lambda_ratio = j.value("lambda_ratio", 0.25);
  f.boruta_depth = j.value("boruta_depth", 5);
  f.boruta_iter = j.value("boruta_iter", 100);
  f.alpha = j.value("alpha", 0.05);
  f.depth_override = j.value("depth_override", false);
  if (j.contains("forest")) f.forest = hyper_from_json(j.at("forest"));
  return f;
}

nlohmann::ordered_json CvOptions::to_json() const {
  nlohmann::ordered_json j;
  j["inner_folds"] = inner_folds;
  j["meta_folds"] = meta_folds;
  j["seed"] = seed;
  j["hamming_global"] = hamming_global;
  j["paper_parity"] = paper_parity;
  j["min_user_fraction"] = min_user_fraction;
  j["threads"] = threads;
  return j;
}

CvOptions CvOptions::from_json(const nlohmann::json& j) {
  CvOptions o;
  o.inner_folds = j.value("inner_folds", 20);
  o.meta_folds = j.value("meta_folds", 10);
  o.seed = j.value("seed", static_cast<std::uint64_t>(0));
  o.hamming_global = j.value("hamming_global", false);
  o.paper_parity = j.value("paper_parity", false);
  o.min_user_fraction = j.value("min_user_fraction", 0.5);
  o.threads = j.value("threads", 1);
  return o;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    nlohmann::ordered_json r;
    r["participant_id"] = f.participant_id;
    r["y_true"] = f.y_true;
    r["proba"] = f.proba;
    r["y_pred"] = f.y_pred;
    r["selected"] = f.selected;
    r["tuned"] = hyper_to_json(f.tuned);
    r["leakage_checks"] = f.leakage_checks;
    if (!f.warnings.empty()) r["warnings"] = f.warnings;
    rows.push_back(r);
  }
  j["folds"] = rows;
  j["metrics"] = aggregate.to_json();
  std::size_t checks = 0;
  for (const auto& f : folds) checks += f.leakage_checks;
  // a report only exists if no check tripped, so violations are zero by
  // construction; the count shows the guard actually ran
  j["leakage"] = {{"checks", checks}, {"violations", 0}};
  j["warnings"] = warnings;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::ordered_json& j) {
  EvalReport r;
  r.config = j.at("config");
  for (const auto& row : j.at("folds")) {
    FoldResult f;
    f.participant_id = row.at("participant_id").get<std::string>();
    f.y_true = row.at("y_true").get<int>();
    f.proba = row.at("proba").get<double>();
    f.y_pred = row.at("y_pred").get<int>();
    f.selected = row.at("selected").get<std::vector<std::string>>();
    f.tuned = hyper_from_json(row.at("tuned"));
    if (row.contains("leakage_checks")) f.leakage_checks = row.at("leakage_checks").get<std::size_t>();
    if (row.contains("warnings")) f.warnings = row.at("warnings").get<std::vector<std::string>>();
    r.folds.push_back(f);
  }
  std::vector<int> yt, yp;
  std::vector<double> pr;
  for (const auto& f : r.folds) {
    yt.push_back(f.y_true);
    yp.push_back(f.y_pred);
    pr.push_back(f.proba);
  }
  r.aggregate = compute_metrics(yt, yp, pr);
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

// ---- fold layout / tuning ----

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& y, int folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw ConfigError("fold count must be >= 2");
  if (folds > static_cast<int>(y.size())) throw FoldsExceedSamples(folds, y.size());
  std::vector<std::vector<std::size_t>> out(folds);
  Rng rng(seed);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) idx.push_back(i);
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) out[i % folds].push_back(idx[i]);
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

Hyper tune(const ModelSpec& spec, const Dataset& train, int folds, std::uint64_t seed,
           std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  const std::size_t n = train.x.size();
  if (folds > static_cast<int>(n)) throw FoldsExceedSamples(folds, n);
  if (spec.kind == "dummy" || spec.space.empty()) return {};

  int pos = std::accumulate(train.y.begin(), train.y.end(), 0);
  int minority = std::min<int>(pos, static_cast<int>(n) - pos);
  int eff = std::min(folds, minority);
  if (eff < folds)
    warn("inner folds reduced to " + std::to_string(eff) + " (smaller class has " +
         std::to_string(minority) + " samples)");
  if (eff < 2) {
    warn("tuning skipped: smaller class too small for inner folds");
    return {};
  }

  std::vector<Hyper> candidates;
  candidates.push_back({});  // the spec's own defaults
  Rng draw_rng(derive_seed(seed, "tune_draws", 0));
  for (int b = 0; b < spec.budget; ++b) {
    Hyper h;
    for (const auto& [name, values] : spec.space)
      h[name] = values[draw_rng.below(values.size())];
    candidates.push_back(h);
  }

  std::vector<std::vector<std::size_t>> val_folds =
      stratified_folds(train.y, eff, derive_seed(seed, "tune_folds", 0));

  double best_score = -1;
  std::size_t best = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    Hyper params = overlay(spec.params, candidates[c]);
    double total = 0;
    bool usable = true;
    for (int f = 0; f < eff && usable; ++f) {
      Dataset inner, val;
      inner.feature_names = val.feature_names = train.feature_names;
      std::vector<bool> in_val(n, false);
      for (std::size_t i : val_folds[f]) in_val[i] = true;
      for (std::size_t i = 0; i < n; ++i) {
        Dataset& dst = in_val[i] ? val : inner;
        dst.x.push_back(train.x[i]);
        dst.y.push_back(train.y[i]);
      }
      try {
        auto model = make_model(spec.kind, params);
        model->fit(inner, derive_seed(seed, "tune_fit",
                                      static_cast<std::uint64_t>(c) * 1000 + f));
        total += fold_f1(val.y, model->predict(val.x));
      } catch (const ConfigError&) {
        usable = false;
      } catch (const DataError&) {
        usable = false;
      }
    }
    if (!usable) {
      warn("tuning draw " + std::to_string(c) + " skipped (invalid for this training set)");
      continue;
    }
    double score = total / eff;
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return candidates[best];
}

SelectionResult run_selection(const FsConfig& fs, const Dataset& train, std::uint64_t seed) {
  if (fs.method == "ig") return ig_select(train, fs.k, fs.bins, fs.allow_any_k);
  if (fs.method == "stable")
    return stability_select(train, fs.n_boot, fs.threshold, seed, fs.lambda_ratio);
  if (fs.method == "rf") return rf_embedded_select(train, fs.k, fs.forest, seed, fs.allow_any_k);
  if (fs.method == "boruta")
    return boruta_select(train, fs.boruta_depth, fs.boruta_iter, fs.alpha, seed,
                         fs.depth_override, fs.forest);
  throw ConfigError("unknown feature-selection method: " + fs.method);
}

Dataset dataset_from(const FeatureMatrix& m, const std::vector<std::string>& row_ids,
                     const CohortLabels& labels) {
  Dataset d;
  d.feature_names = m.feature_names;
  d.row_ids = row_ids;
  for (const auto& pid : row_ids) {
    std::size_t r = m.row_index(pid);
    d.x.emplace_back(m.row(r).begin(), m.row(r).end());
    d.y.push_back(labels.depressed(pid) ? 1 : 0);
  }
  return d;
}

Dataset project_columns(const Dataset& d, const std::vector<std::string>& cols) {
  std::vector<std::size_t> idx;
  for (const auto& name : cols) {
    auto it = std::find(d.feature_names.begin(), d.feature_names.end(), name);
    if (it == d.feature_names.end()) throw DataError("unknown feature column: " + name);
    idx.push_back(static_cast<std::size_t>(it - d.feature_names.begin()));
  }
  Dataset out;
  out.feature_names = cols;
  out.row_ids = d.row_ids;
  out.y = d.y;
  for (const auto& row : d.x) {
    std::vector<double> r;
    r.reserve(idx.size());
    for (std::size_t c : idx) r.push_back(row[c]);
    out.x.push_back(std::move(r));
  }
  return out;
}

// ---- nested leave-one-participant-out ----

namespace {

struct FoldData {
  Dataset train;  // projected to the selected features
  Dataset test;
  std::vector<std::string> selected;
};

void check_cohort(const std::vector<std::string>& parts, const CohortLabels& labels) {
  if (parts.size() < 25)
    throw DataError("cohort has " + std::to_string(parts.size()) +
                    " participants; at least 25 required");
  int pos = 0;
  for (const auto& pid : parts) pos += labels.depressed(pid) ? 1 : 0;
  if (pos == 0 || pos == static_cast<int>(parts.size()))
    throw DegenerateLabels("cohort labels are single-class");
}

FoldData prepare_fold(const FeatureWorkspace& ws, const CohortLabels& labels, const FsConfig& fs,
                      const CvOptions& opt, std::size_t fold_index, FoldResult& fr,
                      std::uint64_t fold_seed) {
  const auto& parts = ws.participants();
  const std::string& pid = parts[fold_index];

  std::map<std::string, bool> refs;
  std::vector<std::string> ref_ids;
  for (const auto& q : parts) {
    if (!opt.hamming_global && q == pid) continue;
    refs[q] = labels.depressed(q);
    ref_ids.push_back(q);
  }
  if (!opt.hamming_global) touch("hamming_references", ref_ids, pid, &fr.leakage_checks);

  FeatureMatrix matrix = prevalence_filter(ws.assemble(refs), opt.min_user_fraction);

  std::vector<std::string> train_ids;
  for (const auto& q : parts)
    if (q != pid) train_ids.push_back(q);
  touch("scaler", train_ids, pid, &fr.leakage_checks);
  FeatureMatrix scaled = apply_scaler(matrix, fit_scaler(matrix, train_ids));

  Dataset train = dataset_from(scaled, train_ids, labels);
  Dataset test = dataset_from(scaled, {pid}, labels);
  fr.participant_id = pid;
  fr.y_true = test.y.front();

  FoldData fd;
  if (fs.method == "none") {
    fd.selected = train.feature_names;
  } else {
    touch("feature_selection", train.row_ids, pid, &fr.leakage_checks);
    SelectionResult sel = run_selection(fs, train, derive_seed(fold_seed, "fs", 0));
    fd.selected = sel.selected;
    if (fd.selected.empty()) {
      // keep the fold runnable: fall back to the single top-scoring feature
      std::string top;
      double best = -1;
      for (const auto& [name, score] : sel.scores) {
        if (score > best || (score == best && (top.empty() || name < top))) {
          best = score;
          top = name;
        }
      }
      fd.selected.push_back(top);
      fr.warnings.push_back("selection came back empty; using top-scoring feature " + top);
    }
  }
  fr.selected = fd.selected;
  fd.train = project_columns(train, fd.selected);
  fd.test = project_columns(test, fd.selected);
  return fd;
}

template <typename FoldFn>
std::vector<FoldResult> run_folds(std::size_t n, int threads, FoldFn&& fn) {
  std::vector<FoldResult> results(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&]() {
    while (!stop.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  int nt = std::min<int>(threads, static_cast<int>(n));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

BinaryMetrics aggregate_folds(const std::vector<FoldResult>& folds) {
  std::vector<int> yt, yp;
  std::vector<double> pr;
  for (const auto& f : folds) {
    yt.push_back(f.y_true);
    yp.push_back(f.y_pred);
    pr.push_back(f.proba);
  }
  return compute_metrics(yt, yp, pr);
}

}  // namespace

EvalReport nested_lopocv(const FeatureWorkspace& ws, const CohortLabels& labels,
                         const FsConfig& fs, const ModelSpec& spec, const CvOptions& opt) {
  const auto& parts = ws.participants();
  check_cohort(parts, labels);

  EvalReport report;
  report.config["operation"] = "nested_lopocv";
  report.config["fs"] = fs.to_json();
  report.config["spec"] = spec.to_json();
  report.config["options"] = opt.to_json();
  if (opt.hamming_global)
    report.warnings.push_back(
        "hamming reference groups include every participant (parity mode; potentially "
        "optimistic)");

  report.folds = run_folds(parts.size(), opt.threads, [&](std::size_t i) {
    const std::string& pid = parts[i];
    std::uint64_t fold_seed = derive_seed(opt.seed, "fold", i);
    FoldResult fr;
    FoldData fd = prepare_fold(ws, labels, fs, opt, i, fr, fold_seed);

    if (spec.budget > 0 && !spec.space.empty()) {
      touch("tuning", fd.train.row_ids, pid, &fr.leakage_checks);
      fr.tuned = tune(spec, fd.train, opt.inner_folds, derive_seed(fold_seed, "tune", 0),
                      &fr.warnings);
    }
    touch("fit", fd.train.row_ids, pid, &fr.leakage_checks);
    auto model = make_model(spec.kind, overlay(spec.params, fr.tuned));
    model->fit(fd.train, derive_seed(fold_seed, "fit", 0));
    fr.proba = model->predict_proba(fd.test.x).front();
    fr.y_pred = fr.proba >= 0.5 ? 1 : 0;
    return fr;
  });
  report.aggregate = aggregate_folds(report.folds);
  return report;
}

EvalReport stacked_lopocv(const FeatureWorkspace& ws, const CohortLabels& labels,
                          const FsConfig& fs, const std::vector<ModelSpec>& bases,
                          const CvOptions& opt) {
  if (bases.size() < 5)
    throw ConfigError("stacking requires five base specs, got " + std::to_string(bases.size()));
  if (opt.paper_parity && opt.meta_folds != 10)
    throw ConfigError("paper parity requires meta_folds == 10");
  std::vector<ModelSpec> top(bases.begin(), bases.begin() + 5);

  const auto& parts = ws.participants();
  check_cohort(parts, labels);

  EvalReport report;
  report.config["operation"] = "stacked_lopocv";
  nlohmann::ordered_json base_json = nlohmann::ordered_json::array();
  for (const auto& b : top) base_json.push_back(b.to_json());
  report.config["bases"] = base_json;
  report.config["fs"] = fs.to_json();
  report.config["options"] = opt.to_json();
  if (opt.hamming_global)
    report.warnings.push_back(
        "hamming reference groups include every participant (parity mode; potentially "
        "optimistic)");

  report.folds = run_folds(parts.size(), opt.threads, [&](std::size_t i) {
    const std::string& pid = parts[i];
    std::uint64_t fold_seed = derive_seed(opt.seed, "fold", i);
    FoldResult fr;
    FoldData fd = prepare_fold(ws, labels, fs, opt, i, fr, fold_seed);
    const std::size_t n = fd.train.x.size();

    if (opt.meta_folds > static_cast<int>(n)) throw FoldsExceedSamples(opt.meta_folds, n);
    int pos = std::accumulate(fd.train.y.begin(), fd.train.y.end(), 0);
    int minority = std::min<int>(pos, static_cast<int>(n) - pos);
    int mf = std::min(opt.meta_folds, minority);
    if (mf < opt.meta_folds)
      fr.warnings.push_back("meta folds reduced to " + std::to_string(mf) +
                            " (smaller class has " + std::to_string(minority) + " samples)");
    if (mf < 2) throw DataError("smaller class too small for stacked out-of-fold training");
    std::vector<std::vector<std::size_t>> val_folds =
        stratified_folds(fd.train.y, mf, derive_seed(fold_seed, "meta_folds", 0));

    touch("stack_oof", fd.train.row_ids, pid, &fr.leakage_checks);
    std::vector<std::vector<double>> meta_x(n, std::vector<double>(top.size()));
    for (std::size_t b = 0; b < top.size(); ++b) {
      for (int f = 0; f < mf; ++f) {
        Dataset inner;
        inner.feature_names = fd.train.feature_names;
        std::vector<bool> in_val(n, false);
        for (std::size_t r : val_folds[f]) in_val[r] = true;
        for (std::size_t r = 0; r < n; ++r) {
          if (in_val[r]) continue;
          inner.x.push_back(fd.train.x[r]);
          inner.y.push_back(fd.train.y[r]);
        }
        auto model = make_model(top[b].kind, top[b].params);
        model->fit(inner, derive_seed(fold_seed, "stack_base",
                                      static_cast<std::uint64_t>(b) * 1000 + f));
        std::vector<std::vector<double>> val_rows;
        for (std::size_t r : val_folds[f]) val_rows.push_back(fd.train.x[r]);
        std::vector<double> proba = model->predict_proba(val_rows);
        for (std::size_t k = 0; k < val_folds[f].size(); ++k)
          meta_x[val_folds[f][k]][b] = proba[k];
      }
    }

    Dataset meta_train;
    for (std::size_t b = 0; b < top.size(); ++b)
      meta_train.feature_names.push_back("proba_" + std::to_string(b) + "_" + top[b].kind);
    meta_train.x = meta_x;
    meta_train.y = fd.train.y;
    touch("meta_fit", fd.train.row_ids, pid, &fr.leakage_checks);
    LogitModel meta;
    meta.fit(meta_train, derive_seed(fold_seed, "meta_fit", 0));

    touch("stack_refit", fd.train.row_ids, pid, &fr.leakage_checks);
    std::vector<double> test_meta(top.size());
    for (std::size_t b = 0; b < top.size(); ++b) {
      auto model = make_model(top[b].kind, top[b].params);
      model->fit(fd.train, derive_seed(fold_seed, "stack_refit", b));
      test_meta[b] = model->predict_proba(fd.test.x).front();
    }
    fr.proba = meta.predict_proba({test_meta}).front();
    fr.y_pred = fr.proba >= 0.5 ? 1 : 0;
    return fr;
  });
  report.aggregate = aggregate_folds(report.folds);
  return report;
}

nlohmann::ordered_json CohortExplanation::to_json() const {
  std::vector<std::string> pids;
  for (const auto& r : rows) pids.push_back(r.participant_id);
  nlohmann::ordered_json j;
  j["summary"] = summary_to_json(summary, pids);
  nlohmann::ordered_json forces = nlohmann::ordered_json::array();
  for (const auto& r : rows) forces.push_back(force_to_json(r));
  j["participants"] = forces;
  return j;
}

CohortExplanation explain_cohort(const FeatureWorkspace& ws, const CohortLabels& labels,
                                 const FsConfig& fs, const ModelSpec& spec, const CvOptions& opt,
                                 const std::vector<std::string>& participants,
                                 std::size_t background_cap, int d_max) {
  const auto& parts = ws.participants();
  check_cohort(parts, labels);
  if (background_cap == 0) throw ConfigError("background_cap must be positive");
  const std::vector<std::string>& wanted = participants.empty() ? parts : participants;

  CohortExplanation out;
  for (const auto& pid : wanted) {
    auto it = std::find(parts.begin(), parts.end(), pid);
    if (it == parts.end()) throw UnknownParticipant(pid);
    const std::size_t i = static_cast<std::size_t>(it - parts.begin());
    const std::uint64_t fold_seed = derive_seed(opt.seed, "fold", i);

    FoldResult fr;
    FoldData fd = prepare_fold(ws, labels, fs, opt, i, fr, fold_seed);
    if (spec.budget > 0 && !spec.space.empty()) {
      touch("tuning", fd.train.row_ids, pid, &fr.leakage_checks);
      fr.tuned = tune(spec, fd.train, opt.inner_folds, derive_seed(fold_seed, "tune", 0),
                      &fr.warnings);
    }
    touch("fit", fd.train.row_ids, pid, &fr.leakage_checks);
    auto model = make_model(spec.kind, overlay(spec.params, fr.tuned));
    model->fit(fd.train, derive_seed(fold_seed, "fit", 0));

    std::vector<std::vector<double>> background = fd.train.x;
    if (background.size() > background_cap) {
      Rng rng(derive_seed(fold_seed, "background", 0));
      auto pick = rng.sample_without_replacement(background.size(), background_cap);
      std::sort(pick.begin(), pick.end());
      std::vector<std::vector<double>> capped;
      capped.reserve(pick.size());
      for (std::size_t r : pick) capped.push_back(background[r]);
      background = std::move(capped);
    }
    out.rows.push_back(exact_shapley(*model, fd.train.feature_names, fd.test.x.front(),
                                     background, d_max, pid));
  }
  out.summary = summarize_explanations(out.rows);
  return out;
}

}  // namespace pheno
