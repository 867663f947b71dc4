#ifndef PHENO_CV_HPP
#define PHENO_CV_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pheno/cohort.hpp"
#include "pheno/explain.hpp"
#include "pheno/features.hpp"
#include "pheno/metrics.hpp"
#include "pheno/models.hpp"
#include "pheno/select.hpp"

namespace pheno {

struct ModelSpec {
  std::string kind = "gbt";
  Hyper params;  // fixed hyperparameters, also the draw-0 "default" during tuning
  std::map<std::string, std::vector<double>> space;  // random-search candidates
  int budget = 0;  // extra random draws; 0 disables tuning

  nlohmann::ordered_json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

struct FsConfig {
  std::string method = "none";  // none | ig | stable | rf | boruta
  int k = 5;
  int bins = 10;
  bool allow_any_k = false;
  double threshold = 0.77;
  int n_boot = 1000;
  double lambda_ratio = 0.25;
  int boruta_depth = 5;
  int boruta_iter = 100;
  double alpha = 0.05;
  bool depth_override = false;
  Hyper forest;  // forest parameters for the rf and boruta methods

  nlohmann::ordered_json to_json() const;
  static FsConfig from_json(const nlohmann::json& j);
};

struct CvOptions {
  int inner_folds = 20;
  int meta_folds = 10;
  std::uint64_t seed = 0;
  bool hamming_global = false;  // reference groups include the held-out participant
  bool paper_parity = false;    // enforce meta_folds == 10
  double min_user_fraction = 0.5;
  int threads = 1;

  nlohmann::ordered_json to_json() const;
  static CvOptions from_json(const nlohmann::json& j);
};

struct FoldResult {
  std::string participant_id;
  int y_true = 0;
  int y_pred = 0;
  double proba = 0;
  std::vector<std::string> selected;
  Hyper tuned;
  std::vector<std::string> warnings;
  std::size_t leakage_checks = 0;  // held-out-id comparisons performed
};

struct EvalReport {
  nlohmann::ordered_json config;
  std::vector<FoldResult> folds;
  BinaryMetrics aggregate;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
  static EvalReport from_json(const nlohmann::ordered_json& j);
};

// validation-fold assignment: per class, seeded shuffle then round robin
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& y, int folds,
                                                       std::uint64_t seed);

// seeded random search scored by mean F1 over stratified inner folds; the
// candidate list always contains the spec's own defaults, so tuning can never
// score below them on the inner folds
Hyper tune(const ModelSpec& spec, const Dataset& train, int folds, std::uint64_t seed,
           std::vector<std::string>* warnings = nullptr);

SelectionResult run_selection(const FsConfig& fs, const Dataset& train, std::uint64_t seed);

Dataset dataset_from(const FeatureMatrix& m, const std::vector<std::string>& row_ids,
                     const CohortLabels& labels);
Dataset project_columns(const Dataset& d, const std::vector<std::string>& cols);

EvalReport nested_lopocv(const FeatureWorkspace& ws, const CohortLabels& labels,
                         const FsConfig& fs, const ModelSpec& spec, const CvOptions& opt);

// stacking: first five specs (already ranked) become base learners; their
// stratified out-of-fold probabilities train a logistic meta-learner
EvalReport stacked_lopocv(const FeatureWorkspace& ws, const CohortLabels& labels,
                          const FsConfig& fs, const std::vector<ModelSpec>& bases,
                          const CvOptions& opt);

struct CohortExplanation {
  std::vector<ShapExplanation> rows;   // one per explained participant
  std::vector<SummaryFeature> summary; // ranked by mean |phi|

  nlohmann::ordered_json to_json() const;
};

// exact explanations under the same per-fold pipeline as nested_lopocv: each
// participant is explained by the model trained with them held out, against a
// background sampled from that training fold
CohortExplanation explain_cohort(const FeatureWorkspace& ws, const CohortLabels& labels,
                                 const FsConfig& fs, const ModelSpec& spec, const CvOptions& opt,
                                 const std::vector<std::string>& participants = {},
                                 std::size_t background_cap = 32, int d_max = 20);

}  // namespace pheno

#endif
