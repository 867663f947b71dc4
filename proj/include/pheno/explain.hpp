#ifndef PHENO_EXPLAIN_HPP
#define PHENO_EXPLAIN_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pheno/models.hpp"

namespace pheno {

struct ShapExplanation {
  std::string participant_id;
  std::vector<std::string> feature_names;
  std::vector<double> x;    // the explained (standardized) row
  std::vector<double> phi;  // per-feature contributions
  double base_value = 0;    // mean model probability over the background
  double fx = 0;            // model probability of x

  nlohmann::ordered_json to_json() const;
};

// Exact Shapley values by full coalition enumeration with the interventional
// value function: v(S) averages the model over background rows with the
// features in S pinned to x. O(2^d * |background|) model evaluations.
ShapExplanation exact_shapley(const Model& model, const std::vector<std::string>& feature_names,
                              const std::vector<double>& x,
                              const std::vector<std::vector<double>>& background, int d_max = 20,
                              const std::string& participant_id = "");

struct SummaryFeature {
  std::string name;
  double mean_abs_phi = 0;
  std::vector<double> values;  // feature value per explanation
  std::vector<double> phis;    // contribution per explanation
};

// features ordered by mean |phi| descending; all explanations must share one
// feature contract
std::vector<SummaryFeature> summarize_explanations(const std::vector<ShapExplanation>& all);

nlohmann::ordered_json summary_to_json(const std::vector<SummaryFeature>& features,
                                       const std::vector<std::string>& participant_ids);
nlohmann::ordered_json force_to_json(const ShapExplanation& e);

}  // namespace pheno

#endif
