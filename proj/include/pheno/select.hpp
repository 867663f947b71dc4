#ifndef PHENO_SELECT_HPP
#define PHENO_SELECT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pheno/models.hpp"

namespace pheno {

struct SelectionResult {
  std::string method;
  nlohmann::ordered_json params;
  std::uint64_t seed = 0;
  // ordered by score (descending), ties by ascending feature name
  std::vector<std::string> selected;
  std::map<std::string, double> scores;  // score or selection frequency per feature
  // boruta bookkeeping; empty for the other methods
  std::vector<std::string> confirmed, rejected, tentative;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

// top-k by information gain of equal-frequency-binned columns (nats)
SelectionResult ig_select(const Dataset& d, int k, int bins = 10, bool allow_any_k = false);

double information_gain(const std::vector<double>& x, const std::vector<int>& y, int bins = 10);

// selection frequency over class-stratified half-size subsamples fit with an
// L1 logistic base learner; lambda = lambda_ratio * lambda_max per subsample
SelectionResult stability_select(const Dataset& d, int n_boot, double threshold,
                                 std::uint64_t seed, double lambda_ratio = 0.25);
std::vector<double> stability_frequencies(const Dataset& d, int n_boot, std::uint64_t seed,
                                          double lambda_ratio = 0.25);

SelectionResult rf_embedded_select(const Dataset& d, int k, const Hyper& forest,
                                   std::uint64_t seed, bool allow_any_k = false);

// shadow-feature wrapper; forest depth must stay in [3, 7] unless overridden
SelectionResult boruta_select(const Dataset& d, int max_depth, int max_iter, double alpha,
                              std::uint64_t seed, bool depth_override = false,
                              const Hyper& forest = {});

// L1-penalized logistic regression via coordinate descent; returns d
// coefficients followed by the intercept. Objective: mean logistic loss
// + lambda * ||w||_1 (intercept unpenalized).
std::vector<double> l1_logistic(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, double lambda);
double l1_logistic_lambda_max(const std::vector<std::vector<double>>& x,
                              const std::vector<int>& y);

SelectionResult selection_from_json(const nlohmann::json& j);

}  // namespace pheno

#endif
