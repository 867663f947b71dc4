#include "pheno/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "pheno/errors.hpp"

namespace pheno {

double balanced_accuracy_of(double sensitivity, double specificity) {
  return (sensitivity + specificity) / 2.0;
}

double roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores,
               bool* undefined) {
  if (y_true.size() != scores.size()) throw DataError("labels and scores differ in length");
  std::size_t n = y_true.size();
  std::size_t n_pos = 0;
  for (int y : y_true) n_pos += y;
  std::size_t n_neg = n - n_pos;
  if (undefined) *undefined = false;
  if (n_pos == 0 || n_neg == 0) {
    if (undefined) *undefined = true;
    return 0;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // midranks over tied score runs
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double rank_sum = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (y_true[k]) rank_sum += rank[k];
  double u = rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

BinaryMetrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                              const std::vector<double>& proba) {
  if (y_true.empty()) throw EmptyReport();
  if (y_true.size() != y_pred.size()) throw DataError("labels and predictions differ in length");
  BinaryMetrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i]) {
      (y_pred[i] ? m.tp : m.fn)++;
    } else {
      (y_pred[i] ? m.fp : m.tn)++;
    }
  }
  auto rate = [](int num, int den, bool* flag) {
    if (den == 0) {
      *flag = true;
      return 0.0;
    }
    return static_cast<double>(num) / den;
  };
  m.precision = rate(m.tp, m.tp + m.fp, &m.precision_undefined);
  m.sensitivity = rate(m.tp, m.tp + m.fn, &m.sensitivity_undefined);
  m.specificity = rate(m.tn, m.tn + m.fp, &m.specificity_undefined);
  if (m.precision + m.sensitivity == 0) {
    m.f1 = 0;
    m.f1_undefined = m.precision_undefined || m.sensitivity_undefined;
  } else {
    m.f1 = 2 * m.precision * m.sensitivity / (m.precision + m.sensitivity);
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(y_true.size());
  m.balanced_accuracy = balanced_accuracy_of(m.sensitivity, m.specificity);
  if (!proba.empty()) {
    m.auc = roc_auc(y_true, proba, &m.auc_undefined);
  } else {
    m.auc_undefined = true;
  }
  return m;
}

nlohmann::ordered_json BinaryMetrics::to_json() const {
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["tn"] = tn;
  j["fn"] = fn;
  j["precision"] = precision;
  j["sensitivity"] = sensitivity;
  j["specificity"] = specificity;
  j["f1"] = f1;
  j["accuracy"] = accuracy;
  j["balanced_accuracy"] = balanced_accuracy;
  j["auc"] = auc;
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  if (precision_undefined) flags.push_back("precision_zero_denominator");
  if (sensitivity_undefined) flags.push_back("sensitivity_zero_denominator");
  if (specificity_undefined) flags.push_back("specificity_zero_denominator");
  if (f1_undefined) flags.push_back("f1_zero_denominator");
  if (auc_undefined) flags.push_back("auc_undefined");
  j["flags"] = flags;
  return j;
}

}  // namespace pheno
