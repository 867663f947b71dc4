#ifndef PHENO_METRICS_HPP
#define PHENO_METRICS_HPP

#include <vector>

#include <nlohmann/json.hpp>

namespace pheno {

struct BinaryMetrics {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0;
  double sensitivity = 0;
  double specificity = 0;
  double f1 = 0;
  double accuracy = 0;
  double balanced_accuracy = 0;
  double auc = 0;
  // zero-denominator metrics are reported as 0 with the matching flag set
  bool precision_undefined = false;
  bool sensitivity_undefined = false;
  bool specificity_undefined = false;
  bool f1_undefined = false;
  bool auc_undefined = false;

  nlohmann::ordered_json to_json() const;
};

// counts + derived rates; probabilities (if given) feed the rank-based AUC
BinaryMetrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                              const std::vector<double>& proba = {});

// Mann-Whitney AUC with midranks for ties; undefined (0 + flag) when one
// class is absent
double roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores,
               bool* undefined = nullptr);

double balanced_accuracy_of(double sensitivity, double specificity);

}  // namespace pheno

#endif
