#ifndef PHENO_MODELS_HPP
#define PHENO_MODELS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pheno {

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> row_ids;
  std::vector<std::vector<double>> x;
  std::vector<int> y;  // 0/1

  std::size_t n_rows() const { return x.size(); }
  std::size_t n_cols() const { return x.empty() ? feature_names.size() : x.front().size(); }
};

using Hyper = std::map<std::string, double>;

double hyper_get(const Hyper& h, const std::string& name, double fallback);

// Binary classifiers. predict() applies proba >= 0.5. Fitted models serialize
// to JSON and reload bit-exactly so explanations can replay a model without
// refitting.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::string kind() const = 0;
  virtual void fit(const Dataset& d, std::uint64_t seed) = 0;
  virtual std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const = 0;
  std::vector<int> predict(const std::vector<std::vector<double>>& x) const;
  double predict_proba_one(const std::vector<double>& row) const;
  virtual std::vector<double> importances() const { return {}; }
  virtual nlohmann::json to_json() const = 0;
  virtual std::size_t n_features() const = 0;
};

std::unique_ptr<Model> make_model(const std::string& kind, const Hyper& params = {});
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

// kinds: dummy, logit, knn, gaussian_nb, cart, random_forest, adaboost, gbt
const std::vector<std::string>& model_kinds();

class DummyModel : public Model {
 public:
  std::string kind() const override { return "dummy"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return d_; }

 private:
  double p_ = 0.5;
  std::size_t d_ = 0;
};

class LogitModel : public Model {
 public:
  explicit LogitModel(const Hyper& h = {});
  std::string kind() const override { return "logit"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return w_.size(); }
  const std::vector<double>& coef() const { return w_; }
  double intercept() const { return b_; }

 private:
  double l2_ = 1e-4;
  int max_iter_ = 100;
  double tol_ = 1e-10;
  std::vector<double> w_;
  double b_ = 0;
};

class KnnModel : public Model {
 public:
  explicit KnnModel(const Hyper& h = {});
  std::string kind() const override { return "knn"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return train_.empty() ? 0 : train_.front().size(); }

 private:
  int k_ = 5;
  std::vector<std::vector<double>> train_;
  std::vector<int> labels_;
};

class GaussianNbModel : public Model {
 public:
  explicit GaussianNbModel(const Hyper& h = {});
  std::string kind() const override { return "gaussian_nb"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return mean_[0].size(); }

 private:
  double smoothing_ratio_ = 1e-9;
  double prior_[2] = {0.5, 0.5};
  std::vector<double> mean_[2];
  std::vector<double> var_[2];
};

// flat tree node; leaf when feature < 0
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;  // leaf: class-1 fraction (classification) or weight (boosting)
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const std::vector<double>& row) const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

struct TreeGrowth {
  int max_depth = 5;
  int min_samples_leaf = 1;
  int min_samples_split = 2;
  int max_features = 0;  // 0: all, -1: sqrt(d)
};

// Gini-impurity classification tree on weighted samples; midpoint thresholds,
// first best (feature, threshold) wins ties. Per-feature impurity decrease is
// accumulated into *importance when given.
Tree grow_class_tree(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                     const std::vector<double>& w, const std::vector<std::size_t>& rows,
                     const TreeGrowth& g, std::uint64_t seed, std::vector<double>* importance);

class CartModel : public Model {
 public:
  explicit CartModel(const Hyper& h = {});
  std::string kind() const override { return "cart"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return d_; }

 private:
  TreeGrowth growth_;
  Tree tree_;
  std::size_t d_ = 0;
};

class RandomForestModel : public Model {
 public:
  explicit RandomForestModel(const Hyper& h = {});
  std::string kind() const override { return "random_forest"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  std::vector<double> importances() const override { return importances_; }
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return d_; }
  int max_depth() const { return growth_.max_depth; }

 private:
  int n_trees_ = 100;
  TreeGrowth growth_;
  std::vector<Tree> trees_;
  std::vector<double> importances_;
  std::size_t d_ = 0;
};

class AdaBoostModel : public Model {
 public:
  explicit AdaBoostModel(const Hyper& h = {});
  std::string kind() const override { return "adaboost"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return d_; }

 private:
  int n_rounds_ = 50;
  std::vector<Tree> stumps_;
  std::vector<double> alphas_;
  std::size_t d_ = 0;
};

class GbtModel : public Model {
 public:
  explicit GbtModel(const Hyper& h = {});
  std::string kind() const override { return "gbt"; }
  void fit(const Dataset& d, std::uint64_t seed) override;
  std::vector<double> predict_proba(const std::vector<std::vector<double>>& x) const override;
  nlohmann::json to_json() const override;
  void load(const nlohmann::json& j);
  std::size_t n_features() const override { return d_; }
  // mean logistic loss on the training rows after each boosting round
  const std::vector<double>& train_loss() const { return train_loss_; }

 private:
  int n_rounds_ = 100;
  double learning_rate_ = 0.1;
  int max_depth_ = 3;
  double l2_ = 1.0;
  double base_score_ = 0;  // log odds
  std::vector<Tree> trees_;
  std::vector<double> train_loss_;
  std::size_t d_ = 0;
};

// dense symmetric positive definite solve (Cholesky), used by the logistic fits
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n);

}  // namespace pheno

#endif
