#include <algorithm>
#include <cmath>
#include <numeric>

#include "pheno/errors.hpp"
#include "pheno/models.hpp"
#include "pheno/rng.hpp"

namespace pheno {

namespace {

void check_training_set(const Dataset& d) {
  if (d.x.empty()) throw DataError("empty training set");
  if (d.y.size() != d.x.size()) throw DataError("training rows and labels differ in length");
  int pos = 0;
  for (int v : d.y) {
    if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
    pos += v;
  }
  if (pos == 0 || pos == static_cast<int>(d.y.size())) throw SingleClassTrainingSet();
}

void check_width(std::size_t expect, const std::vector<std::vector<double>>& x) {
  for (const auto& row : x)
    if (row.size() != expect)
      throw InconsistentContract("predict row has " + std::to_string(row.size()) +
                                 " features, model was fit on " + std::to_string(expect));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logistic_loss(double margin) {
  // ln(1 + exp(-margin)), stable for large |margin|
  if (margin < -35) return -margin;
  return std::log1p(std::exp(-margin));
}

}  // namespace

double Tree::predict(const std::vector<double>& row) const {
  int i = 0;
  while (nodes[i].feature >= 0)
    i = row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return nodes[i].value;
}

nlohmann::json Tree::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& n : nodes)
    arr.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  return arr;
}

Tree Tree::from_json(const nlohmann::json& j) {
  Tree t;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n[0].get<int>();
    node.threshold = n[1].get<double>();
    node.left = n[2].get<int>();
    node.right = n[3].get<int>();
    node.value = n[4].get<double>();
    t.nodes.push_back(node);
  }
  return t;
}

// ---- gini tree ----

Tree grow_class_tree(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                     const std::vector<double>& w, const std::vector<std::size_t>& rows,
                     const TreeGrowth& g, std::uint64_t seed, std::vector<double>* importance) {
  const std::size_t d = x.front().size();
  Rng rng(seed);
  int max_features = g.max_features;
  if (max_features == -1)
    max_features = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d)))));
  if (max_features == 0 || max_features > static_cast<int>(d))
    max_features = static_cast<int>(d);

  double w_root = 0;
  for (std::size_t r : rows) w_root += w[r];

  struct Item {
    double v;
    int y;
    double w;
  };
  Tree tree;

  auto gini = [](double w0, double w1) {
    double total = w0 + w1;
    if (total <= 0) return 0.0;
    double p0 = w0 / total, p1 = w1 / total;
    return 1.0 - p0 * p0 - p1 * p1;
  };

  // returns index of the node built for this sample set
  auto build = [&](auto&& self, std::vector<std::size_t> node_rows, int depth) -> int {
    double w0 = 0, w1 = 0;
    for (std::size_t r : node_rows) (y[r] ? w1 : w0) += w[r];
    double node_gini = gini(w0, w1);
    double w_node = w0 + w1;

    int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[idx].value = w_node > 0 ? w1 / w_node : 0.5;

    bool can_split = depth < g.max_depth && node_gini > 0 &&
                     static_cast<int>(node_rows.size()) >= g.min_samples_split;
    if (!can_split) return idx;

    std::vector<std::size_t> feats;
    if (max_features == static_cast<int>(d)) {
      feats.resize(d);
      std::iota(feats.begin(), feats.end(), 0);
    } else {
      feats = rng.sample_without_replacement(d, static_cast<std::size_t>(max_features));
      std::sort(feats.begin(), feats.end());
    }

    int best_f = -1;
    double best_thr = 0, best_gain = 0;
    std::vector<Item> items(node_rows.size());
    for (std::size_t f : feats) {
      for (std::size_t i = 0; i < node_rows.size(); ++i) {
        std::size_t r = node_rows[i];
        items[i] = {x[r][f], y[r], w[r]};
      }
      std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
      double l0 = 0, l1 = 0;
      for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        (items[i].y ? l1 : l0) += items[i].w;
        if (items[i].v == items[i + 1].v) continue;
        std::size_t nl = i + 1, nr = items.size() - nl;
        if (static_cast<int>(nl) < g.min_samples_leaf || static_cast<int>(nr) < g.min_samples_leaf)
          continue;
        double r0 = w0 - l0, r1 = w1 - l1;
        double gain =
            node_gini - (l0 + l1) / w_node * gini(l0, l1) - (r0 + r1) / w_node * gini(r0, r1);
        if (gain > best_gain + 1e-15 && gain > 1e-12) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_thr = (items[i].v + items[i + 1].v) / 2;
        }
      }
    }
    if (best_f < 0) return idx;

    if (importance) (*importance)[best_f] += (w_node / w_root) * best_gain;
    std::vector<std::size_t> left, right;
    for (std::size_t r : node_rows) (x[r][best_f] <= best_thr ? left : right).push_back(r);
    tree.nodes[idx].feature = best_f;
    tree.nodes[idx].threshold = best_thr;
    int li = self(self, std::move(left), depth + 1);
    tree.nodes[idx].left = li;
    int ri = self(self, std::move(right), depth + 1);
    tree.nodes[idx].right = ri;
    return idx;
  };
  build(build, rows, 0);
  return tree;
}

// ---- newton regression tree for boosting ----

namespace {

Tree grow_newton_tree(const std::vector<std::vector<double>>& x, const std::vector<double>& grad,
                      const std::vector<double>& hess, int max_depth, double l2) {
  const std::size_t d = x.front().size();
  Tree tree;

  struct Item {
    double v, g, h;
  };
  auto build = [&](auto&& self, std::vector<std::size_t> node_rows, int depth) -> int {
    double gsum = 0, hsum = 0;
    for (std::size_t r : node_rows) {
      gsum += grad[r];
      hsum += hess[r];
    }
    int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[idx].value = -gsum / (hsum + l2);
    if (depth >= max_depth || node_rows.size() < 2) return idx;

    double parent_score = gsum * gsum / (hsum + l2);
    int best_f = -1;
    double best_thr = 0, best_gain = 0;
    std::vector<Item> items(node_rows.size());
    for (std::size_t f = 0; f < d; ++f) {
      for (std::size_t i = 0; i < node_rows.size(); ++i) {
        std::size_t r = node_rows[i];
        items[i] = {x[r][f], grad[r], hess[r]};
      }
      std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.v < b.v; });
      double gl = 0, hl = 0;
      for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        gl += items[i].g;
        hl += items[i].h;
        if (items[i].v == items[i + 1].v) continue;
        double gr = gsum - gl, hr = hsum - hl;
        double gain =
            0.5 * (gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent_score);
        if (gain > best_gain + 1e-15 && gain > 1e-12) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_thr = (items[i].v + items[i + 1].v) / 2;
        }
      }
    }
    if (best_f < 0) return idx;
    std::vector<std::size_t> left, right;
    for (std::size_t r : node_rows) (x[r][best_f] <= best_thr ? left : right).push_back(r);
    tree.nodes[idx].feature = best_f;
    tree.nodes[idx].threshold = best_thr;
    int li = self(self, std::move(left), depth + 1);
    tree.nodes[idx].left = li;
    int ri = self(self, std::move(right), depth + 1);
    tree.nodes[idx].right = ri;
    return idx;
  };
  std::vector<std::size_t> all(x.size());
  std::iota(all.begin(), all.end(), 0);
  build(build, all, 0);
  return tree;
}

}  // namespace

// ---- cart ----

CartModel::CartModel(const Hyper& h) {
  growth_.max_depth = static_cast<int>(hyper_get(h, "max_depth", 5));
  growth_.min_samples_leaf = static_cast<int>(hyper_get(h, "min_samples_leaf", 1));
  growth_.min_samples_split = static_cast<int>(hyper_get(h, "min_samples_split", 2));
  if (growth_.max_depth < 1) throw ConfigError("cart max_depth must be >= 1");
}

void CartModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d);
  d_ = d.x.front().size();
  std::vector<double> w(d.x.size(), 1.0);
  std::vector<std::size_t> rows(d.x.size());
  std::iota(rows.begin(), rows.end(), 0);
  tree_ = grow_class_tree(d.x, d.y, w, rows, growth_, 0, nullptr);
}

std::vector<double> CartModel::predict_proba(const std::vector<std::vector<double>>& x) const {
  check_width(d_, x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) out.push_back(tree_.predict(row));
  return out;
}

nlohmann::json CartModel::to_json() const {
  return {{"kind", "cart"}, {"tree", tree_.to_json()}, {"n_features", d_}};
}

void CartModel::load(const nlohmann::json& j) {
  tree_ = Tree::from_json(j.at("tree"));
  d_ = j.at("n_features").get<std::size_t>();
}

// ---- random forest ----

RandomForestModel::RandomForestModel(const Hyper& h) {
  n_trees_ = static_cast<int>(hyper_get(h, "n_trees", 100));
  growth_.max_depth = static_cast<int>(hyper_get(h, "max_depth", 10));
  growth_.min_samples_leaf = static_cast<int>(hyper_get(h, "min_samples_leaf", 1));
  growth_.min_samples_split = static_cast<int>(hyper_get(h, "min_samples_split", 2));
  growth_.max_features = static_cast<int>(hyper_get(h, "max_features", -1));
  if (n_trees_ < 1) throw ConfigError("random_forest n_trees must be >= 1");
}

void RandomForestModel::fit(const Dataset& d, std::uint64_t seed) {
  check_training_set(d);
  d_ = d.x.front().size();
  const std::size_t n = d.x.size();
  trees_.clear();
  importances_.assign(d_, 0.0);
  std::vector<double> w(n, 1.0);
  for (int t = 0; t < n_trees_; ++t) {
    Rng boot(derive_seed(seed, "rf_bootstrap", static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = boot.below(n);
    std::vector<double> imp(d_, 0.0);
    trees_.push_back(grow_class_tree(d.x, d.y, w, rows, growth_,
                                     derive_seed(seed, "rf_features", static_cast<std::uint64_t>(t)),
                                     &imp));
    double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0)
      for (std::size_t f = 0; f < d_; ++f) importances_[f] += imp[f] / total;
  }
  double total = std::accumulate(importances_.begin(), importances_.end(), 0.0);
  if (total > 0)
    for (double& v : importances_) v /= total;
}

std::vector<double> RandomForestModel::predict_proba(
    const std::vector<std::vector<double>>& x) const {
  check_width(d_, x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    double sum = 0;
    for (const auto& t : trees_) sum += t.predict(row);
    out.push_back(sum / static_cast<double>(trees_.size()));
  }
  return out;
}

nlohmann::json RandomForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"kind", "random_forest"},
          {"trees", trees},
          {"importances", importances_},
          {"n_features", d_}};
}

void RandomForestModel::load(const nlohmann::json& j) {
  trees_.clear();
  for (const auto& t : j.at("trees")) trees_.push_back(Tree::from_json(t));
  importances_ = j.at("importances").get<std::vector<double>>();
  d_ = j.at("n_features").get<std::size_t>();
}

// ---- adaboost (decision stumps) ----

AdaBoostModel::AdaBoostModel(const Hyper& h) {
  n_rounds_ = static_cast<int>(hyper_get(h, "n_rounds", 50));
  if (n_rounds_ < 1) throw ConfigError("adaboost n_rounds must be >= 1");
}

void AdaBoostModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d);
  d_ = d.x.front().size();
  const std::size_t n = d.x.size();
  stumps_.clear();
  alphas_.clear();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  TreeGrowth g;
  g.max_depth = 1;
  for (int round = 0; round < n_rounds_; ++round) {
    Tree stump = grow_class_tree(d.x, d.y, w, rows, g, 0, nullptr);
    std::vector<int> pred(n);
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = stump.predict(d.x[i]) >= 0.5 ? 1 : 0;
      if (pred[i] != d.y[i]) err += w[i];
    }
    if (err <= 0) {
      stumps_.push_back(stump);
      alphas_.push_back(0.5 * std::log((1 - 1e-10) / 1e-10));
      break;
    }
    if (err >= 0.5) {
      if (stumps_.empty()) {
        stumps_.push_back(stump);
        alphas_.push_back(1e-10);
      }
      break;
    }
    double alpha = 0.5 * std::log((1 - err) / err);
    stumps_.push_back(stump);
    alphas_.push_back(alpha);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(pred[i] == d.y[i] ? -alpha : alpha);
      total += w[i];
    }
    for (double& v : w) v /= total;
  }
}

std::vector<double> AdaBoostModel::predict_proba(const std::vector<std::vector<double>>& x) const {
  check_width(d_, x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    double score = 0;
    for (std::size_t m = 0; m < stumps_.size(); ++m)
      score += alphas_[m] * (stumps_[m].predict(row) >= 0.5 ? 1.0 : -1.0);
    out.push_back(sigmoid(score));
  }
  return out;
}

nlohmann::json AdaBoostModel::to_json() const {
  nlohmann::json stumps = nlohmann::json::array();
  for (const auto& s : stumps_) stumps.push_back(s.to_json());
  return {{"kind", "adaboost"}, {"stumps", stumps}, {"alphas", alphas_}, {"n_features", d_}};
}

void AdaBoostModel::load(const nlohmann::json& j) {
  stumps_.clear();
  for (const auto& s : j.at("stumps")) stumps_.push_back(Tree::from_json(s));
  alphas_ = j.at("alphas").get<std::vector<double>>();
  d_ = j.at("n_features").get<std::size_t>();
}

// ---- gradient boosted trees, logistic loss, newton leaves ----

GbtModel::GbtModel(const Hyper& h) {
  n_rounds_ = static_cast<int>(hyper_get(h, "n_rounds", 100));
  learning_rate_ = hyper_get(h, "learning_rate", 0.1);
  max_depth_ = static_cast<int>(hyper_get(h, "max_depth", 3));
  l2_ = hyper_get(h, "l2", 1.0);
  if (n_rounds_ < 1) throw ConfigError("gbt n_rounds must be >= 1");
  if (learning_rate_ <= 0) throw ConfigError("gbt learning_rate must be > 0");
}

void GbtModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d);
  d_ = d.x.front().size();
  const std::size_t n = d.x.size();
  trees_.clear();
  train_loss_.clear();

  double p0 = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(n);
  p0 = std::clamp(p0, 1e-6, 1.0 - 1e-6);
  base_score_ = std::log(p0 / (1 - p0));

  std::vector<double> f(n, base_score_), grad(n), hess(n);
  auto mean_loss = [&](const std::vector<double>& scores) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i)
      total += logistic_loss((2.0 * d.y[i] - 1.0) * scores[i]);
    return total / static_cast<double>(n);
  };
  double prev = mean_loss(f);
  for (int round = 0; round < n_rounds_; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(f[i]);
      grad[i] = p - d.y[i];
      hess[i] = std::max(p * (1 - p), 1e-16);
    }
    Tree tree = grow_newton_tree(d.x, grad, hess, max_depth_, l2_);
    // shrink further if the full newton step would raise the training loss
    double scale = learning_rate_;
    std::vector<double> trial(n);
    double loss = 0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = f[i] + scale * tree.predict(d.x[i]);
      loss = mean_loss(trial);
      if (loss <= prev + 1e-12) break;
      scale *= 0.5;
    }
    if (loss > prev + 1e-12) {
      scale = 0;
      trial = f;
      loss = prev;
    }
    for (auto& node : tree.nodes)
      if (node.feature < 0) node.value *= scale;
    trees_.push_back(tree);
    f = trial;
    train_loss_.push_back(loss);
    prev = loss;
  }
}

std::vector<double> GbtModel::predict_proba(const std::vector<std::vector<double>>& x) const {
  check_width(d_, x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    double score = base_score_;
    for (const auto& t : trees_) score += t.predict(row);
    out.push_back(sigmoid(score));
  }
  return out;
}

nlohmann::json GbtModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"kind", "gbt"},
          {"base_score", base_score_},
          {"trees", trees},
          {"train_loss", train_loss_},
          {"n_features", d_}};
}

void GbtModel::load(const nlohmann::json& j) {
  base_score_ = j.at("base_score").get<double>();
  trees_.clear();
  for (const auto& t : j.at("trees")) trees_.push_back(Tree::from_json(t));
  train_loss_ = j.at("train_loss").get<std::vector<double>>();
  d_ = j.at("n_features").get<std::size_t>();
}

}  // namespace pheno
