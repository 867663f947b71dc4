#include "pheno/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pheno/errors.hpp"

namespace pheno {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_training_set(const Dataset& d, bool needs_both_classes) {
  if (d.x.empty()) throw DataError("empty training set");
  if (d.y.size() != d.x.size()) throw DataError("training rows and labels differ in length");
  int pos = 0;
  for (int v : d.y) {
    if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
    pos += v;
  }
  if (needs_both_classes && (pos == 0 || pos == static_cast<int>(d.y.size())))
    throw SingleClassTrainingSet();
  std::size_t width = d.x.front().size();
  for (const auto& row : d.x)
    if (row.size() != width) throw DataError("ragged feature rows");
}

void check_width(std::size_t expect, const std::vector<std::vector<double>>& x) {
  for (const auto& row : x)
    if (row.size() != expect)
      throw InconsistentContract("predict row has " + std::to_string(row.size()) +
                                 " features, model was fit on " + std::to_string(expect));
}

}  // namespace

double hyper_get(const Hyper& h, const std::string& name, double fallback) {
  auto it = h.find(name);
  return it == h.end() ? fallback : it->second;
}

std::vector<int> Model::predict(const std::vector<std::vector<double>>& x) const {
  std::vector<double> p = predict_proba(x);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1 : 0;
  return out;
}

double Model::predict_proba_one(const std::vector<double>& row) const {
  return predict_proba({row}).front();
}

const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> kinds = {"dummy",      "logit",         "knn",
                                                "gaussian_nb", "cart",          "random_forest",
                                                "adaboost",   "gbt"};
  return kinds;
}

std::unique_ptr<Model> make_model(const std::string& kind, const Hyper& params) {
  if (kind == "dummy") return std::make_unique<DummyModel>();
  if (kind == "logit") return std::make_unique<LogitModel>(params);
  if (kind == "knn") return std::make_unique<KnnModel>(params);
  if (kind == "gaussian_nb") return std::make_unique<GaussianNbModel>(params);
  if (kind == "cart") return std::make_unique<CartModel>(params);
  if (kind == "random_forest") return std::make_unique<RandomForestModel>(params);
  if (kind == "adaboost") return std::make_unique<AdaBoostModel>(params);
  if (kind == "gbt") return std::make_unique<GbtModel>(params);
  throw ConfigError("unknown model kind: " + kind);
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  auto model = make_model(kind);
  if (kind == "dummy") static_cast<DummyModel*>(model.get())->load(j);
  else if (kind == "logit") static_cast<LogitModel*>(model.get())->load(j);
  else if (kind == "knn") static_cast<KnnModel*>(model.get())->load(j);
  else if (kind == "gaussian_nb") static_cast<GaussianNbModel*>(model.get())->load(j);
  else if (kind == "cart") static_cast<CartModel*>(model.get())->load(j);
  else if (kind == "random_forest") static_cast<RandomForestModel*>(model.get())->load(j);
  else if (kind == "adaboost") static_cast<AdaBoostModel*>(model.get())->load(j);
  else static_cast<GbtModel*>(model.get())->load(j);
  return model;
}

// ---- dummy ----

void DummyModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d, true);
  d_ = d.x.front().size();
  p_ = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(d.y.size());
}

std::vector<double> DummyModel::predict_proba(const std::vector<std::vector<double>>& x) const {
  check_width(d_, x);
  return std::vector<double>(x.size(), p_);
}

nlohmann::json DummyModel::to_json() const {
  return {{"kind", "dummy"}, {"p", p_}, {"n_features", d_}};
}

void DummyModel::load(const nlohmann::json& j) {
  p_ = j.at("p").get<double>();
  d_ = j.at("n_features").get<std::size_t>();
}

// ---- logistic regression (IRLS, ridge penalty, unpenalized intercept) ----

LogitModel::LogitModel(const Hyper& h) {
  l2_ = hyper_get(h, "l2", 1e-4);
  max_iter_ = static_cast<int>(hyper_get(h, "max_iter", 100));
  if (l2_ < 0) throw ConfigError("logit l2 must be >= 0");
}

void LogitModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d, true);
  const std::size_t n = d.x.size(), p = d.x.front().size();
  w_.assign(p, 0.0);
  b_ = 0;
  const std::size_t m = p + 1;  // intercept last
  std::vector<double> h(m * m), g(m), prob(n);
  for (int iter = 0; iter < max_iter_; ++iter) {
    std::fill(h.begin(), h.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double z = b_;
      for (std::size_t j = 0; j < p; ++j) z += w_[j] * d.x[i][j];
      double pr = sigmoid(z);
      prob[i] = pr;
      double r = pr - d.y[i];
      double s = std::max(pr * (1 - pr), 1e-9);
      for (std::size_t j = 0; j < p; ++j) {
        g[j] += r * d.x[i][j];
        for (std::size_t k = j; k < p; ++k) h[j * m + k] += s * d.x[i][j] * d.x[i][k];
        h[j * m + p] += s * d.x[i][j];
      }
      g[p] += r;
      h[p * m + p] += s;
    }
    for (std::size_t j = 0; j < p; ++j) {
      g[j] += l2_ * w_[j];
      h[j * m + j] += l2_;
    }
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < j; ++k) h[j * m + k] = h[k * m + j];
    std::vector<double> step = solve_spd(h, g, m);
    double biggest = 0;
    for (std::size_t j = 0; j < p; ++j) {
      w_[j] -= step[j];
      biggest = std::max(biggest, std::abs(step[j]));
    }
    b_ -= step[p];
    biggest = std::max(biggest, std::abs(step[p]));
    if (biggest < tol_) break;
  }
}

std::vector<double> LogitModel::predict_proba(const std::vector<std::vector<double>>& x) const {
  check_width(w_.size(), x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    double z = b_;
    for (std::size_t j = 0; j < w_.size(); ++j) z += w_[j] * row[j];
    out.push_back(sigmoid(z));
  }
  return out;
}

nlohmann::json LogitModel::to_json() const {
  return {{"kind", "logit"}, {"l2", l2_}, {"w", w_}, {"b", b_}};
}

void LogitModel::load(const nlohmann::json& j) {
  l2_ = j.at("l2").get<double>();
  w_ = j.at("w").get<std::vector<double>>();
  b_ = j.at("b").get<double>();
}

// ---- k nearest neighbours ----

KnnModel::KnnModel(const Hyper& h) {
  k_ = static_cast<int>(hyper_get(h, "k", 5));
  if (k_ < 1) throw ConfigError("knn k must be >= 1");
}

void KnnModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d, true);
  if (k_ > static_cast<int>(d.x.size())) throw KTooLarge(k_, d.x.size());
  train_ = d.x;
  labels_ = d.y;
}

std::vector<double> KnnModel::predict_proba(const std::vector<std::vector<double>>& x) const {
  check_width(n_features(), x);
  std::vector<double> out;
  out.reserve(x.size());
  std::vector<std::pair<double, std::size_t>> dist(train_.size());
  for (const auto& row : x) {
    for (std::size_t i = 0; i < train_.size(); ++i) {
      double d2 = 0;
      for (std::size_t j = 0; j < row.size(); ++j) {
        double diff = row[j] - train_[i][j];
        d2 += diff * diff;
      }
      dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    int pos = 0;
    for (int i = 0; i < k_; ++i) pos += labels_[dist[i].second];
    out.push_back(static_cast<double>(pos) / k_);
  }
  return out;
}

nlohmann::json KnnModel::to_json() const {
  return {{"kind", "knn"}, {"k", k_}, {"train", train_}, {"labels", labels_}};
}

void KnnModel::load(const nlohmann::json& j) {
  k_ = j.at("k").get<int>();
  train_ = j.at("train").get<std::vector<std::vector<double>>>();
  labels_ = j.at("labels").get<std::vector<int>>();
}

// ---- gaussian naive bayes ----

GaussianNbModel::GaussianNbModel(const Hyper& h) {
  smoothing_ratio_ = hyper_get(h, "var_smoothing", 1e-9);
}

void GaussianNbModel::fit(const Dataset& d, std::uint64_t) {
  check_training_set(d, true);
  const std::size_t n = d.x.size(), p = d.x.front().size();
  double max_var = 0;
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0;
    for (const auto& row : d.x) mean += row[j];
    mean /= static_cast<double>(n);
    double ss = 0;
    for (const auto& row : d.x) ss += (row[j] - mean) * (row[j] - mean);
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  double eps = smoothing_ratio_ * std::max(max_var, 1.0);
  for (int c = 0; c < 2; ++c) {
    std::size_t nc = 0;
    mean_[c].assign(p, 0.0);
    var_[c].assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (d.y[i] != c) continue;
      ++nc;
      for (std::size_t j = 0; j < p; ++j) mean_[c][j] += d.x[i][j];
    }
    for (std::size_t j = 0; j < p; ++j) mean_[c][j] /= static_cast<double>(nc);
    for (std::size_t i = 0; i < n; ++i) {
      if (d.y[i] != c) continue;
      for (std::size_t j = 0; j < p; ++j) {
        double diff = d.x[i][j] - mean_[c][j];
        var_[c][j] += diff * diff;
      }
    }
    for (std::size_t j = 0; j < p; ++j) var_[c][j] = var_[c][j] / static_cast<double>(nc) + eps;
    prior_[c] = static_cast<double>(nc) / static_cast<double>(n);
  }
}

std::vector<double> GaussianNbModel::predict_proba(
    const std::vector<std::vector<double>>& x) const {
  check_width(n_features(), x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    double logp[2];
    for (int c = 0; c < 2; ++c) {
      double lp = std::log(prior_[c]);
      for (std::size_t j = 0; j < row.size(); ++j) {
        double v = var_[c][j];
        double diff = row[j] - mean_[c][j];
        lp += -0.5 * std::log(2 * M_PI * v) - diff * diff / (2 * v);
      }
      logp[c] = lp;
    }
    double m = std::max(logp[0], logp[1]);
    double e0 = std::exp(logp[0] - m), e1 = std::exp(logp[1] - m);
    out.push_back(e1 / (e0 + e1));
  }
  return out;
}

nlohmann::json GaussianNbModel::to_json() const {
  return {{"kind", "gaussian_nb"},
          {"prior", {prior_[0], prior_[1]}},
          {"mean", {mean_[0], mean_[1]}},
          {"var", {var_[0], var_[1]}}};
}

void GaussianNbModel::load(const nlohmann::json& j) {
  prior_[0] = j.at("prior")[0].get<double>();
  prior_[1] = j.at("prior")[1].get<double>();
  for (int c = 0; c < 2; ++c) {
    mean_[c] = j.at("mean")[c].get<std::vector<double>>();
    var_[c] = j.at("var")[c].get<std::vector<double>>();
  }
}

// ---- dense SPD solve ----

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<double> l = a;
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      double diag = l[j * n + j];
      for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
      if (diag <= 0) {
        ok = false;
        break;
      }
      diag = std::sqrt(diag);
      l[j * n + j] = diag;
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = l[i * n + j];
        for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = v / diag;
      }
    }
    if (!ok) {
      double trace = 0;
      for (std::size_t j = 0; j < n; ++j) trace += std::abs(a[j * n + j]);
      double jitter = 1e-10 * (trace / static_cast<double>(n) + 1.0) * (attempt == 0 ? 1 : 0);
      if (attempt == 1) throw InternalError("linear system is not positive definite");
      for (std::size_t j = 0; j < n; ++j) a[j * n + j] += std::max(jitter, 1e-10);
      continue;
    }
    // forward then back substitution
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = b[i];
      for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * y[k];
      y[i] = v / l[i * n + i];
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
      double v = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) v -= l[k * n + ii] * x[k];
      x[ii] = v / l[ii * n + ii];
    }
    return x;
  }
  throw InternalError("unreachable");
}

}  // namespace pheno
