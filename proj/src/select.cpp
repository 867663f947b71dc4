#include "pheno/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pheno/errors.hpp"
#include "pheno/rng.hpp"

namespace pheno {

namespace {

void check_matrix(const Dataset& d) {
  if (d.x.empty()) throw DataError("empty training set");
  if (d.y.size() != d.x.size()) throw DataError("training rows and labels differ in length");
  if (d.feature_names.size() != d.x.front().size())
    throw DataError("feature names and columns differ in length");
  int pos = 0;
  for (int v : d.y) pos += v != 0;
  if (pos == 0 || pos == static_cast<int>(d.y.size()))
    throw DegenerateLabels("selection labels are single-class");
}

void check_k(int k, std::size_t cols, bool allow_any_k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k > static_cast<int>(cols)) throw KTooLarge(k, cols);
  if (!allow_any_k && (k < 5 || k > 20))
    throw KTooLarge("k outside [5, 20]; pass the override to allow it");
}

// order feature indices by score descending, name ascending on ties
std::vector<std::size_t> rank_features(const std::vector<std::string>& names,
                                       const std::vector<double>& score) {
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return names[a] < names[b];
  });
  return order;
}

double entropy_of_counts(const std::vector<int>& counts, int total) {
  if (total == 0) return 0;
  double h = 0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

nlohmann::ordered_json SelectionResult::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["params"] = params;
  j["seed"] = seed;
  j["selected"] = selected;
  nlohmann::ordered_json sc = nlohmann::ordered_json::object();
  for (const auto& [name, v] : scores) sc[name] = v;
  j["scores"] = sc;
  if (method == "boruta") {
    j["confirmed"] = confirmed;
    j["rejected"] = rejected;
    j["tentative"] = tentative;
  }
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

SelectionResult selection_from_json(const nlohmann::json& j) {
  SelectionResult r;
  r.method = j.at("method").get<std::string>();
  r.params = j.at("params");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.selected = j.at("selected").get<std::vector<std::string>>();
  for (const auto& [name, v] : j.at("scores").items()) r.scores[name] = v.get<double>();
  if (j.contains("confirmed")) r.confirmed = j.at("confirmed").get<std::vector<std::string>>();
  if (j.contains("rejected")) r.rejected = j.at("rejected").get<std::vector<std::string>>();
  if (j.contains("tentative")) r.tentative = j.at("tentative").get<std::vector<std::string>>();
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

// ---- information gain ----

double information_gain(const std::vector<double>& x, const std::vector<int>& y, int bins) {
  if (x.size() != y.size()) throw DataError("column and labels differ in length");
  const std::size_t n = x.size();
  if (n == 0) throw DataError("empty column");
  int b = std::min<int>(bins, static_cast<int>(n));
  // equal-frequency bin of each sorted position; equal values share the bin
  // of their first occurrence
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t c) { return x[a] < x[c]; });
  std::vector<int> bin(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    int id = static_cast<int>(i * static_cast<std::size_t>(b) / n);
    for (std::size_t k = i; k <= j; ++k) bin[order[k]] = id;
    i = j + 1;
  }
  std::vector<int> y_counts(2, 0);
  for (int v : y) y_counts[v]++;
  double hy = entropy_of_counts(y_counts, static_cast<int>(n));
  double conditional = 0;
  for (int id = 0; id < b; ++id) {
    std::vector<int> c(2, 0);
    int total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (bin[k] != id) continue;
      c[y[k]]++;
      ++total;
    }
    if (total == 0) continue;
    conditional += static_cast<double>(total) / n * entropy_of_counts(c, total);
  }
  return hy - conditional;
}

SelectionResult ig_select(const Dataset& d, int k, int bins, bool allow_any_k) {
  check_matrix(d);
  check_k(k, d.feature_names.size(), allow_any_k);
  std::vector<double> score(d.feature_names.size());
  for (std::size_t f = 0; f < d.feature_names.size(); ++f) {
    std::vector<double> col(d.x.size());
    for (std::size_t r = 0; r < d.x.size(); ++r) col[r] = d.x[r][f];
    score[f] = information_gain(col, d.y, bins);
  }
  SelectionResult out;
  out.method = "ig";
  out.params = {{"k", k}, {"bins", bins}};
  std::vector<std::size_t> order = rank_features(d.feature_names, score);
  for (int i = 0; i < k; ++i) out.selected.push_back(d.feature_names[order[i]]);
  for (std::size_t f = 0; f < score.size(); ++f) out.scores[d.feature_names[f]] = score[f];
  return out;
}

// ---- l1 logistic ----

double l1_logistic_lambda_max(const std::vector<std::vector<double>>& x,
                              const std::vector<int>& y) {
  const std::size_t n = x.size();
  double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double best = 0;
  for (std::size_t j = 0; j < x.front().size(); ++j) {
    double dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += x[i][j] * (y[i] - ybar);
    best = std::max(best, std::abs(dot) / static_cast<double>(n));
  }
  return best;
}

std::vector<double> l1_logistic(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, double lambda) {
  const std::size_t n = x.size(), d = x.front().size();
  std::vector<double> beta(d, 0.0);
  double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  ybar = std::clamp(ybar, 1e-9, 1.0 - 1e-9);
  double b = std::log(ybar / (1 - ybar));

  std::vector<double> eta(n), w(n), z(n), r(n);
  auto soft = [](double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
  };
  for (int outer = 0; outer < 40; ++outer) {
    for (std::size_t i = 0; i < n; ++i) {
      double lin = b;
      for (std::size_t j = 0; j < d; ++j)
        if (beta[j] != 0) lin += beta[j] * x[i][j];
      eta[i] = lin;
      double p = 1.0 / (1.0 + std::exp(-lin));
      w[i] = std::max(p * (1 - p), 1e-5);
      z[i] = lin + (y[i] - p) / w[i];
      r[i] = z[i] - lin;  // residual of the working response
    }
    double max_step = 0;
    for (int sweep = 0; sweep < 60; ++sweep) {
      double sweep_max = 0;
      for (std::size_t j = 0; j < d; ++j) {
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) {
          num += w[i] * x[i][j] * (r[i] + x[i][j] * beta[j]);
          den += w[i] * x[i][j] * x[i][j];
        }
        if (den <= 0) continue;
        double nj = soft(num / n, lambda) / (den / n);
        double delta = nj - beta[j];
        if (delta != 0) {
          beta[j] = nj;
          for (std::size_t i = 0; i < n; ++i) r[i] -= x[i][j] * delta;
          sweep_max = std::max(sweep_max, std::abs(delta));
        }
      }
      // intercept (unpenalized)
      double num = 0, den = 0;
      for (std::size_t i = 0; i < n; ++i) {
        num += w[i] * (r[i] + b);
        den += w[i];
      }
      double nb = num / den;
      double delta = nb - b;
      if (delta != 0) {
        b = nb;
        for (std::size_t i = 0; i < n; ++i) r[i] -= delta;
        sweep_max = std::max(sweep_max, std::abs(delta));
      }
      max_step = std::max(max_step, sweep_max);
      if (sweep_max < 1e-8) break;
    }
    if (max_step < 1e-7) break;
  }
  beta.push_back(b);
  return beta;
}

// ---- stability selection ----

std::vector<double> stability_frequencies(const Dataset& d, int n_boot, std::uint64_t seed,
                                          double lambda_ratio) {
  check_matrix(d);
  if (n_boot < 1) throw ConfigError("n_boot must be >= 1");
  if (lambda_ratio <= 0 || lambda_ratio > 1)
    throw ConfigError("lambda_ratio must be in (0, 1]");
  const std::size_t n = d.x.size(), p = d.feature_names.size();
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (d.y[i] ? pos : neg).push_back(i);

  std::vector<int> marks(p, 0);
  for (int boot = 0; boot < n_boot; ++boot) {
    std::vector<std::size_t> draw;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      Rng rng(derive_seed(seed, "stability_boot",
                          static_cast<std::uint64_t>(boot) * 1000 + attempt));
      std::size_t k_pos = pos.size() / 2, k_neg = neg.size() / 2;
      if (k_pos == 0 || k_neg == 0) continue;
      draw.clear();
      std::vector<std::size_t> ps = pos, ns = neg;
      rng.shuffle(ps);
      rng.shuffle(ns);
      draw.insert(draw.end(), ps.begin(), ps.begin() + k_pos);
      draw.insert(draw.end(), ns.begin(), ns.begin() + k_neg);
      ok = true;
    }
    if (!ok) throw DegenerateLabels("stability subsample cannot contain both classes");
    std::sort(draw.begin(), draw.end());
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    xs.reserve(draw.size());
    for (std::size_t i : draw) {
      xs.push_back(d.x[i]);
      ys.push_back(d.y[i]);
    }
    double lmax = l1_logistic_lambda_max(xs, ys);
    if (lmax <= 0) continue;  // constant columns only; nothing can be marked
    std::vector<double> beta = l1_logistic(xs, ys, lambda_ratio * lmax);
    for (std::size_t j = 0; j < p; ++j)
      if (std::abs(beta[j]) > 1e-6) marks[j]++;
  }
  std::vector<double> freq(p);
  for (std::size_t j = 0; j < p; ++j) freq[j] = static_cast<double>(marks[j]) / n_boot;
  return freq;
}

SelectionResult stability_select(const Dataset& d, int n_boot, double threshold,
                                 std::uint64_t seed, double lambda_ratio) {
  if (threshold < 0.5 || threshold > 1.0)
    throw ConfigError("stability threshold must be in [0.5, 1.0]");
  std::vector<double> freq = stability_frequencies(d, n_boot, seed, lambda_ratio);
  SelectionResult out;
  out.method = "stable";
  out.params = {{"n_boot", n_boot}, {"threshold", threshold}, {"lambda_ratio", lambda_ratio}};
  out.seed = seed;
  std::vector<std::size_t> order = rank_features(d.feature_names, freq);
  for (std::size_t idx : order)
    if (freq[idx] >= threshold) out.selected.push_back(d.feature_names[idx]);
  for (std::size_t j = 0; j < freq.size(); ++j) out.scores[d.feature_names[j]] = freq[j];
  return out;
}

// ---- random-forest embedded ----

SelectionResult rf_embedded_select(const Dataset& d, int k, const Hyper& forest,
                                   std::uint64_t seed, bool allow_any_k) {
  check_matrix(d);
  check_k(k, d.feature_names.size(), allow_any_k);
  RandomForestModel rf(forest);
  rf.fit(d, derive_seed(seed, "rf_embedded", 0));
  std::vector<double> imp = rf.importances();
  SelectionResult out;
  out.method = "rf";
  out.params = {{"k", k}};
  for (const auto& [name, v] : forest) out.params[name] = v;
  out.seed = seed;
  std::vector<std::size_t> order = rank_features(d.feature_names, imp);
  for (int i = 0; i < k; ++i) out.selected.push_back(d.feature_names[order[i]]);
  for (std::size_t f = 0; f < imp.size(); ++f) out.scores[d.feature_names[f]] = imp[f];
  return out;
}

// ---- boruta ----

namespace {

// P(Bin(n, 1/2) >= k) and P(<= k)
double binom_tail_ge(int n, int k) {
  double pmf = std::pow(0.5, n);
  double total = 0;
  for (int j = 0; j <= n; ++j) {
    if (j >= k) total += pmf;
    pmf *= static_cast<double>(n - j) / (j + 1);
  }
  return std::min(total, 1.0);
}

double binom_tail_le(int n, int k) {
  double pmf = std::pow(0.5, n);
  double total = 0;
  for (int j = 0; j <= k && j <= n; ++j) {
    total += pmf;
    pmf *= static_cast<double>(n - j) / (j + 1);
  }
  return std::min(total, 1.0);
}

}  // namespace

SelectionResult boruta_select(const Dataset& d, int max_depth, int max_iter, double alpha,
                              std::uint64_t seed, bool depth_override, const Hyper& forest) {
  check_matrix(d);
  SelectionResult out;
  out.method = "boruta";
  out.seed = seed;
  if (max_depth < 3 || max_depth > 7) {
    if (!depth_override) throw DepthOutOfRange(max_depth);
    out.warnings.push_back("forest depth " + std::to_string(max_depth) +
                           " outside [3, 7], override in effect");
  }
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (alpha <= 0 || alpha >= 1) throw ConfigError("alpha must be in (0, 1)");
  const std::size_t n = d.x.size(), p = d.feature_names.size();
  out.params = {{"max_depth", max_depth}, {"max_iter", max_iter}, {"alpha", alpha}};

  std::vector<int> status(p, 0);  // 0 tentative, 1 confirmed, -1 rejected
  std::vector<int> hits(p, 0);
  Hyper rf_params = forest;
  rf_params["max_depth"] = max_depth;
  // the hit-count test treats iterations as independent Bin(1/2) trials; that
  // only holds when the per-iteration importance noise dominates the spread of
  // the fixed per-column sample associations, so the default forest is kept
  // deliberately small (large forests average the noise away and let one lucky
  // column beat the shadow maximum every iteration)
  if (!rf_params.count("n_trees")) rf_params["n_trees"] = 10;
  if (!rf_params.count("max_features")) rf_params["max_features"] = -1;
  for (const auto& [name, v] : rf_params) out.params[name] = v;

  int iter = 0;
  for (iter = 1; iter <= max_iter; ++iter) {
    bool any_tentative = false;
    for (std::size_t f = 0; f < p; ++f) any_tentative |= status[f] == 0;
    if (!any_tentative) break;

    // every real column followed by a shuffled shadow copy of each; keeping
    // the full shadow pool every iteration keeps the hit null stable even
    // after most features have been decided
    Dataset aug;
    aug.y = d.y;
    aug.x.assign(n, std::vector<double>(2 * p));
    for (std::size_t c = 0; c < p; ++c) {
      for (std::size_t i = 0; i < n; ++i) aug.x[i][c] = d.x[i][c];
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(derive_seed(seed, "boruta_shadow",
                          static_cast<std::uint64_t>(iter) * 100000 + c));
      rng.shuffle(perm);
      for (std::size_t i = 0; i < n; ++i) aug.x[i][p + c] = d.x[perm[i]][c];
    }
    aug.feature_names.resize(2 * p);
    RandomForestModel rf(rf_params);
    rf.fit(aug, derive_seed(seed, "boruta_rf", static_cast<std::uint64_t>(iter)));
    std::vector<double> imp = rf.importances();
    double shadow_max = 0;
    for (std::size_t c = 0; c < p; ++c) shadow_max = std::max(shadow_max, imp[p + c]);
    for (std::size_t c = 0; c < p; ++c)
      if (imp[c] > shadow_max) hits[c]++;

    std::vector<std::size_t> tentative_idx;
    for (std::size_t f = 0; f < p; ++f)
      if (status[f] == 0) tentative_idx.push_back(f);
    const double mt = static_cast<double>(tentative_idx.size());
    // two-step correction: benjamini-hochberg across the tentative features,
    // then a bonferroni correction across iterations (the same feature is
    // tested once per iteration); a decision needs both
    const double iter_bar = alpha / static_cast<double>(iter);
    auto bh_pass = [&](std::vector<std::pair<double, std::size_t>> ps) {
      std::sort(ps.begin(), ps.end());
      std::size_t cut = 0;
      for (std::size_t r = 0; r < ps.size(); ++r)
        if (ps[r].first <= alpha * static_cast<double>(r + 1) / mt) cut = r + 1;
      ps.resize(cut);
      return ps;
    };
    std::vector<std::pair<double, std::size_t>> ups, lows;
    for (std::size_t f : tentative_idx) {
      ups.push_back({binom_tail_ge(iter, hits[f]), f});
      lows.push_back({binom_tail_le(iter, hits[f]), f});
    }
    for (const auto& [pv, f] : bh_pass(ups))
      if (pv <= iter_bar) status[f] = 1;
    for (const auto& [pv, f] : bh_pass(lows))
      if (pv <= iter_bar && status[f] == 0) status[f] = -1;
  }

  std::vector<double> hit_fraction(p);
  int trials = std::max(1, std::min(iter, max_iter));
  for (std::size_t f = 0; f < p; ++f)
    hit_fraction[f] = static_cast<double>(hits[f]) / trials;
  std::vector<std::size_t> order = rank_features(d.feature_names, hit_fraction);
  for (std::size_t f : order) {
    if (status[f] == 1) {
      out.confirmed.push_back(d.feature_names[f]);
      out.selected.push_back(d.feature_names[f]);
    }
  }
  for (std::size_t f : order) {
    if (status[f] == -1) out.rejected.push_back(d.feature_names[f]);
    if (status[f] == 0) out.tentative.push_back(d.feature_names[f]);
  }
  for (std::size_t f = 0; f < p; ++f) out.scores[d.feature_names[f]] = hit_fraction[f];
  return out;
}

}  // namespace pheno
