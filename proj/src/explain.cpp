#include "pheno/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "pheno/errors.hpp"

namespace pheno {

nlohmann::ordered_json ShapExplanation::to_json() const {
  nlohmann::ordered_json j;
  j["participant_id"] = participant_id;
  j["base_value"] = base_value;
  j["fx"] = fx;
  j["feature_names"] = feature_names;
  j["x"] = x;
  j["phi"] = phi;
  return j;
}

ShapExplanation exact_shapley(const Model& model, const std::vector<std::string>& feature_names,
                              const std::vector<double>& x,
                              const std::vector<std::vector<double>>& background, int d_max,
                              const std::string& participant_id) {
  const int d = static_cast<int>(x.size());
  if (d_max > 25) throw ConfigError("d_max above 25 is not enumerable in reasonable time");
  if (d > d_max) throw TooManyFeatures(d, d_max);
  if (d == 0) throw DataError("cannot explain an empty feature row");
  if (background.empty()) throw DataError("background must contain at least one row");
  if (feature_names.size() != x.size())
    throw InconsistentContract("feature names and row length differ");
  for (const auto& b : background)
    if (b.size() != x.size())
      throw InconsistentContract("background row width differs from the explained row");

  const std::size_t n_masks = std::size_t{1} << d;
  std::vector<double> v(n_masks, 0.0);
  const std::size_t chunk = std::min<std::size_t>(n_masks, 1 << 14);
  std::vector<std::vector<double>> rows(chunk, std::vector<double>(d));
  for (const auto& b : background) {
    for (std::size_t start = 0; start < n_masks; start += chunk) {
      std::size_t count = std::min(chunk, n_masks - start);
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t mask = start + i;
        for (int j = 0; j < d; ++j)
          rows[i][j] = (mask >> j) & 1 ? x[j] : b[j];
      }
      rows.resize(count);
      std::vector<double> p = model.predict_proba(rows);
      rows.resize(chunk, std::vector<double>(d));
      for (std::size_t i = 0; i < count; ++i) v[start + i] += p[i];
    }
  }
  for (double& val : v) val /= static_cast<double>(background.size());

  // w[s] = s!(d-1-s)!/d! = 1 / (d * C(d-1, s))
  std::vector<double> binom(d, 1.0);
  for (int s = 1; s < d; ++s)
    binom[s] = binom[s - 1] * static_cast<double>(d - s) / static_cast<double>(s);
  std::vector<double> w(d);
  for (int s = 0; s < d; ++s) w[s] = 1.0 / (static_cast<double>(d) * binom[s]);

  ShapExplanation out;
  out.participant_id = participant_id;
  out.feature_names = feature_names;
  out.x = x;
  out.phi.assign(d, 0.0);
  for (int f = 0; f < d; ++f) {
    const std::size_t bit = std::size_t{1} << f;
    double phi = 0;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      phi += w[std::popcount(mask)] * (v[mask | bit] - v[mask]);
    }
    out.phi[f] = phi;
  }
  out.base_value = v[0];
  out.fx = v[n_masks - 1];
  return out;
}

std::vector<SummaryFeature> summarize_explanations(const std::vector<ShapExplanation>& all) {
  if (all.empty()) throw DataError("no explanations to summarize");
  // contracts may differ across explanations (per-fold selection); aggregate
  // by name, treating a feature absent from an explanation as contributing 0
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  for (const auto& e : all) {
    if (e.feature_names.size() != e.x.size() || e.feature_names.size() != e.phi.size())
      throw InconsistentContract("explanation arrays have mismatched lengths");
    for (const auto& n : e.feature_names)
      if (index.emplace(n, names.size()).second) names.push_back(n);
  }

  std::vector<SummaryFeature> out(names.size());
  for (std::size_t f = 0; f < names.size(); ++f) out[f].name = names[f];
  for (const auto& e : all) {
    for (std::size_t f = 0; f < e.feature_names.size(); ++f) {
      SummaryFeature& s = out[index[e.feature_names[f]]];
      s.values.push_back(e.x[f]);
      s.phis.push_back(e.phi[f]);
      s.mean_abs_phi += std::abs(e.phi[f]);
    }
  }
  for (auto& s : out) s.mean_abs_phi /= static_cast<double>(all.size());
  std::sort(out.begin(), out.end(), [](const SummaryFeature& a, const SummaryFeature& b) {
    if (a.mean_abs_phi != b.mean_abs_phi) return a.mean_abs_phi > b.mean_abs_phi;
    return a.name < b.name;
  });
  return out;
}

nlohmann::ordered_json summary_to_json(const std::vector<SummaryFeature>& features,
                                       const std::vector<std::string>& participant_ids) {
  nlohmann::ordered_json j;
  j["participants"] = participant_ids;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& f : features) {
    nlohmann::ordered_json r;
    r["name"] = f.name;
    r["mean_abs_phi"] = f.mean_abs_phi;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < f.values.size(); ++i)
      pts.push_back({f.values[i], f.phis[i]});
    r["points"] = pts;
    rows.push_back(r);
  }
  j["features"] = rows;
  return j;
}

nlohmann::ordered_json force_to_json(const ShapExplanation& e) {
  nlohmann::ordered_json j;
  j["participant_id"] = e.participant_id;
  j["base_value"] = e.base_value;
  j["fx"] = e.fx;
  std::vector<std::size_t> order(e.phi.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&e](std::size_t a, std::size_t b) {
    double aa = std::abs(e.phi[a]), bb = std::abs(e.phi[b]);
    if (aa != bb) return aa > bb;
    return e.feature_names[a] < e.feature_names[b];
  });
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i : order) {
    nlohmann::ordered_json r;
    r["name"] = e.feature_names[i];
    r["value"] = e.x[i];
    r["phi"] = e.phi[i];
    rows.push_back(r);
  }
  j["contributions"] = rows;
  return j;
}

}  // namespace pheno
