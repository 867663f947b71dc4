#include "pheno/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pheno/errors.hpp"

namespace pheno {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr const char* kDayTypes[2] = {"Weekday", "Weekend"};
constexpr const char* kMetrics[5] = {"Duration", "Launch", "Num_of_Apps", "Entropy",
                                     "Ratio_of_Hamming"};
constexpr const char* kStats[3] = {"24_Hour", "6_Hour_Mean", "6_Hour_SD"};
constexpr const char* kSessionMetrics[4] = {"Total_Session_Num", "Micro_Session_Num",
                                            "Review_Session_Num", "Engage_Session_Num"};

std::pair<double, double> pop_stats(const std::array<double, 4>& v) {
  double mean = (v[0] + v[1] + v[2] + v[3]) / 4.0;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / 4.0)};
}

int symdiff_size(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  int d = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++d;
      ++i;
    } else {
      ++d;
      ++j;
    }
  }
  return d + static_cast<int>((a.size() - i) + (b.size() - j));
}

}  // namespace

const char* to_string(DiurnalBin bin) {
  switch (bin) {
    case DiurnalBin::Night: return "Night";
    case DiurnalBin::Morning: return "Morning";
    case DiurnalBin::Afternoon: return "Afternoon";
    case DiurnalBin::Evening: return "Evening";
  }
  return "?";
}

std::int64_t local_day(Ms utc_ms, int offset_min) {
  return floor_div(utc_ms + static_cast<Ms>(offset_min) * 60'000, kMsPerDay);
}

DiurnalBin local_bin(Ms utc_ms, int offset_min) {
  Ms local = utc_ms + static_cast<Ms>(offset_min) * 60'000;
  Ms within = local - floor_div(local, kMsPerDay) * kMsPerDay;
  return static_cast<DiurnalBin>(within / kBinMs);
}

int weekday_of_day(std::int64_t day) {
  // epoch day 0 was a Thursday; 0 = Monday here
  return static_cast<int>(((day % 7) + 7 + 3) % 7);
}

DiurnalSplit split_diurnal(const UsageInterval& interval) {
  DiurnalSplit out;
  const Ms off = static_cast<Ms>(interval.local_offset_min) * 60'000;
  Ms cur = interval.start_ms + off;
  const Ms end = interval.end_ms + off;
  out.launch_day = floor_div(cur, kMsPerDay);
  out.launch_bin = static_cast<DiurnalBin>((cur - out.launch_day * kMsPerDay) / kBinMs);
  while (cur < end) {
    std::int64_t day = floor_div(cur, kMsPerDay);
    Ms within = cur - day * kMsPerDay;
    Ms bin = within / kBinMs;
    Ms boundary = day * kMsPerDay + (bin + 1) * kBinMs;
    Ms stop = std::min(end, boundary);
    out.pieces.push_back({day, static_cast<DiurnalBin>(bin), stop - cur});
    cur = stop;
  }
  return out;
}

double entropy(std::span<const double> durations, double log_base) {
  if (log_base != 0.0 && (log_base <= 0.0 || log_base == 1.0))
    throw ConfigError("entropy: log base must be positive and != 1");
  double total = 0;
  for (double d : durations) {
    if (d < 0) throw NegativeDuration();
    total += d;
  }
  if (total <= 0) return 0;
  double e = 0;
  for (double d : durations) {
    if (d <= 0) continue;
    double p = d / total;
    e -= p * std::log(p);
  }
  if (log_base != 0.0) e /= std::log(log_base);
  return e;
}

double hamming_ratio(const std::set<std::string>& target_apps,
                     const std::vector<std::set<std::string>>& depressed_refs,
                     const std::vector<std::set<std::string>>& nondepressed_refs,
                     bool smoothed) {
  if (depressed_refs.empty()) throw EmptyReferenceGroup("depressed");
  if (nondepressed_refs.empty()) throw EmptyReferenceGroup("nondepressed");
  auto dist = [&target_apps](const std::set<std::string>& ref) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(target_apps.begin(), target_apps.end(), ref.begin(),
                                  ref.end(), std::back_inserter(diff));
    return static_cast<int>(diff.size());
  };
  int d = std::numeric_limits<int>::max();
  for (const auto& r : depressed_refs) d = std::min(d, dist(r));
  int nd = std::numeric_limits<int>::max();
  for (const auto& r : nondepressed_refs) nd = std::min(nd, dist(r));
  if (smoothed) return (d + 1.0) / (nd + 1.0);
  if (nd == 0) throw DataError("raw hamming ratio undefined: nearest nondepressed distance is 0");
  return static_cast<double>(d) / nd;
}

// ---- FeatureId / FeatureMatrix ----

std::string FeatureId::name() const {
  return day_type + "_" + category + "_" + metric + "_" + stat;
}

std::size_t FeatureMatrix::row_index(const std::string& pid) const {
  auto it = std::find(participants.begin(), participants.end(), pid);
  if (it == participants.end()) throw UnknownParticipant(pid);
  return static_cast<std::size_t>(it - participants.begin());
}

std::size_t FeatureMatrix::col_index(const std::string& name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) throw DataError("unknown feature column: " + name);
  return static_cast<std::size_t>(it - feature_names.begin());
}

std::string sanitize_category(const std::string& category) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : category) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  std::string out;
  for (const auto& t : tokens) {
    std::string low;
    for (char c : t) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (low == "and") continue;
    if (!out.empty()) out.push_back('_');
    out += t;
  }
  if (out.empty()) throw DataError("category name sanitizes to nothing: '" + category + "'");
  return out;
}

// ---- FeatureWorkspace ----

FeatureWorkspace::FeatureWorkspace(const IntervalsByParticipant& intervals,
                                   const AppCatalog& catalog, const CohortManifest& manifest,
                                   WorkspaceOptions options)
    : options_(options), manifest_(manifest) {
  std::set<std::string> ids;
  for (const auto& [pid, _] : manifest.offset_min) ids.insert(pid);
  for (const auto& [pid, _] : intervals) ids.insert(pid);
  participants_.assign(ids.begin(), ids.end());

  // intern packages and map them to category indices
  std::map<std::string, int> pkg_index;
  bool any_unknown = false;
  for (const auto& [pid, list] : intervals) {
    for (const auto& iv : list) {
      if (pkg_index.emplace(iv.package, 0).second && !catalog.has(iv.package))
        any_unknown = true;
    }
  }
  std::vector<std::string> raw_cats = catalog.categories();
  if (any_unknown &&
      std::find(raw_cats.begin(), raw_cats.end(), AppCatalog::kUnknown) == raw_cats.end())
    raw_cats.push_back(AppCatalog::kUnknown);
  std::map<std::string, std::string> sanitized;  // sanitized -> raw
  for (const auto& c : raw_cats) {
    std::string s = sanitize_category(c);
    auto [it, fresh] = sanitized.emplace(s, c);
    if (!fresh && it->second != c)
      throw DataError("category names collide after sanitizing: '" + it->second + "' and '" +
                      c + "'");
  }
  for (const auto& [s, _] : sanitized) categories_.push_back(s);
  std::map<std::string, int> cat_index;
  for (std::size_t i = 0; i < categories_.size(); ++i)
    cat_index[sanitized[categories_[i]]] = static_cast<int>(i);
  smartphone_cat_ = static_cast<int>(categories_.size());
  categories_.push_back(AppCatalog::kSmartphone);

  packages_.resize(pkg_index.size());
  package_cat_.resize(pkg_index.size());
  int next = 0;
  for (auto& [pkg, id] : pkg_index) {
    id = next++;
    packages_[id] = pkg;
    package_cat_[id] = cat_index.at(catalog.lookup(pkg));
  }

  // replace interval packages with interned ids while accumulating
  usage_.resize(participants_.size());
  std::map<std::string, std::size_t> prow;
  for (std::size_t i = 0; i < participants_.size(); ++i) prow[participants_[i]] = i;
  for (const auto& [pid, list] : intervals) {
    Usage& u = usage_[prow.at(pid)];
    for (const auto& iv : list) {
      int id = pkg_index.at(iv.package);
      DiurnalSplit sp = split_diurnal(iv);
      for (const auto& piece : sp.pieces) {
        int dt = manifest_.weekend_days.count(weekday_of_day(piece.day)) ? 1 : 0;
        u.cell[dt][static_cast<int>(piece.bin)].apps[id].duration_ms += piece.duration_ms;
      }
      int ldt = manifest_.weekend_days.count(weekday_of_day(sp.launch_day)) ? 1 : 0;
      u.cell[ldt][static_cast<int>(sp.launch_bin)].apps[id].launches += 1;
    }
    if (!list.empty()) {
      int off = list.front().local_offset_min;
      for (const auto& s : sessionize(list, options_.session_gap_ms)) {
        int dt = manifest_.weekend_days.count(weekday_of_day(local_day(s.start_ms, off))) ? 1 : 0;
        Cell& cell = u.cell[dt][static_cast<int>(local_bin(s.start_ms, off))];
        cell.session_total += 1;
        cell.session_kind[static_cast<int>(s.kind)] += 1;
      }
    }
  }

  build_names();
  build_cached_columns();
  build_hamming_sets();

  // fraction of participants with any use of each category
  for (std::size_t c = 0; c < categories_.size(); ++c) {
    int users = 0;
    for (const auto& u : usage_) {
      bool used = false;
      for (int dt = 0; dt < 2 && !used; ++dt)
        for (int b = 0; b < 4 && !used; ++b)
          for (const auto& [id, _] : u.cell[dt][b].apps)
            if (static_cast<int>(c) == smartphone_cat_ || package_cat_[id] == static_cast<int>(c)) {
              used = true;
              break;
            }
      if (used) ++users;
    }
    category_user_fraction_[categories_[c]] =
        participants_.empty() ? 0.0 : static_cast<double>(users) / participants_.size();
  }
}

void FeatureWorkspace::build_names() {
  for (int dt = 0; dt < 2; ++dt) {
    for (const auto& cat : categories_) {
      for (const auto* metric : kMetrics) {
        for (const auto* stat : kStats) {
          feature_ids_.push_back({kDayTypes[dt], cat, metric, stat});
          feature_names_.push_back(feature_ids_.back().name());
          is_hamming_col_.push_back(std::strcmp(metric, "Ratio_of_Hamming") == 0);
        }
      }
    }
  }
  for (int dt = 0; dt < 2; ++dt) {
    for (const auto* metric : kSessionMetrics) {
      for (const auto* stat : kStats) {
        feature_ids_.push_back({kDayTypes[dt], AppCatalog::kSmartphone, metric, stat});
        feature_names_.push_back(feature_ids_.back().name());
        is_hamming_col_.push_back(false);
      }
    }
  }
}

void FeatureWorkspace::build_cached_columns() {
  const std::size_t ncat = categories_.size();
  // per-category durations/launches/app counts for one cell or one merged day
  struct CatAcc {
    std::vector<double> durs;
    double dur_ms = 0;
    double launches = 0;
    int apps = 0;
  };
  auto accumulate = [&](const std::map<int, AppUse>& apps) {
    std::vector<CatAcc> acc(ncat);
    for (const auto& [id, use] : apps) {
      for (int c : {package_cat_[id], smartphone_cat_}) {
        CatAcc& a = acc[c];
        a.durs.push_back(static_cast<double>(use.duration_ms));
        a.dur_ms += static_cast<double>(use.duration_ms);
        a.launches += use.launches;
        a.apps += 1;
      }
    }
    return acc;
  };
  auto metric_of = [](const CatAcc& a, int metric) {
    switch (metric) {
      case 0: return a.dur_ms / 1000.0;  // seconds
      case 1: return a.launches;
      case 2: return static_cast<double>(a.apps);
      case 3: return entropy(a.durs);
    }
    return 0.0;
  };

  cached_.assign(participants_.size(), std::vector<double>(feature_names_.size(), 0.0));
  for (std::size_t p = 0; p < participants_.size(); ++p) {
    const Usage& u = usage_[p];
    std::vector<double>& row = cached_[p];
    std::size_t col = 0;
    for (int dt = 0; dt < 2; ++dt) {
      std::map<int, AppUse> merged;
      for (int b = 0; b < 4; ++b)
        for (const auto& [id, use] : u.cell[dt][b].apps) {
          merged[id].duration_ms += use.duration_ms;
          merged[id].launches += use.launches;
        }
      std::vector<CatAcc> day = accumulate(merged);
      std::array<std::vector<CatAcc>, 4> bins;
      for (int b = 0; b < 4; ++b) bins[b] = accumulate(u.cell[dt][b].apps);
      for (std::size_t c = 0; c < ncat; ++c) {
        for (int metric = 0; metric < 5; ++metric) {
          if (metric == 4) {  // hamming, filled at assemble time
            col += 3;
            continue;
          }
          std::array<double, 4> v;
          for (int b = 0; b < 4; ++b) v[b] = metric_of(bins[b][c], metric);
          auto [mean, sd] = pop_stats(v);
          row[col++] = metric_of(day[c], metric);
          row[col++] = mean;
          row[col++] = sd;
        }
      }
    }
    for (int dt = 0; dt < 2; ++dt) {
      for (int metric = 0; metric < 4; ++metric) {
        std::array<double, 4> v;
        for (int b = 0; b < 4; ++b) {
          const Cell& cell = u.cell[dt][b];
          v[b] = metric == 0 ? cell.session_total : cell.session_kind[metric - 1];
        }
        auto [mean, sd] = pop_stats(v);
        row[col++] = v[0] + v[1] + v[2] + v[3];
        row[col++] = mean;
        row[col++] = sd;
      }
    }
  }
}

void FeatureWorkspace::build_hamming_sets() {
  const std::size_t ncat = categories_.size();
  const std::size_t np = participants_.size();
  sets_.assign(np, std::vector<std::vector<std::vector<std::vector<int>>>>(
                       2, std::vector<std::vector<std::vector<int>>>(
                              5, std::vector<std::vector<int>>(ncat))));
  for (std::size_t p = 0; p < np; ++p) {
    for (int dt = 0; dt < 2; ++dt) {
      auto& scopes = sets_[p][dt];
      for (int b = 0; b < 4; ++b) {
        for (const auto& [id, _] : usage_[p].cell[dt][b].apps) {
          scopes[b][package_cat_[id]].push_back(id);
          scopes[b][smartphone_cat_].push_back(id);
          for (int c : {package_cat_[id], smartphone_cat_}) {
            auto& day = scopes[4][c];
            if (day.empty() || day.back() != id) {
              auto it = std::lower_bound(day.begin(), day.end(), id);
              if (it == day.end() || *it != id) day.insert(it, id);
            }
          }
        }
      }
    }
  }
  dist_.assign(2 * 5 * ncat, std::vector<std::uint16_t>(np * np, 0));
  for (int dt = 0; dt < 2; ++dt) {
    for (int scope = 0; scope < 5; ++scope) {
      for (std::size_t c = 0; c < ncat; ++c) {
        std::vector<std::uint16_t>& table = dist_[dist_group(dt, scope, c)];
        for (std::size_t p = 0; p < np; ++p) {
          for (std::size_t q = p + 1; q < np; ++q) {
            int s = symdiff_size(sets_[p][dt][scope][c], sets_[q][dt][scope][c]);
            table[p * np + q] = static_cast<std::uint16_t>(s);
            table[q * np + p] = static_cast<std::uint16_t>(s);
          }
        }
      }
    }
  }
}

FeatureMatrix FeatureWorkspace::assemble(const std::map<std::string, bool>& reference_class) const {
  FeatureMatrix m;
  m.participants = participants_;
  m.feature_names = feature_names_;
  m.feature_ids = feature_ids_;
  m.values.resize(participants_.size() * feature_names_.size());
  for (std::size_t p = 0; p < participants_.size(); ++p)
    std::copy(cached_[p].begin(), cached_[p].end(), m.values.begin() + p * feature_names_.size());

  std::map<std::string, std::size_t> prow;
  for (std::size_t i = 0; i < participants_.size(); ++i) prow[participants_[i]] = i;
  std::vector<std::size_t> dep, nondep;
  for (const auto& [pid, is_dep] : reference_class) {
    auto it = prow.find(pid);
    if (it == prow.end()) throw UnknownParticipant(pid);
    (is_dep ? dep : nondep).push_back(it->second);
  }

  const std::size_t ncat = categories_.size();
  const std::size_t np = participants_.size();
  // column layout within one daytype block: ncat categories x 5 metrics x 3 stats
  auto hcol = [&](int dt, std::size_t c) { return (dt * ncat + c) * 15 + 4 * 3; };
  for (std::size_t p = 0; p < np; ++p) {
    for (int dt = 0; dt < 2; ++dt) {
      for (std::size_t c = 0; c < ncat; ++c) {
        double ratio[5];
        for (int scope = 0; scope < 5; ++scope) {
          const std::vector<std::uint16_t>& table = dist_[dist_group(dt, scope, c)];
          int d = -1, nd = -1;
          for (std::size_t q : dep) {
            if (q == p) continue;
            int s = table[p * np + q];
            if (d < 0 || s < d) d = s;
          }
          for (std::size_t q : nondep) {
            if (q == p) continue;
            int s = table[p * np + q];
            if (nd < 0 || s < nd) nd = s;
          }
          if (d < 0) throw EmptyReferenceGroup("depressed");
          if (nd < 0) throw EmptyReferenceGroup("nondepressed");
          if (options_.smoothed_hamming) {
            ratio[scope] = (d + 1.0) / (nd + 1.0);
          } else {
            if (nd == 0)
              throw DataError("raw hamming ratio undefined: nearest nondepressed distance is 0");
            ratio[scope] = static_cast<double>(d) / nd;
          }
        }
        auto [mean, sd] = pop_stats({ratio[0], ratio[1], ratio[2], ratio[3]});
        std::size_t base = hcol(dt, c);
        m.at(p, base + 0) = ratio[4];
        m.at(p, base + 1) = mean;
        m.at(p, base + 2) = sd;
      }
    }
  }
  return m;
}

// ---- prevalence filter / scaling ----

FeatureMatrix prevalence_filter(const FeatureMatrix& matrix, double min_user_fraction) {
  if (matrix.feature_ids.size() != matrix.feature_names.size())
    throw DataError("prevalence filter needs matrix feature metadata");
  // a participant uses a category when its total duration over both day
  // types is positive
  std::map<std::string, double> fraction;
  std::set<std::string> cats;
  for (const auto& id : matrix.feature_ids) cats.insert(id.category);
  for (const auto& cat : cats) {
    std::vector<std::size_t> dur_cols;
    for (std::size_t c = 0; c < matrix.feature_ids.size(); ++c) {
      const FeatureId& id = matrix.feature_ids[c];
      if (id.category == cat && id.metric == "Duration" && id.stat == "24_Hour")
        dur_cols.push_back(c);
    }
    int users = 0;
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
      double total = 0;
      for (std::size_t c : dur_cols) total += matrix.at(r, c);
      if (total > 0) ++users;
    }
    fraction[cat] =
        matrix.n_rows() == 0 ? 0.0 : static_cast<double>(users) / matrix.n_rows();
  }

  FeatureMatrix out;
  out.participants = matrix.participants;
  out.dropped = matrix.dropped;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
    const FeatureId& id = matrix.feature_ids[c];
    double f = fraction.at(id.category);
    if (f < min_user_fraction) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.9g", f);
      out.dropped.push_back({matrix.feature_names[c],
                             "category " + id.category + " used by " + buf +
                                 " of participants, below " + format_value(min_user_fraction)});
    } else {
      keep.push_back(c);
      out.feature_names.push_back(matrix.feature_names[c]);
      out.feature_ids.push_back(id);
    }
  }
  out.values.resize(out.n_rows() * keep.size());
  for (std::size_t r = 0; r < matrix.n_rows(); ++r)
    for (std::size_t k = 0; k < keep.size(); ++k)
      out.values[r * keep.size() + k] = matrix.at(r, keep[k]);
  return out;
}

ScalingParams fit_scaler(const FeatureMatrix& matrix, const std::vector<std::string>& train_ids) {
  ScalingParams sp;
  sp.train_ids = train_ids;
  sp.feature_names = matrix.feature_names;
  std::vector<std::size_t> rows;
  for (const auto& pid : train_ids) rows.push_back(matrix.row_index(pid));
  if (rows.empty()) throw DataError("scaler needs at least one training participant");
  sp.mean.resize(matrix.n_cols());
  sp.sd.resize(matrix.n_cols());
  for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
    double mean = 0;
    for (std::size_t r : rows) mean += matrix.at(r, c);
    mean /= static_cast<double>(rows.size());
    double ss = 0;
    for (std::size_t r : rows) {
      double d = matrix.at(r, c) - mean;
      ss += d * d;
    }
    sp.mean[c] = mean;
    sp.sd[c] = std::sqrt(ss / static_cast<double>(rows.size()));
  }
  return sp;
}

FeatureMatrix apply_scaler(const FeatureMatrix& matrix, const ScalingParams& params) {
  if (params.feature_names != matrix.feature_names)
    throw InconsistentContract("scaler was fit on different feature columns");
  FeatureMatrix out = matrix;
  for (std::size_t r = 0; r < out.n_rows(); ++r)
    for (std::size_t c = 0; c < out.n_cols(); ++c) {
      double sd = params.sd[c];
      out.at(r, c) = sd == 0.0 ? 0.0 : (matrix.at(r, c) - params.mean[c]) / sd;
    }
  out.scaling = params;
  return out;
}

// ---- serialization ----

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  if (std::strcmp(buf, "-0") == 0) return "0";
  return buf;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << "participant_id";
  for (const auto& name : matrix.feature_names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
    out << matrix.participants[r];
    for (std::size_t c = 0; c < matrix.n_cols(); ++c) out << ',' << format_value(matrix.at(r, c));
    out << '\n';
  }
}

FeatureMatrix read_matrix_csv(std::istream& in) {
  FeatureMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty feature matrix file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream header(line);
  std::string tok;
  bool first = true;
  while (std::getline(header, tok, ',')) {
    if (first) {
      if (tok != "participant_id")
        throw DataError("feature matrix header must start with participant_id");
      first = false;
    } else {
      m.feature_names.push_back(tok);
    }
  }
  if (first) throw DataError("feature matrix header must start with participant_id");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    if (!std::getline(row, tok, ',')) throw DataError("bad feature matrix row " + std::to_string(lineno));
    m.participants.push_back(tok);
    std::size_t count = 0;
    while (std::getline(row, tok, ',')) {
      char* endp = nullptr;
      double v = std::strtod(tok.c_str(), &endp);
      if (endp == tok.c_str() || *endp != '\0')
        throw DataError("bad numeric value in feature matrix row " + std::to_string(lineno));
      m.values.push_back(v);
      ++count;
    }
    if (count != m.feature_names.size())
      throw DataError("feature matrix row " + std::to_string(lineno) + " has " +
                      std::to_string(count) + " values, expected " +
                      std::to_string(m.feature_names.size()));
  }
  return m;
}

void write_matrix_meta(std::ostream& out, const FeatureMatrix& matrix) {
  nlohmann::ordered_json j;
  j["n_rows"] = matrix.n_rows();
  j["n_cols"] = matrix.n_cols();
  j["feature_names"] = matrix.feature_names;
  j["dropped"] = nlohmann::ordered_json::array();
  for (const auto& d : matrix.dropped)
    j["dropped"].push_back({{"name", d.name}, {"reason", d.reason}});
  if (matrix.scaling) {
    j["scaling"] = {{"train_ids", matrix.scaling->train_ids},
                    {"mean", matrix.scaling->mean},
                    {"sd", matrix.scaling->sd}};
  } else {
    j["scaling"] = nullptr;
  }
  out << j.dump(2) << '\n';
}

}  // namespace pheno
