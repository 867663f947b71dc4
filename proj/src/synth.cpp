#include "pheno/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pheno/errors.hpp"
#include "pheno/features.hpp"
#include "pheno/rng.hpp"

namespace pheno {

namespace {

struct CategorySpec {
  const char* name;
  int weekday_weight;
  int weekend_weight;
};

// pick weights loosely shaped like app-store usage shares; every category has
// weight >= 1 so a week of data touches all of them
constexpr CategorySpec kCategorySpecs[] = {
    {"Art and Design", 1, 1},
    {"Auto and Vehicles", 1, 1},
    {"Beauty", 1, 1},
    {"Books", 2, 2},
    {"Browser", 11, 10},
    {"Business", 2, 1},
    {"Communication", 16, 14},
    {"Dating", 1, 1},
    {"Education", 7, 2},
    {"Entertainment", 8, 9},
    {"Finance", 2, 1},
    {"Food and Drink", 2, 2},
    {"Games", 6, 8},
    {"Health and Fitness", 2, 2},
    {"Lifestyle", 1, 1},
    {"Maps", 2, 2},
    {"Medical", 1, 1},
    {"Music and Audio", 4, 4},
    {"News", 4, 3},
    {"Personalization", 1, 1},
    {"Photo and Video", 6, 14},
    {"Productivity", 5, 2},
    {"Shopping", 3, 3},
    {"Social", 12, 12},
    {"Sports", 2, 2},
    {"Tools", 7, 6},
    {"Weather", 2, 1},
};
constexpr int kNumCats = static_cast<int>(std::size(kCategorySpecs));
constexpr int kCommunication = 6;
constexpr int kEducation = 8;
constexpr int kGames = 12;
constexpr int kSocial = 23;
constexpr int kGamesBaseWeight = 8;  // weekend weight of the games category

// class-dependent generation switches compiled from the effect map
struct EffectPlan {
  long edu_scale_mille = 1000;  // positive-class weekday education durations
  int comm_rotate = 0;          // +1: positives rotate the heavy pair, -1: negatives
  int social_rotate = 0;
  int games_split = 0;          // weekend games weight split (0 = off)
};

EffectPlan compile_effects(const std::map<std::string, double>& effects) {
  EffectPlan plan;
  for (const auto& [key, value] : effects) {
    if (key == "weekday_education_duration") {
      plan.edu_scale_mille =
          std::clamp<long>(1000 + std::lround(1000.0 * value), 50, 4000);
    } else if (key == "weekday_communication_entropy") {
      plan.comm_rotate = value > 0 ? 1 : (value < 0 ? -1 : 0);
    } else if (key == "weekday_social_entropy") {
      plan.social_rotate = value > 0 ? 1 : (value < 0 ? -1 : 0);
    } else if (key == "weekend_games_launch_sd") {
      plan.games_split = static_cast<int>(
          std::clamp<long>(std::lround(std::fabs(value) * 5.0), 0, kGamesBaseWeight - 1));
    } else {
      throw ConfigError("unknown effect: " + key);
    }
  }
  return plan;
}

std::string lower_snake(const std::string& category) {
  std::string s = sanitize_category(category);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Ms draw_duration(Rng& rng) {
  const auto r = rng.below(100);
  if (r < 30) return 2000 + static_cast<Ms>(rng.below(13001));   // flick
  if (r < 70) return 15001 + static_cast<Ms>(rng.below(45000));  // check
  return 60001 + static_cast<Ms>(rng.below(120000));             // dwell
}

Ms draw_gap(Rng& rng) {
  const auto r = rng.below(100);
  if (r < 30) return 3000 + static_cast<Ms>(rng.below(38001));  // same burst
  return 50000 + static_cast<Ms>(rng.below(90001));
}

std::vector<int> cumulative(const std::array<int, kNumCats>& weights) {
  std::vector<int> cum(kNumCats);
  int total = 0;
  for (int c = 0; c < kNumCats; ++c) {
    total += weights[c];
    cum[c] = total;
  }
  return cum;
}

int pick_category(Rng& rng, const std::vector<int>& cum) {
  const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(cum.back())));
  return static_cast<int>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
}

void validate(const SynthConfig& cfg) {
  if (cfg.n < 25) throw ConfigError("cohort size must be at least 25");
  if (!(cfg.balance > 0.0 && cfg.balance < 1.0))
    throw ConfigError("balance must lie strictly between 0 and 1");
  const long n_pos = std::lround(cfg.n * cfg.balance);
  if (n_pos < 1 || n_pos > cfg.n - 1)
    throw ConfigError("balance leaves one class empty");
  if (cfg.mode != "planted" && cfg.mode != "null")
    throw ConfigError("mode must be planted or null");
  if (cfg.mode == "null" && !cfg.effects.empty())
    throw ConfigError("effects cannot be combined with null mode");
  if (cfg.events_target < 560 || cfg.events_target > 200000)
    throw ConfigError("events_target outside [560, 200000]");
  if (cfg.apps_per_category < 4 || cfg.apps_per_category > 64)
    throw ConfigError("apps_per_category outside [4, 64]");
  if (cfg.offset_min < -720 || cfg.offset_min > 840)
    throw ConfigError("offset_min outside [-720, 840]");
  if (cfg.weekend_days.empty() || cfg.weekend_days.size() >= 7)
    throw ConfigError("weekend_days must be a non-empty strict subset of the week");
  for (int d : cfg.weekend_days)
    if (d < 0 || d > 6) throw ConfigError("weekend day outside 0..6");
  if (cfg.window_end_ms <= kWindowMs)
    throw ConfigError("window_end_ms must leave room for a full window");
}

}  // namespace

const std::vector<std::string>& synth_categories() {
  static const std::vector<std::string> cats = [] {
    std::vector<std::string> v;
    for (const auto& spec : kCategorySpecs) v.emplace_back(spec.name);
    return v;
  }();
  return cats;
}

std::map<std::string, double> default_effects() {
  return {
      {"weekday_education_duration", -0.45},
      {"weekday_communication_entropy", 0.5},
      {"weekday_social_entropy", -0.5},
      {"weekend_games_launch_sd", 1.0},
  };
}

std::vector<std::string> planted_feature_names(const SynthConfig& config) {
  if (config.mode != "planted") return {};
  const auto effects = config.effects.empty() ? default_effects() : config.effects;
  std::vector<std::string> names;
  for (const auto& [key, value] : effects) {
    if (value == 0.0) continue;
    if (key == "weekday_education_duration")
      names.push_back("Weekday_Education_Duration_24_Hour");
    else if (key == "weekday_communication_entropy")
      names.push_back("Weekday_Communication_Entropy_24_Hour");
    else if (key == "weekday_social_entropy")
      names.push_back("Weekday_Social_Entropy_24_Hour");
    else if (key == "weekend_games_launch_sd")
      names.push_back("Weekend_Games_Launch_6_Hour_SD");
    else
      throw ConfigError("unknown effect: " + key);
  }
  std::sort(names.begin(), names.end());
  return names;
}

SynthCohort synth_generate(const SynthConfig& cfg) {
  validate(cfg);
  const EffectPlan plan =
      cfg.mode == "planted"
          ? compile_effects(cfg.effects.empty() ? default_effects() : cfg.effects)
          : EffectPlan{};

  SynthCohort cohort;
  cohort.manifest.window_end_ms = cfg.window_end_ms;
  cohort.manifest.weekend_days = cfg.weekend_days;

  const int apps = cfg.apps_per_category;
  std::vector<std::vector<std::string>> packages(kNumCats);
  for (int c = 0; c < kNumCats; ++c) {
    const std::string stem = "app." + lower_snake(kCategorySpecs[c].name) + ".";
    for (int i = 0; i < apps; ++i) {
      packages[c].push_back(stem + std::to_string(i));
      cohort.catalog.add(packages[c][i], kCategorySpecs[c].name);
    }
  }

  // labels come from their own stream so null-mode behaviour cannot depend
  // on them even in principle
  const int n_pos = static_cast<int>(std::lround(cfg.n * cfg.balance));
  std::vector<char> positive(cfg.n, 0);
  {
    std::vector<int> order(cfg.n);
    for (int i = 0; i < cfg.n; ++i) order[i] = i;
    Rng label_rng(derive_seed(cfg.seed, "labels", 0));
    label_rng.shuffle(order);
    for (int i = 0; i < n_pos; ++i) positive[order[i]] = 1;
  }

  std::array<int, kNumCats> weekday_w{}, weekend_w{};
  for (int c = 0; c < kNumCats; ++c) {
    weekday_w[c] = kCategorySpecs[c].weekday_weight;
    weekend_w[c] = kCategorySpecs[c].weekend_weight;
  }
  const std::vector<int> cum_weekday = cumulative(weekday_w);
  const std::vector<int> cum_weekend = cumulative(weekend_w);
  std::vector<int> cum_weekend_even = cum_weekend, cum_weekend_odd = cum_weekend;
  if (plan.games_split > 0) {
    auto split = weekend_w;
    split[kGames] = kGamesBaseWeight - plan.games_split;
    cum_weekend_even = cumulative(split);
    split[kGames] = kGamesBaseWeight + plan.games_split;
    cum_weekend_odd = cumulative(split);
  }

  const Ms off_ms = static_cast<Ms>(cfg.offset_min) * 60'000;
  const Ms end_local = cfg.window_end_ms + off_ms;
  const Ms start_local = end_local - kWindowMs;
  const long long first_day = (start_local + kMsPerDay - 1) / kMsPerDay;
  const long long last_day_excl = end_local / kMsPerDay;

  const int per_bin = cfg.events_target / 56;  // two events per interval, 28 bins
  const int jitter = std::max(1, per_bin / 20);

  cohort.events.reserve(static_cast<std::size_t>(cfg.n) *
                        static_cast<std::size_t>(cfg.events_target + 2 * jitter * 28));

  for (int p = 0; p < cfg.n; ++p) {
    char pid_buf[16];
    std::snprintf(pid_buf, sizeof(pid_buf), "P%03d", p + 1);
    const std::string pid = pid_buf;
    cohort.manifest.offset_min[pid] = cfg.offset_min;

    const bool pos = positive[p] != 0;
    Rng rng(derive_seed(cfg.seed, "participant", static_cast<std::uint64_t>(p)));
    std::array<int, kNumCats> counter{};
    Ms last_end = 0;

    auto emit = [&](const std::string& pkg, Ms local_start, Ms dur) {
      cohort.events.push_back(
          {pid, pkg, EventKind::Foreground, local_start - off_ms});
      cohort.events.push_back(
          {pid, pkg, EventKind::Background, local_start + dur - off_ms});
      last_end = local_start + dur;
    };

    for (long long day = first_day; day < last_day_excl; ++day) {
      const int weekday = static_cast<int>((day + 3) % 7);  // epoch day 0 = Thursday
      const bool weekend = cfg.weekend_days.count(weekday) != 0;
      for (int bin = 0; bin < 4; ++bin) {
        const Ms bin_start = day * kMsPerDay + bin * kBinMs;
        const Ms bin_end = bin_start + kBinMs;
        const int target =
            per_bin - jitter + static_cast<int>(rng.below(2 * jitter + 1));
        Ms cursor = bin_start + 500 + static_cast<Ms>(rng.below(4501));
        if (cursor < last_end + 2000) cursor = last_end + 2000;

        for (int k = 0; k < target; ++k) {
          if (cursor >= bin_end - 2000) break;
          const std::vector<int>& cum =
              weekend ? (pos && plan.games_split > 0
                             ? (bin % 2 ? cum_weekend_odd : cum_weekend_even)
                             : cum_weekend)
                      : cum_weekday;
          const int cat = pick_category(rng, cum);
          const int base = (p * 31 + cat * 7) % apps;

          int slot;  // position inside the pool, used by the pair weighting
          int pool;
          const bool paired =
              !weekend && ((cat == kCommunication && plan.comm_rotate != 0) ||
                           (cat == kSocial && plan.social_rotate != 0));
          pool = paired ? 4 : 3;
          slot = counter[cat]++ % pool;
          const std::string& pkg = packages[cat][(base + slot) % apps];

          Ms dur = draw_duration(rng);
          if (paired) {
            // one app pair carries 90% of the duration mass; rotating the
            // heavy pair across bins lifts pooled entropy without moving
            // per-bin entropy, totals, or app sets
            const int rotate_sign = cat == kCommunication ? plan.comm_rotate
                                                          : plan.social_rotate;
            const bool rotate = (rotate_sign > 0) == pos;
            const int hot = rotate ? bin % 2 : 0;
            dur = slot / 2 == hot ? dur * 9 / 5 : std::max<Ms>(600, dur / 5);
          }
          if (cat == kEducation && !weekend && pos)
            dur = std::max<Ms>(1500, dur * plan.edu_scale_mille / 1000);
          if (cat == kGames && weekend && pos && plan.games_split > 0) {
            // launch counts alternate with the weight split; stretch or
            // shrink durations so per-bin totals stay flat
            const int w = bin % 2 ? kGamesBaseWeight + plan.games_split
                                  : kGamesBaseWeight - plan.games_split;
            dur = std::max<Ms>(800, dur * kGamesBaseWeight / w);
          }
          if (cursor + dur > end_local - 1000) {
            dur = end_local - 1000 - cursor;
            if (dur < 1500) break;
          }
          emit(pkg, cursor, dur);
          cursor = last_end + draw_gap(rng);
        }
      }
    }

    // questionnaire totals decide the class; items are decomposed from an
    // independent stream
    Rng qrng(derive_seed(cfg.seed, "phq9", static_cast<std::uint64_t>(p)));
    const int total = pos ? 10 + static_cast<int>(qrng.below(18))
                          : static_cast<int>(qrng.below(10));
    std::array<int, 9> items{};
    for (int placed = 0; placed < total;) {
      const auto j = qrng.below(9);
      if (items[j] < 3) {
        ++items[j];
        ++placed;
      }
    }
    cohort.labels.add(score_phq9(pid, items));
  }
  return cohort;
}

void write_events_jsonl(std::ostream& out, const std::vector<UsageEvent>& events) {
  char buf[192];
  for (const UsageEvent& ev : events) {
    const int len = std::snprintf(
        buf, sizeof(buf), "{\"pid\":\"%s\",\"pkg\":\"%s\",\"ev\":\"%s\",\"ts\":%lld}\n",
        ev.participant_id.c_str(), ev.package.c_str(),
        ev.kind == EventKind::Foreground ? "FG" : "BG",
        static_cast<long long>(ev.timestamp_ms));
    if (len < 0 || len >= static_cast<int>(sizeof(buf)))
      throw InternalError("event line overflow");
    out.write(buf, len);
  }
}

void write_manifest(std::ostream& out, const CohortManifest& manifest) {
  nlohmann::ordered_json j;
  j["window_end_ms"] = manifest.window_end_ms;
  j["weekend_days"] = manifest.weekend_days;
  nlohmann::ordered_json parts = nlohmann::ordered_json::object();
  for (const auto& [pid, off] : manifest.offset_min)
    parts[pid] = {{"offset_min", off}};
  j["participants"] = parts;
  out << j.dump(2) << '\n';
}

void write_catalog(std::ostream& out, const AppCatalog& catalog) {
  out << "package,category\n";
  for (const auto& [pkg, cat] : catalog.entries()) out << pkg << ',' << cat << '\n';
}

void write_cohort_files(const std::string& dir, const SynthCohort& cohort) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory " + dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw ConfigError(std::string("cannot write ") + name + " in " + dir);
    return out;
  };
  auto events = open("events.jsonl");
  write_events_jsonl(events, cohort.events);
  auto manifest = open("manifest.json");
  write_manifest(manifest, cohort.manifest);
  auto catalog = open("catalog.csv");
  write_catalog(catalog, cohort.catalog);
  auto labels = open("labels.csv");
  write_labels(labels, cohort.labels);
}

}  // namespace pheno
