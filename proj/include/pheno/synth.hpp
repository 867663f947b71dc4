#ifndef PHENO_SYNTH_HPP
#define PHENO_SYNTH_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pheno/cohort.hpp"
#include "pheno/ingest.hpp"

namespace pheno {

// window end chosen so local midnight (UTC+6) falls exactly on it: the seven
// covered local days then line up with whole calendar days
constexpr Ms kSynthWindowEnd = 1'699'984'800'000;

// Effect-map keys understood by the generator. Each plants a signal into one
// specific feature while holding that feature's siblings class-neutral:
// - weekday_education_duration: scales education durations for the positive
//   class (value -0.45 means x0.55) -> Weekday_Education_Duration_24_Hour
// - weekday_communication_entropy: rotates the duration-heavy app pair per
//   bin for the positive class (fixed pair otherwise), so pooled entropy
//   rises while per-bin entropy stays put
//   -> Weekday_Communication_Entropy_24_Hour
// - weekday_social_entropy: same trick mirrored (negative value: rotation on
//   the negative class) -> Weekday_Social_Entropy_24_Hour
// - weekend_games_launch_sd: alternates the games pick weight across bins
//   for the positive class with duration compensation, moving launch spread
//   but not totals -> Weekend_Games_Launch_6_Hour_SD
struct SynthConfig {
  int n = 100;
  double balance = 0.51;  // positive-class fraction
  std::uint64_t seed = 0;
  std::string mode = "planted";  // planted | null
  std::map<std::string, double> effects;  // empty in planted mode: use defaults
  int events_target = 8000;  // mean events per participant
  int apps_per_category = 8;
  int offset_min = 360;
  std::set<int> weekend_days = {5, 6};
  Ms window_end_ms = kSynthWindowEnd;
};

struct SynthCohort {
  std::vector<UsageEvent> events;  // participant-major, chronological
  CohortManifest manifest;
  AppCatalog catalog;
  CohortLabels labels;
};

const std::vector<std::string>& synth_categories();  // the 27 catalog categories
std::map<std::string, double> default_effects();

// feature names targeted by the active (nonzero) effects, sorted
std::vector<std::string> planted_feature_names(const SynthConfig& config);

SynthCohort synth_generate(const SynthConfig& config);

void write_events_jsonl(std::ostream& out, const std::vector<UsageEvent>& events);
void write_manifest(std::ostream& out, const CohortManifest& manifest);
void write_catalog(std::ostream& out, const AppCatalog& catalog);

// writes events.jsonl, manifest.json, catalog.csv, labels.csv into dir
void write_cohort_files(const std::string& dir, const SynthCohort& cohort);

}  // namespace pheno

#endif
