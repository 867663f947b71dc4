#ifndef PHENO_FEATURES_HPP
#define PHENO_FEATURES_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pheno/ingest.hpp"
#include "pheno/sessions.hpp"

namespace pheno {

// Four 6-hour local-time bins partitioning the day exactly.
enum class DiurnalBin { Night = 0, Morning = 1, Afternoon = 2, Evening = 3 };

const char* to_string(DiurnalBin bin);

constexpr Ms kBinMs = 6 * 3'600'000;

struct DiurnalPiece {
  std::int64_t day;  // local days since epoch
  DiurnalBin bin;
  Ms duration_ms;
};

struct DiurnalSplit {
  std::vector<DiurnalPiece> pieces;  // sum of durations == interval duration
  std::int64_t launch_day;
  DiurnalBin launch_bin;  // bin containing the interval start
};

// Splits across bin and midnight boundaries using the interval's stored
// local offset; integer-exact.
DiurnalSplit split_diurnal(const UsageInterval& interval);

std::int64_t local_day(Ms utc_ms, int offset_min);
DiurnalBin local_bin(Ms utc_ms, int offset_min);
int weekday_of_day(std::int64_t day);  // 0=Monday .. 6=Sunday

// Shannon entropy of a duration distribution; zero-duration entries are
// skipped, an empty or all-zero input gives 0. log_base 0 means natural log.
double entropy(std::span<const double> durations, double log_base = 0.0);

// Minimum app-set symmetric-difference distance to each reference group,
// combined as (D+1)/(ND+1) when smoothed (the default) or D/ND otherwise.
// The target must not appear in either reference list; the caller enforces
// that by construction.
double hamming_ratio(const std::set<std::string>& target_apps,
                     const std::vector<std::set<std::string>>& depressed_refs,
                     const std::vector<std::set<std::string>>& nondepressed_refs,
                     bool smoothed = true);

// ---- feature matrix ----

struct FeatureId {
  std::string day_type;  // Weekday | Weekend
  std::string category;  // sanitized category name, "Smartphone" for aggregate
  std::string metric;    // Duration, Launch, Num_of_Apps, Entropy, Ratio_of_Hamming,
                         // *_Session_Num
  std::string stat;      // 24_Hour | 6_Hour_Mean | 6_Hour_SD
  std::string name() const;
};

struct DroppedFeature {
  std::string name;
  std::string reason;
};

struct ScalingParams {
  std::vector<std::string> train_ids;
  std::vector<std::string> feature_names;
  std::vector<double> mean;
  std::vector<double> sd;  // population SD over the training subset
};

class FeatureMatrix {
 public:
  std::vector<std::string> participants;
  std::vector<std::string> feature_names;
  std::vector<FeatureId> feature_ids;  // parallel to feature_names; may be empty
                                       // for matrices read back from CSV
  std::vector<double> values;          // row-major
  std::vector<DroppedFeature> dropped;
  std::optional<ScalingParams> scaling;

  std::size_t n_rows() const { return participants.size(); }
  std::size_t n_cols() const { return feature_names.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * n_cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * n_cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * n_cols(), n_cols()};
  }
  std::size_t row_index(const std::string& pid) const;   // throws UnknownParticipant
  std::size_t col_index(const std::string& name) const;  // throws DataError
};

// Sanitized feature-name token for a catalog category ("Photo and Video" ->
// "Photo_Video"); connective "and" is dropped.
std::string sanitize_category(const std::string& category);

struct WorkspaceOptions {
  Ms session_gap_ms = kSessionGapMs;
  bool smoothed_hamming = true;
};

// Per-participant usage aggregates plus everything needed to assemble the
// feature matrix. Hamming-ratio columns depend on reference labels, so
// assembly takes the reference class map per call (per fold in nested CV);
// all label-free columns are computed once here.
class FeatureWorkspace {
 public:
  FeatureWorkspace(const IntervalsByParticipant& intervals, const AppCatalog& catalog,
                   const CohortManifest& manifest, WorkspaceOptions options = {});

  const std::vector<std::string>& participants() const { return participants_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t n_features() const { return feature_names_.size(); }

  // Raw matrix. reference_class maps pid -> depressed for every participant
  // allowed to act as a hamming reference; the row's own participant is
  // always excluded from both groups.
  FeatureMatrix assemble(const std::map<std::string, bool>& reference_class) const;

  // fraction of participants using each (sanitized) category
  const std::map<std::string, double>& category_user_fraction() const {
    return category_user_fraction_;
  }

 private:
  struct AppUse {
    Ms duration_ms = 0;
    double launches = 0;
  };
  struct Cell {
    std::map<int, AppUse> apps;          // interned package id -> use
    std::array<int, 3> session_kind{};   // micro, review, engage
    int session_total = 0;
  };
  struct Usage {
    Cell cell[2][4];  // [daytype][bin]
  };

  void build_usage(const IntervalsByParticipant& intervals);
  void build_names();
  void build_cached_columns();
  void build_hamming_sets();

  double metric_value(const std::map<int, AppUse>& apps, int cat, int metric) const;
  std::map<int, AppUse> merged_day(const Usage& u, int dt) const;

  WorkspaceOptions options_;
  CohortManifest manifest_;
  std::vector<std::string> participants_;
  std::vector<std::string> categories_;  // sanitized, sorted; Smartphone appended last
  int smartphone_cat_ = 0;               // index of the aggregate pseudo-category
  std::vector<std::string> packages_;    // id -> package name
  std::vector<int> package_cat_;         // id -> category index
  std::vector<Usage> usage_;             // per participant
  std::vector<std::string> feature_names_;
  std::vector<FeatureId> feature_ids_;
  std::vector<std::vector<double>> cached_;  // per participant, hamming cols = 0
  std::vector<bool> is_hamming_col_;
  // hamming sets: [participant][daytype][scope 0..3=bin, 4=24h][category]
  std::vector<std::vector<std::vector<std::vector<std::vector<int>>>>> sets_;
  // pairwise symmetric-difference distances per (daytype, scope, category)
  // group, row-major participants x participants; label-independent, so built
  // once and shared by every assemble call
  std::vector<std::vector<std::uint16_t>> dist_;
  std::size_t dist_group(int dt, int scope, std::size_t cat) const {
    return (static_cast<std::size_t>(dt) * 5 + scope) * categories_.size() + cat;
  }
  std::map<std::string, double> category_user_fraction_;
};

// Drops every column whose category is used by fewer than min_user_fraction
// of the matrix's participants; dropped names land in the registry.
FeatureMatrix prevalence_filter(const FeatureMatrix& matrix, double min_user_fraction = 0.5);

ScalingParams fit_scaler(const FeatureMatrix& matrix, const std::vector<std::string>& train_ids);
FeatureMatrix apply_scaler(const FeatureMatrix& matrix, const ScalingParams& params);

// CSV export: header "participant_id,<feature...>", values with 9 significant
// digits; byte-deterministic.
void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);
FeatureMatrix read_matrix_csv(std::istream& in);
void write_matrix_meta(std::ostream& out, const FeatureMatrix& matrix);

std::string format_value(double v);  // %.9g with -0 normalized

}  // namespace pheno

#endif
