#ifndef PHENO_INGEST_HPP
#define PHENO_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace pheno {

using Ms = std::int64_t;

constexpr Ms kMsPerDay = 86'400'000;
constexpr Ms kWindowDays = 7;
constexpr Ms kWindowMs = kWindowDays * kMsPerDay;

enum class EventKind { Foreground, Background };

struct UsageEvent {
  std::string participant_id;
  std::string package;
  EventKind kind = EventKind::Foreground;
  Ms timestamp_ms = 0;  // UTC epoch ms
};

struct UsageInterval {
  std::string participant_id;
  std::string package;
  Ms start_ms = 0;
  Ms end_ms = 0;  // exclusive; end_ms > start_ms
  int local_offset_min = 0;

  Ms duration_ms() const { return end_ms - start_ms; }
};

// Cohort-level run description. Weekday indices: 0=Monday .. 6=Sunday.
struct CohortManifest {
  Ms window_end_ms = 0;
  std::set<int> weekend_days{5, 6};
  std::map<std::string, int> offset_min;  // participant -> local offset minutes

  Ms window_start_ms() const { return window_end_ms - kWindowMs; }
  int offset_for(const std::string& pid) const {
    auto it = offset_min.find(pid);
    return it == offset_min.end() ? 0 : it->second;
  }
};

// package -> category; "Smartphone" is the reserved all-apps aggregate and can
// never be assigned to a package. Unmapped packages resolve to "Unknown".
class AppCatalog {
 public:
  static constexpr const char* kSmartphone = "Smartphone";
  static constexpr const char* kUnknown = "Unknown";

  void add(const std::string& package, const std::string& category);
  const std::string& lookup(const std::string& package) const;
  bool has(const std::string& package) const { return map_.count(package) != 0; }

  // distinct assignable categories, sorted (excludes the reserved aggregate)
  std::vector<std::string> categories() const;
  // all package -> category rows, sorted by package
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::string, std::string> map_;
};

// Counters for tolerated anomalies; parsing errors themselves are fatal.
struct IngestReport {
  std::size_t events_parsed = 0;
  std::size_t dropped_outside_window = 0;
  std::size_t orphan_background = 0;
  std::size_t zero_length_discarded = 0;
  std::size_t truncated_open = 0;
};

// Events grouped per participant, each list sorted by timestamp.
using EventsByParticipant = std::map<std::string, std::vector<UsageEvent>>;

// Line-delimited JSON, one {"pid","pkg","ev","ts"} object per line. Throws
// MalformedEvent on the first bad line; events outside the 7-day window are
// dropped and counted instead.
EventsByParticipant parse_events(std::istream& in, const CohortManifest& manifest,
                                 IngestReport* report = nullptr);

// Foreground/background pairing for one participant's sorted events.
std::vector<UsageInterval> build_intervals(const std::string& pid,
                                           const std::vector<UsageEvent>& events,
                                           const CohortManifest& manifest,
                                           IngestReport* report = nullptr);

using IntervalsByParticipant = std::map<std::string, std::vector<UsageInterval>>;

IntervalsByParticipant build_intervals(const EventsByParticipant& events,
                                       const CohortManifest& manifest,
                                       IngestReport* report = nullptr);

// CSV with header "package,category".
AppCatalog load_catalog(std::istream& in);

CohortManifest load_manifest(std::istream& in);

// File-based conveniences used by the CLI.
EventsByParticipant parse_events_file(const std::string& path,
                                      const CohortManifest& manifest,
                                      IngestReport* report = nullptr);
AppCatalog load_catalog_file(const std::string& path);
CohortManifest load_manifest_file(const std::string& path);

}  // namespace pheno

#endif
