#include "pheno/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "pheno/errors.hpp"

namespace pheno {
namespace {

// Hand-rolled scanner for the fixed event schema. Event files run to
// hundreds of thousands of lines and ingest has a hard latency budget, so
// the hot path avoids a general JSON DOM; anything it cannot handle falls
// back to nlohmann for a strict second opinion.
struct LineScanner {
  const char* p;
  const char* end;

  void skip_ws() {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  }

  bool eat(char c) {
    skip_ws();
    if (p < end && *p == c) {
      ++p;
      return true;
    }
    return false;
  }

  // Returns false on any escape or malformed quoting; caller falls back.
  bool string_token(std::string& out) {
    skip_ws();
    if (p >= end || *p != '"') return false;
    ++p;
    const char* start = p;
    while (p < end && *p != '"') {
      if (*p == '\\') return false;
      ++p;
    }
    if (p >= end) return false;
    out.assign(start, p);
    ++p;
    return true;
  }

  bool integer_token(Ms& out) {
    skip_ws();
    const char* start = p;
    if (p < end && *p == '-') ++p;
    if (p >= end || !std::isdigit(static_cast<unsigned char>(*p))) return false;
    Ms v = 0;
    bool neg = *start == '-';
    while (p < end && std::isdigit(static_cast<unsigned char>(*p))) {
      v = v * 10 + (*p - '0');
      ++p;
    }
    // trailing fraction/exponent means non-integer
    if (p < end && (*p == '.' || *p == 'e' || *p == 'E')) return false;
    out = neg ? -v : v;
    return true;
  }
};

enum class ScanStatus { Ok, Fallback, BadKind };

ScanStatus scan_line(const char* data, std::size_t len, UsageEvent& ev) {
  LineScanner s{data, data + len};
  if (!s.eat('{')) return ScanStatus::Fallback;
  bool have_pid = false, have_pkg = false, have_ev = false, have_ts = false;
  while (true) {
    std::string key;
    if (!s.string_token(key)) return ScanStatus::Fallback;
    if (!s.eat(':')) return ScanStatus::Fallback;
    if (key == "pid") {
      if (!s.string_token(ev.participant_id)) return ScanStatus::Fallback;
      have_pid = true;
    } else if (key == "pkg") {
      if (!s.string_token(ev.package)) return ScanStatus::Fallback;
      have_pkg = true;
    } else if (key == "ev") {
      std::string kind;
      if (!s.string_token(kind)) return ScanStatus::Fallback;
      if (kind == "FG")
        ev.kind = EventKind::Foreground;
      else if (kind == "BG")
        ev.kind = EventKind::Background;
      else
        return ScanStatus::BadKind;
      have_ev = true;
    } else if (key == "ts") {
      if (!s.integer_token(ev.timestamp_ms)) return ScanStatus::Fallback;
      have_ts = true;
    } else {
      return ScanStatus::Fallback;  // unknown key: let the strict parser decide
    }
    if (s.eat(',')) continue;
    if (s.eat('}')) break;
    return ScanStatus::Fallback;
  }
  s.skip_ws();
  if (s.p != s.end) return ScanStatus::Fallback;
  if (!(have_pid && have_pkg && have_ev && have_ts)) return ScanStatus::Fallback;
  return ScanStatus::Ok;
}

bool parse_line_strict(const std::string& line, std::size_t line_no, UsageEvent& ev) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw MalformedEvent(line_no, "not a JSON object");
  if (!j.contains("pid") || !j["pid"].is_string())
    throw MalformedEvent(line_no, "missing string \"pid\"");
  if (!j.contains("pkg") || !j["pkg"].is_string())
    throw MalformedEvent(line_no, "missing string \"pkg\"");
  if (!j.contains("ev") || !j["ev"].is_string())
    throw MalformedEvent(line_no, "missing string \"ev\"");
  if (!j.contains("ts") || !j["ts"].is_number_integer())
    throw MalformedEvent(line_no, "non-integer timestamp");
  ev.participant_id = j["pid"].get<std::string>();
  ev.package = j["pkg"].get<std::string>();
  const std::string& kind = j["ev"].get_ref<const std::string&>();
  if (kind == "FG")
    ev.kind = EventKind::Foreground;
  else if (kind == "BG")
    ev.kind = EventKind::Background;
  else
    throw MalformedEvent(line_no, "unknown kind \"" + kind + "\"");
  ev.timestamp_ms = j["ts"].get<Ms>();
  return true;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

}  // namespace

void AppCatalog::add(const std::string& package, const std::string& category) {
  if (category == kSmartphone) throw ReservedCategory(package);
  auto [it, inserted] = map_.emplace(package, category);
  if (!inserted) throw DuplicatePackage(package);
}

const std::string& AppCatalog::lookup(const std::string& package) const {
  static const std::string unknown = kUnknown;
  auto it = map_.find(package);
  return it == map_.end() ? unknown : it->second;
}

std::vector<std::string> AppCatalog::categories() const {
  std::set<std::string> cats;
  for (const auto& [pkg, cat] : map_) cats.insert(cat);
  return {cats.begin(), cats.end()};
}

std::vector<std::pair<std::string, std::string>> AppCatalog::entries() const {
  std::vector<std::pair<std::string, std::string>> rows(map_.begin(), map_.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

EventsByParticipant parse_events(std::istream& in, const CohortManifest& manifest,
                                 IngestReport* report) {
  EventsByParticipant out;
  IngestReport local;
  IngestReport& rep = report ? *report : local;
  const Ms w_start = manifest.window_start_ms();
  const Ms w_end = manifest.window_end_ms;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    UsageEvent ev;
    ScanStatus st = scan_line(line.data(), line.size(), ev);
    if (st == ScanStatus::BadKind)
      parse_line_strict(line, line_no, ev);  // throws with the precise reason
    else if (st == ScanStatus::Fallback)
      parse_line_strict(line, line_no, ev);
    if (ev.package.empty()) throw MalformedEvent(line_no, "empty package");
    ++rep.events_parsed;
    if (ev.timestamp_ms < w_start || ev.timestamp_ms > w_end) {
      ++rep.dropped_outside_window;
      continue;
    }
    out[ev.participant_id].push_back(std::move(ev));
  }
  for (auto& [pid, events] : out) {
    std::stable_sort(events.begin(), events.end(),
                     [](const UsageEvent& a, const UsageEvent& b) {
                       return a.timestamp_ms < b.timestamp_ms;
                     });
  }
  return out;
}

std::vector<UsageInterval> build_intervals(const std::string& pid,
                                           const std::vector<UsageEvent>& events,
                                           const CohortManifest& manifest,
                                           IngestReport* report) {
  IngestReport local;
  IngestReport& rep = report ? *report : local;
  const int offset = manifest.offset_for(pid);
  const Ms w_end = manifest.window_end_ms;

  std::vector<UsageInterval> out;
  bool open = false;
  std::string open_pkg;
  Ms open_start = 0;

  auto close_at = [&](Ms t) {
    if (!open) return;
    if (t > open_start) {
      out.push_back({pid, open_pkg, open_start, t, offset});
    } else {
      ++rep.zero_length_discarded;
    }
    open = false;
  };

  for (const UsageEvent& ev : events) {
    if (ev.kind == EventKind::Foreground) {
      close_at(ev.timestamp_ms);  // one foreground app at a time
      open = true;
      open_pkg = ev.package;
      open_start = ev.timestamp_ms;
    } else {
      if (open && open_pkg == ev.package) {
        close_at(ev.timestamp_ms);
      } else {
        ++rep.orphan_background;
      }
    }
  }
  if (open) {
    ++rep.truncated_open;
    close_at(w_end);
  }
  return out;
}

IntervalsByParticipant build_intervals(const EventsByParticipant& events,
                                       const CohortManifest& manifest,
                                       IngestReport* report) {
  IntervalsByParticipant out;
  for (const auto& [pid, evs] : events)
    out[pid] = build_intervals(pid, evs, manifest, report);
  return out;
}

AppCatalog load_catalog(std::istream& in) {
  AppCatalog catalog;
  std::string line;
  if (!std::getline(in, line)) throw DataError("catalog: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "package,category")
    throw DataError("catalog: expected header \"package,category\", got \"" + line + "\"");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
      throw DataError("catalog: bad row at line " + std::to_string(line_no));
    catalog.add(line.substr(0, comma), line.substr(comma + 1));
  }
  return catalog;
}

CohortManifest load_manifest(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("manifest: invalid JSON");
  CohortManifest m;
  if (!j.contains("window_end_ms") || !j["window_end_ms"].is_number_integer())
    throw DataError("manifest: missing integer window_end_ms");
  m.window_end_ms = j["window_end_ms"].get<Ms>();
  if (!j.contains("weekend_days") || !j["weekend_days"].is_array())
    throw DataError("manifest: missing weekend_days array");
  m.weekend_days.clear();
  for (const auto& d : j["weekend_days"]) {
    int day = d.get<int>();
    if (day < 0 || day > 6) throw DataError("manifest: weekend day outside 0..6");
    m.weekend_days.insert(day);
  }
  if (m.weekend_days.empty() || m.weekend_days.size() >= 7)
    throw DataError("manifest: weekend_days must be a non-empty strict subset of the week");
  if (j.contains("participants")) {
    for (const auto& [pid, obj] : j["participants"].items())
      m.offset_min[pid] = obj.value("offset_min", 0);
  }
  return m;
}

namespace {
std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return in;
}
}  // namespace

EventsByParticipant parse_events_file(const std::string& path,
                                      const CohortManifest& manifest,
                                      IngestReport* report) {
  auto in = open_or_throw(path);
  return parse_events(in, manifest, report);
}

AppCatalog load_catalog_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_catalog(in);
}

CohortManifest load_manifest_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_manifest(in);
}

}  // namespace pheno
