#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pheno/cohort.hpp"
#include "pheno/errors.hpp"
#include "pheno/features.hpp"
#include "pheno/ingest.hpp"
#include "pheno/rng.hpp"
#include "pheno/sessions.hpp"
#include "pheno/synth.hpp"

using namespace pheno;

namespace {

// window anchor shared by the handcrafted cohorts: local midnight boundary,
// seven full days 19669..19675 (Wed..Tue), weekend days 19672/19673
constexpr Ms kEnd = 19'676LL * kMsPerDay;
constexpr std::int64_t kFirstDay = 19'669;

CohortManifest make_manifest(const std::vector<std::string>& pids, int offset = 0) {
  CohortManifest m;
  m.window_end_ms = kEnd;
  for (const auto& p : pids) m.offset_min[p] = offset;
  return m;
}

UsageInterval iv(const std::string& pid, const std::string& pkg, Ms start, Ms dur,
                 int offset = 0) {
  UsageInterval v;
  v.participant_id = pid;
  v.package = pkg;
  v.start_ms = start;
  v.end_ms = start + dur;
  v.local_offset_min = offset;
  return v;
}

Ms at(std::int64_t day, int bin, Ms into) { return day * kMsPerDay + bin * kBinMs + into; }

}  // namespace

TEST_CASE("rng determinism and bounds") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(10) < 10);
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    int x = r.uniform_int(-3, 3);
    CHECK(x >= -3);
    CHECK(x <= 3);
  }
}

TEST_CASE("rng derive_seed separates streams") {
  CHECK(derive_seed(1, "fold", 0) != derive_seed(1, "fold", 1));
  CHECK(derive_seed(1, "fold", 0) != derive_seed(1, "fs", 0));
  CHECK(derive_seed(1, "fold", 0) != derive_seed(2, "fold", 0));
  CHECK(derive_seed(1, "fold", 3) == derive_seed(1, "fold", 3));
}

TEST_CASE("rng shuffle is a permutation, sampling has no repeats") {
  Rng r(3);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto sorted = v;
  r.shuffle(v);
  auto copy = v;
  std::sort(copy.begin(), copy.end());
  CHECK(copy == sorted);

  auto picks = r.sample_without_replacement(100, 20);
  std::set<std::size_t> uniq(picks.begin(), picks.end());
  CHECK(uniq.size() == 20);
  for (auto p : picks) CHECK(p < 100);
}

TEST_CASE("phq9 scoring and cutoff") {
  auto r = score_phq9("P1", {1, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(r.total == 9);
  CHECK_FALSE(r.depressed);
  auto s = score_phq9("P2", {2, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(s.total == 10);
  CHECK(s.depressed);
  CHECK(score_phq9("P3", {3, 3, 3, 3, 3, 3, 3, 3, 3}).total == 27);
  CHECK_THROWS_AS(score_phq9("P4", {4, 0, 0, 0, 0, 0, 0, 0, 0}), ItemOutOfRange);
  CHECK_THROWS_AS(score_phq9("P5", {-1, 0, 0, 0, 0, 0, 0, 0, 0}), ItemOutOfRange);
}

TEST_CASE("labels round-trip and class map") {
  CohortLabels labels;
  labels.add(score_phq9("P1", {2, 2, 2, 2, 2, 0, 0, 0, 0}));
  labels.add(score_phq9("P2", {0, 0, 0, 0, 0, 0, 0, 0, 0}));
  std::ostringstream out;
  write_labels(out, labels);
  std::istringstream in(out.str());
  CohortLabels back = load_labels(in);
  CHECK(back.size() == 2);
  CHECK(back.depressed("P1"));
  CHECK_FALSE(back.depressed("P2"));
  auto cm = back.class_map();
  CHECK(cm.at("P1"));
  CHECK_FALSE(cm.at("P2"));
  CHECK_THROWS_AS(back.depressed("P9"), UnknownParticipant);
}

TEST_CASE("event pairing basics") {
  auto m = make_manifest({"P1"});
  std::istringstream in(
      "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"FG\",\"ts\":" + std::to_string(at(kFirstDay, 1, 0)) +
      "}\n" +
      "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"BG\",\"ts\":" +
      std::to_string(at(kFirstDay, 1, 5000)) + "}\n");
  IngestReport rep;
  auto events = parse_events(in, m, &rep);
  auto ivs = build_intervals(events, m, &rep);
  REQUIRE(ivs.count("P1") == 1);
  REQUIRE(ivs["P1"].size() == 1);
  CHECK(ivs["P1"][0].duration_ms() == 5000);
  CHECK(rep.events_parsed == 2);
  CHECK(rep.orphan_background == 0);
}

TEST_CASE("orphan background and foreground handover") {
  auto m = make_manifest({"P1"});
  Ms t0 = at(kFirstDay, 1, 0);
  std::ostringstream s;
  s << "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"BG\",\"ts\":" << t0 << "}\n";  // orphan
  s << "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"FG\",\"ts\":" << t0 + 1000 << "}\n";
  s << "{\"pid\":\"P1\",\"pkg\":\"b\",\"ev\":\"FG\",\"ts\":" << t0 + 2000 << "}\n";
  s << "{\"pid\":\"P1\",\"pkg\":\"b\",\"ev\":\"BG\",\"ts\":" << t0 + 3000 << "}\n";
  std::istringstream in(s.str());
  IngestReport rep;
  auto ivs = build_intervals(parse_events(in, m, &rep), m, &rep);
  CHECK(rep.orphan_background == 1);
  // one foreground app at a time: the new FG closes the previous interval
  REQUIRE(ivs["P1"].size() == 2);
  CHECK(ivs["P1"][0].package == "a");
  CHECK(ivs["P1"][0].end_ms == t0 + 2000);
  CHECK(ivs["P1"][1].package == "b");
  CHECK(ivs["P1"][1].start_ms == t0 + 2000);
}

TEST_CASE("open interval truncates at window end") {
  auto m = make_manifest({"P1"});
  std::ostringstream s;
  s << "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"FG\",\"ts\":" << kEnd - 4000 << "}\n";
  std::istringstream in(s.str());
  IngestReport rep;
  auto ivs = build_intervals(parse_events(in, m, &rep), m, &rep);
  CHECK(rep.truncated_open == 1);
  REQUIRE(ivs["P1"].size() == 1);
  CHECK(ivs["P1"][0].end_ms == kEnd);
}

TEST_CASE("events outside the seven-day window are dropped") {
  auto m = make_manifest({"P1"});
  std::ostringstream s;
  s << "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"FG\",\"ts\":" << m.window_start_ms() - 5000
    << "}\n";
  s << "{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"BG\",\"ts\":" << m.window_start_ms() - 1000
    << "}\n";
  std::istringstream in(s.str());
  IngestReport rep;
  auto ivs = build_intervals(parse_events(in, m, &rep), m, &rep);
  CHECK(rep.dropped_outside_window == 2);
  CHECK(ivs["P1"].empty());
}

TEST_CASE("malformed event lines carry line numbers") {
  auto m = make_manifest({"P1"});
  std::istringstream in("not json\n");
  CHECK_THROWS_AS(parse_events(in, m), MalformedEvent);
  std::istringstream in2("{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"XX\",\"ts\":1}\n");
  CHECK_THROWS_AS(parse_events(in2, m), MalformedEvent);
  std::istringstream in3("{\"pid\":\"P1\",\"pkg\":\"a\",\"ev\":\"FG\"}\n");
  CHECK_THROWS_AS(parse_events(in3, m), MalformedEvent);
}

TEST_CASE("catalog rejects duplicates and the reserved aggregate") {
  AppCatalog c;
  c.add("a.b", "Social");
  CHECK(c.lookup("a.b") == "Social");
  CHECK(c.lookup("zzz") == AppCatalog::kUnknown);
  CHECK_THROWS_AS(c.add("a.b", "Games"), DuplicatePackage);
  CHECK_THROWS_AS(c.add("x.y", AppCatalog::kSmartphone), ReservedCategory);
  c.add("c.d", "Games");
  auto rows = c.entries();
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == "a.b");
  CHECK(rows[1].first == "c.d");
}

TEST_CASE("session kind boundaries") {
  CHECK(classify_session(15'000) == SessionKind::Micro);
  CHECK(classify_session(15'001) == SessionKind::Review);
  CHECK(classify_session(60'000) == SessionKind::Review);
  CHECK(classify_session(60'001) == SessionKind::Engage);
  CHECK(classify_session(0) == SessionKind::Micro);
}

TEST_CASE("session gap boundary joins at exactly 45 s") {
  std::vector<UsageInterval> v{iv("P1", "a", 0, 1000),
                               iv("P1", "a", 1000 + kSessionGapMs, 1000)};
  CHECK(sessionize(v).size() == 1);
  v[1].start_ms += 1;
  v[1].end_ms += 1;
  CHECK(sessionize(v).size() == 2);
}

TEST_CASE("sessionize rejects unsorted input") {
  std::vector<UsageInterval> v{iv("P1", "a", 10'000, 1000), iv("P1", "a", 0, 1000)};
  CHECK_THROWS_AS(sessionize(v), UnsortedInput);
}

TEST_CASE("sessionize matches brute force on random streams") {
  std::mt19937_64 gen(99);
  for (int round = 0; round < 50; ++round) {
    std::vector<UsageInterval> v;
    Ms cursor = 0;
    int n = 1 + static_cast<int>(gen() % 60);
    for (int i = 0; i < n; ++i) {
      cursor += 1 + static_cast<Ms>(gen() % 90'000);
      Ms dur = 1 + static_cast<Ms>(gen() % 80'000);
      v.push_back(iv("P1", "a", cursor, dur));
      cursor += dur;
    }
    auto sessions = sessionize(v);

    // brute force: linear scan with explicit gap rule
    std::vector<std::vector<std::size_t>> groups{{0}};
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].start_ms - v[i - 1].end_ms > kSessionGapMs) groups.push_back({});
      groups.back().push_back(i);
    }
    REQUIRE(sessions.size() == groups.size());
    std::size_t covered = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      CHECK(sessions[g].members == groups[g]);
      Ms active = 0;
      for (auto idx : groups[g]) active += v[idx].duration_ms();
      CHECK(sessions[g].active_duration_ms == active);
      CHECK(sessions[g].kind == classify_session(active));
      covered += groups[g].size();
    }
    CHECK(covered == v.size());
  }
}

TEST_CASE("local time helpers") {
  // epoch day 0 was a Thursday; 0=Monday in our numbering
  CHECK(weekday_of_day(0) == 3);
  CHECK(weekday_of_day(4) == 0);
  CHECK(weekday_of_day(kFirstDay) == 2);      // Wed
  CHECK(weekday_of_day(kFirstDay + 3) == 5);  // Sat
  CHECK(local_day(kMsPerDay - 1, 0) == 0);
  CHECK(local_day(kMsPerDay, 0) == 1);
  CHECK(local_day(0, 60) == 0);
  CHECK(local_day(-1, 60) == 0);  // offset pushes it past midnight
  CHECK(local_bin(at(5, 0, 0), 0) == DiurnalBin::Night);
  CHECK(local_bin(at(5, 1, 0), 0) == DiurnalBin::Morning);
  CHECK(local_bin(at(5, 2, 0), 0) == DiurnalBin::Afternoon);
  CHECK(local_bin(at(5, 3, kBinMs - 1), 0) == DiurnalBin::Evening);
  // +6 h offset shifts the boundary
  CHECK(local_bin(at(5, 0, 0), 360) == DiurnalBin::Morning);
}

TEST_CASE("diurnal split is integer-exact across boundaries") {
  // crosses afternoon -> evening -> next-day night
  auto v = iv("P1", "a", at(100, 2, 5 * 3'600'000), 8 * 3'600'000);
  auto split = split_diurnal(v);
  REQUIRE(split.pieces.size() == 3);
  CHECK(split.pieces[0].duration_ms == 3'600'000);
  CHECK(split.pieces[0].bin == DiurnalBin::Afternoon);
  CHECK(split.pieces[1].duration_ms == 6 * 3'600'000);
  CHECK(split.pieces[1].bin == DiurnalBin::Evening);
  CHECK(split.pieces[2].duration_ms == 3'600'000);
  CHECK(split.pieces[2].bin == DiurnalBin::Night);
  CHECK(split.pieces[2].day == 101);
  CHECK(split.launch_day == 100);
  CHECK(split.launch_bin == DiurnalBin::Afternoon);
}

TEST_CASE("diurnal conservation fuzz") {
  std::mt19937_64 gen(123);
  for (int i = 0; i < 300; ++i) {
    Ms start = static_cast<Ms>(gen() % (200LL * kMsPerDay));
    Ms dur = 1 + static_cast<Ms>(gen() % (3 * kMsPerDay));
    int offset = static_cast<int>(gen() % 29) * 60 - 720;
    auto split = split_diurnal(iv("P1", "a", start, dur, offset));
    Ms total = 0;
    for (const auto& p : split.pieces) {
      CHECK(p.duration_ms > 0);
      CHECK(p.duration_ms <= kBinMs);
      total += p.duration_ms;
    }
    CHECK(total == dur);
    CHECK(split.launch_day == local_day(start, offset));
    CHECK(split.launch_bin == local_bin(start, offset));
  }
}

TEST_CASE("entropy oracle values") {
  std::vector<double> v{3, 1};
  CHECK(entropy(v) == doctest::Approx(0.562335).epsilon(1e-6));
  CHECK(entropy(v, 2.0) == doctest::Approx(0.811278).epsilon(1e-6));
  std::vector<double> withzero{3, 0, 1};
  CHECK(entropy(withzero) == doctest::Approx(entropy(v)).epsilon(1e-12));
  std::vector<double> empty;
  CHECK(entropy(empty) == 0.0);
  std::vector<double> single{5};
  CHECK(entropy(single) == 0.0);
  std::vector<double> uniform(8, 2.5);
  CHECK(entropy(uniform) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  std::vector<double> neg{1, -1};
  CHECK_THROWS_AS(entropy(neg), NegativeDuration);
  CHECK_THROWS_AS(entropy(v, 1.0), ConfigError);
  CHECK_THROWS_AS(entropy(v, -2.0), ConfigError);
}

TEST_CASE("hamming ratio oracle") {
  std::set<std::string> target{"a", "b", "c"};
  // closest depressed ref differs by 1, closest nondepressed by 9
  std::vector<std::set<std::string>> dep{{"a", "b"}, {"a", "x", "y", "z"}};
  std::vector<std::set<std::string>> non{{"q", "r", "s", "t", "u", "v"},
                                         {"m", "n", "o", "p", "w", "k"}};
  CHECK(hamming_ratio(target, dep, non, true) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(hamming_ratio(target, dep, non, false) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK_THROWS_AS(hamming_ratio(target, {}, non, true), EmptyReferenceGroup);
  CHECK_THROWS_AS(hamming_ratio(target, dep, {}, true), EmptyReferenceGroup);
}

TEST_CASE("feature name grammar") {
  FeatureId id{"Weekday", "Social", "Duration", "24_Hour"};
  CHECK(id.name() == "Weekday_Social_Duration_24_Hour");
  CHECK(sanitize_category("Photo and Video") == "Photo_Video");
  CHECK(sanitize_category("Art and Design") == "Art_Design");
  CHECK(sanitize_category("Social") == "Social");
  CHECK(sanitize_category("Auto and Vehicles") == "Auto_Vehicles");
}

namespace {

// four participants, two per class, with deterministic hand-checkable usage
struct TinyCohort {
  IntervalsByParticipant intervals;
  AppCatalog catalog;
  CohortManifest manifest;
  std::map<std::string, bool> classes;

  TinyCohort() {
    manifest = make_manifest({"P1", "P2", "P3", "P4"});
    catalog.add("app.a", "CatA");
    catalog.add("app.b", "CatA");
    catalog.add("app.c", "CatB");
    classes = {{"P1", true}, {"P2", true}, {"P3", false}, {"P4", false}};

    // P1: CatA on a weekday, known per-bin durations
    auto& p1 = intervals["P1"];
    p1.push_back(iv("P1", "app.a", at(kFirstDay + 1, 1, 1000), 10'000));  // Thu morning
    p1.push_back(iv("P1", "app.a", at(kFirstDay + 1, 2, 1000), 14'000));  // Thu afternoon
    p1.push_back(iv("P1", "app.b", at(kFirstDay + 1, 2, 20'000), 6'000));
    p1.push_back(iv("P1", "app.c", at(kFirstDay + 3, 1, 1000), 30'000));  // Sat morning

    auto& p2 = intervals["P2"];
    p2.push_back(iv("P2", "app.a", at(kFirstDay + 2, 1, 1000), 20'000));
    auto& p3 = intervals["P3"];
    p3.push_back(iv("P3", "app.b", at(kFirstDay + 2, 1, 1000), 25'000));
    auto& p4 = intervals["P4"];
    p4.push_back(iv("P4", "app.c", at(kFirstDay + 2, 1, 1000), 15'000));
    p4.push_back(iv("P4", "app.c", at(kFirstDay + 3, 2, 1000), 10'000));
  }
};

}  // namespace

TEST_CASE("workspace produces the full feature grid") {
  TinyCohort t;
  FeatureWorkspace ws(t.intervals, t.catalog, t.manifest);
  // 3 categories (CatA, CatB, Smartphone) x 2 daytypes x 5 metrics x 3 stats
  // + 2 daytypes x 4 session metrics x 3 stats
  CHECK(ws.n_features() == 3 * 2 * 5 * 3 + 2 * 4 * 3);
  CHECK(ws.participants() == std::vector<std::string>{"P1", "P2", "P3", "P4"});

  auto m = ws.assemble(t.classes);
  CHECK(m.n_rows() == 4);
  CHECK(m.n_cols() == ws.n_features());

  std::size_t r = m.row_index("P1");
  // durations are reported in seconds; 24h pools the whole daytype
  CHECK(m.at(r, m.col_index("Weekday_CatA_Duration_24_Hour")) ==
        doctest::Approx(30.0).epsilon(1e-12));
  CHECK(m.at(r, m.col_index("Weekday_CatA_Duration_6_Hour_Mean")) ==
        doctest::Approx(7.5).epsilon(1e-12));
  // per-bin pooled durations [0, 10, 20, 0]; population SD over the 4 bins
  double var = (56.25 + 6.25 + 156.25 + 56.25) / 4.0;
  CHECK(m.at(r, m.col_index("Weekday_CatA_Duration_6_Hour_SD")) ==
        doctest::Approx(std::sqrt(var)).epsilon(1e-9));
  CHECK(m.at(r, m.col_index("Weekday_CatA_Launch_24_Hour")) == 3.0);
  CHECK(m.at(r, m.col_index("Weekday_CatA_Num_of_Apps_24_Hour")) == 2.0);
  CHECK(m.at(r, m.col_index("Weekend_CatB_Duration_24_Hour")) ==
        doctest::Approx(30.0).epsilon(1e-12));
  CHECK(m.at(r, m.col_index("Weekend_CatA_Duration_24_Hour")) == 0.0);
  // app.a 24 s vs app.b 6 s within weekday CatA
  std::vector<double> dist{24'000, 6'000};
  CHECK(m.at(r, m.col_index("Weekday_CatA_Entropy_24_Hour")) ==
        doctest::Approx(entropy(dist)).epsilon(1e-9));
  // smartphone aggregate covers both categories
  CHECK(m.at(r, m.col_index("Weekday_Smartphone_Duration_24_Hour")) ==
        doctest::Approx(30.0).epsilon(1e-12));
  CHECK(m.at(r, m.col_index("Weekend_Smartphone_Duration_24_Hour")) ==
        doctest::Approx(30.0).epsilon(1e-12));
  // P1 weekday: three intervals, gaps under 45 s inside the afternoon pair
  CHECK(m.at(r, m.col_index("Weekday_Smartphone_Total_Session_Num_24_Hour")) == 2.0);
}

TEST_CASE("hamming columns are self-excluded and direction-sensitive") {
  TinyCohort t;
  FeatureWorkspace ws(t.intervals, t.catalog, t.manifest);
  auto m = ws.assemble(t.classes);
  // P1 weekday 24h smartphone set {a,b}; dep ref P2 {a} dist 1; non refs
  // P3 {b} dist 1, P4 {c} dist 3 -> min 1; smoothed (1+1)/(1+1) = 1
  std::size_t r = m.row_index("P1");
  CHECK(m.at(r, m.col_index("Weekday_Smartphone_Ratio_of_Hamming_24_Hour")) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // P2 {a}: dep ref is only P1 {a,b} dist 1; non refs min dist 2 ({b}) ->
  // smoothed 2/3
  std::size_t r2 = m.row_index("P2");
  CHECK(m.at(r2, m.col_index("Weekday_Smartphone_Ratio_of_Hamming_24_Hour")) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("assemble needs a reference on each side") {
  TinyCohort t;
  FeatureWorkspace ws(t.intervals, t.catalog, t.manifest);
  std::map<std::string, bool> lop = {{"P1", true}, {"P3", false}, {"P4", false}};
  // P1's own row would leave the depressed side empty
  CHECK_THROWS_AS(ws.assemble(lop), EmptyReferenceGroup);
}

TEST_CASE("prevalence filter matches category usage") {
  TinyCohort t;
  FeatureWorkspace ws(t.intervals, t.catalog, t.manifest);
  auto frac = ws.category_user_fraction();
  CHECK(frac.at("CatA") == doctest::Approx(0.75));
  CHECK(frac.at("CatB") == doctest::Approx(0.5));
  CHECK(frac.at(AppCatalog::kSmartphone) == doctest::Approx(1.0));

  auto m = ws.assemble(t.classes);
  auto kept = prevalence_filter(m, 0.5);
  CHECK(kept.n_cols() == m.n_cols());  // both categories reach 50%
  auto strict = prevalence_filter(m, 0.6);
  CHECK(strict.n_cols() == m.n_cols() - 2 * 5 * 3);  // CatB columns dropped
  for (const auto& d : strict.dropped) CHECK(d.name.find("CatB") != std::string::npos);
  for (const auto& name : strict.feature_names)
    CHECK(name.find("CatB") == std::string::npos);
}

TEST_CASE("scaler oracle and train-only fit") {
  FeatureMatrix m;
  m.participants = {"P1", "P2", "P3", "P4"};
  m.feature_names = {"f"};
  m.values = {1, 2, 3, 100};
  auto params = fit_scaler(m, {"P1", "P2", "P3"});
  CHECK(params.mean[0] == doctest::Approx(2.0));
  // population SD: sqrt(2/3)
  CHECK(params.sd[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  auto scaled = apply_scaler(m, params);
  CHECK(scaled.at(0, 0) == doctest::Approx(-1.224745).epsilon(1e-6));
  CHECK(scaled.at(2, 0) == doctest::Approx(1.224745).epsilon(1e-6));
  // the held-out row is transformed with train statistics
  CHECK(scaled.at(3, 0) == doctest::Approx((100.0 - 2.0) / std::sqrt(2.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("constant training column scales to zero") {
  FeatureMatrix m;
  m.participants = {"P1", "P2", "P3"};
  m.feature_names = {"f"};
  m.values = {5, 5, 7};
  auto params = fit_scaler(m, {"P1", "P2"});
  auto scaled = apply_scaler(m, params);
  CHECK(scaled.at(0, 0) == 0.0);
  CHECK(scaled.at(1, 0) == 0.0);
}

TEST_CASE("matrix csv round-trip is byte-stable") {
  TinyCohort t;
  FeatureWorkspace ws(t.intervals, t.catalog, t.manifest);
  auto m = ws.assemble(t.classes);
  std::ostringstream a;
  write_matrix_csv(a, m);
  std::istringstream in(a.str());
  auto back = read_matrix_csv(in);
  CHECK(back.participants == m.participants);
  CHECK(back.feature_names == m.feature_names);
  REQUIRE(back.values.size() == m.values.size());
  std::ostringstream b;
  write_matrix_csv(b, back);
  CHECK(a.str() == b.str());
  for (std::size_t i = 0; i < m.values.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(m.values[i]).epsilon(1e-8));
}

TEST_CASE("synthetic cohorts are deterministic") {
  SynthConfig cfg;
  cfg.n = 25;
  cfg.seed = 11;
  auto a = synth_generate(cfg);
  auto b = synth_generate(cfg);
  REQUIRE(a.events.size() == b.events.size());
  CHECK(a.events.size() > 100'000);
  for (std::size_t i : {std::size_t(0), a.events.size() / 2, a.events.size() - 1}) {
    CHECK(a.events[i].timestamp_ms == b.events[i].timestamp_ms);
    CHECK(a.events[i].package == b.events[i].package);
  }
  cfg.seed = 12;
  auto c = synth_generate(cfg);
  bool differs = a.events.size() != c.events.size() ||
                 a.events.front().timestamp_ms != c.events.front().timestamp_ms ||
                 a.events.back().timestamp_ms != c.events.back().timestamp_ms;
  CHECK(differs);
}

TEST_CASE("synthetic cohort balance and label independence setup") {
  SynthConfig cfg;
  cfg.n = 40;
  cfg.balance = 0.51;
  cfg.seed = 5;
  auto s = synth_generate(cfg);
  int pos = 0;
  for (const auto& r : s.labels.records()) pos += r.depressed ? 1 : 0;
  CHECK(pos == 20);  // lround(40 * 0.51)
  CHECK(s.labels.size() == 40);
  CHECK(s.manifest.offset_min.size() == 40);
  CHECK(planted_feature_names(cfg) ==
        std::vector<std::string>{
            "Weekday_Communication_Entropy_24_Hour", "Weekday_Education_Duration_24_Hour",
            "Weekday_Social_Entropy_24_Hour", "Weekend_Games_Launch_6_Hour_SD"});
  SynthConfig nullcfg = cfg;
  nullcfg.mode = "null";
  CHECK(planted_feature_names(nullcfg).empty());
}

TEST_CASE("synthetic events survive their own ingest cleanly") {
  SynthConfig cfg;
  cfg.n = 25;
  cfg.seed = 2;
  auto s = synth_generate(cfg);
  std::ostringstream evs;
  write_events_jsonl(evs, s.events);
  std::istringstream in(evs.str());
  IngestReport rep;
  auto events = parse_events(in, s.manifest, &rep);
  auto ivs = build_intervals(events, s.manifest, &rep);
  CHECK(rep.events_parsed == s.events.size());
  CHECK(rep.orphan_background == 0);
  CHECK(rep.dropped_outside_window == 0);
  CHECK(rep.truncated_open == 0);
  CHECK(rep.zero_length_discarded == 0);
  CHECK(ivs.size() == 25);
  // every interval lands inside the window
  for (const auto& [pid, list] : ivs)
    for (const auto& v : list) {
      CHECK(v.start_ms >= s.manifest.window_start_ms());
      CHECK(v.end_ms <= s.manifest.window_end_ms);
    }
}

TEST_CASE("synth config validation") {
  SynthConfig bad;
  bad.n = 10;
  CHECK_THROWS_AS(synth_generate(bad), ConfigError);
  SynthConfig b2;
  b2.balance = 0.0;
  CHECK_THROWS_AS(synth_generate(b2), ConfigError);
  SynthConfig b3;
  b3.mode = "weird";
  CHECK_THROWS_AS(synth_generate(b3), ConfigError);
  SynthConfig b4;
  b4.mode = "null";
  b4.effects["weekday_education_duration"] = -0.4;
  CHECK_THROWS_AS(synth_generate(b4), ConfigError);
  SynthConfig b5;
  b5.effects["no_such_knob"] = 1.0;
  CHECK_THROWS_AS(synth_generate(b5), ConfigError);
}
