#include "pheno/sessions.hpp"

#include "pheno/errors.hpp"

namespace pheno {

const char* to_string(SessionKind kind) {
  switch (kind) {
    case SessionKind::Micro: return "micro";
    case SessionKind::Review: return "review";
    case SessionKind::Engage: return "engage";
  }
  return "?";
}

SessionKind classify_session(Ms active_duration_ms) {
  if (active_duration_ms <= kMicroMaxMs) return SessionKind::Micro;
  if (active_duration_ms <= kReviewMaxMs) return SessionKind::Review;
  return SessionKind::Engage;
}

std::vector<Session> sessionize(const std::vector<UsageInterval>& intervals, Ms gap_ms) {
  std::vector<Session> out;
  Session cur;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const UsageInterval& iv = intervals[i];
    if (iv.end_ms <= iv.start_ms)
      throw UnsortedInput("sessionize: non-positive interval at index " + std::to_string(i));
    if (!cur.members.empty()) {
      if (iv.start_ms < intervals[cur.members.back()].end_ms)
        throw UnsortedInput("sessionize: intervals overlap or are unsorted at index " +
                            std::to_string(i));
      if (iv.start_ms - cur.end_ms > gap_ms) {
        cur.active_duration_ms = 0;
        for (std::size_t m : cur.members)
          cur.active_duration_ms += intervals[m].duration_ms();
        cur.kind = classify_session(cur.active_duration_ms);
        out.push_back(std::move(cur));
        cur = Session{};
      }
    }
    if (cur.members.empty()) {
      cur.participant_id = iv.participant_id;
      cur.start_ms = iv.start_ms;
    }
    cur.members.push_back(i);
    cur.end_ms = iv.end_ms;
  }
  if (!cur.members.empty()) {
    cur.active_duration_ms = 0;
    for (std::size_t m : cur.members)
      cur.active_duration_ms += intervals[m].duration_ms();
    cur.kind = classify_session(cur.active_duration_ms);
    out.push_back(std::move(cur));
  }
  return out;
}

}  // namespace pheno
