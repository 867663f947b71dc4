#ifndef PHENO_SESSIONS_HPP
#define PHENO_SESSIONS_HPP

#include <string>
#include <vector>

#include "pheno/ingest.hpp"

namespace pheno {

constexpr Ms kSessionGapMs = 45'000;
constexpr Ms kMicroMaxMs = 15'000;
constexpr Ms kReviewMaxMs = 60'000;

enum class SessionKind { Micro, Review, Engage };

const char* to_string(SessionKind kind);

struct Session {
  std::string participant_id;
  Ms start_ms = 0;
  Ms end_ms = 0;
  std::vector<std::size_t> members;  // indices into the interval list
  Ms active_duration_ms = 0;         // sum of member interval durations
  SessionKind kind = SessionKind::Micro;
};

// Micro <= 15 s < Review <= 60 s < Engage, on active (summed) duration.
SessionKind classify_session(Ms active_duration_ms);

// Groups sorted non-overlapping intervals; a gap of exactly gap_ms still
// joins. Throws UnsortedInput if the precondition is violated.
std::vector<Session> sessionize(const std::vector<UsageInterval>& intervals,
                                Ms gap_ms = kSessionGapMs);

}  // namespace pheno

#endif
