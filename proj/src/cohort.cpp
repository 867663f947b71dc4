#include "pheno/cohort.hpp"

#include <fstream>
#include <sstream>

#include "pheno/errors.hpp"

namespace pheno {

Phq9Record score_phq9(const std::string& participant_id, const std::array<int, 9>& items) {
  Phq9Record rec;
  rec.participant_id = participant_id;
  rec.items = items;
  for (int v : items) {
    if (v < 0 || v > 3) throw ItemOutOfRange(participant_id, v);
    rec.total += v;
  }
  rec.depressed = rec.total >= kPhq9Cutoff;
  return rec;
}

void CohortLabels::add(Phq9Record record) {
  if (index_.count(record.participant_id))
    throw DataError("duplicate labels row for " + record.participant_id);
  index_[record.participant_id] = records_.size();
  records_.push_back(std::move(record));
}

bool CohortLabels::depressed(const std::string& pid) const {
  auto it = index_.find(pid);
  if (it == index_.end()) throw UnknownParticipant(pid);
  return records_[it->second].depressed;
}

std::map<std::string, bool> CohortLabels::class_map() const {
  std::map<std::string, bool> out;
  for (const auto& r : records_) out[r.participant_id] = r.depressed;
  return out;
}

CohortLabels load_labels(std::istream& in) {
  CohortLabels labels;
  std::string line;
  if (!std::getline(in, line)) throw DataError("labels: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "participant_id,i1,i2,i3,i4,i5,i6,i7,i8,i9")
    throw DataError("labels: unexpected header \"" + line + "\"");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    if (!std::getline(row, field, ',') || field.empty())
      throw DataError("labels: bad row at line " + std::to_string(line_no));
    std::string pid = field;
    std::array<int, 9> items{};
    for (int i = 0; i < 9; ++i) {
      if (!std::getline(row, field, ','))
        throw DataError("labels: expected 9 item scores at line " + std::to_string(line_no));
      try {
        items[i] = std::stoi(field);
      } catch (const std::exception&) {
        throw DataError("labels: non-integer item at line " + std::to_string(line_no));
      }
    }
    labels.add(score_phq9(pid, items));
  }
  return labels;
}

CohortLabels load_labels_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  return load_labels(in);
}

void write_labels(std::ostream& out, const CohortLabels& labels) {
  out << "participant_id,i1,i2,i3,i4,i5,i6,i7,i8,i9\n";
  for (const auto& r : labels.records()) {
    out << r.participant_id;
    for (int v : r.items) out << ',' << v;
    out << '\n';
  }
}

}  // namespace pheno
