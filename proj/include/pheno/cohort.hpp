#ifndef PHENO_COHORT_HPP
#define PHENO_COHORT_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pheno {

constexpr int kPhq9Cutoff = 10;  // total >= 10 -> depressed

struct Phq9Record {
  std::string participant_id;
  std::array<int, 9> items{};  // each in {0,1,2,3}
  int total = 0;
  bool depressed = false;
};

// Validates items and derives total/class.
Phq9Record score_phq9(const std::string& participant_id, const std::array<int, 9>& items);

class CohortLabels {
 public:
  void add(Phq9Record record);
  bool depressed(const std::string& pid) const;
  bool has(const std::string& pid) const { return index_.count(pid) != 0; }
  const std::vector<Phq9Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  // pid -> class for every participant; the per-fold hamming reference map
  // is a filtered copy of this.
  std::map<std::string, bool> class_map() const;

 private:
  std::vector<Phq9Record> records_;
  std::map<std::string, std::size_t> index_;
};

// CSV with header "participant_id,i1,...,i9".
CohortLabels load_labels(std::istream& in);
CohortLabels load_labels_file(const std::string& path);
void write_labels(std::ostream& out, const CohortLabels& labels);

}  // namespace pheno

#endif
