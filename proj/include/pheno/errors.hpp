#ifndef PHENO_ERRORS_HPP
#define PHENO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pheno {

// Error categories map to CLI exit codes: config=1, data=2, internal=3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- ingest ----

class MalformedEvent : public DataError {
 public:
  MalformedEvent(std::size_t line_no, const std::string& why)
      : DataError("malformed event at line " + std::to_string(line_no) + ": " + why),
        line_no(line_no) {}
  std::size_t line_no;
};

class DuplicatePackage : public DataError {
 public:
  explicit DuplicatePackage(const std::string& package)
      : DataError("duplicate catalog package: " + package), package(package) {}
  std::string package;
};

class ReservedCategory : public DataError {
 public:
  explicit ReservedCategory(const std::string& package)
      : DataError("catalog row assigns reserved category \"Smartphone\" to " + package) {}
};

// ---- sessions ----

class UnsortedInput : public DataError {
 public:
  explicit UnsortedInput(const std::string& msg) : DataError(msg) {}
};

// ---- features ----

class NegativeDuration : public DataError {
 public:
  NegativeDuration() : DataError("negative duration in entropy input") {}
};

class EmptyReferenceGroup : public DataError {
 public:
  explicit EmptyReferenceGroup(const std::string& group)
      : DataError("empty " + group + " reference group for hamming ratio") {}
};

class UnknownParticipant : public DataError {
 public:
  explicit UnknownParticipant(const std::string& pid)
      : DataError("unknown participant: " + pid) {}
};

// ---- select ----

class KTooLarge : public ConfigError {
 public:
  KTooLarge(std::size_t k, std::size_t columns)
      : ConfigError("k=" + std::to_string(k) + " exceeds feature count " +
                    std::to_string(columns)) {}
  explicit KTooLarge(const std::string& msg) : ConfigError(msg) {}
};

class DegenerateLabels : public DataError {
 public:
  explicit DegenerateLabels(const std::string& msg) : DataError(msg) {}
};

class DepthOutOfRange : public ConfigError {
 public:
  explicit DepthOutOfRange(int depth)
      : ConfigError("boruta estimator max_depth " + std::to_string(depth) +
                    " outside [3,7]; pass allow_any_depth to override") {}
};

// ---- learn ----

class SingleClassTrainingSet : public DataError {
 public:
  SingleClassTrainingSet() : DataError("training set contains a single class") {}
};

class FoldsExceedSamples : public DataError {
 public:
  FoldsExceedSamples(std::size_t folds, std::size_t n)
      : DataError("cannot split " + std::to_string(n) + " samples into " +
                  std::to_string(folds) + " folds") {}
};

class EmptyReport : public DataError {
 public:
  EmptyReport() : DataError("metrics over an empty report") {}
};

class LeakageDetected : public InternalError {
 public:
  LeakageDetected(const std::string& pid, const std::string& stage)
      : InternalError("held-out participant " + pid + " touched during " + stage) {}
};

// ---- explain ----

class TooManyFeatures : public ConfigError {
 public:
  TooManyFeatures(std::size_t d, std::size_t d_max)
      : ConfigError("exact shapley over " + std::to_string(d) +
                    " features exceeds limit " + std::to_string(d_max)) {}
};

class InconsistentContract : public DataError {
 public:
  explicit InconsistentContract(const std::string& msg) : DataError(msg) {}
};

// ---- cohort ----

class ItemOutOfRange : public DataError {
 public:
  ItemOutOfRange(const std::string& pid, int value)
      : DataError("PHQ-9 item outside {0,1,2,3} for " + pid + ": " +
                  std::to_string(value)) {}
};

}  // namespace pheno

#endif
