#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace overparam {

#ifndef OVERPARAM_VERSION
#define OVERPARAM_VERSION "0.1.0-unknown"
#endif

inline constexpr const char* kVersion = OVERPARAM_VERSION;

enum class RunStatus { Ok, Diverged };

inline const char* to_string(RunStatus s) { return s == RunStatus::Ok ? "ok" : "diverged"; }

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = std::numeric_limits<double>::quiet_NaN();  // NaN when not evaluated
  double lambda = 1.0;
  double reg_value = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> records;
  RunStatus status = RunStatus::Ok;
  std::string message;
  // Final selection step of the three-layer algorithm (-1 when not run).
  int j_star = -1;
  std::vector<double> j_losses;

  bool ok() const { return status == RunStatus::Ok; }
  const EpochRecord& final_record() const { return records.back(); }
};

/// Identifies one run in the CSV output.
struct RunMeta {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string arch;
  std::string variant = "experiment";
  long m1 = 0;
  long m2 = 0;
  long N = 0;
  double wd = 0.0;
  std::string config_hash = "0";
};

inline constexpr const char* kTrainLogHeader =
    "run_id,seed,arch,variant,m1,m2,N,epoch,train_loss,test_loss,lambda,reg_value,lr,wd,status,config_hash,version";

namespace detail {
inline void put_real(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "";
  } else {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
    os.write(buf, res.ptr - buf);
  }
}
}  // namespace detail

inline void write_train_log_rows(std::ostream& os, const RunMeta& meta, const TrainLog& log) {
  for (const auto& r : log.records) {
    os << meta.run_id << ',' << meta.seed << ',' << meta.arch << ',' << meta.variant << ',' << meta.m1 << ','
       << meta.m2 << ',' << meta.N << ',' << r.epoch << ',';
    detail::put_real(os, r.train_loss);
    os << ',';
    detail::put_real(os, r.test_loss);
    os << ',';
    detail::put_real(os, r.lambda);
    os << ',';
    detail::put_real(os, r.reg_value);
    os << ',';
    detail::put_real(os, r.lr);
    os << ',';
    detail::put_real(os, meta.wd);
    os << ',' << to_string(log.status) << ',' << meta.config_hash << ',' << kVersion << '\n';
  }
}

inline void write_train_log_csv(std::ostream& os, const RunMeta& meta, const TrainLog& log) {
  os << kTrainLogHeader << '\n';
  write_train_log_rows(os, meta, log);
}

}  // namespace overparam
