#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace amkl {

/// One per-cycle record: objective value, subgradient distance, and the
/// per-block step norms ||B_k - B_{k-1}||.
struct IterRecord {
  std::int64_t k = 0;
  double f = 0.0;
  double dist = 0.0;
  std::vector<std::pair<std::string, double>> block_diffs;
  std::int64_t wall_nanos = 0;
};

struct IterTrace {
  std::vector<IterRecord> records;
  std::uint64_t seed = 0;
  std::string config_digest;

  std::vector<double> f_values() const;
  std::vector<double> dist_values() const;
  /// Per-block diff sequences in first-appearance order (records at k >= 1).
  std::vector<std::pair<std::string, std::vector<double>>> diff_series() const;
};

/// Incremental consumer for long runs; records arrive in k order.
using TraceSink = std::function<void(const IterRecord&)>;

/// Raised when an iteration produces a non-finite value; carries everything
/// recorded up to that point.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, IterTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const IterTrace& partial_trace() const { return partial_; }

 private:
  IterTrace partial_;
};

/// One JSON object per line with keys k, f, dist, block_diffs, wall_nanos.
/// Numbers carry 17 significant digits so files are byte-stable and re-parse
/// to the exact same doubles. wall_nanos is written as 0 (timing is not
/// reproducible; real durations go to the run manifest).
std::string trace_record_line(const IterRecord& rec);
void write_trace_jsonl(std::ostream& os, const IterTrace& trace);
void write_trace_file(const std::string& path, const IterTrace& trace);

IterTrace read_trace_jsonl(std::istream& is);
IterTrace read_trace_file(const std::string& path);

/// FNV-1a hash of a canonical configuration string; stable across platforms.
std::string config_digest(const std::string& canonical);

}  // namespace amkl
