#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "layoutkit/form.hpp"

namespace layoutkit::cli {

/// Exit codes of the layoutkit tool.
enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2 };

struct IngestSummary {
  std::size_t rows = 0;
  std::string form;
};

/// Reads one JSON document per non-blank line and writes the resulting buffer
/// set to `out_dir`. With a schema, each line must conform to it (numbers are
/// converted without loss, or rejected); without, the layout is inferred.
/// Throws Error with a "line N: " prefix on bad input.
IngestSummary ingest(std::istream& input, const std::optional<FormNode>& schema, const std::filesystem::path& out_dir);

/// Writes one JSON document per row. Throws Error/DecodeError on a bad set.
std::size_t decode_to(const std::filesystem::path& in_dir, std::ostream& out);

/// Every structural problem found in a set on disk; empty when it decodes.
std::vector<std::string> validate_dir(const std::filesystem::path& in_dir);

/// Bench workload: rows of {x: float64, y: `depth` nested lists of int32},
/// list lengths uniform in [0, 4], fully determined by the seed.
struct Workload {
  std::size_t rows = 0;
  int depth = 2;
  std::vector<double> x;
  /// Per nesting level, the length of every list at that level in order.
  std::vector<std::vector<std::uint32_t>> lengths;
  std::vector<std::int32_t> values;
};

Workload make_workload(std::size_t rows, int depth, std::uint64_t seed);

struct BenchConfig {
  std::size_t rows = 1000000;
  int depth = 2;
  std::uint64_t seed = 1;
  int reps = 3;
};

struct BenchTiming {
  std::string path;
  int rep = 0;
  double seconds = 0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchTiming> timings;
  double typed_rows_per_second = 0;
  double dynamic_rows_per_second = 0;
  /// typed / dynamic; empty for a 0-row workload.
  std::optional<double> ratio;
  /// Both paths produced identical decoded values.
  bool outputs_agree = false;
};

BenchReport run_bench(const BenchConfig& config);
std::string format_report(const BenchReport& report);
std::string format_csv(const BenchReport& report);

/// Entry point shared by the binary and the tests.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace layoutkit::cli
