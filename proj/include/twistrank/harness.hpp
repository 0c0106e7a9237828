#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twistrank/density.hpp"
#include "twistrank/selmer.hpp"

namespace twistrank {

struct SweepConfig {
  TwistFamily family;
  std::uint64_t N = 1;
  /// Only b with omega(b) strictly inside loglog N -+ (loglog N)^{3/4}.
  bool window_filter = false;
  /// When false each eligible b is followed by -b.
  bool positive_only = true;
  unsigned workers = 1;
  std::optional<std::filesystem::path> output;
  bool resume = false;
  std::uint64_t seed = 0;  // unused by sweeps
  /// Sub-range [range_lo, range_hi] of [1, N] for sharded runs; 0 = N.
  std::uint64_t range_lo = 1;
  std::uint64_t range_hi = 0;
  /// Stop after this many newly computed records (0 = no limit). Used to
  /// simulate an interrupted run.
  std::uint64_t stop_after = 0;

  void validate() const;
  std::uint64_t hi() const { return range_hi == 0 ? N : range_hi; }
  /// FNV-1a over family key, N, flags, range and code version.
  std::string hash() const;
};

struct ParitySplit {
  std::uint64_t even = 0;
  std::uint64_t odd = 0;
  bool operator==(const ParitySplit&) const = default;
};

struct DensityTable {
  std::uint64_t N = 0;
  std::uint64_t total = 0;
  std::map<int, std::uint64_t> counts;                  // dim -> count
  std::map<std::uint64_t, ParitySplit> parity_by_class;  // class rep -> split
  std::array<double, 3> moment_sums{};                  // sum 2^{k dim}, k = 1..3
  OmegaStats omega_hist;

  void add(const TwistRecord& r);
  /// Associative, commutative fold.
  void merge(const DensityTable& other);
  /// Recompute moment_sums from counts.
  void refresh_moments();

  double C(int d) const;
  /// Empirical mean of 2^{k dim}.
  double moment(int k) const;
  double even_fraction() const;

  bool operator==(const DensityTable&) const = default;
};

DensityTable empty_table(std::uint64_t N);

/// Eligible b for a config, in output order.
std::vector<std::int64_t> eligible_twists(const SweepConfig& config);

/// Compute a record for every eligible b, stream them (ascending |b|) to the
/// output file if any, and fold them into the table. Honours config.resume.
/// Output is identical for any worker count.
DensityTable sweep(const SweepConfig& config);

/// sweep() with resume forced on.
DensityTable resume(SweepConfig config);

// ---------------------------------------------------------------------------
// Record files: a header line, then one JSON record per line.

struct SweepHeader {
  std::string config_hash;
  std::string family;
  std::array<std::int64_t, 3> c{};
  std::uint64_t N = 0;
  bool window_filter = false;
  bool positive_only = true;
  std::uint64_t range_lo = 1;
  std::uint64_t range_hi = 0;
  std::string version;
};

std::string header_line(const SweepConfig& config);
std::string record_line(const TwistRecord& r);
TwistRecord parse_record(const std::string& line);

struct RecordFile {
  SweepHeader header;
  std::vector<TwistRecord> records;
  /// Byte length of the header plus every complete, well-formed record.
  std::uint64_t valid_bytes = 0;
  bool truncated_tail = false;
};

/// Reads a record file. A malformed or unterminated last line is reported
/// via truncated_tail; malformed lines elsewhere throw IoError.
RecordFile read_record_file(const std::filesystem::path& path);

DensityTable table_from_records(std::uint64_t N, const std::vector<TwistRecord>& records);

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { Text, Csv, PlotData };
ReportFormat parse_report_format(const std::string& name);

std::string report(const DensityTable& table, const AlphaTable& alphas, ReportFormat format);

/// Inverse of the CSV report.
DensityTable parse_csv_report(const std::string& csv);

}  // namespace twistrank
