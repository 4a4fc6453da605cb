#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tonealloc {

/// One row of the per-round trace.
struct TraceRecord {
  std::uint64_t round = 0;
  double residual = 0.0;
  double dual_value = 0.0;
  std::vector<double> prices;  // prices the demand was computed against
  std::vector<int> demand;
  std::size_t updates_performed = 0;
  std::size_t messages_dropped = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Comma-separated trace with header
///   round,residual,dual_value,updates_performed,messages_dropped,
///   mu_0..mu_{N-1},d_0..d_{N-1}
/// and reals printed with 17 significant digits.
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records,
                 std::size_t num_tones);
void write_trace(const std::filesystem::path& path,
                 const std::vector<TraceRecord>& records,
                 std::size_t num_tones);

[[nodiscard]] std::vector<TraceRecord> read_trace(std::istream& in);
[[nodiscard]] std::vector<TraceRecord> read_trace(
    const std::filesystem::path& path);

/// Sidecar file name for a trace: "<trace>.meta.json".
[[nodiscard]] std::filesystem::path metadata_path(
    const std::filesystem::path& trace_path);

[[nodiscard]] const char* version() noexcept;

}  // namespace tonealloc
