#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace celltide::cdr {

inline constexpr std::int64_t kSlotMs = 600'000;
inline constexpr std::size_t kSlotsPerDay = 144;
inline constexpr int kMaxGridId = 10'000;

enum class Channel { SmsIn, SmsOut, CallIn, CallOut, Internet };

std::optional<Channel> parse_channel(std::string_view name);
std::string_view channel_name(Channel channel);

/// One raw row of the Milan activity dump. Empty activity fields are 0.
struct CdrRecord {
  int grid_id = 0;
  std::int64_t timestamp_ms = 0;
  int country_code = 0;
  double sms_in = 0.0;
  double sms_out = 0.0;
  double call_in = 0.0;
  double call_out = 0.0;
  double internet = 0.0;

  double activity(Channel channel) const;
};

/// Gap-free per-grid series; values[i] covers [t0_ms + i·kSlotMs, t0_ms + (i+1)·kSlotMs).
struct ActivitySeries {
  int grid_id = 0;
  Channel channel = Channel::Internet;
  std::int64_t t0_ms = 0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const ActivitySeries&) const = default;
};

/// Parses one tab-separated record (grid, timestamp, country, sms in/out,
/// call in/out, internet). Blank lines yield nullopt; malformed ones throw a
/// Parse error naming `line_no`.
std::optional<CdrRecord> parse_line(std::string_view line, std::size_t line_no = 0, char separator = '\t');

std::int64_t ms_to_slot(std::int64_t timestamp_ms, std::int64_t t0_ms);

/// Sums `channel` for `grid_id` into n_slots bins starting at t0_ms, in input
/// order. Records of other grids or outside the window are dropped.
ActivitySeries aggregate(std::span<const CdrRecord> records, int grid_id, Channel channel, std::int64_t t0_ms,
                         std::size_t n_slots);

/// Reads every regular file of `dir` in lexicographic name order and builds
/// the series spanning the first to the last slot seen for `grid_id`.
ActivitySeries ingest_dir(const std::filesystem::path& dir, int grid_id, Channel channel);

void write_series_csv(std::ostream& out, const ActivitySeries& series);
ActivitySeries read_series_csv(std::istream& in);

}  // namespace celltide::cdr
