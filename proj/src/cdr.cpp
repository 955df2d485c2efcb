#include "celltide/cdr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "celltide/error.hpp"
#include "celltide/format.hpp"

namespace celltide::cdr {

namespace {

constexpr std::array<std::string_view, 5> kChannelNames = {"sms_in", "sms_out", "call_in", "call_out", "internet"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

template <typename Int>
Int parse_int(std::string_view field, std::size_t line_no, const char* name) {
  field = trim(field);
  Int value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    fail(ErrorCode::Parse, where(line_no) + name + " '" + std::string(field) + "' is not an integer");
  }
  return value;
}

double parse_activity(std::string_view field, std::size_t line_no, const char* name) {
  field = trim(field);
  if (field.empty()) return 0.0;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value) || value < 0.0) {
    fail(ErrorCode::Parse, where(line_no) + name + " '" + std::string(field) + "' is not a nonnegative number");
  }
  return value;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// First field of a line, for grid filtering before full parsing.
std::string_view first_field(std::string_view line, char separator) {
  return line.substr(0, line.find(separator));
}

}  // namespace

std::optional<Channel> parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

std::string_view channel_name(Channel channel) { return kChannelNames[static_cast<std::size_t>(channel)]; }

double CdrRecord::activity(Channel channel) const {
  switch (channel) {
    case Channel::SmsIn: return sms_in;
    case Channel::SmsOut: return sms_out;
    case Channel::CallIn: return call_in;
    case Channel::CallOut: return call_out;
    case Channel::Internet: return internet;
  }
  return 0.0;
}

std::optional<CdrRecord> parse_line(std::string_view line, std::size_t line_no, char separator) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  if (trim(line).empty()) return std::nullopt;

  std::array<std::string_view, 8> fields{};
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(separator, start);
    if (n == fields.size()) fail(ErrorCode::Parse, where(line_no) + "more than 8 fields");
    fields[n++] = line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (n < 2) fail(ErrorCode::Parse, where(line_no) + "expected grid id and timestamp");

  CdrRecord r;
  r.grid_id = parse_int<int>(fields[0], line_no, "grid id");
  if (r.grid_id < 1 || r.grid_id > kMaxGridId) {
    fail(ErrorCode::Parse, where(line_no) + "grid id " + std::to_string(r.grid_id) + " outside 1.." +
                               std::to_string(kMaxGridId));
  }
  r.timestamp_ms = parse_int<std::int64_t>(fields[1], line_no, "timestamp");
  if (n > 2 && !trim(fields[2]).empty()) r.country_code = parse_int<int>(fields[2], line_no, "country code");
  if (n > 3) r.sms_in = parse_activity(fields[3], line_no, "sms_in");
  if (n > 4) r.sms_out = parse_activity(fields[4], line_no, "sms_out");
  if (n > 5) r.call_in = parse_activity(fields[5], line_no, "call_in");
  if (n > 6) r.call_out = parse_activity(fields[6], line_no, "call_out");
  if (n > 7) r.internet = parse_activity(fields[7], line_no, "internet");
  return r;
}

std::int64_t ms_to_slot(std::int64_t timestamp_ms, std::int64_t t0_ms) {
  if (timestamp_ms < t0_ms) {
    fail(ErrorCode::InvalidArgument,
         "timestamp " + std::to_string(timestamp_ms) + " precedes series start " + std::to_string(t0_ms));
  }
  return (timestamp_ms - t0_ms) / kSlotMs;
}

ActivitySeries aggregate(std::span<const CdrRecord> records, int grid_id, Channel channel, std::int64_t t0_ms,
                         std::size_t n_slots) {
  if (n_slots == 0) fail(ErrorCode::InvalidArgument, "aggregate: n_slots must be positive");
  ActivitySeries series{grid_id, channel, t0_ms, std::vector<double>(n_slots, 0.0)};
  for (const auto& r : records) {
    if (r.grid_id != grid_id || r.timestamp_ms < t0_ms) continue;
    const auto slot = static_cast<std::size_t>(ms_to_slot(r.timestamp_ms, t0_ms));
    if (slot >= n_slots) continue;
    series.values[slot] += r.activity(channel);
  }
  return series;
}

ActivitySeries ingest_dir(const std::filesystem::path& dir, int grid_id, Channel channel) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::Io, "not a directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (files.empty()) fail(ErrorCode::Io, "no input files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  const std::string grid_text = std::to_string(grid_id);
  std::vector<CdrRecord> kept;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      // Cheap reject of other grids; the full parse still validates ours.
      const auto head = trim(first_field(line, '\t'));
      if (!head.empty() && head != grid_text && head.find_first_not_of("0123456789") == std::string_view::npos) {
        continue;
      }
      try {
        if (auto r = parse_line(line, line_no); r && r->grid_id == grid_id) kept.push_back(*r);
      } catch (const Error& e) {
        fail(e.code(), file.filename().string() + ": " + e.what());
      }
    }
  }
  if (kept.empty()) fail(ErrorCode::Io, "no records for grid " + grid_text + " in " + dir.string());

  std::int64_t first = INT64_MAX;
  std::int64_t last = INT64_MIN;
  for (const auto& r : kept) {
    const std::int64_t slot = floor_div(r.timestamp_ms, kSlotMs);
    first = std::min(first, slot);
    last = std::max(last, slot);
  }
  return aggregate(kept, grid_id, channel, first * kSlotMs, static_cast<std::size_t>(last - first + 1));
}

void write_series_csv(std::ostream& out, const ActivitySeries& series) {
  out << "slot,timestamp_ms,value\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out << i << ',' << series.t0_ms + static_cast<std::int64_t>(i) * kSlotMs << ',' << format_double(series.values[i])
        << '\n';
  }
}

ActivitySeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "slot,timestamp_ms,value") {
    fail(ErrorCode::Parse, "series csv: expected header 'slot,timestamp_ms,value'");
  }
  ActivitySeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos) fail(ErrorCode::Parse, "series csv " + where(line_no) + "expected 3 columns");
    const auto slot = parse_int<std::int64_t>(row.substr(0, c1), line_no, "slot");
    const auto ts = parse_int<std::int64_t>(row.substr(c1 + 1, c2 - c1 - 1), line_no, "timestamp_ms");
    const double value = parse_activity(row.substr(c2 + 1), line_no, "value");
    if (series.values.empty()) series.t0_ms = ts;
    const auto expected = static_cast<std::int64_t>(series.values.size());
    if (slot != expected || ts != series.t0_ms + expected * kSlotMs) {
      fail(ErrorCode::Parse, "series csv " + where(line_no) + "slots must be consecutive from 0");
    }
    series.values.push_back(value);
  }
  if (series.values.empty()) fail(ErrorCode::Parse, "series csv: no rows");
  return series;
}

}  // namespace celltide::cdr
