#include "tonealloc/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tonealloc/errors.hpp"

namespace tonealloc {
namespace {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw IoError("malformed number in trace: '" + s + "'");
  }
  return x;
}

std::uint64_t parse_uint(const std::string& s) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw IoError("malformed integer in trace: '" + s + "'");
  }
  return x;
}

}  // namespace

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records,
                 std::size_t num_tones) {
  out << "round,residual,dual_value,updates_performed,messages_dropped";
  for (std::size_t n = 0; n < num_tones; ++n) out << ",mu_" << n;
  for (std::size_t n = 0; n < num_tones; ++n) out << ",d_" << n;
  out << '\n';
  for (const TraceRecord& r : records) {
    if (r.prices.size() != num_tones || r.demand.size() != num_tones) {
      throw IoError("trace record width differs from the tone count");
    }
    out << r.round << ',' << format_real(r.residual) << ','
        << format_real(r.dual_value) << ',' << r.updates_performed << ','
        << r.messages_dropped;
    for (double mu : r.prices) out << ',' << format_real(mu);
    for (int d : r.demand) out << ',' << d;
    out << '\n';
  }
}

void write_trace(const std::filesystem::path& path,
                 const std::vector<TraceRecord>& records,
                 std::size_t num_tones) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open trace file " + path.string());
  write_trace(out, records, num_tones);
  out.flush();
  if (!out) throw IoError("failed writing trace file " + path.string());
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace");
  const auto header = split_csv(line);
  if (header.size() < 5 || (header.size() - 5) % 2 != 0 ||
      header[0] != "round") {
    throw IoError("unrecognized trace header");
  }
  const std::size_t num_tones = (header.size() - 5) / 2;

  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw IoError("trace row has " + std::to_string(cells.size()) +
                    " cells, expected " + std::to_string(header.size()));
    }
    TraceRecord r;
    r.round = parse_uint(cells[0]);
    r.residual = parse_real(cells[1]);
    r.dual_value = parse_real(cells[2]);
    r.updates_performed = parse_uint(cells[3]);
    r.messages_dropped = parse_uint(cells[4]);
    for (std::size_t n = 0; n < num_tones; ++n) {
      r.prices.push_back(parse_real(cells[5 + n]));
    }
    for (std::size_t n = 0; n < num_tones; ++n) {
      r.demand.push_back(static_cast<int>(parse_uint(cells[5 + num_tones + n])));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file " + path.string());
  return read_trace(in);
}

std::filesystem::path metadata_path(const std::filesystem::path& trace_path) {
  return std::filesystem::path(trace_path.string() + ".meta.json");
}

const char* version() noexcept { return TONEALLOC_VERSION; }

}  // namespace tonealloc
