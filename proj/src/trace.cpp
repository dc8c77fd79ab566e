#include "amkl/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amkl/numfmt.hpp"

namespace amkl {

std::vector<double> IterTrace::f_values() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.f);
  return out;
}

std::vector<double> IterTrace::dist_values() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.dist);
  return out;
}

std::vector<std::pair<std::string, std::vector<double>>> IterTrace::diff_series() const {
  std::vector<std::pair<std::string, std::vector<double>>> series;
  for (const auto& rec : records) {
    if (rec.k == 0) continue;
    for (const auto& [name, value] : rec.block_diffs) {
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const auto& s) { return s.first == name; });
      if (it == series.end()) {
        series.emplace_back(name, std::vector<double>{value});
      } else {
        it->second.push_back(value);
      }
    }
  }
  return series;
}

std::string trace_record_line(const IterRecord& rec) {
  std::string line = "{\"k\":" + std::to_string(rec.k);
  line += ",\"f\":" + format_g17(rec.f);
  line += ",\"dist\":" + format_g17(rec.dist);
  line += ",\"block_diffs\":{";
  bool first = true;
  for (const auto& [name, value] : rec.block_diffs) {
    if (!first) line += ',';
    first = false;
    line += '"' + name + "\":" + format_g17(value);
  }
  line += "},\"wall_nanos\":0}";
  return line;
}

void write_trace_jsonl(std::ostream& os, const IterTrace& trace) {
  for (const auto& rec : trace.records) os << trace_record_line(rec) << '\n';
}

void write_trace_file(const std::string& path, const IterTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write trace file " + path);
  write_trace_jsonl(os, trace);
}

IterTrace read_trace_jsonl(std::istream& is) {
  IterTrace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::ordered_json obj;
    try {
      obj = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("k") || !obj.contains("f") || !obj.contains("dist")) {
      throw std::runtime_error("trace line " + std::to_string(lineno) +
                               ": expected keys k, f, dist");
    }
    IterRecord rec;
    rec.k = obj.at("k").get<std::int64_t>();
    rec.f = obj.at("f").get<double>();
    rec.dist = obj.at("dist").get<double>();
    if (obj.contains("block_diffs")) {
      for (const auto& [name, value] : obj.at("block_diffs").items()) {
        rec.block_diffs.emplace_back(name, value.get<double>());
      }
    }
    if (obj.contains("wall_nanos")) rec.wall_nanos = obj.at("wall_nanos").get<std::int64_t>();
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

IterTrace read_trace_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read trace file " + path);
  return read_trace_jsonl(is);
}

std::string config_digest(const std::string& canonical) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace amkl
