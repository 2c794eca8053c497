#include "dtvoi/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace dtvoi {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::system_error(errno, std::generic_category(), "write failed for " + path.string());
}

double to_double(const std::string& cell, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) throw std::runtime_error("bad " + what + " value '" + cell + "'");
  return v;
}

int to_int(const std::string& cell, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) throw std::runtime_error("bad " + what + " value '" + cell + "'");
  return v;
}

}  // namespace

std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string trace_row(const QIRecord& r) {
  std::string agents;
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    if (i) agents += ';';
    agents += std::to_string(r.agents[i]);
  }
  std::string row;
  row += std::to_string(r.qi) + ',';
  row += std::string(to_string(r.policy)) + ',';
  row += std::to_string(r.run) + ',';
  row += std::to_string(r.n_scheduled) + ',';
  row += format_sig9(r.total_power) + ',';
  row += (r.violated ? "1," : "0,");
  row += format_sig9(r.sq_error) + ',';
  row += format_sig9(r.objective) + ',';
  row += agents;
  return row;
}

QIRecord parse_trace_row(const std::string& line) {
  const auto cells = split(line, ',');
  if (cells.size() != 9) {
    throw std::runtime_error("trace row has " + std::to_string(cells.size()) + " columns, expected 9");
  }
  QIRecord r;
  r.qi = to_int(cells[0], "qi");
  r.policy = policy_from_string(cells[1]);
  r.run = to_int(cells[2], "run");
  r.n_scheduled = to_int(cells[3], "n_scheduled");
  r.total_power = to_double(cells[4], "total_power_w");
  if (cells[5] != "0" && cells[5] != "1") throw std::runtime_error("bad violated value '" + cells[5] + "'");
  r.violated = cells[5] == "1";
  r.sq_error = to_double(cells[6], "sq_error");
  r.objective = to_double(cells[7], "objective");
  if (!cells[8].empty()) {
    for (const auto& id : split(cells[8], ';')) r.agents.push_back(to_int(id, "agent id"));
  }
  return r;
}

void emit_csv(const std::vector<QIRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kTraceHeader << '\n';
  for (const auto& r : records) out << trace_row(r) << '\n';
  finish(out, path);
}

std::vector<QIRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error(path.string() + ": unexpected trace header");
  }
  std::vector<QIRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_trace_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void emit_summary(const AggregateMetrics& agg, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kSummaryHeader << '\n';
  for (const auto& pa : agg.policies) {
    for (const auto& q : pa.per_qi) {
      out << to_string(pa.policy) << ',' << q.qi << ',' << format_sig9(q.mean_n_scheduled) << ','
          << format_sig9(q.mean_total_power) << ',' << format_sig9(q.violation_prob) << ','
          << format_sig9(q.rmse) << '\n';
    }
  }
  finish(out, path);
}

void emit_fleets(const std::map<int, Fleet>& fleets, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kFleetHeader << '\n';
  for (const auto& [run, fleet] : fleets) {
    for (const auto& a : fleet.agents()) {
      out << run << ',' << a.id << ',' << to_string(a.kind) << ',' << format_sig9(a.location.x())
          << ',' << format_sig9(a.location.y()) << ',' << format_sig9(a.meas_cov(0, 0)) << ','
          << format_sig9(a.meas_cov(1, 1)) << ',' << format_sig9(a.ap_distance) << '\n';
    }
  }
  finish(out, path);
}

Fleet read_fleet(const std::filesystem::path& path, double d_max, const Vec2& ap, int run) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fleet file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kFleetHeader) {
    throw ConfigError(path.string() + ": fleet header must be '" + std::string(kFleetHeader) + "'");
  }
  std::vector<SensingAgent> agents;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto cells = split(line, ',');
      if (cells.size() != 8) throw std::runtime_error("expected 8 columns");
      if (run >= 0 && to_int(cells[0], "run") != run) continue;
      SensingAgent a;
      a.id = to_int(cells[1], "id");
      a.kind = sensor_kind_from_string(cells[2]);
      a.location = {to_double(cells[3], "x"), to_double(cells[4], "y")};
      a.meas_cov = Mat2::Zero();
      a.meas_cov(0, 0) = to_double(cells[5], "var_1");
      a.meas_cov(1, 1) = to_double(cells[6], "var_2");
      a.ap_distance = cells[7].empty() ? std::max(1.0, (a.location - ap).norm())
                                       : to_double(cells[7], "ap_distance");
      agents.push_back(a);
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return Fleet(std::move(agents), d_max);
}

void write_outputs(const SimConfig& cfg, const MonteCarloResult& result,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  emit_csv(result.records, dir / "trace.csv");
  emit_summary(result.metrics, dir / "summary.csv");
  emit_fleets(result.fleets, dir / "fleet.csv");
  auto out = open_out(dir / "config.resolved");
  out << resolved_config(cfg);
  finish(out, dir / "config.resolved");
}

}  // namespace dtvoi
