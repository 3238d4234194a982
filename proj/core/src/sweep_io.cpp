#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "memochaos/error.hpp"
#include "memochaos/format.hpp"
#include "memochaos/sweep.hpp"

namespace memochaos {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw CorruptCheckpoint("checkpoint: expected a number");
  return j.get<double>();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void write_record_row(std::ostream& out, const SweepRecord& r) {
  out << format_sci(r.p) << ',' << format_sci(r.delta) << ','
      << format_sci(r.gamma) << ',' << format_sci(r.lambda_wolf) << ','
      << format_sci(r.lambda_benettin) << ',' << format_sci(r.en) << ','
      << to_string(r.status) << '\n';
}

constexpr std::string_view kSweepHeader =
    "P,Delta,gamma,lambda_wolf,lambda_benettin,En,status";

}  // namespace

std::string grid_hash(const GridSpec& grid, const AnalysisConfig& a) {
  std::ostringstream s;
  const auto put = [&s](double v) { s << format_sci(v) << ';'; };
  put(grid.p_min);
  put(grid.p_max);
  s << grid.p_steps << ';';
  put(grid.delta_min);
  put(grid.delta_max);
  s << grid.delta_steps << ';';
  put(grid.gamma);
  put(a.physics.sigma);
  put(a.physics.kappa);
  put(a.physics.gamma_m);
  put(a.integ.rel_tol);
  put(a.integ.abs_tol);
  put(a.integ.max_step);
  put(a.integ.sample_dtau);
  put(a.integ.t_end);
  put(a.integ.t_transient);
  s << a.wolf.embed_dim << ';' << a.wolf.embed_delay << ';'
    << a.wolf.evolve_steps << ';' << a.wolf.theiler << ';';
  put(a.wolf.min_sep);
  put(a.wolf.max_sep);
  put(a.wolf.max_angle);
  put(a.benettin.d0);
  put(a.benettin.renorm_dtau);
  s << a.benettin.seed << ';';
  put(a.chaos_threshold);
  put(a.peak_tol);
  put(a.stationarity_tol);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(s.str())));
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepHeader << '\n';
  for (const auto& r : records) write_record_row(out, r);
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::vector<SweepRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kSweepHeader) throw InvalidArgument("sweep CSV: bad header");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 7) throw InvalidArgument("sweep CSV: expected 7 columns");
    records.push_back({parse_double(cells[0]), parse_double(cells[1]),
                       parse_double(cells[2]), parse_double(cells[3]),
                       parse_double(cells[4]), parse_double(cells[5]),
                       parse_status(cells[6])});
  }
  if (!header_seen) throw InvalidArgument("sweep CSV: missing header");
  return records;
}

void write_bifurcation_csv(std::ostream& out,
                           const std::vector<BifurcationRow>& rows) {
  out << "delta,peak_value\n";
  for (const auto& row : rows) {
    for (double v : row.sample.peak_values) {
      out << format_sci(row.sample.delta) << ',' << format_sci(v) << '\n';
    }
  }
}

void write_scan_summary_csv(std::ostream& out,
                            const std::vector<BifurcationRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& row : rows) write_record_row(out, row.record);
}

void checkpoint_write(const std::map<std::size_t, SweepRecord>& completed,
                      const std::filesystem::path& path,
                      const std::string& hash) {
  json records = json::array();
  for (const auto& [index, r] : completed) {
    records.push_back({{"index", index},
                       {"P", r.p},
                       {"Delta", r.delta},
                       {"gamma", r.gamma},
                       {"lambda_wolf", number_or_null(r.lambda_wolf)},
                       {"lambda_benettin", number_or_null(r.lambda_benettin)},
                       {"En", number_or_null(r.en)},
                       {"status", std::string(to_string(r.status))}});
  }
  const json doc = {{"grid_hash", hash},
                    {"version", std::string(kToolVersion)},
                    {"records", std::move(records)}};

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    out << doc.dump(1) << '\n';
    if (!out) throw IoError("failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

CheckpointPlan checkpoint_resume(const std::filesystem::path& path,
                                 const GridSpec& grid,
                                 const AnalysisConfig& analysis) {
  CheckpointPlan plan;
  const auto schedule_rest = [&] {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!plan.completed.contains(i)) plan.remaining.push_back(i);
    }
  };

  std::error_code ec;
  if (!std::filesystem::exists(path, ec) ||
      std::filesystem::file_size(path, ec) == 0) {
    schedule_rest();
    return plan;
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("grid_hash") || !doc.contains("records") ||
      !doc["records"].is_array() || !doc["grid_hash"].is_string()) {
    throw CorruptCheckpoint("checkpoint: missing grid_hash or records");
  }
  if (doc["grid_hash"].get<std::string>() != grid_hash(grid, analysis)) {
    throw HashMismatch("checkpoint " + path.string() +
                       " was written for a different grid or configuration");
  }

  try {
    for (const auto& r : doc["records"]) {
      const auto index = r.at("index").get<std::size_t>();
      if (index >= grid.size()) {
        throw CorruptCheckpoint("checkpoint: record index outside the grid");
      }
      SweepRecord rec{number_from(r.at("P")),
                      number_from(r.at("Delta")),
                      number_from(r.at("gamma")),
                      number_from(r.at("lambda_wolf")),
                      number_from(r.at("lambda_benettin")),
                      number_from(r.at("En")),
                      parse_status(r.at("status").get<std::string>())};
      const int i = static_cast<int>(index / static_cast<std::size_t>(grid.delta_steps));
      const int j = static_cast<int>(index % static_cast<std::size_t>(grid.delta_steps));
      if (rec.p != grid.p_at(i) || rec.delta != grid.delta_at(j) ||
          rec.gamma != grid.gamma) {
        throw CorruptCheckpoint("checkpoint: record does not match its grid point");
      }
      if (!plan.completed.emplace(index, rec).second) {
        throw CorruptCheckpoint("checkpoint: duplicate record");
      }
    }
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptCheckpoint(std::string("checkpoint: ") + e.what());
  }
  schedule_rest();
  return plan;
}

}  // namespace memochaos
