#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vlink/harness.hpp"

namespace vlink {

using nlohmann::json;

const std::vector<std::string> kCsvColumns = {"modulation", "baud_gbd",   "gross_gbps", "oma_dbm",      "fiber_m",
                                              "dsp_mode",   "seed",       "symbols",    "pre_fec_ber",  "ber_ci_lo",
                                              "ber_ci_hi",  "ser",        "kp4_pass",   "net_gbps_kp4", "air_gbps"};

namespace {

std::string fmt(const char* f, double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

SweepSpec sweep_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "sweep spec must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "base" && it.key() != "axes" && it.key() != "repeats" && it.key() != "base_seed")
      throw ConfigError(it.key(), "unknown field");
  SweepSpec s;
  if (j.contains("base")) {
    try {
      s.base = config_from_json(j.at("base"));
    } catch (const ConfigError& e) {
      throw ConfigError("base." + e.path(), e.what());
    }
  }
  if (j.contains("repeats")) {
    if (!j.at("repeats").is_number_integer() || j.at("repeats").get<std::int64_t>() < 1)
      throw ConfigError("repeats", "must be a positive integer");
    s.repeats = j.at("repeats").get<std::size_t>();
  }
  if (j.contains("base_seed")) {
    if (!j.at("base_seed").is_number_unsigned() && !(j.at("base_seed").is_number_integer() && j.at("base_seed").get<std::int64_t>() >= 0))
      throw ConfigError("base_seed", "must be a non-negative integer");
    s.base_seed = j.at("base_seed").get<std::uint64_t>();
  }
  if (j.contains("axes")) {
    const json& axes = j.at("axes");
    if (!axes.is_array()) throw ConfigError("axes", "must be an array");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const std::string p = "axes[" + std::to_string(i) + "]";
      const json& a = axes[i];
      if (!a.is_object() || !a.contains("path") || !a.at("path").is_string())
        throw ConfigError(p + ".path", "must be a string");
      if (!a.contains("values") || !a.at("values").is_array() || a.at("values").empty())
        throw ConfigError(p + ".values", "must be a non-empty array");
      SweepAxis axis;
      axis.path = a.at("path").get<std::string>();
      for (const auto& v : a.at("values")) axis.values.push_back(v);
      s.axes.push_back(std::move(axis));
    }
  }
  return s;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
  return sweep_from_json(j);
}

void write_csv(const std::vector<PointResult>& results, std::ostream& os) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) os << (i ? "," : "") << kCsvColumns[i];
  os << "\n";
  for (const auto& r : results) {
    const auto& c = r.config;
    const double bps = Alphabet::of(c.modulation).bits_per_symbol();
    const auto& m = r.report;
    os << to_string(c.modulation) << ',' << fmt("%.4f", c.baud_gbd) << ',' << fmt("%.4f", c.baud_gbd * bps) << ','
       << fmt("%.3f", c.link.oma_dbm) << ',' << fmt("%.3f", c.link.fiber.length_m) << ',' << to_string(c.dsp.mode)
       << ',' << c.seed << ',' << r.symbols << ',';
    if (r.ok) {
      os << fmt("%.6e", m.pre_fec_ber.ber) << ',' << fmt("%.6e", m.pre_fec_ber.ci.lo) << ','
         << fmt("%.6e", m.pre_fec_ber.ci.hi) << ',' << fmt("%.6e", m.ser.ser) << ',' << (m.kp4_pass ? "true" : "false")
         << ',' << fmt("%.4f", m.net_rate_kp4_gbps) << ',' << fmt("%.4f", m.air_hd_gbps) << "\n";
    } else {
      os << "nan,nan,nan,nan,false,0.0000,nan\n";
    }
  }
}

void write_csv(const std::vector<PointResult>& results, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_csv(results, out);
}

void write_eye_csv(const EyeHistogram& eye, std::ostream& os) {
  os << "amplitude";
  for (int p = 0; p < eye.bins_phase; ++p) os << ",phase_" << p;
  os << "\n";
  const double step = (eye.amp_max - eye.amp_min) / eye.bins_amp;
  for (int a = 0; a < eye.bins_amp; ++a) {
    os << fmt("%.6f", eye.amp_min + (a + 0.5) * step);
    for (int p = 0; p < eye.bins_phase; ++p) os << ',' << eye.at(p, a);
    os << "\n";
  }
}

namespace {

EyeHistogram read_eye_csv(const std::filesystem::path& path, double amp_min, double amp_max) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  EyeHistogram eye;
  eye.bins_phase = static_cast<int>(std::count(line.begin(), line.end(), ','));
  eye.amp_min = amp_min;
  eye.amp_max = amp_max;
  std::vector<std::vector<std::uint64_t>> rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // bin centre
    std::vector<std::uint64_t> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stoull(cell));
    if (static_cast<int>(row.size()) != eye.bins_phase) throw std::runtime_error("malformed eye CSV " + path.string());
    rows.push_back(std::move(row));
  }
  eye.bins_amp = static_cast<int>(rows.size());
  eye.counts.assign(static_cast<std::size_t>(eye.bins_phase) * rows.size(), 0);
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t ph = 0; ph < rows[a].size(); ++ph) eye.counts[ph * rows.size() + a] = rows[a][ph];
  return eye;
}

}  // namespace

void write_json(const std::vector<PointResult>& results, const std::filesystem::path& path) {
  json points = json::array();
  for (const auto& r : results) {
    const auto& c = r.config;
    const auto& m = r.report;
    json p;
    p["index"] = r.index;
    p["coordinates"] = r.coordinates;
    p["config"] = to_json(c);
    p["status"] = r.ok ? "ok" : "failed";
    p["error"] = r.ok ? json(nullptr) : json(r.error);
    p["stage"] = r.ok ? json(nullptr) : json(r.error_stage);
    const double bps = Alphabet::of(c.modulation).bits_per_symbol();
    json mj = {{"modulation", to_string(c.modulation)},
               {"baud_gbd", c.baud_gbd},
               {"gross_gbps", c.baud_gbd * bps},
               {"oma_dbm", c.link.oma_dbm},
               {"fiber_m", c.link.fiber.length_m},
               {"dsp_mode", to_string(c.dsp.mode)},
               {"seed", c.seed},
               {"symbols", r.symbols},
               {"extend_factor", r.extend_factor},
               {"extend_capped", r.extend_capped}};
    if (r.ok) {
      mj["bits"] = m.pre_fec_ber.bits;
      mj["bit_errors"] = m.pre_fec_ber.errors;
      mj["pre_fec_ber"] = m.pre_fec_ber.ber;
      mj["ber_ci_lo"] = m.pre_fec_ber.ci.lo;
      mj["ber_ci_hi"] = m.pre_fec_ber.ci.hi;
      mj["ber_unreliable"] = m.pre_fec_ber.unreliable;
      mj["symbol_errors"] = m.ser.errors;
      mj["ser"] = m.ser.ser;
      mj["kp4_pass"] = m.kp4_pass;
      mj["net_gbps_kp4"] = m.net_rate_kp4_gbps;
      mj["air_gbps"] = m.air_hd_gbps;
      mj["max_burst"] = m.bursts.max_run;
      mj["burst_histogram"] = m.bursts.histogram;
    }
    p["metrics"] = mj;
    if (r.ok) {
      const auto& d = r.diag;
      json dj = {{"rx_3db_ghz", r.rx_3db_hz / 1e9},
                 {"timing_phase_ui", d.timing_phase_ui},
                 {"timing_lag", d.timing_lag},
                 {"timing_mse", d.timing_mse},
                 {"train_mse", d.train_mse},
                 {"train_mse_db", d.train_mse_db},
                 {"mse_trace", d.mse_trace},
                 {"linear_taps", d.linear_taps},
                 {"nonlinear_taps", d.nonlinear_taps},
                 {"nc_taps", d.nc_taps},
                 {"nc_decision_error_rate", d.nc_decision_error_rate},
                 {"level_histogram", d.level_histogram},
                 {"eye_csv", nullptr}};
      if (r.eye) {
        const std::filesystem::path side =
            path.parent_path() / (path.stem().string() + "_eye_" + std::to_string(r.index) + ".csv");
        auto out = open_out(side);
        write_eye_csv(*r.eye, out);
        dj["eye_csv"] = side.filename().string();
        dj["eye_amp_range"] = {r.eye->amp_min, r.eye->amp_max};
      }
      p["diagnostics"] = dj;
    }
    points.push_back(std::move(p));
  }
  json doc = {{"schema", "vlink-results/1"}, {"columns", kCsvColumns}, {"points", points}};
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

std::vector<PointResult> load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const json doc = json::parse(in);
  if (doc.value("schema", "") != "vlink-results/1") throw std::runtime_error("unrecognized results schema");
  std::vector<PointResult> out;
  for (const auto& p : doc.at("points")) {
    PointResult r;
    r.index = p.at("index").get<std::size_t>();
    r.coordinates = p.at("coordinates");
    r.config = config_from_json(p.at("config"));
    r.ok = p.at("status") == "ok";
    if (!r.ok) {
      r.error = p.at("error").get<std::string>();
      r.error_stage = p.at("stage").get<std::string>();
    }
    const json& mj = p.at("metrics");
    r.symbols = mj.at("symbols").get<std::size_t>();
    r.extend_factor = mj.at("extend_factor").get<int>();
    r.extend_capped = mj.at("extend_capped").get<bool>();
    if (r.ok) {
      auto& m = r.report;
      m.gross_rate_gbps = mj.at("gross_gbps").get<double>();
      m.pre_fec_ber = ber_from_counts(mj.at("bit_errors").get<std::uint64_t>(), mj.at("bits").get<std::uint64_t>());
      m.pre_fec_ber.ber = mj.at("pre_fec_ber").get<double>();
      m.pre_fec_ber.ci = {mj.at("ber_ci_lo").get<double>(), mj.at("ber_ci_hi").get<double>()};
      m.pre_fec_ber.unreliable = mj.at("ber_unreliable").get<bool>();
      m.ser.errors = mj.at("symbol_errors").get<std::uint64_t>();
      m.ser.symbols = r.symbols;
      m.ser.ser = mj.at("ser").get<double>();
      m.kp4_pass = mj.at("kp4_pass").get<bool>();
      m.net_rate_kp4_gbps = mj.at("net_gbps_kp4").get<double>();
      m.air_hd_gbps = mj.at("air_gbps").get<double>();
      m.bursts.max_run = mj.at("max_burst").get<std::uint64_t>();
      m.bursts.histogram = mj.at("burst_histogram").get<std::vector<std::uint64_t>>();
      for (auto h : m.bursts.histogram) m.bursts.runs += h;

      const json& dj = p.at("diagnostics");
      auto& d = r.diag;
      r.rx_3db_hz = dj.at("rx_3db_ghz").get<double>() * 1e9;
      d.timing_phase_ui = dj.at("timing_phase_ui").get<double>();
      d.timing_lag = dj.at("timing_lag").get<int>();
      d.timing_mse = dj.at("timing_mse").get<double>();
      d.train_mse = dj.at("train_mse").get<double>();
      d.train_mse_db = dj.at("train_mse_db").get<double>();
      d.mse_trace = dj.at("mse_trace").get<std::vector<double>>();
      d.linear_taps = dj.at("linear_taps").get<std::vector<double>>();
      d.nonlinear_taps = dj.at("nonlinear_taps").get<std::vector<double>>();
      d.nc_taps = dj.at("nc_taps").get<std::vector<double>>();
      d.nc_decision_error_rate = dj.at("nc_decision_error_rate").get<double>();
      d.level_histogram = dj.at("level_histogram").get<std::vector<std::uint64_t>>();
      if (dj.at("eye_csv").is_string())
        r.eye = read_eye_csv(path.parent_path() / dj.at("eye_csv").get<std::string>(),
                             dj.at("eye_amp_range").at(0).get<double>(), dj.at("eye_amp_range").at(1).get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vlink
