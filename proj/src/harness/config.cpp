#include <algorithm>
#include <cmath>
#include <fstream>

#include "vlink/harness.hpp"

namespace vlink {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void merge(json& base, const json& patch, const std::string& prefix) {
  if (!patch.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = join(prefix, it.key());
    if (!base.contains(it.key())) throw ConfigError(path, "unknown field");
    json& slot = base[it.key()];
    if (slot.is_object()) merge(slot, it.value(), path);
    else slot = it.value();
  }
}

class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {}

  Reader section(const std::string& key) const { return Reader(j_.at(key), join(prefix_, key)); }

  double number(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(join(prefix_, key), "expected a number");
    return v.get<double>();
  }
  std::optional<double> maybe_number(const std::string& key) const {
    if (j_.at(key).is_null()) return std::nullopt;
    return number(key);
  }
  std::int64_t integer(const std::string& key) const {
    const json& v = j_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>() && std::abs(v.get<double>()) < 9e15)
      return static_cast<std::int64_t>(v.get<double>());
    throw ConfigError(join(prefix_, key), "expected an integer");
  }
  std::optional<std::int64_t> maybe_integer(const std::string& key) const {
    if (j_.at(key).is_null()) return std::nullopt;
    return integer(key);
  }
  std::uint64_t unsigned64(const std::string& key) const {
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(join(prefix_, key), "expected a non-negative integer");
  }
  bool boolean(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(join(prefix_, key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(join(prefix_, key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(join(prefix_, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(join(prefix_, key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  const std::string& prefix() const { return prefix_; }

 private:
  const json& j_;
  std::string prefix_;
};

template <class F>
auto field(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

json to_json(const LinkConfig& c) {
  const auto& bw = c.link.bandwidths;
  const auto& v = c.link.vcsel;
  const auto& f = c.link.fiber;
  const auto& a = c.link.adc;
  const auto& d = c.dsp;
  json j;
  j["modulation"] = to_string(c.modulation);
  j["baud_gbd"] = c.baud_gbd;
  j["sps_sim"] = c.sps_sim;
  j["oma_dbm"] = c.link.oma_dbm;
  j["symbols"] = c.symbols;
  j["seed"] = c.seed;
  j["auto_extend"] = c.auto_extend;
  j["capture_eye"] = c.capture_eye;
  j["bandwidths"] = {{"dac_6db_ghz", bw.dac_6db / 1e9},
                     {"driver_3db_ghz", bw.driver_3db / 1e9},
                     {"vcsel_3db_ghz", bw.vcsel_3db / 1e9},
                     {"rx_3db_ghz", bw.rx_3db > 0.0 ? json(bw.rx_3db / 1e9) : json(nullptr)},
                     {"target_e2e_3db_ghz", bw.target_e2e_3db / 1e9}};
  j["vcsel"] = {{"threshold", v.threshold},
                {"bias", v.bias},
                {"swing", v.swing},
                {"c1", v.c1},
                {"c2", v.c2},
                {"c3", v.c3},
                {"resonance_ghz", v.resonance_hz / 1e9},
                {"rin_db_per_hz", opt(v.rin_db_per_hz)},
                {"rin_peak_ghz", v.rin_peak_hz / 1e9},
                {"rin_damping", v.rin_damping}};
  j["fiber"] = {{"length_m", f.length_m},
                {"emb_mhz_km", f.emb_mhz_km},
                {"dispersion_ps_nm_km", f.dispersion_ps_nm_km},
                {"source_rms_width_nm", f.source_rms_width_nm},
                {"attenuation_db_km", f.attenuation_db_km}};
  j["adc"] = {{"sps_out", a.sps_out},
              {"resolution_bits", opt(a.resolution_bits)},
              {"timing_offset_ui", a.timing_offset_ui},
              {"jitter_rms_ui", a.jitter_rms_ui},
              {"snr_db", opt(a.snr_db)}};
  j["dsp"] = {{"mode", to_string(d.mode)},
              {"precoding", d.precoding},
              {"dpd_boost", d.dpd_boost},
              {"preskew_delays_ui", d.preskew_delays},
              {"vnle_linear_taps", d.vnle_linear_taps},
              {"vnle_memory", d.vnle_memory},
              {"mu_linear", d.mu_linear},
              {"mu_nonlinear", d.mu_nonlinear},
              {"mu_bias", d.mu_bias},
              {"decision_directed", d.decision_directed},
              {"training_symbols", d.training_symbols},
              {"nc_order", d.nc_order},
              {"traceback", d.traceback},
              {"timing_phases", d.timing_phases},
              {"genie_phase_ui", opt(d.genie_phase)}};
  return j;
}

LinkConfig config_from_json(const json& overrides, const LinkConfig& base) {
  json merged = to_json(base);
  if (!overrides.is_null()) merge(merged, overrides, "");

  const Reader r(merged, "");
  LinkConfig c;
  c.modulation = field("modulation", [&] { return modulation_from_string(r.string("modulation")); });
  c.baud_gbd = r.number("baud_gbd");
  c.sps_sim = static_cast<int>(r.integer("sps_sim"));
  c.link.oma_dbm = r.number("oma_dbm");
  {
    const auto n = r.integer("symbols");
    require(n > 0, "symbols", "must be positive");
    c.symbols = static_cast<std::size_t>(n);
  }
  c.seed = r.unsigned64("seed");
  c.auto_extend = r.boolean("auto_extend");
  c.capture_eye = r.boolean("capture_eye");

  const Reader b = r.section("bandwidths");
  c.link.bandwidths.dac_6db = b.number("dac_6db_ghz") * 1e9;
  c.link.bandwidths.driver_3db = b.number("driver_3db_ghz") * 1e9;
  c.link.bandwidths.vcsel_3db = b.number("vcsel_3db_ghz") * 1e9;
  c.link.bandwidths.rx_3db = b.maybe_number("rx_3db_ghz").value_or(0.0) * 1e9;
  require(b.maybe_number("rx_3db_ghz").value_or(1.0) > 0.0, "bandwidths.rx_3db_ghz", "must be positive or null (calibrate)");
  c.link.bandwidths.target_e2e_3db = b.number("target_e2e_3db_ghz") * 1e9;

  const Reader v = r.section("vcsel");
  auto& vc = c.link.vcsel;
  vc.threshold = v.number("threshold");
  vc.bias = v.number("bias");
  vc.swing = v.number("swing");
  vc.c1 = v.number("c1");
  vc.c2 = v.number("c2");
  vc.c3 = v.number("c3");
  vc.resonance_hz = v.number("resonance_ghz") * 1e9;
  vc.rin_db_per_hz = v.maybe_number("rin_db_per_hz");
  vc.rin_peak_hz = v.number("rin_peak_ghz") * 1e9;
  vc.rin_damping = v.number("rin_damping");

  const Reader f = r.section("fiber");
  auto& fb = c.link.fiber;
  fb.length_m = f.number("length_m");
  fb.emb_mhz_km = f.number("emb_mhz_km");
  fb.dispersion_ps_nm_km = f.number("dispersion_ps_nm_km");
  fb.source_rms_width_nm = f.number("source_rms_width_nm");
  fb.attenuation_db_km = f.number("attenuation_db_km");

  const Reader a = r.section("adc");
  auto& ad = c.link.adc;
  ad.sps_out = static_cast<int>(a.integer("sps_out"));
  if (auto bits = a.maybe_integer("resolution_bits")) ad.resolution_bits = static_cast<int>(*bits);
  else ad.resolution_bits.reset();
  ad.timing_offset_ui = a.number("timing_offset_ui");
  ad.jitter_rms_ui = a.number("jitter_rms_ui");
  ad.snr_db = a.maybe_number("snr_db");

  const Reader d = r.section("dsp");
  auto& ds = c.dsp;
  ds.mode = field("dsp.mode", [&] { return dsp_mode_from_string(d.string("mode")); });
  ds.precoding = d.boolean("precoding");
  ds.dpd_boost = d.number("dpd_boost");
  ds.preskew_delays = d.numbers("preskew_delays_ui");
  ds.vnle_linear_taps = static_cast<int>(d.integer("vnle_linear_taps"));
  ds.vnle_memory = static_cast<int>(d.integer("vnle_memory"));
  ds.mu_linear = d.number("mu_linear");
  ds.mu_nonlinear = d.number("mu_nonlinear");
  ds.mu_bias = d.number("mu_bias");
  ds.decision_directed = d.boolean("decision_directed");
  {
    const auto n = d.integer("training_symbols");
    require(n > 0, "dsp.training_symbols", "must be positive");
    ds.training_symbols = static_cast<std::size_t>(n);
  }
  ds.nc_order = static_cast<int>(d.integer("nc_order"));
  ds.traceback = static_cast<int>(d.integer("traceback"));
  ds.timing_phases = static_cast<int>(d.integer("timing_phases"));
  ds.genie_phase = d.maybe_number("genie_phase_ui");

  validate(c);
  return c;
}

LinkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const LinkConfig& c) {
  require(std::isfinite(c.baud_gbd) && c.baud_gbd > 0.0 && c.baud_gbd <= 300.0, "baud_gbd", "must be in (0, 300]");
  require(c.sps_sim >= 2 && c.sps_sim <= 16, "sps_sim", "must be in [2, 16]");
  require(std::isfinite(c.link.oma_dbm) && std::abs(c.link.oma_dbm) <= 20.0, "oma_dbm", "must be in [-20, 20]");
  require(c.symbols >= 1000 && c.symbols <= 100000000, "symbols", "must be in [1000, 1e8]");
  const bool pam6 = c.modulation == Modulation::pam6;
  require(!pam6 || c.symbols % 2 == 0, "symbols", "must be even for pam6 (pair coding)");

  const auto& bw = c.link.bandwidths;
  require(finite_positive(bw.dac_6db), "bandwidths.dac_6db_ghz", "must be positive");
  require(finite_positive(bw.driver_3db), "bandwidths.driver_3db_ghz", "must be positive");
  require(finite_positive(bw.vcsel_3db), "bandwidths.vcsel_3db_ghz", "must be positive");
  require(std::isfinite(bw.rx_3db) && bw.rx_3db >= 0.0, "bandwidths.rx_3db_ghz", "must be positive or null");
  require(finite_positive(bw.target_e2e_3db), "bandwidths.target_e2e_3db_ghz", "must be positive");
  const double fixed_min = std::min({bw.dac_6db, bw.driver_3db, bw.vcsel_3db});
  require(bw.target_e2e_3db <= fixed_min, "bandwidths.target_e2e_3db_ghz", "must not exceed any component bandwidth");
  require(bw.rx_3db == 0.0 || bw.rx_3db < 0.5 * c.sps_sim * c.baud_gbd * 1e9, "bandwidths.rx_3db_ghz",
          "must be below the simulation Nyquist frequency");

  const auto& v = c.link.vcsel;
  require(std::isfinite(v.threshold) && v.threshold >= 0.0, "vcsel.threshold", "must be >= 0");
  require(std::isfinite(v.bias) && v.bias > v.threshold, "vcsel.bias", "must exceed the threshold");
  require(finite_positive(v.swing), "vcsel.swing", "must be positive");
  require(finite_positive(v.c1), "vcsel.c1", "must be positive");
  require(std::isfinite(v.c2), "vcsel.c2", "must be finite");
  require(std::isfinite(v.c3), "vcsel.c3", "must be finite");
  {
    // LI slope must stay positive up to the largest drive after pre-distortion.
    const double top = v.bias + v.swing * (1.0 + 4.0 * std::abs(c.dsp.dpd_boost)) - v.threshold;
    for (int i = 0; i <= 100; ++i) {
      const double x = top * i / 100.0;
      require(v.c1 + 2.0 * v.c2 * x + 3.0 * v.c3 * x * x > 0.0, "vcsel.c2",
              "LI curve must be increasing over the driven current range");
    }
  }
  require(finite_positive(v.resonance_hz), "vcsel.resonance_ghz", "must be positive");
  // A second-order resonance cannot reach a 3 dB point beyond sqrt(1 + sqrt 2) f_r.
  require(bw.vcsel_3db < std::sqrt(1.0 + std::sqrt(2.0)) * v.resonance_hz, "bandwidths.vcsel_3db_ghz",
          "must be below 1.554 x vcsel.resonance_ghz");
  require(!v.rin_db_per_hz || (*v.rin_db_per_hz >= -200.0 && *v.rin_db_per_hz <= -100.0), "vcsel.rin_db_per_hz",
          "must be in [-200, -100] or null");
  require(finite_positive(v.rin_peak_hz), "vcsel.rin_peak_ghz", "must be positive");
  require(std::isfinite(v.rin_damping) && v.rin_damping > 0.0 && v.rin_damping <= 2.0, "vcsel.rin_damping",
          "must be in (0, 2]");

  const auto& f = c.link.fiber;
  require(std::isfinite(f.length_m) && f.length_m >= 0.0 && f.length_m <= 10000.0, "fiber.length_m",
          "must be in [0, 10000]");
  require(finite_positive(f.emb_mhz_km), "fiber.emb_mhz_km", "must be positive");
  require(std::isfinite(f.dispersion_ps_nm_km), "fiber.dispersion_ps_nm_km", "must be finite");
  require(std::isfinite(f.source_rms_width_nm) && f.source_rms_width_nm >= 0.0, "fiber.source_rms_width_nm",
          "must be >= 0");
  require(std::isfinite(f.attenuation_db_km) && f.attenuation_db_km >= 0.0, "fiber.attenuation_db_km",
          "must be >= 0");

  const auto& a = c.link.adc;
  require(a.sps_out == 1 || a.sps_out == 2, "adc.sps_out", "must be 1 or 2");
  require(!a.resolution_bits || (*a.resolution_bits >= 4 && *a.resolution_bits <= 16), "adc.resolution_bits",
          "must be in [4, 16] or null");
  require(std::isfinite(a.timing_offset_ui) && std::abs(a.timing_offset_ui) <= 0.5, "adc.timing_offset_ui",
          "must be in [-0.5, 0.5]");
  require(std::isfinite(a.jitter_rms_ui) && a.jitter_rms_ui >= 0.0 && a.jitter_rms_ui <= 0.2, "adc.jitter_rms_ui",
          "must be in [0, 0.2]");
  require(!a.snr_db || (std::isfinite(*a.snr_db) && *a.snr_db >= -10.0 && *a.snr_db <= 100.0), "adc.snr_db",
          "must be in [-10, 100] or null");

  const auto& d = c.dsp;
  const int m = Alphabet::of(c.modulation).order();
  require(std::isfinite(d.dpd_boost) && d.dpd_boost >= 0.0 && d.dpd_boost < 1.0, "dsp.dpd_boost", "must be in [0, 1)");
  require(d.preskew_delays.empty() || d.preskew_delays.size() == static_cast<std::size_t>(m), "dsp.preskew_delays_ui",
          "must be empty or hold one delay per level");
  for (std::size_t i = 0; i < d.preskew_delays.size(); ++i)
    require(std::isfinite(d.preskew_delays[i]) && std::abs(d.preskew_delays[i]) <= 0.5,
            "dsp.preskew_delays_ui[" + std::to_string(i) + "]", "must be in [-0.5, 0.5]");
  require(d.vnle_linear_taps >= 3 && d.vnle_linear_taps <= 1001 && d.vnle_linear_taps % 2 == 1, "dsp.vnle_linear_taps",
          "must be odd and in [3, 1001]");
  require(d.vnle_memory >= 1 && d.vnle_memory <= d.vnle_linear_taps / 2 + 1, "dsp.vnle_memory",
          "must be in [1, vnle_linear_taps / 2 + 1]");
  require(std::isfinite(d.mu_linear) && d.mu_linear > 0.0 && d.mu_linear < 1.0, "dsp.mu_linear", "must be in (0, 1)");
  require(std::isfinite(d.mu_nonlinear) && d.mu_nonlinear >= 0.0 && d.mu_nonlinear < 1.0, "dsp.mu_nonlinear",
          "must be in [0, 1)");
  require(std::isfinite(d.mu_bias) && d.mu_bias >= 0.0 && d.mu_bias < 1.0, "dsp.mu_bias", "must be in [0, 1)");
  require(d.training_symbols >= 1000 && d.training_symbols <= 10000000, "dsp.training_symbols",
          "must be in [1000, 1e7]");
  require(!pam6 || d.training_symbols % 2 == 0, "dsp.training_symbols", "must be even for pam6 (pair coding)");
  require(d.nc_order >= 1 && d.nc_order <= 16, "dsp.nc_order", "must be in [1, 16]");
  require(d.traceback >= 1 && d.traceback <= 4096, "dsp.traceback", "must be in [1, 4096]");
  require(d.timing_phases >= 3 && d.timing_phases <= 256, "dsp.timing_phases", "must be in [3, 256]");
  require(!d.genie_phase || (*d.genie_phase >= 0.0 && *d.genie_phase < 1.0), "dsp.genie_phase_ui",
          "must be in [0, 1) or null");
}

}  // namespace vlink
