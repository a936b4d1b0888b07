#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlink/alphabet.hpp"
#include "vlink/linkmodel.hpp"
#include "vlink/metrics.hpp"
#include "vlink/rxdsp.hpp"
#include "vlink/txdsp.hpp"

namespace vlink {

/// Rejected configuration; `path()` is the dotted field path, e.g. "fiber.length_m".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct DspSettings {
  DspMode mode = DspMode::vnle_nc_mlse;
  bool precoding = true;
  double dpd_boost = 0.2;
  std::vector<double> preskew_delays;  // per level, UI; empty = none
  int vnle_linear_taps = 201;
  int vnle_memory = 11;
  double mu_linear = 1e-3;
  double mu_nonlinear = 1e-4;
  double mu_bias = 1e-3;
  bool decision_directed = true;
  std::size_t training_symbols = 20000;
  int nc_order = 3;
  int traceback = 32;
  int timing_phases = 16;
  std::optional<double> genie_phase;  // UI
};

struct LinkConfig {
  Modulation modulation = Modulation::pam4;
  double baud_gbd = 106.25;
  int sps_sim = 4;
  LinkModelConfig link;
  DspSettings dsp;
  std::size_t symbols = 1000000;  // counted data symbols
  std::uint64_t seed = 1;
  bool auto_extend = true;
  bool capture_eye = false;
};

inline constexpr std::size_t kGuardSymbols = 1024;

/// Transmitter and receiver settings implied by a link config.
TxConfig tx_config(const LinkConfig& cfg);
RxConfig rx_config(const LinkConfig& cfg);

/// Nested JSON view of a config; units are in the key names.
nlohmann::json to_json(const LinkConfig& cfg);
/// Applies `overrides` on top of `base` (unknown keys rejected), then validates.
LinkConfig config_from_json(const nlohmann::json& overrides, const LinkConfig& base = {});
LinkConfig load_config(const std::filesystem::path& path);
/// Range checks every field; throws ConfigError naming the first bad field.
void validate(const LinkConfig& cfg);

struct PointResult {
  std::size_t index = 0;
  nlohmann::json coordinates = nlohmann::json::object();  // sweep axis values of this point
  LinkConfig config;
  bool ok = false;
  std::string error;
  std::string error_stage;
  MetricsReport report;
  std::size_t symbols = 0;  // counted, after any extension
  int extend_factor = 1;
  bool extend_capped = false;
  double rx_3db_hz = 0.0;
  RxDiagnostics diag;
  std::optional<EyeHistogram> eye;
};

/// PRBS -> tx -> channel -> rx -> metrics. Stage failures are recorded in the
/// result rather than thrown; invalid configs throw ConfigError.
PointResult run_point(const LinkConfig& cfg);

struct SweepAxis {
  std::string path;                  // dotted config path
  std::vector<nlohmann::json> values;
};

struct SweepSpec {
  LinkConfig base;
  std::vector<SweepAxis> axes;
  std::size_t repeats = 1;
  std::uint64_t base_seed = 1;
};

SweepSpec sweep_from_json(const nlohmann::json& j);
SweepSpec load_sweep(const std::filesystem::path& path);

struct SweepPoint {
  std::size_t index = 0;
  nlohmann::json coordinates;
  LinkConfig config;
};

/// All points in row-major axis order with repeats innermost; every config
/// is validated here. Point i uses seed base_seed ^ (i * 0x9E3779B97F4A7C15).
std::vector<SweepPoint> expand_sweep(const SweepSpec& spec);

/// Results are ordered by point index whatever the parallelism.
std::vector<PointResult> run_sweep(const SweepSpec& spec, int parallelism = 1);

extern const std::vector<std::string> kCsvColumns;

void write_csv(const std::vector<PointResult>& results, std::ostream& os);
void write_csv(const std::vector<PointResult>& results, const std::filesystem::path& path);
/// Eye matrices go to sidecar CSVs next to `path` (<stem>_eye_<index>.csv).
void write_json(const std::vector<PointResult>& results, const std::filesystem::path& path);
std::vector<PointResult> load_json(const std::filesystem::path& path);

/// Amplitude rows ascending; first column is the bin centre, then one column per phase bin.
void write_eye_csv(const EyeHistogram& eye, std::ostream& os);

}  // namespace vlink
