#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vlink/harness.hpp"

using namespace vlink;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string format = "csv";
  int parallel = 1;
  std::optional<std::uint64_t> seed;
};

void emit(const std::vector<PointResult>& results, const Common& c) {
  if (c.format == "json") {
    if (c.out.empty()) throw std::invalid_argument("--format json needs --out");
    write_json(results, c.out);
  } else if (c.out.empty()) {
    write_csv(results, std::cout);
  } else {
    write_csv(results, std::filesystem::path(c.out));
  }
}

LinkConfig config_for(const Common& c) {
  LinkConfig cfg = c.config.empty() ? LinkConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void report_failures(const std::vector<PointResult>& results) {
  for (const auto& r : results)
    if (!r.ok) std::fprintf(stderr, "point %zu failed in %s: %s\n", r.index, r.error_stage.c_str(), r.error.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VCSEL IM-DD link simulator"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--config", c.config, "JSON config (sweep spec for `sweep`)")->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output path");
    sub->add_option("--seed", c.seed, "seed override");
    if (with_format) sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* run = app.add_subcommand("run", "simulate one link configuration");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "run a sweep spec");
  add_common(sweep, true);
  sweep->add_option("--parallel", c.parallel, "worker threads")->check(CLI::PositiveNumber);
  auto* calibrate = app.add_subcommand("calibrate", "solve the receiver bandwidth and report the cascade");
  add_common(calibrate, false);
  auto* eye = app.add_subcommand("eye", "equalizer-output eye histogram as a CSV matrix");
  add_common(eye, false);
  auto* defaults = app.add_subcommand("defaults", "print the full default config");
  defaults->add_option("--out", c.out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*defaults) {
      const std::string text = to_json(LinkConfig{}).dump(2) + "\n";
      if (c.out.empty()) std::cout << text;
      else std::ofstream(c.out) << text;
      return 0;
    }
    if (*run) {
      const PointResult r = run_point(config_for(c));
      emit({r}, c);
      report_failures({r});
      return r.ok ? 0 : 1;
    }
    if (*sweep) {
      if (c.config.empty()) throw ConfigError("--config", "sweep needs a spec file");
      SweepSpec spec = load_sweep(c.config);
      if (c.seed) spec.base_seed = *c.seed;
      const auto results = run_sweep(spec, c.parallel);
      emit(results, c);
      report_failures(results);
      return 0;
    }
    if (*calibrate) {
      const LinkConfig cfg = config_for(c);
      const auto& bw = cfg.link.bandwidths;
      const double rx = bw.rx_3db > 0.0 ? bw.rx_3db : calibrate_rx_bw(bw, cfg.link.vcsel);
      const double fs = cfg.sps_sim * cfg.baud_gbd * 1e9;
      LinkModelConfig link = cfg.link;
      link.bandwidths.rx_3db = rx;
      const ChannelFilters f = design_channel_filters(link, fs);
      const std::vector<FirFilter> cascade{f.tx, f.vcsel, f.rx};
      const double analog = attenuation_crossing(e2e_response(bw, cfg.link.vcsel, rx), 3.0, 1e9, fs / 2.0);
      const double sampled = attenuation_crossing(cascade, fs, 3.0, 1e9, fs / 2.0);
      std::printf("rx_3db_ghz %.4f\n", rx / 1e9);
      std::printf("e2e_3db_ghz_analog %.4f\n", analog / 1e9);
      std::printf("e2e_3db_ghz_fir %.4f\n", sampled / 1e9);
      std::printf("target_e2e_3db_ghz %.4f\n", bw.target_e2e_3db / 1e9);
      return 0;
    }
    if (*eye) {
      LinkConfig cfg = config_for(c);
      cfg.capture_eye = true;
      cfg.auto_extend = false;
      const PointResult r = run_point(cfg);
      if (!r.ok) {
        report_failures({r});
        return 1;
      }
      if (c.out.empty()) {
        write_eye_csv(*r.eye, std::cout);
      } else {
        std::ofstream out(c.out);
        write_eye_csv(*r.eye, out);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
