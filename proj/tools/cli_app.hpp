#pragma once

// Command-line front end. Precedence: built-in defaults < --config file < flags.
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime diagnostic.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cv2x/config.hpp"
#include "cv2x/engine.hpp"
#include "cv2x/report.hpp"

namespace cv2x::cli {

inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kRuntimeError = 2;

namespace detail {

struct Overrides {
  std::string config_path;
  std::optional<int> n;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::vector<double> d_list;
  std::vector<int> aoi_th_list;
  std::optional<int> warmup;
};

inline void add_scenario_flags(CLI::App& sub, Overrides& o, bool single) {
  sub.add_option("--config", o.config_path, "INI scenario file")->check(CLI::ExistingFile);
  if (single) {
    sub.add_option("--n", o.n, "number of vehicles");
    sub.add_option("--mode", o.mode, "standard or enhanced");
    sub.add_option("--seed", o.seed, "master seed");
  }
  sub.add_option("--duration-s", o.duration_s, "simulated seconds after the warm-up");
  sub.add_option("--d-list", o.d_list, "PDR/AoIS distance bounds in m, comma separated")->delimiter(',');
  sub.add_option("--aoi-th-list", o.aoi_th_list, "AoI thresholds in ms, comma separated")->delimiter(',');
  sub.add_option("--warmup", o.warmup, "listen-only subframes before transmitting");
}

inline ScenarioConfig build_config(const Overrides& o) {
  ScenarioConfig cfg = o.config_path.empty() ? ScenarioConfig{} : config::load(o.config_path);
  if (o.n) cfg.n_vehicles = *o.n;
  if (o.mode) cfg.mode = parse_mode(*o.mode);
  if (o.seed) cfg.seed = *o.seed;
  if (o.duration_s) cfg.duration_s = *o.duration_s;
  if (!o.d_list.empty()) cfg.d_list = o.d_list;
  if (!o.aoi_th_list.empty()) cfg.aoi_th_list = o.aoi_th_list;
  if (o.warmup) cfg.warmup_subframes = *o.warmup;
  cfg.validate();
  return cfg;
}

// "-" or empty selects the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
      return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw config::ConfigError("cannot open '" + path + "' for writing");
    os_ = file_.get();
  }
  std::ostream& get() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

inline void write_plots(const std::string& dir, const std::vector<RunReport>& reports) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream pdr(std::filesystem::path(dir) / "pdr.dat");
  std::ofstream aois(std::filesystem::path(dir) / "aois.dat");
  if (!pdr || !aois) throw config::ConfigError("cannot write plot data under '" + dir + "'");
  report::write_pdr_plot(pdr, reports);
  report::write_aois_plot(aois, reports);
}

inline nlohmann::json coord_json(const SsrCoord& c) { return {c.frame, c.subframe, c.subchannel}; }

inline nlohmann::json candidate_json(const Candidate& c) { return {{"at", c.at}, {"ssr", coord_json(c.coord)}}; }

inline RunObserver trace_observer(std::ostream& os) {
  RunObserver obs;
  obs.on_selection = [&os](int vehicle, const SelectionTrace& t) {
    nlohmann::json j;
    j["event"] = "select";
    j["t"] = t.now;
    j["vehicle"] = vehicle;
    j["mode"] = to_string(t.mode);
    j["rc"] = t.rc;
    j["m_total"] = t.m_total;
    j["iterations"] = t.iterations;
    j["p_th_dbm"] = t.p_th_dbm;
    j["blind"] = t.blind.size();
    j["reserved"] = t.reserved.size();
    auto sb = nlohmann::json::array();
    for (const auto& r : t.s_b) sb.push_back({{"ssr", coord_json(r.candidate.coord)}, {"a_rssi_dbm", r.a_rssi_dbm}});
    j["s_b"] = std::move(sb);
    j["pick"] = candidate_json(t.pick);
    os << j.dump() << '\n';
  };
  obs.on_transmission = [&os](AbsSubframe t, int vehicle, const SsrCoord& where, std::uint32_t word) {
    nlohmann::json j{{"event", "tx"}, {"t", t}, {"vehicle", vehicle}, {"ssr", coord_json(where)},
                     {"sci", sci::hexdump(word)}};
    os << j.dump() << '\n';
  };
  return obs;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"C-V2X mode 4 semi-persistent scheduling simulator", "cv2x_sim"};
  app.require_subcommand(1);

  detail::Overrides run_o, sweep_o, trace_o, validate_o;
  std::string run_out, run_plot, run_trace, sweep_out, sweep_plot, trace_out, trace_path;
  int seeds = 10;
  int jobs = 1;
  std::vector<std::string> modes{"standard", "enhanced"};
  std::vector<int> n_list{25, 50, 75};

  auto* run_cmd = app.add_subcommand("run", "single scenario");
  detail::add_scenario_flags(*run_cmd, run_o, true);
  run_cmd->add_option("--out", run_out, "CSV path, '-' for stdout");
  run_cmd->add_option("--plot-dir", run_plot, "directory for pdr.dat and aois.dat");
  run_cmd->add_option("--trace", run_trace, "JSON-lines scheduler trace path");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid over seeds, modes and vehicle counts");
  detail::add_scenario_flags(*sweep_cmd, sweep_o, false);
  sweep_cmd->add_option("--seeds", seeds, "seeds 1..N")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--modes", modes, "comma separated modes")->delimiter(',');
  sweep_cmd->add_option("--n", n_list, "comma separated vehicle counts")->delimiter(',');
  sweep_cmd->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_out, "CSV path, '-' for stdout");
  sweep_cmd->add_option("--plot-dir", sweep_plot, "directory for pdr.dat and aois.dat");

  auto* validate_cmd = app.add_subcommand("validate", "check a configuration and exit");
  detail::add_scenario_flags(*validate_cmd, validate_o, true);

  auto* trace_cmd = app.add_subcommand("trace", "single run with scheduler trace logging");
  detail::add_scenario_flags(*trace_cmd, trace_o, true);
  trace_cmd->add_option("--trace", trace_path, "JSON-lines trace path, '-' for stdout");
  trace_cmd->add_option("--out", trace_out, "CSV path; omitted means no CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  auto sub = app.get_subcommands().front();
  ScenarioConfig cfg;
  try {
    if (sub == run_cmd) cfg = detail::build_config(run_o);
    if (sub == sweep_cmd) cfg = detail::build_config(sweep_o);
    if (sub == validate_cmd) cfg = detail::build_config(validate_o);
    if (sub == trace_cmd) cfg = detail::build_config(trace_o);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  if (sub == validate_cmd) {
    out << "ok config_hash=" << std::hex << config::hash(cfg) << std::dec << '\n';
    return kOk;
  }

  try {
    if (sub == run_cmd || sub == trace_cmd) {
      const bool tracing = sub == trace_cmd || !run_trace.empty();
      const std::string& tpath = sub == trace_cmd ? trace_path : run_trace;
      std::optional<detail::Sink> tsink;
      RunObserver obs;
      if (tracing) {
        tsink.emplace(tpath, out);
        obs = detail::trace_observer(tsink->get());
      }
      const RunReport rep = run(cfg, config::hash(cfg), tracing ? &obs : nullptr);
      const std::string& csv_path = sub == run_cmd ? run_out : trace_out;
      if (sub == run_cmd || !csv_path.empty()) {
        detail::Sink sink(csv_path, out);
        report::write_csv(sink.get(), {rep});
      }
      if (sub == run_cmd) detail::write_plots(run_plot, {rep});
      const auto& d = rep.diagnostics;
      err << "run " << report::run_id(rep) << ": tx=" << d.transmissions << " selections=" << d.selections
          << " keeps=" << d.keeps << " dropped=" << d.dropped_packets << " collisions=" << d.collisions
          << " wall=" << report::fixed(rep.wall_clock_s, 3) << "s\n";
      return kOk;
    }

    // sweep
    std::vector<Mode> mode_list;
    std::vector<std::uint64_t> seed_list;
    try {
      for (const auto& m : modes) mode_list.push_back(parse_mode(m));
      if (n_list.empty() || mode_list.empty()) throw std::invalid_argument("empty sweep grid");
      for (int nv : n_list)
        if (nv < 1) throw std::invalid_argument("--n values must be >= 1");
    } catch (const std::exception& e) {
      err << "config error: " << e.what() << '\n';
      return kConfigError;
    }
    for (int s = 1; s <= seeds; ++s) seed_list.push_back(static_cast<std::uint64_t>(s));
    const auto results = run_sweep(cfg, seed_list, mode_list, n_list, jobs,
                                   [](const ScenarioConfig& c) { return config::hash(c); });
    std::vector<RunReport> reports;
    int failures = 0;
    for (const auto& r : results) {
      if (r.report) {
        reports.push_back(*r.report);
      } else {
        ++failures;
        err << "run failed: " << r.error << '\n';
      }
    }
    detail::Sink sink(sweep_out, out);
    report::write_csv(sink.get(), reports);
    detail::write_plots(sweep_plot, reports);
    err << "sweep: " << reports.size() << " runs ok, " << failures << " failed\n";
    return failures == 0 ? kOk : kRuntimeError;
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace cv2x::cli
