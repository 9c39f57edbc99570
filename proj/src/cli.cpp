#include "swarm/cli.hpp"

#include "swarm/config.hpp"
#include "swarm/engine.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace swarm {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSweepAxes = {"uav.count", "comm.r_c", "target.count", "sim.steps"};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

nlohmann::json summary_json(const RunSummary& s, std::uint64_t seed) {
  return {{"seed", seed},
          {"steps", s.steps},
          {"mean_t_imt", s.mean_t_imt},
          {"mean_t_imt_equiv", s.mean_t_imt_equiv},
          {"coverage_rate", s.coverage_rate},
          {"mean_coverage_rate", s.mean_coverage_rate},
          {"mean_rmse", s.mean_rmse},
          {"mean_assign_ms", s.mean_assign_ms}};
}

RunSummary run_to_dir(const ScenarioConfig& cfg, const fs::path& dir, bool events, bool timing) {
  fs::create_directories(dir);
  std::ofstream metrics = open_out(dir / "metrics.csv");
  std::ofstream ev;
  RunOptions options;
  options.metrics = &metrics;
  options.timing = timing;
  if (events) {
    ev = open_out(dir / "events.jsonl");
    options.events = &ev;
  }
  const RunSummary s = run_scenario(cfg, options);
  std::ofstream summary = open_out(dir / "summary.json");
  summary << summary_json(s, cfg.seed).dump(2) << '\n';
  return s;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
  return {mean, sd};
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_given, const std::string& out_dir,
            bool timing) {
  return guarded([&] {
    ScenarioConfig cfg = load_config(config_path);
    if (seed_given) cfg.seed = seed;
    const RunSummary s = run_to_dir(cfg, out_dir, true, timing);
    std::cout << fmt::format("steps={} mean_t_imt={:.3f} mean_coverage_rate={:.4f} mean_rmse={:.3f}\n", s.steps,
                             s.mean_t_imt, s.mean_coverage_rate, s.mean_rmse);
    return kExitOk;
  });
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::vector<std::string>& values,
              int seeds, const std::string& out_dir) {
  return guarded([&] {
    if (std::find(kSweepAxes.begin(), kSweepAxes.end(), axis) == kSweepAxes.end()) {
      throw ConfigError(axis, "not a sweep axis (uav.count, comm.r_c, target.count, sim.steps)");
    }
    if (seeds < 1) throw ConfigError("seeds", "must be at least 1");
    if (values.empty()) throw ConfigError(axis, "no values given");
    const ScenarioConfig base = load_config(config_path);
    std::vector<ScenarioConfig> cells;
    for (const std::string& v : values) {
      ScenarioConfig cfg = base;
      set_key(cfg, axis, v);
      validate(cfg);
      cells.push_back(cfg);
    }

    const fs::path root(out_dir);
    fs::create_directories(root);
    std::ofstream runs = open_out(root / "runs.csv");
    runs << "axis,value,seed,mean_t_imt,mean_t_imt_equiv,mean_coverage_rate,mean_rmse\n";
    std::ofstream table = open_out(root / "sweep_summary.csv");
    table << "axis,value,runs,t_imt_mean,t_imt_std,coverage_rate_mean,coverage_rate_std,rmse_mean,rmse_std\n";

    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::vector<double> imt, rate, rmse;
      for (int s = 0; s < seeds; ++s) {
        ScenarioConfig cfg = cells[c];
        cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        const fs::path dir = root / fmt::format("{}={}", axis, values[c]) / fmt::format("seed_{}", cfg.seed);
        const RunSummary sum = run_to_dir(cfg, dir, false, false);
        runs << fmt::format("{},{},{},{},{},{},{}\n", axis, values[c], cfg.seed, sum.mean_t_imt, sum.mean_t_imt_equiv,
                            sum.mean_coverage_rate, sum.mean_rmse);
        runs.flush();
        imt.push_back(sum.mean_t_imt);
        rate.push_back(sum.mean_coverage_rate);
        rmse.push_back(sum.mean_rmse);
        spdlog::info("{}={} seed {}: t_imt {:.2f} rate {:.3f}", axis, values[c], cfg.seed, sum.mean_t_imt,
                     sum.mean_coverage_rate);
      }
      const auto [im, is] = mean_std(imt);
      const auto [rm, rs] = mean_std(rate);
      const auto [em, es] = mean_std(rmse);
      table << fmt::format("{},{},{},{},{},{},{},{},{}\n", axis, values[c], seeds, im, is, rm, rs, em, es);
      table.flush();
    }
    std::cout << fmt::format("{} runs written to {}\n", cells.size() * static_cast<std::size_t>(seeds), root.string());
    return kExitOk;
  });
}

RewardMatrix read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    }
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw ConfigError("", fmt::format("row {}: '{}' is not a finite number", rows.size() + 1, tok));
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("", fmt::format("row {} has {} entries, expected {}", rows.size() + 1, row.size(), rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  const auto cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  RewardMatrix R(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return R;
}

int cmd_assign(const std::string& rewards_path, const std::string& caps_path, std::ostream& out) {
  return guarded([&] {
    std::ifstream in(rewards_path);
    if (!in) throw ConfigError("", fmt::format("cannot read reward matrix '{}'", rewards_path));
    const RewardMatrix R = read_matrix(in);
    std::vector<int> caps(static_cast<std::size_t>(R.cols()), ScenarioConfig{}.n_j);
    if (!caps_path.empty()) {
      std::ifstream cin(caps_path);
      if (!cin) throw ConfigError("", fmt::format("cannot read caps '{}'", caps_path));
      const RewardMatrix c = read_matrix(cin);
      if (c.size() != R.cols()) throw ConfigError("", fmt::format("expected {} caps, got {}", R.cols(), c.size()));
      for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double v = c.data()[k];
        if (v < 1.0 || v != std::floor(v)) throw ConfigError("", "caps must be integers >= 1");
        caps[static_cast<std::size_t>(k)] = static_cast<int>(v);
      }
    }

    const auto start = std::chrono::steady_clock::now();
    Assignment a;
    if (R.cols() == 0) {
      a.task.assign(static_cast<std::size_t>(R.rows()), kCoverageTask);
    } else {
      a = tamm(R, caps);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (std::size_t i = 0; i < a.task.size(); ++i) {
      out << i << ',' << (a.task[i] == kCoverageTask ? std::string("Tcoverage") : fmt::format("T{}", a.task[i])) << '\n';
    }
    out << fmt::format("# regime={} reward={}\n", regime_name(a.regime), a.reward);
    out << fmt::format("# wall_time_s={:.6f}\n", seconds);
    return kExitOk;
  });
}

int cli_main(int argc, char** argv) {
  if (const char* level = std::getenv("SWARM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  } else {
    spdlog::set_level(spdlog::level::warn);
  }

  CLI::App app{"Cooperative multi-UAV search and tracking simulator"};
  app.require_subcommand(1);

  std::string config, out_dir, axis, rewards, caps;
  std::uint64_t seed = 0;
  bool timing = false;
  std::vector<std::string> values;
  int seeds = 1;

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config, "YAML config file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override sim.seed");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--timing", timing, "Record assignment wall time in metrics.csv");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter over values and seeds");
  sweep->add_option("--config", config, "YAML config file")->required();
  sweep->add_option("--axis", axis, "uav.count, comm.r_c, target.count or sim.steps")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--seeds", seeds, "Seeds per value, starting at sim.seed");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* assign = app.add_subcommand("assign", "Solve one assignment from a reward matrix");
  assign->add_option("--rewards", rewards, "Reward matrix CSV, one row per UAV")->required();
  assign->add_option("--caps", caps, "Per-target caps, one row");

  app.add_subcommand("defaults", "Print the documented default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return cmd_run(config, seed, seed_opt->count() > 0, out_dir, timing);
  if (sweep->parsed()) return cmd_sweep(config, axis, values, seeds, out_dir);
  if (assign->parsed()) return cmd_assign(rewards, caps, std::cout);
  std::cout << defaults_yaml();
  return kExitOk;
}

}  // namespace swarm
