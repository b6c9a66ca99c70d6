// Command line front end: simulate, eoc, sweep, compare.
#include "invasion/error.hpp"
#include "invasion/experiment.hpp"
#include "invasion/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace invasion;

namespace {

ExperimentConfig base_config(const std::string& path, const std::string& preset) {
  if (!path.empty()) return load_config(path);
  return preset == "exp0" ? experiment0_config() : experiment1_config();
}

void report_error(const std::string& kind, const std::string& message) {
  nlohmann::json line = {{"error", kind}, {"message", message}};
  std::cerr << line.dump() << '\n';
}

void print_json(const nlohmann::json& j) { std::cout << j.dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume IMEX solver for a delayed cancer invasion model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset = "exp1";
  std::string out_dir;

  auto* sim = app.add_subcommand("simulate", "Run one simulation and write its snapshots");
  std::optional<double> tau, chi, t_final;
  std::optional<std::size_t> grid_n;
  bool csv = false;
  sim->add_option("--config", config_path, "JSON configuration file");
  sim->add_option("--preset", preset, "Preset used without --config")->check(CLI::IsMember({"exp0", "exp1"}));
  sim->add_option("--tau", tau, "Delay in microscale units");
  sim->add_option("--chi", chi, "Time-scale ratio");
  sim->add_option("--grid", grid_n, "Cells per direction");
  sim->add_option("--t-final", t_final, "Final time");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_flag("--csv", csv, "Also write full-field CSV snapshots");

  auto* eoc_cmd = app.add_subcommand("eoc", "Grid convergence study");
  std::string levels_spec = "25,50,100,200";
  eoc_cmd->add_option("--config", config_path, "JSON configuration file");
  eoc_cmd->add_option("--preset", preset, "Preset used without --config")->check(CLI::IsMember({"exp0", "exp1"}));
  eoc_cmd->add_option("--levels", levels_spec, "Comma separated cell counts (doublings)");
  eoc_cmd->add_option("--out", out_dir, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Front metrics over a range of delays");
  std::string tau_spec;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep_cmd->add_option("--config", config_path, "JSON configuration file");
  sweep_cmd->add_option("--preset", preset, "Preset used without --config")->check(CLI::IsMember({"exp0", "exp1"}));
  sweep_cmd->add_option("--tau", tau_spec, "start:stop:step or comma list");
  sweep_cmd->add_option("--grid", grid_n, "Cells per direction");
  sweep_cmd->add_option("--t-final", t_final, "Final time");
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "Difference norms between two run directories");
  std::string run_a, run_b;
  cmp->add_option("run_a", run_a)->required();
  cmp->add_option("run_b", run_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (*sim) {
      ExperimentConfig cfg = base_config(config_path, preset);
      if (tau) cfg.params.tau = *tau;
      if (chi) cfg.params.chi = *chi;
      if (grid_n) cfg.nx = cfg.ny = *grid_n;
      if (t_final) cfg.t_final = *t_final;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      cfg.csv = cfg.csv || csv;
      cfg.validate();
      const RunResult run = run_simulation(cfg);
      write_run(cfg.output_dir, cfg, run);
      const FrontMetrics m = front_metrics(run.final_state(), run.grid, cfg.front_threshold);
      print_json({{"out", cfg.output_dir},
                  {"steps", run.report.steps.size()},
                  {"rejected_steps", run.report.rejected_steps},
                  {"krylov_iterations", run.report.total_krylov_iterations},
                  {"wall_seconds", run.report.wall_seconds},
                  {"front_position", m.front_position},
                  {"front_height", m.front_height},
                  {"mass_c1", m.mass_c1},
                  {"mass_c2", m.mass_c2}});
    } else if (*eoc_cmd) {
      ExperimentConfig cfg = base_config(config_path, preset);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const EocStudy study = eoc_study(cfg, parse_levels(levels_spec));
      fs::create_directories(cfg.output_dir);
      write_eoc_csv(fs::path(cfg.output_dir) / "eoc.csv", study);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : study.rows) {
        for (const auto& e : row.entries) {
          rows.push_back({{"coarse", row.coarse},
                          {"fine", row.fine},
                          {"component", component_name(e.component)},
                          {"l1", e.l1},
                          {"l2", e.l2},
                          {"eoc_l1", e.eoc_l1 ? nlohmann::json(*e.eoc_l1) : nlohmann::json(nullptr)},
                          {"eoc_l2", e.eoc_l2 ? nlohmann::json(*e.eoc_l2) : nlohmann::json(nullptr)}});
        }
      }
      print_json({{"out", cfg.output_dir}, {"wall_seconds", study.wall_seconds}, {"rows", rows}});
    } else if (*sweep_cmd) {
      ExperimentConfig cfg = base_config(config_path, preset);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (grid_n) cfg.nx = cfg.ny = *grid_n;
      if (t_final) cfg.t_final = *t_final;
      const std::vector<double> taus = tau_spec.empty() ? cfg.tau_sweep : parse_range(tau_spec);
      if (taus.empty()) throw ConfigError("sweep: no tau values given");
      const auto rows = sweep_tau(cfg, taus, jobs);
      fs::create_directories(cfg.output_dir);
      write_sweep_csv(fs::path(cfg.output_dir) / "sweep.csv", rows);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.ok ? 0 : 1;
      print_json({{"out", cfg.output_dir}, {"runs", rows.size()}, {"failed", failed}});
    } else if (*cmp) {
      const StoredRun a = read_run(run_a);
      const StoredRun b = read_run(run_b);
      if (!(a.grid == b.grid)) throw ConfigError("compare: runs use different grids");
      if (a.snapshots.size() != b.snapshots.size()) throw ConfigError("compare: snapshot counts differ");
      nlohmann::json out = nlohmann::json::array();
      for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        if (a.snapshots[s].t != b.snapshots[s].t) throw ConfigError("compare: snapshot times differ");
        nlohmann::json comps;
        for (const auto& d : compare_states(a.grid, a.snapshots[s].state, b.snapshots[s].state)) {
          comps[std::string(component_name(d.component))] = {{"linf", d.linf}, {"l1", d.l1}, {"rel_linf", d.rel_linf}};
        }
        out.push_back({{"t", a.snapshots[s].t}, {"differences", comps}});
      }
      print_json(out);
    }
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
