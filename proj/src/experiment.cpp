#include "invasion/experiment.hpp"

#include "invasion/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

namespace invasion {

std::string_view experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::Exp0: return "exp0";
    case ExperimentId::Exp1: return "exp1";
    case ExperimentId::Custom: return "custom";
  }
  return "?";
}

ExperimentId experiment_from_name(std::string_view name) {
  if (name == "exp0") return ExperimentId::Exp0;
  if (name == "exp1") return ExperimentId::Exp1;
  if (name == "custom") return ExperimentId::Custom;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

StepControlConfig ExperimentConfig::resolved_step_control() const {
  StepControlConfig sc = step_control;
  sc.dt_max = dt_max.value_or(t_final > 0.0 ? 1e-2 * t_final : 1.0);
  return sc;
}

void ExperimentConfig::validate() const {
  (void)grid();
  params.validate();
  if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
  if (!(t_final >= 0.0)) throw ConfigError("config: t_final must be >= 0");
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= t_final)) throw ConfigError("config: snapshot times must lie in [0, t_final]");
  }
  if (fixed_dt && !(*fixed_dt > 0.0)) throw ConfigError("config: fixed_dt must be positive");
  if (!(front_threshold > 0.0 && front_threshold < 1.0)) {
    throw ConfigError("config: front threshold must lie in (0, 1)");
  }
  resolved_step_control().validate();
}

ExperimentConfig experiment0_config() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentId::Exp0;
  cfg.profile = InitialProfile::Exp0;
  cfg.params = experiment0_params();
  cfg.nx = cfg.ny = 100;
  return cfg;
}

ExperimentConfig experiment1_config() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentId::Exp1;
  cfg.profile = InitialProfile::Exp1;
  cfg.params = experiment1_params();
  return cfg;
}

double gamma_pdf(double x, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw ConfigError("gamma_pdf: shape and scale must be positive");
  if (!(x >= 0.0)) throw ConfigError("gamma_pdf: x must be >= 0");
  return std::pow(x, shape - 1.0) * std::exp(-x / scale) / (std::pow(scale, shape) * std::tgamma(shape));
}

namespace {

template <class IntegrinProfile>
StateField sample_initial(const GridSpec& grid, double epsilon, IntegrinProfile&& integrin) {
  StateField w(grid.n_cells());
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double x1 = grid.x1_center(i);
      const double x2 = grid.x2_center(j);
      const double r2 = x1 * x1 + x2 * x2;
      const double bump = std::exp(-r2 / epsilon);
      CellState s;
      s.c1 = 0.4 * bump;
      s.c2 = bump;
      s.v = 1.0 - s.c2;
      s.y = integrin(r2);
      s.kappa = 2.0 * s.y;
      w.set_cell(i + j * grid.nx(), s);
    }
  }
  return w;
}

}  // namespace

StateField init_experiment0(const GridSpec& grid, double epsilon) {
  return sample_initial(grid, epsilon, [](double r2) { return 20.0 * gamma_pdf(5.0 * r2, 2.0, 15.0); });
}

StateField init_experiment1(const GridSpec& grid, double epsilon) {
  return sample_initial(grid, epsilon,
                        [](double r2) { return 15.0 * gamma_pdf(80.0 * std::sqrt(r2), 3.0, 7.0); });
}

StateField initial_state(const ExperimentConfig& cfg) {
  const GridSpec grid = cfg.grid();
  return cfg.profile == InitialProfile::Exp0 ? init_experiment0(grid, cfg.epsilon)
                                             : init_experiment1(grid, cfg.epsilon);
}

RunResult run_simulation(const ExperimentConfig& cfg, const StateField* initial,
                         const StepObserver& observer) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const GridSpec grid = cfg.grid();
  const StepControlConfig sc = cfg.resolved_step_control();
  const double delay = cfg.params.compound_delay();
  const double area = grid.cell_area();

  StateField w = initial ? *initial : initial_state(cfg);
  if (w.size() != grid.n_cells()) throw ConfigError("run: initial state does not match the grid");

  std::vector<double> targets = cfg.snapshot_times;
  targets.push_back(cfg.t_final);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  RunResult result{grid, {}, {}};
  DelayBuffer buf(0.0, w.y());
  ImexStepper stepper(grid, cfg.params, cfg.stepper);
  StateField w_next(grid.n_cells());
  double t = 0.0;
  std::size_t step_index = 0;

  for (double target : targets) {
    while (t < target) {
      const FirstStage& first = stepper.evaluate_first_stage(w, t, buf);
      DtChoice choice = cfg.fixed_dt
                            ? DtChoice{*cfg.fixed_dt, ActiveBound::Fixed}
                            : compute_dt(max_speed(grid, first.fluxes), w.kappa(),
                                         first.explicit_rhs.kappa(), sc);
      choice = land_on(choice, t, target);

      StepRecord rec;
      double dt = choice.dt;
      while (true) {
        const StepResult res = stepper.step(w, t, dt, buf, w_next);
        rec.krylov_iterations += res.stats.krylov_iterations;
        result.report.total_krylov_solves += res.stats.krylov_solves;
        result.report.max_krylov_residual =
            std::max(result.report.max_krylov_residual, res.stats.max_krylov_residual);
        if (res.status == StepStatus::Ok) break;
        if (res.status == StepStatus::SolverFailure) ++result.report.failed_krylov_solves;
        ++rec.retries;
        ++result.report.rejected_steps;
        dt *= 0.5;
        if (dt < sc.dt_min || rec.retries > cfg.max_retries) {
          const std::string why = res.status == StepStatus::SolverFailure ? "linear solver did not converge"
                                  : res.status == StepStatus::InsufficientHistory
                                      ? "insufficient delay history"
                                      : "non-finite or degenerate state";
          throw SolverFailureError("step at t = " + std::to_string(t) + " failed after " +
                                   std::to_string(rec.retries) + " retries: " + why);
        }
      }

      const bool landed = rec.retries == 0 && dt == target - t;
      const double t_next = landed ? target : t + dt;
      buf.advance(t_next, w_next.y(), delay);
      std::swap(w, w_next);
      t = t_next;

      rec.step = ++step_index;
      rec.t = t;
      rec.dt = dt;
      rec.bound = choice.bound;
      rec.mass_c1 = total_mass(w.c1(), area);
      rec.mass_c2 = total_mass(w.c2(), area);
      rec.min_c2 = *std::min_element(w.c2().begin(), w.c2().end());
      result.report.total_krylov_iterations += rec.krylov_iterations;
      result.report.steps.push_back(rec);
      if (observer) observer(t, w);
    }
    result.snapshots.push_back({target, w});
  }

  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

std::vector<double> restrict_to_coarse(const GridSpec& fine_grid, std::span<const double> fine) {
  const std::size_t nx = fine_grid.nx();
  const std::size_t ny = fine_grid.ny();
  if (nx % 2 != 0 || ny % 2 != 0) throw ConfigError("restriction: fine grid must have even cell counts");
  if (fine.size() != fine_grid.n_cells()) throw ConfigError("restriction: field size mismatch");
  const std::size_t cx = nx / 2;
  const std::size_t cy = ny / 2;
  std::vector<double> coarse(cx * cy);
  for (std::size_t J = 0; J < cy; ++J) {
    for (std::size_t I = 0; I < cx; ++I) {
      const std::size_t k = 2 * I + 2 * J * nx;
      coarse[I + J * cx] = 0.25 * (fine[k] + fine[k + 1] + fine[k + nx] + fine[k + nx + 1]);
    }
  }
  return coarse;
}

StateField restrict_to_coarse(const GridSpec& fine_grid, const StateField& fine) {
  StateField coarse((fine_grid.nx() / 2) * (fine_grid.ny() / 2));
  for (Component c : kAllComponents) coarse[c] = restrict_to_coarse(fine_grid, std::span<const double>(fine[c]));
  return coarse;
}

double l1_norm(std::span<const double> x, double cell_area) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s * cell_area;
}

double l2_norm(std::span<const double> x, double cell_area) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s * cell_area);
}

std::optional<double> eoc(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::nullopt;
  return std::log2(e_coarse / e_fine);
}

EocStudy eoc_from_states(const ExperimentConfig& cfg, const std::vector<std::size_t>& levels,
                         const std::vector<StateField>& finals,
                         const std::vector<Component>& components) {
  if (finals.size() != levels.size()) throw ConfigError("eoc: one final state per level required");
  EocStudy study;
  study.levels = levels;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    const GridSpec coarse_grid(cfg.a, cfg.b, levels[l], levels[l]);
    const GridSpec fine_grid(cfg.a, cfg.b, levels[l + 1], levels[l + 1]);
    EocRow row{levels[l], levels[l + 1], {}};
    for (Component c : components) {
      const std::vector<double> restricted = restrict_to_coarse(fine_grid, std::span<const double>(finals[l + 1][c]));
      std::vector<double> diff(restricted.size());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = finals[l][c][k] - restricted[k];
      EocEntry e{c, l1_norm(diff, coarse_grid.cell_area()), l2_norm(diff, coarse_grid.cell_area()), {}, {}};
      if (!study.rows.empty()) {
        for (const EocEntry& prev : study.rows.back().entries) {
          if (prev.component == c) {
            e.eoc_l1 = eoc(prev.l1, e.l1);
            e.eoc_l2 = eoc(prev.l2, e.l2);
          }
        }
      }
      row.entries.push_back(e);
    }
    study.rows.push_back(std::move(row));
  }
  return study;
}

EocStudy eoc_study(const ExperimentConfig& cfg, const std::vector<std::size_t>& levels,
                   const std::vector<Component>& components) {
  if (levels.size() < 2) throw ConfigError("eoc: at least two levels required");
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    if (levels[l + 1] != 2 * levels[l]) throw ConfigError("eoc: levels must be successive doublings");
  }
  std::vector<StateField> finals;
  std::vector<double> wall;
  std::vector<std::size_t> steps;
  for (std::size_t n : levels) {
    ExperimentConfig level_cfg = cfg;
    level_cfg.nx = level_cfg.ny = n;
    level_cfg.snapshot_times.clear();
    RunResult run = run_simulation(level_cfg);
    wall.push_back(run.report.wall_seconds);
    steps.push_back(run.report.steps.size());
    finals.push_back(run.final_state());
  }
  EocStudy study = eoc_from_states(cfg, levels, finals, components);
  study.wall_seconds = std::move(wall);
  study.steps = std::move(steps);
  return study;
}

std::vector<RadialCutRow> radial_cut(const GridSpec& grid, const StateField& w) {
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  const double mid = 0.5 * (grid.a() + grid.b());
  const std::size_t j_lo = (ny - 1) / 2;
  const std::size_t j_hi = ny / 2;
  std::vector<RadialCutRow> cut;
  for (std::size_t i = 0; i < nx; ++i) {
    const double x1 = grid.x1_center(i);
    if (x1 <= mid) continue;
    const CellState lo = w.cell(i + j_lo * nx);
    const CellState hi = w.cell(i + j_hi * nx);
    RadialCutRow row;
    row.r = x1 - mid;
    row.state = {0.5 * (lo.c1 + hi.c1), 0.5 * (lo.c2 + hi.c2), 0.5 * (lo.v + hi.v),
                 0.5 * (lo.y + hi.y), 0.5 * (lo.kappa + hi.kappa)};
    cut.push_back(row);
  }
  return cut;
}

FrontMetrics front_metrics(const StateField& w, const GridSpec& grid, double threshold) {
  FrontMetrics m;
  m.mass_c1 = total_mass(w.c1(), grid.cell_area());
  m.mass_c2 = total_mass(w.c2(), grid.cell_area());

  const std::vector<RadialCutRow> cut = radial_cut(grid, w);
  if (cut.size() < 2) return m;
  std::vector<double> grad(cut.size() - 1);
  double max_grad = 0.0;
  for (std::size_t k = 0; k + 1 < cut.size(); ++k) {
    grad[k] = std::abs(cut[k + 1].state.c2 - cut[k].state.c2) / (cut[k + 1].r - cut[k].r);
    max_grad = std::max(max_grad, grad[k]);
  }
  if (max_grad == 0.0) {
    m.front_height = cut.front().state.c2;
    return m;
  }
  std::size_t front = 0;
  for (std::size_t k = grad.size(); k-- > 0;) {
    if (grad[k] > threshold * max_grad) {
      front = k;
      break;
    }
  }
  m.front_position = 0.5 * (cut[front].r + cut[front + 1].r);

  // Outermost local maximum at or inside the front.
  std::size_t peak = 0;
  for (std::size_t k = front + 1; k-- > 0;) {
    const double c = cut[k].state.c2;
    const bool ge_left = k == 0 || c >= cut[k - 1].state.c2;
    const bool ge_right = c >= cut[k + 1].state.c2;
    if (ge_left && ge_right) {
      peak = k;
      break;
    }
  }
  m.front_height = cut[peak].state.c2;
  return m;
}

std::vector<SweepRow> sweep_tau(const ExperimentConfig& cfg, const std::vector<double>& taus,
                                std::size_t jobs) {
  if (taus.empty()) throw ConfigError("sweep: no tau values given");
  std::vector<SweepRow> rows(taus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < taus.size(); k = next++) {
      SweepRow& row = rows[k];
      row.tau = taus[k];
      try {
        ExperimentConfig run_cfg = cfg;
        run_cfg.params.tau = taus[k];
        run_cfg.snapshot_times.clear();
        const RunResult run = run_simulation(run_cfg);
        row.metrics = front_metrics(run.final_state(), run.grid, cfg.front_threshold);
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, taus.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return rows;
}

std::vector<ComponentDifference> compare_states(const GridSpec& grid, const StateField& a,
                                                const StateField& b) {
  if (a.size() != b.size() || a.size() != grid.n_cells()) throw ConfigError("compare: mismatched grids");
  std::vector<ComponentDifference> out;
  for (Component c : kAllComponents) {
    ComponentDifference d{c, 0.0, 0.0, 0.0};
    double a_inf = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double diff = std::abs(a[c][k] - b[c][k]);
      d.linf = std::max(d.linf, diff);
      d.l1 += diff;
      a_inf = std::max(a_inf, std::abs(a[c][k]));
    }
    d.l1 *= grid.cell_area();
    d.rel_linf = a_inf > 0.0 ? d.linf / a_inf : 0.0;
    out.push_back(d);
  }
  return out;
}

}  // namespace invasion
