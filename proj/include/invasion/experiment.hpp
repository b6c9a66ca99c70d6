/// @file experiment.hpp
/// @brief Experiment configuration, initial conditions, the time loop and
/// the post-processing used by the convergence study and the delay sweep.
#pragma once

#include "invasion/grid.hpp"
#include "invasion/imex.hpp"
#include "invasion/model.hpp"
#include "invasion/timestep.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace invasion {

enum class ExperimentId { Exp0, Exp1, Custom };

/// Which closed-form initial condition to sample.
enum class InitialProfile { Exp0, Exp1 };

std::string_view experiment_name(ExperimentId id);
ExperimentId experiment_from_name(std::string_view name);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::Exp1;
  InitialProfile profile = InitialProfile::Exp1;
  double a = -2.0;
  double b = 2.0;
  std::size_t nx = 200;
  std::size_t ny = 200;
  ModelParams params = experiment1_params();
  double epsilon = 1.5;
  double t_final = 0.5;
  /// Times at which the state is recorded; t_final is always recorded.
  std::vector<double> snapshot_times;
  std::vector<double> tau_sweep;
  std::string output_dir = "out";
  bool csv = false;

  StepControlConfig step_control{};
  /// When unset, dt_max = 1e-2 * t_final.
  std::optional<double> dt_max;
  /// Bypasses the step-size controller (temporal convergence studies).
  std::optional<double> fixed_dt;
  std::size_t max_retries = 30;
  StepperOptions stepper{};
  /// Fraction of the maximum radial gradient that defines the front.
  double front_threshold = 0.5;

  GridSpec grid() const { return {a, b, nx, ny}; }
  StepControlConfig resolved_step_control() const;
  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

ExperimentConfig experiment0_config();
ExperimentConfig experiment1_config();

/// x^(a-1) e^(-x/b) / (b^a Gamma(a)). Throws ConfigError for a <= 0, b <= 0 or x < 0.
double gamma_pdf(double x, double shape, double scale);

StateField init_experiment0(const GridSpec& grid, double epsilon = 1.5);
StateField init_experiment1(const GridSpec& grid, double epsilon = 1.5);
StateField initial_state(const ExperimentConfig& cfg);

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;  ///< time reached by the step
  double dt = 0.0;
  ActiveBound bound = ActiveBound::DtMax;
  std::size_t krylov_iterations = 0;
  std::size_t retries = 0;
  double mass_c1 = 0.0;
  double mass_c2 = 0.0;
  double min_c2 = 0.0;
};

struct Snapshot {
  double t = 0.0;
  StateField state;
};

struct RunReport {
  std::vector<StepRecord> steps;
  std::size_t total_krylov_iterations = 0;
  std::size_t total_krylov_solves = 0;
  std::size_t rejected_steps = 0;
  /// Stage solves that missed the Krylov tolerance (each forces a retry).
  std::size_t failed_krylov_solves = 0;
  double max_krylov_residual = 0.0;
  double wall_seconds = 0.0;
};

struct RunResult {
  GridSpec grid;
  std::vector<Snapshot> snapshots;
  RunReport report;

  const StateField& final_state() const { return snapshots.back().state; }
};

/// Called after every accepted step with (time, state).
using StepObserver = std::function<void(double, const StateField&)>;

/// Runs the configured experiment from its initial condition (or from
/// `initial`, when given). Throws StepSizeCollapseError / SolverFailureError
/// when a step cannot be completed.
RunResult run_simulation(const ExperimentConfig& cfg, const StateField* initial = nullptr,
                         const StepObserver& observer = {});

/// 2x2 block average onto the grid with half the cells per direction.
StateField restrict_to_coarse(const GridSpec& fine_grid, const StateField& fine);
std::vector<double> restrict_to_coarse(const GridSpec& fine_grid, std::span<const double> fine);

double l1_norm(std::span<const double> x, double cell_area);
double l2_norm(std::span<const double> x, double cell_area);

/// log2(e_coarse / e_fine); nullopt when either error is zero.
std::optional<double> eoc(double e_coarse, double e_fine);

struct EocEntry {
  Component component;
  double l1 = 0.0;
  double l2 = 0.0;
  std::optional<double> eoc_l1;
  std::optional<double> eoc_l2;
};

struct EocRow {
  std::size_t coarse = 0;
  std::size_t fine = 0;
  std::vector<EocEntry> entries;
};

struct EocStudy {
  std::vector<std::size_t> levels;
  std::vector<double> wall_seconds;
  std::vector<std::size_t> steps;
  std::vector<EocRow> rows;
};

/// Errors between successive levels (coarse vs. restricted fine) at
/// t_final, and EOC between successive rows. Levels must be doublings.
EocStudy eoc_study(const ExperimentConfig& cfg, const std::vector<std::size_t>& levels,
                   const std::vector<Component>& components = {Component::C1, Component::C2,
                                                                Component::Kappa});

/// Builds the study from already computed final states (one per level).
EocStudy eoc_from_states(const ExperimentConfig& cfg, const std::vector<std::size_t>& levels,
                         const std::vector<StateField>& finals,
                         const std::vector<Component>& components);

struct RadialCutRow {
  double r = 0.0;
  CellState state;
};

/// The centre row from the midpoint to the right edge (for an even row
/// count, the average of the two rows adjacent to x2 = (a+b)/2).
std::vector<RadialCutRow> radial_cut(const GridSpec& grid, const StateField& w);

struct FrontMetrics {
  double front_position = 0.0;
  double front_height = 0.0;
  double mass_c1 = 0.0;
  double mass_c2 = 0.0;
};

/// Front = largest radius at which the one-sided radial difference of c2
/// exceeds `threshold` times its maximum along the cut; height = c2 at the
/// outermost local maximum of the cut at or inside that radius.
FrontMetrics front_metrics(const StateField& w, const GridSpec& grid, double threshold = 0.5);

struct SweepRow {
  double tau = 0.0;
  bool ok = false;
  std::string error;
  FrontMetrics metrics;
};

/// One run per tau (executed on up to `jobs` threads); a failed run marks its
/// row and the sweep continues.
std::vector<SweepRow> sweep_tau(const ExperimentConfig& cfg, const std::vector<double>& taus,
                                std::size_t jobs = 1);

struct ComponentDifference {
  Component component;
  double linf = 0.0;
  double l1 = 0.0;
  /// linf / ||a||_inf (0 when a vanishes).
  double rel_linf = 0.0;
};

/// Componentwise difference norms. Throws ConfigError on mismatched sizes.
std::vector<ComponentDifference> compare_states(const GridSpec& grid, const StateField& a,
                                                const StateField& b);

}  // namespace invasion
