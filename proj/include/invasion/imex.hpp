/// @file imex.hpp
/// @brief Four-stage third-order additive IMEX Runge-Kutta stepper.
///
/// Explicit part:  -A(w) + R_expl(w, y(t - chi*tau))   (haptotaxis, reactions, delay)
/// Implicit part:   D(w) + R_impl(w)                    (diffusion, integrin kinetics)
///
/// Each implicit stage is linearised: the diffusion coefficient is frozen at
/// the most recent known state, which turns the c2 stage equation into a
/// sparse linear system (BiCGSTAB) and the y stage equation into a scalar
/// linear equation per cell.
#pragma once

#include "invasion/bicgstab.hpp"
#include "invasion/delay_buffer.hpp"
#include "invasion/grid.hpp"
#include "invasion/model.hpp"
#include "invasion/spatial.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace invasion {

struct Rational {
  std::int64_t num;
  std::int64_t den;
  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Explicit/implicit tableau pair with s = 4 stages.
struct ButcherPair {
  static constexpr std::size_t kStages = 4;
  using Matrix = std::array<std::array<double, kStages>, kStages>;
  using Vector = std::array<double, kStages>;

  Matrix a_expl{};
  Vector b_expl{};
  Vector c_expl{};
  Matrix a_impl{};
  Vector b_impl{};
  Vector c_impl{};
};

/// ARK3(2)4L[2]SA, converted once from its exact rational entries.
const ButcherPair& ark3_tableau();

/// The rational entries themselves, row-major, zero where the tableau is empty.
using RationalMatrix = std::array<std::array<Rational, ButcherPair::kStages>, ButcherPair::kStages>;
const RationalMatrix& ark3_explicit_rationals();
const RationalMatrix& ark3_implicit_rationals();

/// R(z) = 1 + z b^T (I - z A)^{-1} 1 for the implicit tableau.
std::complex<double> implicit_stability(const ButcherPair& tab, std::complex<double> z);

/// Which state the linearised implicit operators are frozen at.
enum class FreezePolicy {
  /// Stage i uses c1, v, kappa of stage i (already known explicitly) and
  /// c2, y of stage i-1.
  PreviousStage,
  /// Every stage uses w^n.
  StepStart,
};

struct StepperOptions {
  FreezePolicy freeze = FreezePolicy::PreviousStage;
  FluxUpwinding upwinding = FluxUpwinding::Upwind;
  SolverOptions krylov{};
};

struct StageSolution {
  std::vector<double> c2;
  std::vector<double> y;
  SolveReport report;
};

/// Solves (Id - gamma_dt L_T) c2 = rhs_c2 with T frozen at `w_frozen`, and
/// (1 + gamma_dt (k1 v + k-1)/chi) y = rhs_y + gamma_dt k1 v / chi cellwise
/// with v taken from `w_frozen`. `c2_guess` seeds the Krylov iteration
/// (defaults to rhs_c2).
StageSolution stage_solve(const GridSpec& grid, const ModelParams& p,
                          std::span<const double> rhs_c2, std::span<const double> rhs_y,
                          const StateField& w_frozen, double gamma_dt,
                          const SolverOptions& krylov = {},
                          std::span<const double> c2_guess = {});

struct StepStats {
  std::size_t krylov_solves = 0;
  std::size_t krylov_iterations = 0;
  double max_krylov_residual = 0.0;
  bool krylov_failed = false;
};

enum class StepStatus { Ok, SolverFailure, NonFiniteState, InsufficientHistory };

struct StepResult {
  StepStatus status = StepStatus::Ok;
  StepStats stats;
};

/// Quantities of the first stage that do not depend on dt; the step-size
/// controller reads them before the step is taken.
struct FirstStage {
  FluxWorkspace fluxes;
  /// Explicit operator at w^n: (-A + R_expl) per component.
  StateField explicit_rhs;
  /// Implicit operator at w^n: (D + R_impl) per component.
  StateField implicit_rhs;
};

class ImexStepper {
public:
  ImexStepper(GridSpec grid, ModelParams params, StepperOptions options = {},
              ButcherPair tableau = ark3_tableau());

  const GridSpec& grid() const noexcept { return grid_; }
  const ModelParams& params() const noexcept { return params_; }
  const StepperOptions& options() const noexcept { return options_; }

  /// Evaluates both operators at w^n (t = t_n) and caches them for the next
  /// `step` with the same state.
  const FirstStage& evaluate_first_stage(const StateField& w_n, double t_n, const DelayBuffer& buf);

  /// Advances w^n by dt. On success `w_next` holds w^{n+1}; the delay buffer
  /// is left untouched (the caller advances it once the step is accepted).
  StepResult step(const StateField& w_n, double t_n, double dt, const DelayBuffer& buf,
                  StateField& w_next);

  /// Explicit operator (-A + R_expl) at time t, state w.
  void explicit_operator(const StateField& w, double t, const DelayBuffer& buf, FluxWorkspace& ws,
                         StateField& out);
  /// Implicit operator (D + R_impl) at state w.
  void implicit_operator(const StateField& w, StateField& out);

private:
  GridSpec grid_;
  ModelParams params_;
  StepperOptions options_;
  ButcherPair tab_;

  FirstStage first_;
  bool first_valid_ = false;
  const StateField* first_state_ = nullptr;
  double first_time_ = 0.0;

  std::array<StateField, ButcherPair::kStages> stages_;
  std::array<StateField, ButcherPair::kStages> k_expl_;
  std::array<StateField, ButcherPair::kStages> k_impl_;
  StateField rhs_;
  StateField frozen_;
  FluxWorkspace scratch_ws_;
  std::vector<double> y_delayed_;
  std::vector<double> T_;
};

}  // namespace invasion
