#include "invasion/imex.hpp"

#include "invasion/error.hpp"

#include <algorithm>
#include <cmath>

namespace invasion {

namespace {

constexpr Rational kZero{0, 1};
constexpr Rational kDiag{1767732205903, 4055673282236};

constexpr RationalMatrix kExplicit = {{
    {kZero, kZero, kZero, kZero},
    {Rational{1767732205903, 2027836641118}, kZero, kZero, kZero},
    {Rational{5535828885825, 10492691773637}, Rational{788022342437, 10882634858940}, kZero, kZero},
    {Rational{6485989280629, 16251701735622}, Rational{-4246266847089, 9704473918619},
     Rational{10755448449292, 10357097424841}, kZero},
}};

constexpr std::array<Rational, 4> kWeights = {
    Rational{1471266399579, 7840856788654}, Rational{-4482444167858, 7529755066697},
    Rational{11266239266428, 11593286722821}, Rational{1767732205903, 4055673282236}};

constexpr RationalMatrix kImplicit = {{
    {kZero, kZero, kZero, kZero},
    {kDiag, kDiag, kZero, kZero},
    {Rational{2746238789719, 10658868560708}, Rational{-640167445237, 6845629431997}, kDiag, kZero},
    {kWeights[0], kWeights[1], kWeights[2], kWeights[3]},
}};

constexpr std::array<Rational, 4> kAbscissae = {Rational{0, 1}, Rational{1767732205903, 2027836641118},
                                                Rational{3, 5}, Rational{1, 1}};

ButcherPair build_tableau() {
  ButcherPair t;
  for (std::size_t i = 0; i < ButcherPair::kStages; ++i) {
    for (std::size_t j = 0; j < ButcherPair::kStages; ++j) {
      t.a_expl[i][j] = kExplicit[i][j].value();
      t.a_impl[i][j] = kImplicit[i][j].value();
    }
    t.b_expl[i] = kWeights[i].value();
    t.b_impl[i] = kWeights[i].value();
    t.c_expl[i] = kAbscissae[i].value();
    t.c_impl[i] = kAbscissae[i].value();
  }
  return t;
}

// out = base + dt * sum_j (ae[j] * ke[j] + ai[j] * ki[j]) over j < count.
void combine(std::span<const double> base, double dt, std::size_t count,
             const std::array<double, 4>& ae, const std::array<StateField, 4>& ke,
             const std::array<double, 4>& ai, const std::array<StateField, 4>& ki, Component c,
             std::span<double> out) {
  std::copy(base.begin(), base.end(), out.begin());
  for (std::size_t j = 0; j < count; ++j) {
    const double we = dt * ae[j];
    const double wi = dt * ai[j];
    const auto& e = ke[j][c];
    const auto& m = ki[j][c];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += we * e[k] + wi * m[k];
  }
}

}  // namespace

const RationalMatrix& ark3_explicit_rationals() { return kExplicit; }
const RationalMatrix& ark3_implicit_rationals() { return kImplicit; }

const ButcherPair& ark3_tableau() {
  static const ButcherPair tab = build_tableau();
  return tab;
}

std::complex<double> implicit_stability(const ButcherPair& tab, std::complex<double> z) {
  constexpr std::size_t s = ButcherPair::kStages;
  std::array<std::complex<double>, s> x{};
  // Forward substitution on (I - z A) x = 1; A is lower triangular.
  for (std::size_t i = 0; i < s; ++i) {
    std::complex<double> acc = 1.0;
    for (std::size_t j = 0; j < i; ++j) acc += z * tab.a_impl[i][j] * x[j];
    x[i] = acc / (1.0 - z * tab.a_impl[i][i]);
  }
  // Stiffly accurate: R(z) is the last stage, which avoids the cancellation in 1 + z b^T x.
  if (tab.b_impl == tab.a_impl[s - 1]) return x[s - 1];
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < s; ++i) sum += tab.b_impl[i] * x[i];
  return 1.0 + z * sum;
}

StageSolution stage_solve(const GridSpec& grid, const ModelParams& p,
                          std::span<const double> rhs_c2, std::span<const double> rhs_y,
                          const StateField& w_frozen, double gamma_dt,
                          const SolverOptions& krylov, std::span<const double> c2_guess) {
  if (!(gamma_dt >= 0.0)) throw ConfigError("stage_solve: gamma_dt must be >= 0");
  const std::size_t n = grid.n_cells();
  StageSolution out;
  out.c2.assign(c2_guess.empty() ? rhs_c2.begin() : c2_guess.begin(),
                c2_guess.empty() ? rhs_c2.end() : c2_guess.end());
  out.y.resize(n);

  if (gamma_dt == 0.0) {
    out.c2.assign(rhs_c2.begin(), rhs_c2.end());
  } else {
    DiffusionOperator L(grid, p, w_frozen);
    LinearOperator op;
    op.n = n;
    op.apply = [&L, gamma_dt](std::span<const double> x, std::span<double> y) {
      L.apply_shifted(gamma_dt, x, y);
    };
    if (krylov.jacobi) {
      op.diagonal = L.diagonal();
      for (double& d : op.diagonal) d = 1.0 - gamma_dt * d;
    }
    out.report = bicgstab(op, rhs_c2, out.c2, krylov);
  }
  if (gamma_dt == 0.0) out.report.converged = true;

  const auto& v = w_frozen.v();
  const double inv_chi = 1.0 / p.chi;
  for (std::size_t k = 0; k < n; ++k) {
    const double bind = gamma_dt * p.k_1 * v[k] * inv_chi;
    out.y[k] = (rhs_y[k] + bind) / (1.0 + bind + gamma_dt * p.k_m1 * inv_chi);
  }
  return out;
}

ImexStepper::ImexStepper(GridSpec grid, ModelParams params, StepperOptions options,
                         ButcherPair tableau)
    : grid_(grid), params_(params), options_(options), tab_(tableau) {
  params_.validate();
  const std::size_t n = grid_.n_cells();
  for (auto& s : stages_) s = StateField(n);
  for (auto& s : k_expl_) s = StateField(n);
  for (auto& s : k_impl_) s = StateField(n);
  rhs_ = StateField(n);
  frozen_ = StateField(n);
  first_.explicit_rhs = StateField(n);
  first_.implicit_rhs = StateField(n);
  first_.fluxes.resize(grid_);
  scratch_ws_.resize(grid_);
  y_delayed_.resize(n);
  T_.resize(n);
}

void ImexStepper::explicit_operator(const StateField& w, double t, const DelayBuffer& buf,
                                    FluxWorkspace& ws, StateField& out) {
  compute_fluxes(grid_, params_, w, options_.upwinding, ws);
  auto& c2_out = out.c2();
  advection_c2(grid_, ws, c2_out);
  buf.interpolate(t, params_.compound_delay(), w.y(), y_delayed_);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Vec5 r = reaction_expl(params_, w.cell(k), y_delayed_[k]);
    out.c1()[k] = r[0];
    c2_out[k] = r[1] - c2_out[k];
    out.v()[k] = r[2];
    out.y()[k] = 0.0;
    out.kappa()[k] = r[4];
  }
}

void ImexStepper::implicit_operator(const StateField& w, StateField& out) {
  diffusion_coefficients(params_, w, T_);
  diffusion_c2(grid_, T_, w.c2(), out.c2());
  for (std::size_t k = 0; k < w.size(); ++k) {
    out.c1()[k] = 0.0;
    out.v()[k] = 0.0;
    out.y()[k] = reaction_impl(params_, w.cell(k))[3];
    out.kappa()[k] = 0.0;
  }
}

const FirstStage& ImexStepper::evaluate_first_stage(const StateField& w_n, double t_n,
                                                    const DelayBuffer& buf) {
  explicit_operator(w_n, t_n, buf, first_.fluxes, first_.explicit_rhs);
  implicit_operator(w_n, first_.implicit_rhs);
  first_valid_ = true;
  first_state_ = &w_n;
  first_time_ = t_n;
  return first_;
}

StepResult ImexStepper::step(const StateField& w_n, double t_n, double dt, const DelayBuffer& buf,
                             StateField& w_next) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  StepResult result;
  constexpr std::size_t s = ButcherPair::kStages;

  try {
    if (!first_valid_ || first_state_ != &w_n || first_time_ != t_n) {
      evaluate_first_stage(w_n, t_n, buf);
    }
    stages_[0] = w_n;
    k_expl_[0] = first_.explicit_rhs;
    k_impl_[0] = first_.implicit_rhs;

    for (std::size_t i = 1; i < s; ++i) {
      StateField& W = stages_[i];
      for (Component c : kAllComponents) {
        combine(w_n[c], dt, i, tab_.a_expl[i], k_expl_, tab_.a_impl[i], k_impl_, c, rhs_[c]);
      }
      W.c1() = rhs_.c1();
      W.v() = rhs_.v();
      W.kappa() = rhs_.kappa();

      if (options_.freeze == FreezePolicy::PreviousStage) {
        frozen_.c1() = rhs_.c1();
        frozen_.c2() = stages_[i - 1].c2();
        frozen_.v() = rhs_.v();
        frozen_.y() = stages_[i - 1].y();
        frozen_.kappa() = rhs_.kappa();
      } else {
        frozen_ = w_n;
      }

      StageSolution sol = stage_solve(grid_, params_, rhs_.c2(), rhs_.y(), frozen_,
                                      tab_.a_impl[i][i] * dt, options_.krylov, stages_[i - 1].c2());
      ++result.stats.krylov_solves;
      result.stats.krylov_iterations += sol.report.iterations;
      result.stats.max_krylov_residual =
          std::max(result.stats.max_krylov_residual, sol.report.final_residual);
      if (!sol.report.converged) {
        result.stats.krylov_failed = true;
        result.status = StepStatus::SolverFailure;
        return result;
      }
      W.c2() = std::move(sol.c2);
      W.y() = std::move(sol.y);

      explicit_operator(W, t_n + tab_.c_expl[i] * dt, buf, scratch_ws_, k_expl_[i]);
      implicit_operator(W, k_impl_[i]);
    }

    if (w_next.size() != w_n.size()) w_next = StateField(w_n.size());
    for (Component c : kAllComponents) {
      combine(w_n[c], dt, s, tab_.b_expl, k_expl_, tab_.b_impl, k_impl_, c, w_next[c]);
    }
  } catch (const DegenerateStateError&) {
    result.status = StepStatus::NonFiniteState;
    return result;
  } catch (const InsufficientHistoryError&) {
    result.status = StepStatus::InsufficientHistory;
    return result;
  }

  if (!w_next.all_finite()) {
    result.status = StepStatus::NonFiniteState;
    return result;
  }
  first_valid_ = false;
  return result;
}

}  // namespace invasion
