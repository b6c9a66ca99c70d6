/// @file timestep.hpp
/// @brief Step-size selection from the haptotaxis CFL bound and the
/// relative-change bound on the contractivity.
#pragma once

#include "invasion/grid.hpp"
#include "invasion/spatial.hpp"

#include <limits>
#include <span>
#include <string_view>

namespace invasion {

struct StepControlConfig {
  double cfl_limit = 0.5;
  double kappa_rel_limit = 0.01;
  double dt_max = 5e-3;
  double dt_min = 1e-12;

  /// Throws ConfigError unless 0 < cfl_limit <= 1, kappa_rel_limit > 0 and
  /// 0 < dt_min < dt_max.
  void validate() const;
};

/// Which constraint determined a step size.
enum class ActiveBound { Cfl, Kappa, DtMax, Landing, Fixed };

std::string_view bound_name(ActiveBound b);

struct DtChoice {
  double dt = 0.0;
  ActiveBound bound = ActiveBound::DtMax;
};

/// a = max over interior faces of |P| / h_j.
double max_speed(const GridSpec& grid, const FluxWorkspace& ws);

/// dt = min(cfl_limit / a, kappa_rel_limit * ||kappa||_inf / ||r5||_inf, dt_max),
/// skipping a branch whose denominator vanishes. Throws StepSizeCollapseError
/// when the result falls below dt_min.
DtChoice compute_dt(double a, std::span<const double> kappa, std::span<const double> r5,
                    const StepControlConfig& cfg);

/// Shrinks `choice` so that t + dt does not pass `t_target`; a step that
/// would end within a relative 1e-12 of the target is snapped onto it.
DtChoice land_on(DtChoice choice, double t, double t_target);

}  // namespace invasion
