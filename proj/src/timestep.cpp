#include "invasion/timestep.hpp"

#include "invasion/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace invasion {

void StepControlConfig::validate() const {
  if (!(cfl_limit > 0.0 && cfl_limit <= 1.0)) throw ConfigError("step control: cfl_limit must lie in (0, 1]");
  if (!(kappa_rel_limit > 0.0)) throw ConfigError("step control: kappa_rel_limit must be positive");
  if (!(dt_min > 0.0 && dt_min < dt_max)) throw ConfigError("step control: require 0 < dt_min < dt_max");
}

std::string_view bound_name(ActiveBound b) {
  switch (b) {
    case ActiveBound::Cfl: return "cfl";
    case ActiveBound::Kappa: return "kappa";
    case ActiveBound::DtMax: return "dt_max";
    case ActiveBound::Landing: return "landing";
    case ActiveBound::Fixed: return "fixed";
  }
  return "?";
}

double max_speed(const GridSpec& grid, const FluxWorkspace& ws) {
  double a1 = 0.0;
  for (double P : ws.speeds_x) a1 = std::max(a1, std::abs(P));
  double a2 = 0.0;
  for (double P : ws.speeds_y) a2 = std::max(a2, std::abs(P));
  return std::max(a1 / grid.h1(), a2 / grid.h2());
}

namespace {

double inf_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

DtChoice compute_dt(double a, std::span<const double> kappa, std::span<const double> r5,
                    const StepControlConfig& cfg) {
  DtChoice choice{cfg.dt_max, ActiveBound::DtMax};
  if (a > 0.0) {
    const double dt = cfg.cfl_limit / a;
    if (dt < choice.dt) choice = {dt, ActiveBound::Cfl};
  }
  // The relative change is undefined for kappa == 0; that branch is skipped too.
  const double r5_norm = inf_norm(r5);
  const double kappa_norm = inf_norm(kappa);
  if (r5_norm > 0.0 && kappa_norm > 0.0) {
    const double dt = cfg.kappa_rel_limit * kappa_norm / r5_norm;
    if (dt < choice.dt) choice = {dt, ActiveBound::Kappa};
  }
  if (!(choice.dt >= cfg.dt_min)) {
    throw StepSizeCollapseError("step size " + std::to_string(choice.dt) + " below dt_min " +
                                std::to_string(cfg.dt_min));
  }
  return choice;
}

DtChoice land_on(DtChoice choice, double t, double t_target) {
  const double remaining = t_target - t;
  if (choice.dt >= remaining || remaining - choice.dt <= 1e-12 * std::max(1.0, std::abs(t_target))) {
    return {remaining, choice.dt > remaining ? ActiveBound::Landing : choice.bound};
  }
  return choice;
}

}  // namespace invasion
