#include "invasion/model.hpp"

#include "invasion/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace invasion {

void ModelParams::validate() const {
  if (!(chi > 0.0 && chi <= 1.0)) throw ConfigError("params: chi must lie in (0, 1]");
  if (!(tau >= 0.0)) throw ConfigError("params: tau must be >= 0");
  const double rates[] = {mu_c, eta_1, gamma, lambda, D_c,  D_h, delta_v,
                          mu_v, eta_2, k_1,   k_m1,   q,    M_rate};
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("params: rates must be finite and >= 0");
  }
}

ModelParams reference_params() { return ModelParams{}; }

ModelParams experiment0_params() {
  ModelParams p;
  p.lambda = 0.076;
  p.D_c = 1e-3;
  p.D_h = 1.0;
  p.delta_v = 10.0;
  p.M_rate = 1.0;
  p.tau = 0.04;
  return p;
}

ModelParams experiment1_params() {
  ModelParams p;
  p.M_rate = 1.0;
  p.tau = 0.04;
  return p;
}

std::string_view component_name(Component c) {
  switch (c) {
    case Component::C1: return "c1";
    case Component::C2: return "c2";
    case Component::V: return "v";
    case Component::Y: return "y";
    case Component::Kappa: return "kappa";
  }
  return "?";
}

Component component_from_name(std::string_view name) {
  for (Component c : kAllComponents) {
    if (component_name(c) == name) return c;
  }
  throw ConfigError("unknown component '" + std::string(name) + "'");
}

StateField::StateField(std::size_t n_cells) : n_(n_cells) {
  for (auto& d : data_) d.assign(n_cells, 0.0);
}

void StateField::set_cell(std::size_t i0, const CellState& s) {
  data_[0][i0] = s.c1;
  data_[1][i0] = s.c2;
  data_[2][i0] = s.v;
  data_[3][i0] = s.y;
  data_[4][i0] = s.kappa;
}

bool StateField::all_finite() const {
  for (const auto& d : data_) {
    for (double x : d) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

namespace {

double integrin_kinetics(const ModelParams& p, const CellState& w) {
  return p.k_1 / p.chi * (1.0 - w.y) * w.v - p.k_m1 / p.chi * w.y;
}

}  // namespace

Vec5 reaction_expl(const ModelParams& p, const CellState& w, double y_delayed) {
  const double cells = w.c1 + w.c2;
  return {
      p.mu_c * w.c1 * (1.0 - cells - p.eta_1 * w.v) + p.gamma * w.c2 - p.lambda * w.c1,
      p.lambda * w.c1 - p.gamma * w.c2,
      -p.delta_v * cells * w.v + p.mu_v * w.v * (1.0 - p.eta_2 * cells - w.v),
      0.0,
      -p.q / p.chi * w.kappa + p.M_rate / p.chi * y_delayed,
  };
}

Vec5 reaction_impl(const ModelParams& p, const CellState& w) {
  return {0.0, 0.0, 0.0, integrin_kinetics(p, w), 0.0};
}

Vec5 reaction_full(const ModelParams& p, const CellState& w, double y_delayed) {
  Vec5 r = reaction_expl(p, w, y_delayed);
  r[3] = integrin_kinetics(p, w);
  return r;
}

double diffusion_coefficient(const ModelParams& p, const CellState& w) {
  const double denom = 1.0 + (w.c1 + w.c2) * w.v;
  if (!(denom > 0.0)) {
    throw DegenerateStateError("diffusion coefficient: 1 + (c1+c2)v = " + std::to_string(denom));
  }
  return p.D_c * w.kappa / denom;
}

double total_mass(std::span<const double> field, double cell_area) {
  return std::accumulate(field.begin(), field.end(), 0.0) * cell_area;
}

}  // namespace invasion
