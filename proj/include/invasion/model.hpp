/// @file model.hpp
/// @brief Model constants, the five unknown fields and the pointwise
/// reaction / diffusion-coefficient evaluations.
///
/// The unknowns per cell are w = (c1, c2, v, y, kappa): proliferating cells,
/// migrating cells, ECM density, ECM-bound integrins and contractivity. Time
/// is the macroscopic variable; the microscale rates appear divided by chi
/// and the integrin delay enters as the compound offset chi*tau.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace invasion {

struct ModelParams {
  double mu_c = 1.0;      ///< proliferation rate
  double eta_1 = 0.05;    ///< ECM crowding weight in c1 growth
  double gamma = 0.055;   ///< MET rate (c2 -> c1)
  double lambda = 0.152;  ///< EMT rate (c1 -> c2)
  double D_c = 0.01;      ///< diffusion scale
  double D_h = 10.0;      ///< haptotaxis scale
  double delta_v = 5.0;   ///< ECM degradation rate
  double mu_v = 0.3;      ///< ECM remodeling rate
  double eta_2 = 0.9;     ///< cell crowding weight in ECM growth
  double k_1 = 2.0;       ///< integrin binding rate
  double k_m1 = 0.06;     ///< integrin unbinding rate
  double q = 3.0;         ///< contractivity decay rate
  double M_rate = 2.0;    ///< contractivity production rate
  double chi = 0.01;      ///< micro/macro time-scale ratio, 0 < chi <= 1
  double tau = 20.0;      ///< delay in microscale units

  /// Physical (macroscale) delay offset.
  double compound_delay() const noexcept { return chi * tau; }

  /// Throws ConfigError on chi outside (0,1], negative tau or negative rates.
  /// chi = 1 is accepted for the nonstiff verification variant.
  void validate() const;
};

/// Reference parameter block of the model derivation (tau = 20, M = 2).
ModelParams reference_params();
/// Convergence-study block (Experiment 0).
ModelParams experiment0_params();
/// Invasion-pattern block (Experiment 1).
ModelParams experiment1_params();

enum class Component : std::size_t { C1 = 0, C2 = 1, V = 2, Y = 3, Kappa = 4 };

inline constexpr std::size_t kNumComponents = 5;
inline constexpr std::array<Component, kNumComponents> kAllComponents = {
    Component::C1, Component::C2, Component::V, Component::Y, Component::Kappa};

std::string_view component_name(Component c);
/// Inverse of component_name; throws ConfigError for unknown names.
Component component_from_name(std::string_view name);

/// State of a single cell.
struct CellState {
  double c1 = 0.0;
  double c2 = 0.0;
  double v = 0.0;
  double y = 0.0;
  double kappa = 0.0;
};

using Vec5 = std::array<double, kNumComponents>;

/// The five per-cell unknown arrays, each of length n_cells, stored in
/// lexicographic (0-based) order.
class StateField {
public:
  StateField() = default;
  explicit StateField(std::size_t n_cells);

  std::size_t size() const noexcept { return n_; }

  std::vector<double>& operator[](Component c) { return data_[static_cast<std::size_t>(c)]; }
  const std::vector<double>& operator[](Component c) const {
    return data_[static_cast<std::size_t>(c)];
  }

  std::vector<double>& c1() { return (*this)[Component::C1]; }
  std::vector<double>& c2() { return (*this)[Component::C2]; }
  std::vector<double>& v() { return (*this)[Component::V]; }
  std::vector<double>& y() { return (*this)[Component::Y]; }
  std::vector<double>& kappa() { return (*this)[Component::Kappa]; }
  const std::vector<double>& c1() const { return (*this)[Component::C1]; }
  const std::vector<double>& c2() const { return (*this)[Component::C2]; }
  const std::vector<double>& v() const { return (*this)[Component::V]; }
  const std::vector<double>& y() const { return (*this)[Component::Y]; }
  const std::vector<double>& kappa() const { return (*this)[Component::Kappa]; }

  CellState cell(std::size_t i0) const {
    return {data_[0][i0], data_[1][i0], data_[2][i0], data_[3][i0], data_[4][i0]};
  }
  void set_cell(std::size_t i0, const CellState& s);

  /// True when every entry of every component is finite.
  bool all_finite() const;

  bool operator==(const StateField&) const = default;

private:
  std::size_t n_ = 0;
  std::array<std::vector<double>, kNumComponents> data_;
};

/// Full reaction operator R(w) with y(t - chi*tau) replaced by `y_delayed`.
Vec5 reaction_full(const ModelParams& p, const CellState& w, double y_delayed);

/// Explicitly treated reactions: R minus the integrin kinetics.
/// Component 4 (y) is identically zero.
Vec5 reaction_expl(const ModelParams& p, const CellState& w, double y_delayed);

/// Implicitly treated reactions: only the integrin kinetics
/// (k1/chi)(1-y)v - (k-1/chi)y in component 4.
Vec5 reaction_impl(const ModelParams& p, const CellState& w);

/// T = D_c*kappa / (1 + (c1+c2)v). Throws DegenerateStateError when the
/// denominator is not positive.
double diffusion_coefficient(const ModelParams& p, const CellState& w);

/// Cell-area weighted sum of a field.
double total_mass(std::span<const double> field, double cell_area);

}  // namespace invasion
