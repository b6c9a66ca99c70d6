/// @file spatial.hpp
/// @brief Semi-discrete finite-volume operators for the migrating-cell
/// equation: central-difference diffusion with a state dependent coefficient
/// and central-upwind haptotaxis flux with MC-limited linear reconstruction.
///
/// Zero-flux boundaries are realised with mirrored ghost cells (ghost value =
/// adjacent interior value) for c2, v and the diffusion coefficient. This
/// makes both the characteristic speed and the diffusive face flux vanish on
/// every boundary face.
#pragma once

#include "invasion/grid.hpp"
#include "invasion/model.hpp"

#include <span>
#include <vector>

namespace invasion {

/// Which reconstructed c2 value the haptotaxis flux takes for a given sign of
/// the face speed P.
enum class FluxUpwinding {
  /// P >= 0 picks the right-cell value c2^+, P < 0 the left-cell value c2^-.
  AsPrinted,
  /// P >= 0 picks the left-cell value c2^-, P < 0 the right-cell value c2^+
  /// (upwind with respect to the transport velocity +P of -div(P c2)).
  Upwind,
};

double minmod(double v1, double v2, double v3) noexcept;

/// Limited half-cell increment minmod(c - c_minus, (c_plus - c_minus)/4, c_plus - c).
double mc_slope(double c_minus, double c_center, double c_plus) noexcept;

/// Characteristic speed at the face between a left and a right cell, using
/// cell averages of v and kappa.
double local_speed(const ModelParams& p, double kappa_left, double v_left, double kappa_right,
                   double v_right, double h) noexcept;

/// c2_minus = c2_left + s_left, c2_plus = c2_right - s_right.
double numerical_flux(double P, double c2_minus, double c2_plus,
                      FluxUpwinding upwinding = FluxUpwinding::Upwind) noexcept;

/// Per-evaluation scratch for the haptotaxis flux. Face arrays include the
/// boundary faces, which always hold zero speed and zero flux.
///
/// x-faces: index i + j*(nx+1), face i sits between cells (i-1, j) and (i, j).
/// y-faces: index i + j*nx, face j sits between cells (i, j-1) and (i, j).
struct FluxWorkspace {
  std::vector<double> slopes_x;
  std::vector<double> slopes_y;
  std::vector<double> speeds_x;
  std::vector<double> speeds_y;
  std::vector<double> fluxes_x;
  std::vector<double> fluxes_y;

  void resize(const GridSpec& grid);
};

/// Fills slopes, speeds and fluxes for state `w`.
void compute_fluxes(const GridSpec& grid, const ModelParams& p, const StateField& w,
                    FluxUpwinding upwinding, FluxWorkspace& ws);

/// c2-component of A from precomputed face fluxes: sum_j (H_{+} - H_{-}) / h_j.
void advection_c2(const GridSpec& grid, const FluxWorkspace& ws, std::span<double> out);

/// Full A(w) as a 5-component field (only c2 nonzero).
StateField advection_apply(const GridSpec& grid, const ModelParams& p, const StateField& w,
                           FluxUpwinding upwinding = FluxUpwinding::Upwind);

/// Per-cell diffusion coefficient T.
void diffusion_coefficients(const ModelParams& p, const StateField& w, std::span<double> T);

/// c2-component of D(w) for given coefficients T and c2, evaluated face by face.
void diffusion_c2(const GridSpec& grid, std::span<const double> T, std::span<const double> c2,
                  std::span<double> out);

/// Full D(w) as a 5-component field (only c2 nonzero).
StateField diffusion_apply(const GridSpec& grid, const ModelParams& p, const StateField& w);

/// The diffusion stencil with coefficients frozen at a given state, as a
/// linear map on c2. Coefficients are stored per cell and direction and are
/// already divided by h_j^2; boundary directions carry zero.
class DiffusionOperator {
public:
  DiffusionOperator() = default;
  DiffusionOperator(const GridSpec& grid, const ModelParams& p, const StateField& w_frozen);
  DiffusionOperator(const GridSpec& grid, std::span<const double> T);

  void rebuild(const GridSpec& grid, std::span<const double> T);

  std::size_t size() const noexcept { return west_.size(); }

  /// out = L_T c2.
  void apply(std::span<const double> c2, std::span<double> out) const;
  /// out = c2 - scale * L_T c2.
  void apply_shifted(double scale, std::span<const double> c2, std::span<double> out) const;
  /// Diagonal of L_T (non-positive).
  std::vector<double> diagonal() const;

private:
  template <class Emit>
  void for_each_laplacian(std::span<const double> c2, Emit&& emit) const;

  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> west_;
  std::vector<double> east_;
  std::vector<double> south_;
  std::vector<double> north_;
};

}  // namespace invasion
