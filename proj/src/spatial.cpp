#include "invasion/spatial.hpp"

#include <algorithm>
#include <cassert>

namespace invasion {

double minmod(double v1, double v2, double v3) noexcept {
  if (v1 < 0.0 && v2 < 0.0 && v3 < 0.0) return std::max({v1, v2, v3});
  if (v1 > 0.0 && v2 > 0.0 && v3 > 0.0) return std::min({v1, v2, v3});
  return 0.0;
}

double mc_slope(double c_minus, double c_center, double c_plus) noexcept {
  return minmod(c_center - c_minus, 0.25 * (c_plus - c_minus), c_plus - c_center);
}

double local_speed(const ModelParams& p, double kappa_left, double v_left, double kappa_right,
                   double v_right, double h) noexcept {
  const double weight = kappa_left * v_left / (1.0 + v_left) + kappa_right * v_right / (1.0 + v_right);
  return 0.5 * p.D_h * weight * (v_right - v_left) / h;
}

double numerical_flux(double P, double c2_minus, double c2_plus, FluxUpwinding upwinding) noexcept {
  if (upwinding == FluxUpwinding::AsPrinted) return P >= 0.0 ? P * c2_plus : P * c2_minus;
  return P >= 0.0 ? P * c2_minus : P * c2_plus;
}

void FluxWorkspace::resize(const GridSpec& grid) {
  const std::size_t n = grid.n_cells();
  const std::size_t nxf = (grid.nx() + 1) * grid.ny();
  const std::size_t nyf = grid.nx() * (grid.ny() + 1);
  slopes_x.assign(n, 0.0);
  slopes_y.assign(n, 0.0);
  speeds_x.assign(nxf, 0.0);
  fluxes_x.assign(nxf, 0.0);
  speeds_y.assign(nyf, 0.0);
  fluxes_y.assign(nyf, 0.0);
}

void compute_fluxes(const GridSpec& grid, const ModelParams& p, const StateField& w,
                    FluxUpwinding upwinding, FluxWorkspace& ws) {
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  if (ws.slopes_x.size() != grid.n_cells() || ws.speeds_x.size() != (nx + 1) * ny) ws.resize(grid);

  const auto& c2 = w.c2();
  const auto& v = w.v();
  const auto& kappa = w.kappa();

  // Slopes; a mirrored ghost makes the one-sided difference vanish at the
  // boundary, hence a zero slope in the normal direction.
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + j * nx;
      const double c = c2[k];
      const double cw = i > 0 ? c2[k - 1] : c;
      const double ce = i + 1 < nx ? c2[k + 1] : c;
      const double cs = j > 0 ? c2[k - nx] : c;
      const double cn = j + 1 < ny ? c2[k + nx] : c;
      ws.slopes_x[k] = mc_slope(cw, c, ce);
      ws.slopes_y[k] = mc_slope(cs, c, cn);
    }
  }

  const double h1 = grid.h1();
  const double h2 = grid.h2();
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t row = j * (nx + 1);
    ws.speeds_x[row] = ws.fluxes_x[row] = 0.0;
    ws.speeds_x[row + nx] = ws.fluxes_x[row + nx] = 0.0;
    for (std::size_t i = 1; i < nx; ++i) {
      const std::size_t l = (i - 1) + j * nx;
      const std::size_t r = l + 1;
      const double P = local_speed(p, kappa[l], v[l], kappa[r], v[r], h1);
      const double cm = c2[l] + ws.slopes_x[l];
      const double cp = c2[r] - ws.slopes_x[r];
      ws.speeds_x[row + i] = P;
      ws.fluxes_x[row + i] = numerical_flux(P, cm, cp, upwinding);
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    ws.speeds_y[i] = ws.fluxes_y[i] = 0.0;
    ws.speeds_y[i + ny * nx] = ws.fluxes_y[i + ny * nx] = 0.0;
  }
  for (std::size_t j = 1; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t l = i + (j - 1) * nx;
      const std::size_t r = l + nx;
      const double P = local_speed(p, kappa[l], v[l], kappa[r], v[r], h2);
      const double cm = c2[l] + ws.slopes_y[l];
      const double cp = c2[r] - ws.slopes_y[r];
      ws.speeds_y[i + j * nx] = P;
      ws.fluxes_y[i + j * nx] = numerical_flux(P, cm, cp, upwinding);
    }
  }
}

void advection_c2(const GridSpec& grid, const FluxWorkspace& ws, std::span<double> out) {
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  assert(out.size() == grid.n_cells());
  const double inv_h1 = 1.0 / grid.h1();
  const double inv_h2 = 1.0 / grid.h2();
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t xf = i + j * (nx + 1);
      const std::size_t yf = i + j * nx;
      out[i + j * nx] = (ws.fluxes_x[xf + 1] - ws.fluxes_x[xf]) * inv_h1 +
                        (ws.fluxes_y[yf + nx] - ws.fluxes_y[yf]) * inv_h2;
    }
  }
}

StateField advection_apply(const GridSpec& grid, const ModelParams& p, const StateField& w,
                           FluxUpwinding upwinding) {
  FluxWorkspace ws;
  compute_fluxes(grid, p, w, upwinding, ws);
  StateField out(grid.n_cells());
  advection_c2(grid, ws, out.c2());
  return out;
}

void diffusion_coefficients(const ModelParams& p, const StateField& w, std::span<double> T) {
  assert(T.size() == w.size());
  for (std::size_t k = 0; k < T.size(); ++k) T[k] = diffusion_coefficient(p, w.cell(k));
}

void diffusion_c2(const GridSpec& grid, std::span<const double> T, std::span<const double> c2,
                  std::span<double> out) {
  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();
  const double w1 = 1.0 / (2.0 * grid.h1() * grid.h1());
  const double w2 = 1.0 / (2.0 * grid.h2() * grid.h2());
  std::fill(out.begin(), out.end(), 0.0);
  // Accumulate face fluxes; boundary faces carry none (mirrored ghosts).
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t l = i + j * nx;
      const double f = (T[l] + T[l + 1]) * w1 * (c2[l + 1] - c2[l]);
      out[l] += f;
      out[l + 1] -= f;
    }
  }
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t l = i + j * nx;
      const double f = (T[l] + T[l + nx]) * w2 * (c2[l + nx] - c2[l]);
      out[l] += f;
      out[l + nx] -= f;
    }
  }
}

StateField diffusion_apply(const GridSpec& grid, const ModelParams& p, const StateField& w) {
  std::vector<double> T(w.size());
  diffusion_coefficients(p, w, T);
  StateField out(grid.n_cells());
  diffusion_c2(grid, T, w.c2(), out.c2());
  return out;
}

DiffusionOperator::DiffusionOperator(const GridSpec& grid, const ModelParams& p,
                                     const StateField& w_frozen) {
  std::vector<double> T(w_frozen.size());
  diffusion_coefficients(p, w_frozen, T);
  rebuild(grid, T);
}

DiffusionOperator::DiffusionOperator(const GridSpec& grid, std::span<const double> T) {
  rebuild(grid, T);
}

void DiffusionOperator::rebuild(const GridSpec& grid, std::span<const double> T) {
  nx_ = grid.nx();
  ny_ = grid.ny();
  const std::size_t n = grid.n_cells();
  west_.assign(n, 0.0);
  east_.assign(n, 0.0);
  south_.assign(n, 0.0);
  north_.assign(n, 0.0);
  const double w1 = 1.0 / (2.0 * grid.h1() * grid.h1());
  const double w2 = 1.0 / (2.0 * grid.h2() * grid.h2());
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t k = i + j * nx_;
      if (i > 0) west_[k] = (T[k - 1] + T[k]) * w1;
      if (i + 1 < nx_) east_[k] = (T[k] + T[k + 1]) * w1;
      if (j > 0) south_[k] = (T[k - nx_] + T[k]) * w2;
      if (j + 1 < ny_) north_[k] = (T[k] + T[k + nx_]) * w2;
    }
  }
}

template <class Emit>
void DiffusionOperator::for_each_laplacian(std::span<const double> c2, Emit&& emit) const {
  const std::size_t nx = nx_;
  const std::size_t n = size();
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + j * nx;
      const double c = c2[k];
      const double cw = i > 0 ? c2[k - 1] : c;
      const double ce = i + 1 < nx ? c2[k + 1] : c;
      const double cs = j > 0 ? c2[k - nx] : c;
      const double cn = k + nx < n ? c2[k + nx] : c;
      emit(k, c,
           west_[k] * (cw - c) + east_[k] * (ce - c) + south_[k] * (cs - c) + north_[k] * (cn - c));
    }
  }
}

void DiffusionOperator::apply(std::span<const double> c2, std::span<double> out) const {
  for_each_laplacian(c2, [&](std::size_t k, double, double lap) { out[k] = lap; });
}

void DiffusionOperator::apply_shifted(double scale, std::span<const double> c2,
                                      std::span<double> out) const {
  for_each_laplacian(c2, [&](std::size_t k, double c, double lap) { out[k] = c - scale * lap; });
}

std::vector<double> DiffusionOperator::diagonal() const {
  std::vector<double> d(size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = -(west_[k] + east_[k] + south_[k] + north_[k]);
  return d;
}

}  // namespace invasion
