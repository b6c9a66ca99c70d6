#include "invasion/bicgstab.hpp"

#include "invasion/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invasion {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void residual(const LinearOperator& op, std::span<const double> b, std::span<const double> x,
              std::span<double> r) {
  op.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

}  // namespace

SolveReport bicgstab(const LinearOperator& op, std::span<const double> b, std::span<double> x,
                     const SolverOptions& options) {
  const std::size_t n = op.n;
  if (b.size() != n || x.size() != n) throw ConfigError("bicgstab: dimension mismatch");
  if (!(options.rel_tol > 0.0)) throw ConfigError("bicgstab: rel_tol must be positive");

  std::vector<double> inv_diag;
  if (options.jacobi) {
    if (op.diagonal.size() != n) throw ConfigError("bicgstab: Jacobi requires the operator diagonal");
    inv_diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      inv_diag[i] = op.diagonal[i] != 0.0 ? 1.0 / op.diagonal[i] : 1.0;
    }
  }
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (inv_diag.empty()) {
      std::copy(in.begin(), in.end(), out.begin());
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    }
  };

  const double target = std::max(options.rel_tol * norm2(b), options.abs_floor);
  constexpr double tiny = std::numeric_limits<double>::min() * 1e4;

  std::vector<double> r(n), r_hat(n), p(n), v(n), s(n), t(n), p_hat(n), s_hat(n);
  SolveReport report;

  residual(op, b, x, r);
  double r_norm = norm2(r);

  while (true) {
    if (r_norm <= target) break;
    r_hat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    bool broke = false;

    while (report.iterations < options.max_iter) {
      const double rho_next = dot(r_hat, r);
      if (std::abs(rho_next) < tiny || std::abs(omega) < tiny) {
        broke = true;
        break;
      }
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      precondition(p, p_hat);
      op.apply(p_hat, v);
      const double rv = dot(r_hat, v);
      if (std::abs(rv) < tiny) {
        broke = true;
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++report.iterations;
      if (norm2(s) <= target) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
        r = s;
        break;
      }
      precondition(s, s_hat);
      op.apply(s_hat, t);
      const double tt = dot(t, t);
      if (tt < tiny) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
        r = s;
        broke = true;
        break;
      }
      omega = dot(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p_hat[i] + omega * s_hat[i];
        r[i] = s[i] - omega * t[i];
      }
      if (norm2(r) <= target) break;
    }

    // The recursively updated residual drifts; judge on the true one.
    residual(op, b, x, r);
    r_norm = norm2(r);
    if (r_norm <= target || report.iterations >= options.max_iter) break;
    if (broke) {
      if (report.restarts >= 1) {
        report.breakdown = true;
        break;
      }
      ++report.restarts;
      continue;
    }
    // Recursive residual converged but the true residual did not: restart
    // from the current iterate, at most once.
    if (report.restarts >= 1) break;
    ++report.restarts;
  }

  report.final_residual = r_norm;
  report.converged = r_norm <= target;
  return report;
}

}  // namespace invasion
