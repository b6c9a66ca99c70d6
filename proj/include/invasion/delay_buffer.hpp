/// @file delay_buffer.hpp
/// @brief History of the integrin field for evaluating y(t - chi*tau).
///
/// Three snapshots are retained: y at t1d <= t2d <= tn, where tn is the last
/// accepted time. Queries at t_hat - delay are answered by piecewise-linear
/// interpolation through (t1d, t2d, tn, t_hat), where y(t_hat) is supplied by
/// the caller (the current Runge-Kutta stage value).
///
/// Before the initial time the history is extended as a constant.
#pragma once

#include <optional>
#include <span>
#include <vector>

namespace invasion {

class DelayBuffer {
public:
  DelayBuffer() = default;
  /// All three snapshots set to `y0` at time `t0`.
  DelayBuffer(double t0, std::vector<double> y0);

  double t1d() const noexcept { return t1d_; }
  double t2d() const noexcept { return t2d_; }
  double tn() const noexcept { return tn_; }
  double origin() const noexcept { return origin_; }
  const std::vector<double>& y1() const noexcept { return y1_; }
  const std::vector<double>& y2() const noexcept { return y2_; }
  const std::vector<double>& yn() const noexcept { return yn_; }
  std::size_t size() const noexcept { return yn_.size(); }

  /// Integrin field at t_hat - delay, written to `out`. Requires
  /// t_hat >= tn and delay >= 0. Throws InsufficientHistoryError when the
  /// query time precedes t1d and t1d is not the origin of the history.
  void interpolate(double t_hat, double delay, std::span<const double> y_hat,
                   std::span<double> out) const;

  std::vector<double> interpolate_delayed(double t_hat, double delay,
                                          std::span<const double> y_hat) const;

  /// Records the accepted field y_next at t_next, first shifting the history
  /// when t_next - delay >= t2d.
  void advance(double t_next, std::span<const double> y_next, double delay);

  /// Sets every snapshot and time explicitly. `origin` is the start of the
  /// history (defaults to t1d); queries before t1d are answered by constant
  /// extension only when t1d == origin. Throws ConfigError unless
  /// origin <= t1d <= t2d <= tn and all fields have the same length.
  static DelayBuffer from_history(double t1d, std::vector<double> y1, double t2d,
                                  std::vector<double> y2, double tn, std::vector<double> yn,
                                  std::optional<double> origin = std::nullopt);

private:
  double origin_ = 0.0;
  double t1d_ = 0.0;
  double t2d_ = 0.0;
  double tn_ = 0.0;
  std::vector<double> y1_;
  std::vector<double> y2_;
  std::vector<double> yn_;
};

}  // namespace invasion
