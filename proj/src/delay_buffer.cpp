#include "invasion/delay_buffer.hpp"

#include "invasion/error.hpp"

#include <algorithm>
#include <cassert>
#include <string>

namespace invasion {

DelayBuffer::DelayBuffer(double t0, std::vector<double> y0)
    : origin_(t0), t1d_(t0), t2d_(t0), tn_(t0), y1_(y0), y2_(y0), yn_(std::move(y0)) {}

DelayBuffer DelayBuffer::from_history(double t1d, std::vector<double> y1, double t2d,
                                      std::vector<double> y2, double tn, std::vector<double> yn,
                                      std::optional<double> origin) {
  const double t0 = origin.value_or(t1d);
  if (!(t0 <= t1d && t1d <= t2d && t2d <= tn)) {
    throw ConfigError("delay buffer: require origin <= t1d <= t2d <= tn");
  }
  if (y1.size() != y2.size() || y2.size() != yn.size()) {
    throw ConfigError("delay buffer: snapshot lengths differ");
  }
  DelayBuffer buf;
  buf.origin_ = t0;
  buf.t1d_ = t1d;
  buf.t2d_ = t2d;
  buf.tn_ = tn;
  buf.y1_ = std::move(y1);
  buf.y2_ = std::move(y2);
  buf.yn_ = std::move(yn);
  return buf;
}

namespace {

void lerp(double t, double t_left, double t_right, std::span<const double> y_left,
          std::span<const double> y_right, std::span<double> out) {
  const double theta = (t - t_left) / (t_right - t_left);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = y_left[k] + theta * (y_right[k] - y_left[k]);
}

}  // namespace

void DelayBuffer::interpolate(double t_hat, double delay, std::span<const double> y_hat,
                              std::span<double> out) const {
  assert(y_hat.size() == size() && out.size() == size());
  assert(delay >= 0.0);
  const double t = t_hat - delay;

  if (t < t1d_) {
    if (t1d_ != origin_) {
      throw InsufficientHistoryError("delay buffer: query time " + std::to_string(t) +
                                     " precedes retained history at " + std::to_string(t1d_));
    }
    std::copy(y1_.begin(), y1_.end(), out.begin());
    return;
  }
  if (t < t2d_) {
    lerp(t, t1d_, t2d_, y1_, y2_, out);
  } else if (t < tn_) {
    lerp(t, t2d_, tn_, y2_, yn_, out);
  } else if (t < t_hat) {
    lerp(t, tn_, t_hat, yn_, y_hat, out);
  } else {
    std::copy(y_hat.begin(), y_hat.end(), out.begin());
  }
}

std::vector<double> DelayBuffer::interpolate_delayed(double t_hat, double delay,
                                                     std::span<const double> y_hat) const {
  std::vector<double> out(size());
  interpolate(t_hat, delay, y_hat, out);
  return out;
}

void DelayBuffer::advance(double t_next, std::span<const double> y_next, double delay) {
  assert(t_next >= tn_);
  assert(y_next.size() == size());
  if (t_next - delay >= t2d_) {
    t1d_ = t2d_;
    t2d_ = tn_;
    std::swap(y1_, y2_);
    y2_ = yn_;
  }
  tn_ = t_next;
  yn_.assign(y_next.begin(), y_next.end());
}

}  // namespace invasion
