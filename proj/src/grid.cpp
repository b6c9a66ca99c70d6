#include "invasion/grid.hpp"

#include "invasion/error.hpp"

#include <string>

namespace invasion {

GridSpec::GridSpec(double a, double b, std::size_t nx, std::size_t ny)
    : a_(a), b_(b), nx_(nx), ny_(ny), h1_((b - a) / static_cast<double>(nx)),
      h2_((b - a) / static_cast<double>(ny)) {
  if (!(b > a)) throw ConfigError("grid: require b > a");
  if (nx < 3 || ny < 3) throw ConfigError("grid: require nx >= 3 and ny >= 3");
}

void GridSpec::check(std::size_t k) const {
  if (k < 1 || k > n_cells()) {
    throw IndexError("cell index " + std::to_string(k) + " outside 1.." +
                     std::to_string(n_cells()));
  }
}

std::size_t GridSpec::index(std::size_t i, std::size_t j) const {
  if (i < 1 || i > nx_ || j < 1 || j > ny_) {
    throw IndexError("cell (" + std::to_string(i) + "," + std::to_string(j) + ") outside grid");
  }
  return i + (j - 1) * nx_;
}

std::pair<std::size_t, std::size_t> GridSpec::ij(std::size_t k) const {
  check(k);
  const std::size_t row = (k - 1) / nx_;
  return {k - row * nx_, row + 1};
}

Point GridSpec::cell_center(std::size_t k) const {
  const auto [i, j] = ij(k);
  const double x11 = a_ + h1_ / 2.0;
  const double x21 = a_ + h2_ / 2.0;
  return {x11 + static_cast<double>(i - 1) * h1_, x21 + static_cast<double>(j - 1) * h2_};
}

std::optional<std::size_t> GridSpec::neighbor(std::size_t k, Direction dir) const {
  check(k);
  switch (dir) {
    case Direction::PlusX:
      if (k % nx_ == 0) return std::nullopt;
      return k + 1;
    case Direction::MinusX:
      if (k % nx_ == 1) return std::nullopt;
      return k - 1;
    case Direction::PlusY:
      if (k > nx_ * (ny_ - 1)) return std::nullopt;
      return k + nx_;
    case Direction::MinusY:
      if (k < nx_ + 1) return std::nullopt;
      return k - nx_;
  }
  return std::nullopt;
}

}  // namespace invasion
