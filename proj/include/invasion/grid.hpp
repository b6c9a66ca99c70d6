/// @file grid.hpp
/// @brief Uniform cell grid over the square (a,b)x(a,b).
///
/// Cells are numbered lexicographically with a 1-based index
///   k = i + (j-1)*nx,  i = 1..nx,  j = 1..ny,
/// so x1 varies fastest. Storage arrays elsewhere in the library use the
/// 0-based offset k-1 in the same order.
#pragma once

#include <cstddef>
#include <optional>
#include <utility>

namespace invasion {

struct Point {
  double x1;
  double x2;
};

enum class Direction { PlusX, MinusX, PlusY, MinusY };

class GridSpec {
public:
  /// Throws ConfigError unless b > a and nx, ny >= 3.
  GridSpec(double a, double b, std::size_t nx, std::size_t ny);

  /// Square grid with n cells per direction.
  static GridSpec square(double a, double b, std::size_t n) { return {a, b, n, n}; }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double h1() const noexcept { return h1_; }
  double h2() const noexcept { return h2_; }
  std::size_t n_cells() const noexcept { return nx_ * ny_; }
  double cell_area() const noexcept { return h1_ * h2_; }

  /// (i, j) -> k, all 1-based.
  std::size_t index(std::size_t i, std::size_t j) const;
  /// k -> (i, j), all 1-based.
  std::pair<std::size_t, std::size_t> ij(std::size_t k) const;

  Point cell_center(std::size_t k) const;

  /// Neighbouring cell in direction `dir`, or std::nullopt when `k` lies on
  /// the corresponding domain boundary.
  std::optional<std::size_t> neighbor(std::size_t k, Direction dir) const;

  /// Cell-center coordinates by 0-based column / row.
  double x1_center(std::size_t i0) const noexcept { return a_ + (static_cast<double>(i0) + 0.5) * h1_; }
  double x2_center(std::size_t j0) const noexcept { return a_ + (static_cast<double>(j0) + 0.5) * h2_; }

  bool operator==(const GridSpec& other) const noexcept {
    return a_ == other.a_ && b_ == other.b_ && nx_ == other.nx_ && ny_ == other.ny_;
  }

private:
  void check(std::size_t k) const;

  double a_;
  double b_;
  std::size_t nx_;
  std::size_t ny_;
  double h1_;
  double h2_;
};

}  // namespace invasion
