#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ctab::kernels {

// Row-major layout descriptor for a dense multidimensional array:
// the last axis varies fastest, strides.back() == 1.
struct Shape {
  std::vector<std::size_t> cards;
  std::vector<std::size_t> strides;
  std::size_t size = 1;

  static Shape of(std::span<const std::size_t> cards);

  std::size_t rank() const noexcept { return cards.size(); }
};

// (axis, state) pin used when gathering a slice.
using AxisState = std::pair<std::size_t, std::size_t>;

// Plain single-threaded reference loops. Kept as the ground truth the
// dispatched kernels are tested and benchmarked against.
namespace serial {

double total_mass(std::span<const double> cells);

void scale(std::span<double> cells, double factor);

// cells[..., s, ...] *= factors[s] along the given axis.
void axis_scale(std::span<double> cells, const Shape& shape, std::size_t axis,
                std::span<const double> factors);

// out[s] = sum of all cells whose coordinate on `axis` is s.
void axis_marginal(std::span<const double> cells, const Shape& shape,
                   std::size_t axis, std::span<double> out);

// General marginalization onto a subset of axes (ascending order, relative
// order preserved). out has size = product of kept cardinalities.
void keep_marginal(std::span<const double> cells, const Shape& shape,
                   std::span<const std::size_t> keep_axes,
                   std::span<double> out);

// Copy the sub-array where each pinned axis is held at its state; the free
// axes keep their relative order. fixed must be sorted by axis.
void gather_slice(std::span<const double> cells, const Shape& shape,
                  std::span<const AxisState> fixed, std::span<double> out);

}  // namespace serial

// OpenMP implementations. Accumulation is ordered per output bin and the
// reduction uses fixed-size blocks combined in block order, so results do
// not depend on the number of threads.
namespace parallel {

double total_mass(std::span<const double> cells);
void scale(std::span<double> cells, double factor);
void axis_scale(std::span<double> cells, const Shape& shape, std::size_t axis,
                std::span<const double> factors);
void axis_marginal(std::span<const double> cells, const Shape& shape,
                   std::size_t axis, std::span<double> out);
void keep_marginal(std::span<const double> cells, const Shape& shape,
                   std::span<const std::size_t> keep_axes,
                   std::span<double> out);
void gather_slice(std::span<const double> cells, const Shape& shape,
                  std::span<const AxisState> fixed, std::span<double> out);

}  // namespace parallel

// Tables below this cell count run the serial path; the arithmetic is
// identical either way.
inline constexpr std::size_t parallel_threshold = std::size_t{1} << 15;

double total_mass(std::span<const double> cells);
void scale(std::span<double> cells, double factor);
void axis_scale(std::span<double> cells, const Shape& shape, std::size_t axis,
                std::span<const double> factors);
void axis_marginal(std::span<const double> cells, const Shape& shape,
                   std::size_t axis, std::span<double> out);
void keep_marginal(std::span<const double> cells, const Shape& shape,
                   std::span<const std::size_t> keep_axes,
                   std::span<double> out);
void gather_slice(std::span<const double> cells, const Shape& shape,
                  std::span<const AxisState> fixed, std::span<double> out);

}  // namespace ctab::kernels
