#include "ctab/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace ctab::kernels {

Shape Shape::of(std::span<const std::size_t> cards) {
  Shape s;
  s.cards.assign(cards.begin(), cards.end());
  s.strides.assign(cards.size(), 1);
  s.size = 1;
  for (std::size_t i = cards.size(); i-- > 0;) {
    s.strides[i] = s.size;
    s.size *= cards[i];
  }
  return s;
}

namespace {

// Complement of keep_axes in [0, rank).
std::vector<std::size_t> dropped_axes(const Shape& shape,
                                      std::span<const std::size_t> keep) {
  std::vector<std::size_t> dropped;
  dropped.reserve(shape.rank() - keep.size());
  std::size_t k = 0;
  for (std::size_t a = 0; a < shape.rank(); ++a) {
    if (k < keep.size() && keep[k] == a) {
      ++k;
    } else {
      dropped.push_back(a);
    }
  }
  return dropped;
}

// Enumerates the sub-grid spanned by `axes` in row-major order (last axis
// fastest), invoking fn with the flat offset of each point.
template <typename Fn>
void for_each_offset(const Shape& shape, std::span<const std::size_t> axes,
                     Fn&& fn) {
  const std::size_t n = axes.size();
  std::size_t count = 1;
  for (std::size_t a : axes) count *= shape.cards[a];

  std::vector<std::size_t> coord(n, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < count; ++i) {
    fn(offset);
    for (std::size_t d = n; d-- > 0;) {
      const std::size_t axis = axes[d];
      if (++coord[d] < shape.cards[axis]) {
        offset += shape.strides[axis];
        break;
      }
      offset -= shape.strides[axis] * (shape.cards[axis] - 1);
      coord[d] = 0;
    }
  }
}

std::size_t base_offset_of_bin(const Shape& shape,
                               std::span<const std::size_t> keep,
                               std::size_t bin) {
  std::size_t base = 0;
  for (std::size_t d = keep.size(); d-- > 0;) {
    const std::size_t axis = keep[d];
    base += (bin % shape.cards[axis]) * shape.strides[axis];
    bin /= shape.cards[axis];
  }
  return base;
}

constexpr std::size_t mass_block = 4096;
constexpr std::size_t marginal_chunks = 64;

}  // namespace

namespace serial {

double total_mass(std::span<const double> cells) {
  double sum = 0.0;
  for (double c : cells) sum += c;
  return sum;
}

void scale(std::span<double> cells, double factor) {
  for (double& c : cells) c *= factor;
}

void axis_scale(std::span<double> cells, const Shape& shape, std::size_t axis,
                std::span<const double> factors) {
  const std::size_t stride = shape.strides[axis];
  const std::size_t card = shape.cards[axis];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i] *= factors[(i / stride) % card];
  }
}

void axis_marginal(std::span<const double> cells, const Shape& shape,
                   std::size_t axis, std::span<double> out) {
  const std::size_t stride = shape.strides[axis];
  const std::size_t card = shape.cards[axis];
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out[(i / stride) % card] += cells[i];
  }
}

void keep_marginal(std::span<const double> cells, const Shape& shape,
                   std::span<const std::size_t> keep_axes,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::size_t bin = 0;
    for (std::size_t axis : keep_axes) {
      bin = bin * shape.cards[axis] + (i / shape.strides[axis]) % shape.cards[axis];
    }
    out[bin] += cells[i];
  }
}

void gather_slice(std::span<const double> cells, const Shape& shape,
                  std::span<const AxisState> fixed, std::span<double> out) {
  std::size_t base = 0;
  std::vector<std::size_t> free_axes;
  free_axes.reserve(shape.rank() - fixed.size());
  std::size_t f = 0;
  for (std::size_t a = 0; a < shape.rank(); ++a) {
    if (f < fixed.size() && fixed[f].first == a) {
      base += fixed[f].second * shape.strides[a];
      ++f;
    } else {
      free_axes.push_back(a);
    }
  }
  std::size_t j = 0;
  for_each_offset(shape, free_axes,
                  [&](std::size_t off) { out[j++] = cells[base + off]; });
}

}  // namespace serial

namespace parallel {

double total_mass(std::span<const double> cells) {
  const std::size_t n = cells.size();
  const std::size_t nblocks = (n + mass_block - 1) / mass_block;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t end = std::min(n, (b + 1) * mass_block);
    double s = 0.0;
    for (std::size_t i = b * mass_block; i < end; ++i) s += cells[i];
    partial[b] = s;
  }
  // Combine in block order so the result is thread-count independent.
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

void scale(std::span<double> cells, double factor) {
  const std::size_t n = cells.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) cells[i] *= factor;
}

void axis_scale(std::span<double> cells, const Shape& shape, std::size_t axis,
                std::span<const double> factors) {
  const std::size_t n = cells.size();
  const std::size_t stride = shape.strides[axis];
  const std::size_t card = shape.cards[axis];
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    cells[i] *= factors[(i / stride) % card];
  }
}

void axis_marginal(std::span<const double> cells, const Shape& shape,
                   std::size_t axis, std::span<double> out) {
  const std::size_t n = cells.size();
  const std::size_t stride = shape.strides[axis];
  const std::size_t card = shape.cards[axis];
  // Fixed chunk count, so partial sums combine in the same order no matter
  // how many threads run.
  std::vector<double> partial(marginal_chunks * card, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < marginal_chunks; ++c) {
    const std::size_t lo = c * n / marginal_chunks;
    const std::size_t hi = (c + 1) * n / marginal_chunks;
    double* p = partial.data() + c * card;
    for (std::size_t i = lo; i < hi; ++i) {
      p[(i / stride) % card] += cells[i];
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < marginal_chunks; ++c) {
    for (std::size_t s = 0; s < card; ++s) out[s] += partial[c * card + s];
  }
}

void keep_marginal(std::span<const double> cells, const Shape& shape,
                   std::span<const std::size_t> keep_axes,
                   std::span<double> out) {
  const auto dropped = dropped_axes(shape, keep_axes);
  const std::size_t nbins = out.size();
#pragma omp parallel for schedule(static)
  for (std::size_t bin = 0; bin < nbins; ++bin) {
    const std::size_t base = base_offset_of_bin(shape, keep_axes, bin);
    double acc = 0.0;
    for_each_offset(shape, dropped,
                    [&](std::size_t off) { acc += cells[base + off]; });
    out[bin] = acc;
  }
}

void gather_slice(std::span<const double> cells, const Shape& shape,
                  std::span<const AxisState> fixed, std::span<double> out) {
  std::size_t base = 0;
  std::vector<std::size_t> free_axes;
  std::size_t f = 0;
  for (std::size_t a = 0; a < shape.rank(); ++a) {
    if (f < fixed.size() && fixed[f].first == a) {
      base += fixed[f].second * shape.strides[a];
      ++f;
    } else {
      free_axes.push_back(a);
    }
  }
  std::vector<std::size_t> free_cards(free_axes.size());
  for (std::size_t d = 0; d < free_axes.size(); ++d) {
    free_cards[d] = shape.cards[free_axes[d]];
  }
  const std::size_t n = out.size();
  const std::size_t nblocks = (n + mass_block - 1) / mass_block;
  // One decode per block, then an odometer walk over its output range.
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * mass_block;
    const std::size_t hi = std::min(n, lo + mass_block);
    std::vector<std::size_t> coord(free_axes.size());
    std::size_t idx = base;
    std::size_t rem = lo;
    for (std::size_t d = free_axes.size(); d-- > 0;) {
      coord[d] = rem % free_cards[d];
      idx += coord[d] * shape.strides[free_axes[d]];
      rem /= free_cards[d];
    }
    for (std::size_t j = lo; j < hi; ++j) {
      out[j] = cells[idx];
      for (std::size_t d = free_axes.size(); d-- > 0;) {
        const std::size_t axis = free_axes[d];
        if (++coord[d] < free_cards[d]) {
          idx += shape.strides[axis];
          break;
        }
        idx -= shape.strides[axis] * (free_cards[d] - 1);
        coord[d] = 0;
      }
    }
  }
}

}  // namespace parallel

double total_mass(std::span<const double> cells) {
  return cells.size() >= parallel_threshold ? parallel::total_mass(cells)
                                            : serial::total_mass(cells);
}

void scale(std::span<double> cells, double factor) {
  if (cells.size() >= parallel_threshold) {
    parallel::scale(cells, factor);
  } else {
    serial::scale(cells, factor);
  }
}

void axis_scale(std::span<double> cells, const Shape& shape, std::size_t axis,
                std::span<const double> factors) {
  if (cells.size() >= parallel_threshold) {
    parallel::axis_scale(cells, shape, axis, factors);
  } else {
    serial::axis_scale(cells, shape, axis, factors);
  }
}

void axis_marginal(std::span<const double> cells, const Shape& shape,
                   std::size_t axis, std::span<double> out) {
  if (cells.size() >= parallel_threshold) {
    parallel::axis_marginal(cells, shape, axis, out);
  } else {
    serial::axis_marginal(cells, shape, axis, out);
  }
}

void keep_marginal(std::span<const double> cells, const Shape& shape,
                   std::span<const std::size_t> keep_axes,
                   std::span<double> out) {
  if (cells.size() >= parallel_threshold) {
    parallel::keep_marginal(cells, shape, keep_axes, out);
  } else {
    serial::keep_marginal(cells, shape, keep_axes, out);
  }
}

void gather_slice(std::span<const double> cells, const Shape& shape,
                  std::span<const AxisState> fixed, std::span<double> out) {
  if (cells.size() >= parallel_threshold) {
    parallel::gather_slice(cells, shape, fixed, out);
  } else {
    serial::gather_slice(cells, shape, fixed, out);
  }
}

}  // namespace ctab::kernels
