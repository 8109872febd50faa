#pragma once

#include <random>
#include <string>
#include <vector>

#include "ctab/ipf.hpp"
#include "ctab/table.hpp"

namespace ctab::testgen {

// Strictly positive random table; raw cells drawn from [lo, 1] and
// normalized, so no cell falls below lo / cell_count.
inline JointTable random_table(std::mt19937_64& rng,
                               const std::vector<std::size_t>& cards,
                               double lo = 0.05) {
  std::vector<VariableSpec> specs;
  for (std::size_t v = 0; v < cards.size(); ++v) {
    VariableSpec spec{"v" + std::to_string(v), {}};
    for (std::size_t s = 0; s < cards[v]; ++s) {
      spec.states.push_back("s" + std::to_string(s));
    }
    specs.push_back(std::move(spec));
  }
  std::size_t n = 1;
  for (std::size_t c : cards) n *= c;
  std::uniform_real_distribution<double> unif(lo, 1.0);
  std::vector<double> cells(n);
  double sum = 0.0;
  for (double& c : cells) sum += (c = unif(rng));
  for (double& c : cells) c /= sum;
  return JointTable(std::move(specs), std::move(cells));
}

inline std::vector<double> random_dist(std::mt19937_64& rng, std::size_t n,
                                       double lo = 0.05) {
  std::uniform_real_distribution<double> unif(lo, 1.0);
  std::vector<double> dist(n);
  double sum = 0.0;
  for (double& d : dist) sum += (d = unif(rng));
  for (double& d : dist) d /= sum;
  return dist;
}

// Targets for the first `count` variables of t.
inline MarginalTargets random_targets(std::mt19937_64& rng, const JointTable& t,
                                      std::size_t count) {
  MarginalTargets targets;
  for (std::size_t v = 0; v < count && v < t.rank(); ++v) {
    targets[t.variables()[v].name] = random_dist(rng, t.shape().cards[v]);
  }
  return targets;
}

// Rebuilds t with its variables permuted; perm[i] is the source axis that
// becomes axis i. Cell values are carried over by assignment.
inline JointTable reorder(const JointTable& t, const std::vector<std::size_t>& perm) {
  std::vector<VariableSpec> specs;
  for (std::size_t axis : perm) specs.push_back(t.variables()[axis]);
  std::vector<double> cells(t.cell_count());
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    std::size_t rem = idx;
    std::size_t src = 0;
    for (std::size_t d = perm.size(); d-- > 0;) {
      const std::size_t card = t.shape().cards[perm[d]];
      src += (rem % card) * t.shape().strides[perm[d]];
      rem /= card;
    }
    cells[idx] = t.cells()[src];
  }
  return JointTable(std::move(specs), std::move(cells));
}

// Every 2x2 cross-product ratio of t: all variable pairs, all state pairs,
// all fixed assignments of the remaining variables, in a deterministic
// enumeration order. Requires strictly positive cells.
inline std::vector<double> all_cross_ratios(const JointTable& t) {
  std::vector<double> ratios;
  const auto& shape = t.shape();
  const auto cells = t.cells();
  for (std::size_t a = 0; a < t.rank(); ++a) {
    for (std::size_t b = a + 1; b < t.rank(); ++b) {
      std::vector<std::size_t> rest;
      for (std::size_t v = 0; v < t.rank(); ++v) {
        if (v != a && v != b) rest.push_back(v);
      }
      std::size_t slices = 1;
      for (std::size_t v : rest) slices *= shape.cards[v];
      for (std::size_t slice = 0; slice < slices; ++slice) {
        std::size_t base = 0;
        std::size_t rem = slice;
        for (std::size_t d = rest.size(); d-- > 0;) {
          base += (rem % shape.cards[rest[d]]) * shape.strides[rest[d]];
          rem /= shape.cards[rest[d]];
        }
        for (std::size_t i1 = 0; i1 < shape.cards[a]; ++i1) {
          for (std::size_t i2 = i1 + 1; i2 < shape.cards[a]; ++i2) {
            for (std::size_t j1 = 0; j1 < shape.cards[b]; ++j1) {
              for (std::size_t j2 = j1 + 1; j2 < shape.cards[b]; ++j2) {
                const double p11 = cells[base + i1 * shape.strides[a] + j1 * shape.strides[b]];
                const double p22 = cells[base + i2 * shape.strides[a] + j2 * shape.strides[b]];
                const double p12 = cells[base + i1 * shape.strides[a] + j2 * shape.strides[b]];
                const double p21 = cells[base + i2 * shape.strides[a] + j1 * shape.strides[b]];
                ratios.push_back((p11 * p22) / (p12 * p21));
              }
            }
          }
        }
      }
    }
  }
  return ratios;
}

}  // namespace ctab::testgen
