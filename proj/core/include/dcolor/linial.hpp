#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcolor/congest.hpp"
#include "dcolor/graph.hpp"

namespace dcolor {

/// Polynomials of degree <= d over F_q; one reduction step maps K colors to q^2.
struct PolyParams {
  std::uint64_t q = 2;
  int d = 1;

  std::uint64_t classes() const { return q * q; }
};

bool is_prime(std::uint64_t x);

/// For d = 1, 2, ...: q_d is the smallest prime with q > d*Delta and
/// q^(d+1) >= K; returns the pair with the smallest q (ties to smaller d).
/// Delta = 0 uses d = 1.
PolyParams linial_params(std::uint64_t K, std::uint64_t max_degree);

/// Final class count of linial_reduce started from K classes.
std::uint64_t linial_fixpoint(std::uint64_t K, std::uint64_t max_degree);
/// Number of steps linial_reduce takes from K classes.
int linial_iterations(std::uint64_t K, std::uint64_t max_degree);

/// Iterated base-2 logarithm.
int log_star2(std::uint64_t n);

struct ColoringResult {
  std::vector<Color> colors;
  std::uint64_t classes = 0;
  int iterations = 0;
  RunStats stats;
};

/// One reduction round. `colors` must be proper with values < K, and
/// max_degree must bound every degree of g.
ColoringResult linial_step(const Graph& g, std::span<const Color> colors, std::uint64_t K, std::uint64_t max_degree,
                           const RunOptions& options = {});

/// Repeats linial_step while it lowers the class count.
ColoringResult linial_reduce(const Graph& g, std::span<const Color> colors, std::uint64_t K,
                             std::uint64_t max_degree, const RunOptions& options = {});
ColoringResult linial_reduce(const Graph& g, const RunOptions& options = {});

struct MisResult {
  std::vector<bool> in_set;
  RunStats stats;

  std::size_t size() const;
};

/// Maximal independent set by walking color classes 0..classes-1, one
/// round per class.
MisResult mis_by_colors(const Graph& g, std::span<const Color> colors, std::uint64_t classes,
                        const RunOptions& options = {});

}  // namespace dcolor
