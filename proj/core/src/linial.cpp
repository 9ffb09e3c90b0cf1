#include "dcolor/linial.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "dcolor/common.hpp"

namespace dcolor {

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t p = 2; p * p <= x; ++p) {
    if (x % p == 0) return false;
  }
  return true;
}

namespace {

// q^e >= K without overflow.
bool power_reaches(std::uint64_t q, int e, std::uint64_t K) {
  UInt128 acc = 1;
  for (int i = 0; i < e; ++i) {
    acc *= q;
    if (acc >= K) return true;
  }
  return acc >= K;
}

std::uint64_t smallest_prime(std::uint64_t above_degree_bound, int d, std::uint64_t K) {
  std::uint64_t q = std::max<std::uint64_t>(above_degree_bound, 2);
  while (!power_reaches(q, d + 1, K)) ++q;
  while (!is_prime(q)) ++q;
  return q;
}

}  // namespace

PolyParams linial_params(std::uint64_t K, std::uint64_t max_degree) {
  K = std::max<std::uint64_t>(K, 2);
  if (max_degree == 0) return PolyParams{smallest_prime(1, 1, K), 1};
  PolyParams best{smallest_prime(max_degree + 1, 1, K), 1};
  for (int d = 2; d * max_degree + 1 <= best.q; ++d) {
    const std::uint64_t q = smallest_prime(d * max_degree + 1, d, K);
    if (q < best.q) best = PolyParams{q, d};
  }
  return best;
}

std::uint64_t linial_fixpoint(std::uint64_t K, std::uint64_t max_degree) {
  for (;;) {
    const PolyParams p = linial_params(K, max_degree);
    if (p.classes() >= K) return K;
    K = p.classes();
  }
}

int linial_iterations(std::uint64_t K, std::uint64_t max_degree) {
  int it = 0;
  for (;;) {
    const PolyParams p = linial_params(K, max_degree);
    if (p.classes() >= K) return it;
    K = p.classes();
    ++it;
  }
}

int log_star2(std::uint64_t n) {
  int k = 0;
  double x = static_cast<double>(n);
  while (x > 1.0) {
    x = std::log2(x);
    ++k;
  }
  return k;
}

namespace {

std::uint64_t eval_poly(std::uint64_t c, const PolyParams& p, std::uint64_t a) {
  std::vector<std::uint64_t> coef(p.d + 1);
  for (int i = 0; i <= p.d; ++i) {
    coef[i] = c % p.q;
    c /= p.q;
  }
  std::uint64_t value = 0;
  for (int i = p.d; i >= 0; --i) value = (value * a + coef[i]) % p.q;
  return value;
}

class LinialProgram {
 public:
  LinialProgram() = default;
  LinialProgram(Color color, int width, PolyParams params) : color_(color), width_(width), params_(params) {}

  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (ctx.round == 1) {
      for (NodeId w : ctx.neighbors) out.push_back({w, BitWriter().put(color_, width_).finish()});
      return ctx.neighbors.empty() ? (decide({}), StepStatus::halted) : StepStatus::running;
    }
    std::vector<std::uint64_t> others;
    for (const Envelope& env : inbox) others.push_back(BitReader(env.msg).get(width_));
    decide(others);
    return StepStatus::halted;
  }

  Color result() const { return result_; }

 private:
  void decide(const std::vector<std::uint64_t>& others) {
    for (std::uint64_t a = 0; a < params_.q; ++a) {
      const std::uint64_t mine = eval_poly(color_, params_, a);
      const bool clash = std::any_of(others.begin(), others.end(),
                                     [&](std::uint64_t c) { return eval_poly(c, params_, a) == mine; });
      if (!clash) {
        result_ = static_cast<Color>(a * params_.q + mine);
        return;
      }
    }
    throw InvariantViolation("linial_step: no free evaluation point (input coloring not proper?)");
  }

  Color color_ = 0;
  int width_ = 0;
  PolyParams params_;
  Color result_ = 0;
};

class MisProgram {
 public:
  MisProgram() = default;
  explicit MisProgram(Color color) : color_(color) {}

  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (!inbox.empty()) dominated_ = true;
    if (ctx.round < static_cast<std::uint64_t>(color_) + 1) return StepStatus::running;
    if (!dominated_) {
      joined_ = true;
      for (NodeId w : ctx.neighbors) out.push_back({w, BitWriter().put(1, 1).finish()});
    }
    return StepStatus::halted;
  }

  bool joined() const { return joined_; }

 private:
  Color color_ = 0;
  bool dominated_ = false;
  bool joined_ = false;
};

void check_proper(const Graph& g, std::span<const Color> colors, std::uint64_t K) {
  if (colors.size() != g.size()) throw Error("coloring must cover every node");
  for (NodeId v = 0; v < g.size(); ++v) {
    if (colors[v] >= K) throw ValidationError("color of node " + std::to_string(v) + " out of range");
    for (NodeId u : g.neighbors(v)) {
      if (colors[u] == colors[v]) {
        throw ValidationError("input coloring not proper on edge {" + std::to_string(std::min(u, v)) + "," +
                              std::to_string(std::max(u, v)) + "}");
      }
    }
  }
}

}  // namespace

ColoringResult linial_step(const Graph& g, std::span<const Color> colors, std::uint64_t K, std::uint64_t max_degree,
                           const RunOptions& options) {
  check_proper(g, colors, K);
  require(g.max_degree() <= max_degree, "linial_step: degree bound below the graph's max degree");
  const PolyParams params = linial_params(K, max_degree);
  const int width = bits_for(K - 1);
  std::vector<LinialProgram> programs;
  programs.reserve(g.size());
  for (NodeId v = 0; v < g.size(); ++v) programs.emplace_back(colors[v], width, params);
  ColoringResult out;
  out.stats = run_protocol(g, std::span<LinialProgram>(programs), options);
  out.classes = params.classes();
  out.iterations = 1;
  out.colors.resize(g.size());
  for (NodeId v = 0; v < g.size(); ++v) out.colors[v] = programs[v].result();
  return out;
}

ColoringResult linial_reduce(const Graph& g, std::span<const Color> colors, std::uint64_t K,
                             std::uint64_t max_degree, const RunOptions& options) {
  check_proper(g, colors, K);
  ColoringResult out;
  out.colors.assign(colors.begin(), colors.end());
  out.classes = K;
  for (;;) {
    const PolyParams params = linial_params(out.classes, max_degree);
    if (params.classes() >= out.classes) break;
    ColoringResult step = linial_step(g, out.colors, out.classes, max_degree, options);
    out.colors = std::move(step.colors);
    out.classes = step.classes;
    out.stats += step.stats;
    ++out.iterations;
  }
  return out;
}

ColoringResult linial_reduce(const Graph& g, const RunOptions& options) {
  std::vector<Color> ids(g.size());
  for (NodeId v = 0; v < g.size(); ++v) ids[v] = v;
  return linial_reduce(g, ids, std::max<std::uint64_t>(g.size(), 1), g.max_degree(), options);
}

std::size_t MisResult::size() const { return static_cast<std::size_t>(std::count(in_set.begin(), in_set.end(), true)); }

MisResult mis_by_colors(const Graph& g, std::span<const Color> colors, std::uint64_t classes,
                        const RunOptions& options) {
  check_proper(g, colors, classes);
  std::vector<MisProgram> programs;
  programs.reserve(g.size());
  for (NodeId v = 0; v < g.size(); ++v) programs.emplace_back(colors[v]);
  MisResult out;
  out.stats = run_protocol(g, std::span<MisProgram>(programs), options);
  out.in_set.resize(g.size());
  for (NodeId v = 0; v < g.size(); ++v) out.in_set[v] = programs[v].joined();
  return out;
}

}  // namespace dcolor
