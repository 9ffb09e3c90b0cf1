#include "dcolor/derand.hpp"

#include <array>
#include <numeric>
#include <string>

#include "dcolor/common.hpp"

namespace dcolor {

namespace {

using u128 = UInt128;

enum Cmp : int { kLess = 0, kEqual = 1, kGreater = 2 };

int step_cmp(int state, std::uint64_t value_bit, std::uint64_t t_bit) {
  if (state != kEqual) return state;
  if (value_bit < t_bit) return kLess;
  if (value_bit > t_bit) return kGreater;
  return kEqual;
}

// Counts w in [2^b) agreeing with fixed_val on fixed_mask such that
// (w ^ a1) < t1 and (w ^ a2) < t2. Thresholds may equal 2^b.
u128 count_window(std::uint64_t a1, std::uint64_t t1, std::uint64_t a2, std::uint64_t t2, int b,
                  std::uint64_t fixed_mask, std::uint64_t fixed_val) {
  std::array<u128, 9> cur{};
  const int s1 = ((t1 >> b) & 1u) ? kLess : kEqual;
  const int s2 = ((t2 >> b) & 1u) ? kLess : kEqual;
  cur[s1 * 3 + s2] = 1;
  for (int i = b - 1; i >= 0; --i) {
    std::array<u128, 9> next{};
    for (std::uint64_t wb = 0; wb <= 1; ++wb) {
      if (((fixed_mask >> i) & 1u) && ((fixed_val >> i) & 1u) != wb) continue;
      const std::uint64_t v1 = wb ^ ((a1 >> i) & 1u);
      const std::uint64_t v2 = wb ^ ((a2 >> i) & 1u);
      for (int st = 0; st < 9; ++st) {
        if (cur[st] == 0) continue;
        const int n1 = step_cmp(st / 3, v1, (t1 >> i) & 1u);
        const int n2 = step_cmp(st % 3, v2, (t2 >> i) & 1u);
        next[n1 * 3 + n2] += cur[st];
      }
    }
    cur = next;
  }
  return cur[kLess * 3 + kLess];
}

std::uint64_t low_bits(std::uint64_t x, int b) { return b >= 64 ? x : x & ((std::uint64_t{1} << b) - 1); }

// Affine set delta0 + span(basis) in echelon form keyed by leading bit.
struct AffineSet {
  std::uint64_t offset = 0;
  std::array<std::uint64_t, 64> basis{};
  int rank = 0;

  void insert(std::uint64_t g) {
    for (int lead = 63; lead >= 0 && g != 0; --lead) {
      if (!((g >> lead) & 1u)) continue;
      if (basis[lead] == 0) {
        basis[lead] = g;
        ++rank;
        return;
      }
      g ^= basis[lead];
    }
  }

  // #{delta in the set : delta >> k == pattern >> k}.
  u128 count_high(std::uint64_t pattern, int k, int b) const {
    std::uint64_t r = (offset ^ pattern) >> k;
    int below = 0;
    for (int lead = 63; lead >= 0; --lead) {
      if (basis[lead] == 0) continue;
      if (lead < k) {
        ++below;
        continue;
      }
      if ((r >> (lead - k)) & 1u) r ^= basis[lead] >> k;
    }
    (void)b;
    return r == 0 ? (u128{1} << below) : 0;
  }
};

// Pairs (y, z) with y < t_u, z < t_v and y ^ z in the affine set.
u128 affine_pair_count(std::uint64_t t_u, std::uint64_t t_v, const AffineSet& set, int b) {
  u128 total = 0;
  for (int i = 0; i <= b; ++i) {
    if (!((t_u >> i) & 1u)) continue;
    const std::uint64_t y_fixed = (t_u >> (i + 1)) << (i + 1);
    for (int j = 0; j <= b; ++j) {
      if (!((t_v >> j) & 1u)) continue;
      const std::uint64_t z_fixed = (t_v >> (j + 1)) << (j + 1);
      const int k = std::max(i, j);
      const u128 hits = set.count_high(y_fixed ^ z_fixed, k, b);
      if (hits != 0) total += hits << std::min(i, j);
    }
  }
  return total;
}

std::uint64_t lcm_capped(std::uint64_t a, std::uint64_t b, bool& overflow) {
  const std::uint64_t g = std::gcd(a, b);
  const u128 l = static_cast<u128>(a / g) * b;
  if (l > (u128{1} << 40)) overflow = true;
  return static_cast<std::uint64_t>(l);
}

}  // namespace

int accuracy_bits(std::uint64_t max_degree, int width) {
  return std::max(1, ceil_log2(10 * max_degree * static_cast<std::uint64_t>(width)));
}

int accuracy_bits_boosted(std::uint64_t max_degree, int width) {
  return std::max(1, ceil_log2(10 * max_degree * (max_degree + 1) * static_cast<std::uint64_t>(width)));
}

LevelContext make_level_context(const PrefixState& state, std::span<const Color> psi, std::uint64_t K, int b) {
  const NodeId n = state.size();
  require(psi.size() == n, "make_level_context: psi must cover every node");
  LevelContext ctx;
  ctx.family = make_family(K, b);
  ctx.state = &state;
  ctx.coins.resize(n);
  ctx.k0.resize(n);
  ctx.k1.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    require(psi[v] < K, "psi value of node " + std::to_string(v) + " out of range");
    const auto [k0, k1] = split_counts(state, v);
    ctx.k0[v] = k0;
    ctx.k1[v] = k1;
    ctx.coins[v] = make_coin(ctx.family, psi[v], make_rational(k1, k0 + k1));
    for (NodeId u : state.alive_adj[v]) {
      require(psi[u] != psi[v], "input coloring not proper on edge {" + std::to_string(u) + "," +
                                    std::to_string(v) + "}");
    }
  }
  return ctx;
}

SeedPrefix SeedPrefix::extended(int bit) const {
  SeedPrefix next = *this;
  next.fixed.push_back(static_cast<std::uint8_t>(bit ? 1 : 0));
  return next;
}

Seed seed_from_prefix(const FamilySpec& family, const SeedPrefix& prefix) {
  require(prefix.size() <= family.seed_len(), "seed prefix longer than the seed");
  Seed seed;
  for (int j = 0; j < prefix.size(); ++j) seed.set_bit(family, j, prefix.fixed[j]);
  return seed;
}

UInt128 xor_box_count(std::uint64_t t_u, std::uint64_t t_v, std::uint64_t delta, int b) {
  return count_window(0, t_u, delta, t_v, b, 0, 0);
}

std::pair<Rational, Rational> edge_outcome_prob(const FamilySpec& f, const CoinSpec& cu, const CoinSpec& cv,
                                                const SeedPrefix& prefix) {
  const int j = prefix.size();
  require(j <= f.seed_len(), "seed prefix longer than the seed");
  const int b = f.b;
  const std::uint64_t range = f.range();
  if (j <= f.m) {
    // s2 entirely free: y = h(x_u) is uniform and h(x_v) = y ^ delta with
    // delta = T(s1 * (x_u ^ x_v)) spread over an affine set.
    const std::uint64_t dx = cu.color ^ cv.color;
    FieldElem fixed = 0;
    for (int i = 0; i < j; ++i) fixed |= FieldElem{prefix.fixed[i]} << i;
    AffineSet set;
    set.offset = low_bits(mul(f.field, fixed, dx), b);
    for (int i = j; i < f.m; ++i) set.insert(low_bits(mul(f.field, FieldElem{1} << i, dx), b));
    const u128 n11 = affine_pair_count(cu.t, cv.t, set, b);
    const u128 den = u128{range} << set.rank;
    const u128 scale = u128{1} << set.rank;
    const u128 n00 = den + n11 - (u128{cu.t} + cv.t) * scale;
    return {ratio(n11, den), ratio(n00, den)};
  }
  FieldElem s1 = 0;
  for (int i = 0; i < f.m; ++i) s1 |= FieldElem{prefix.fixed[i]} << i;
  const int fixed_bits = std::min(j - f.m, b);
  std::uint64_t w = 0;
  for (int i = 0; i < fixed_bits; ++i) w |= std::uint64_t{prefix.fixed[f.m + i]} << i;
  const std::uint64_t mask = fixed_bits == 0 ? 0 : low_bits(~std::uint64_t{0}, fixed_bits);
  const std::uint64_t au = low_bits(mul(f.field, s1, cu.color), b);
  const std::uint64_t av = low_bits(mul(f.field, s1, cv.color), b);
  const u128 total = u128{1} << (b - fixed_bits);
  const u128 n11 = count_window(au, cu.t, av, cv.t, b, mask, w);
  const u128 nu = count_window(au, cu.t, 0, range, b, mask, w);
  const u128 nv = count_window(0, range, av, cv.t, b, mask, w);
  const u128 n00 = total + n11 - nu - nv;
  return {ratio(n11, total), ratio(n00, total)};
}

std::pair<Rational, Rational> joint_outcome_prob(const LevelContext& ctx, NodeId u, NodeId v,
                                                 const SeedPrefix& prefix) {
  return edge_outcome_prob(ctx.family, ctx.coins[u], ctx.coins[v], prefix);
}

Rational node_conditional(const LevelContext& ctx, NodeId v, const SeedPrefix& prefix) {
  Rational x = 0;
  for (NodeId u : ctx.state->alive_adj[v]) {
    const auto [p11, p00] = joint_outcome_prob(ctx, v, u, prefix);
    if (ctx.k1[v] > 0) x += p11 / ctx.k1[v];
    if (ctx.k0[v] > 0) x += p00 / ctx.k0[v];
  }
  return x;
}

Rational total_conditional(const LevelContext& ctx, const SeedPrefix& prefix, const std::vector<bool>& members) {
  Rational total = 0;
  for (NodeId u = 0; u < ctx.size(); ++u) {
    if (!members.empty() && !members[u]) continue;
    for (NodeId v : ctx.state->alive_adj[u]) {
      if (v < u) continue;
      const auto [p11, p00] = joint_outcome_prob(ctx, u, v, prefix);
      for (NodeId end : {u, v}) {
        if (ctx.k1[end] > 0) total += p11 / ctx.k1[end];
        if (ctx.k0[end] > 0) total += p00 / ctx.k0[end];
      }
    }
  }
  return total;
}

int choose_seed_bit(const Rational& s0, const Rational& s1) { return s1 < s0 ? 1 : 0; }

std::vector<std::uint8_t> coin_bits(const LevelContext& ctx, const Seed& seed) {
  std::vector<std::uint8_t> bits(ctx.size());
  for (NodeId v = 0; v < ctx.size(); ++v) bits[v] = static_cast<std::uint8_t>(coin_eval(ctx.family, seed, ctx.coins[v]));
  return bits;
}

Rational realized_phi(const LevelContext& ctx, const Seed& seed, const std::vector<bool>& members) {
  const auto bits = coin_bits(ctx, seed);
  Rational total = 0;
  for (NodeId u = 0; u < ctx.size(); ++u) {
    if (!members.empty() && !members[u]) continue;
    for (NodeId v : ctx.state->alive_adj[u]) {
      if (v < u || bits[u] != bits[v]) continue;
      total += make_rational(1, bits[u] ? ctx.k1[u] : ctx.k0[u]);
      total += make_rational(1, bits[v] ? ctx.k1[v] : ctx.k0[v]);
    }
  }
  return total;
}

CentralResult derandomize_seed_central(const LevelContext& ctx, const std::vector<bool>& members) {
  CentralResult out;
  SeedPrefix prefix;
  out.expectation_before = total_conditional(ctx, prefix, members);
  for (int j = 0; j < decided_bits(ctx.family); ++j) {
    ChainStep step;
    step.position = j;
    step.s0 = total_conditional(ctx, prefix.extended(0), members);
    step.s1 = total_conditional(ctx, prefix.extended(1), members);
    step.bit = choose_seed_bit(step.s0, step.s1);
    prefix = prefix.extended(step.bit);
    out.steps.push_back(std::move(step));
  }
  out.seed = seed_from_prefix(ctx.family, prefix);
  return out;
}

ExhaustiveResult exhaustive_seed(const LevelContext& ctx, std::uint64_t cap, const std::vector<bool>& members) {
  const FamilySpec& f = ctx.family;
  const int d = f.seed_len();
  if (d >= 64 || (std::uint64_t{1} << d) > cap) {
    throw CapExceeded("exhaustive seed search needs 2^" + std::to_string(d) + " seeds, cap is " +
                      std::to_string(cap));
  }
  struct EdgeTerm {
    NodeId u, v;
  };
  std::vector<EdgeTerm> edges;
  for (NodeId u = 0; u < ctx.size(); ++u) {
    if (!members.empty() && !members[u]) continue;
    for (NodeId v : ctx.state->alive_adj[u]) {
      if (u < v) edges.push_back({u, v});
    }
  }
  bool overflow = false;
  std::uint64_t L = 1;
  for (const auto& e : edges) {
    for (NodeId x : {e.u, e.v}) {
      if (ctx.k0[x]) L = lcm_capped(L, ctx.k0[x], overflow);
      if (ctx.k1[x]) L = lcm_capped(L, ctx.k1[x], overflow);
    }
  }
  auto weight = [&](NodeId x, int bit) -> std::uint64_t {
    const std::uint32_t k = bit ? ctx.k1[x] : ctx.k0[x];
    return k == 0 ? 0 : L / k;
  };

  const NodeId n = ctx.size();
  std::vector<std::uint64_t> a(n);
  std::vector<std::uint8_t> bits(n);
  ExhaustiveResult out;
  u128 best = ~u128{0};
  u128 sum = 0;
  Rational best_q;
  Rational sum_q = 0;
  const std::uint64_t s1_count = std::uint64_t{1} << f.m;
  const std::uint64_t s2_count = f.range();
  for (std::uint64_t s1 = 0; s1 < s1_count; ++s1) {
    for (NodeId v = 0; v < n; ++v) a[v] = low_bits(mul(f.field, s1, ctx.coins[v].color), f.b);
    for (std::uint64_t s2 = 0; s2 < s2_count; ++s2) {
      for (const auto& e : edges) {
        bits[e.u] = (a[e.u] ^ s2) < ctx.coins[e.u].t;
        bits[e.v] = (a[e.v] ^ s2) < ctx.coins[e.v].t;
      }
      ++out.seeds_checked;
      if (!overflow) {
        u128 value = 0;
        for (const auto& e : edges) {
          if (bits[e.u] == bits[e.v]) value += weight(e.u, bits[e.u]) + weight(e.v, bits[e.v]);
        }
        sum += value;
        if (value < best) {
          best = value;
          out.seed = Seed{s1, s2};
        }
      } else {
        Rational value = 0;
        for (const auto& e : edges) {
          if (bits[e.u] != bits[e.v]) continue;
          value += make_rational(1, bits[e.u] ? ctx.k1[e.u] : ctx.k0[e.u]);
          value += make_rational(1, bits[e.v] ? ctx.k1[e.v] : ctx.k0[e.v]);
        }
        sum_q += value;
        if (out.seeds_checked == 1 || value < best_q) {
          best_q = value;
          out.seed = Seed{s1, s2};
        }
      }
    }
  }
  const u128 count = u128{s1_count} * s2_count;
  if (!overflow) {
    out.best = ratio(best, L);
    out.average = ratio(sum, count * L);
  } else {
    out.best = best_q;
    out.average = sum_q / Rational(to_bigint(count));
  }
  return out;
}

}  // namespace dcolor
