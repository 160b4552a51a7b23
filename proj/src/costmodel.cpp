#include "mlse/costmodel.hpp"

#include <stdexcept>

namespace mlse {

ResourceCounts operator+(const ResourceCounts& a, const ResourceCounts& b) {
  return {a.variable_multipliers + b.variable_multipliers,
          a.constant_multipliers + b.constant_multipliers,
          a.adders + b.adders,
          a.comparators + b.comparators};
}

ResourceCounts operator*(long k, const ResourceCounts& c) {
  return {k * c.variable_multipliers, k * c.constant_multipliers,
          k * c.adders, k * c.comparators};
}

bool operator==(const ResourceCounts& a, const ResourceCounts& b) {
  return a.variable_multipliers == b.variable_multipliers &&
         a.constant_multipliers == b.constant_multipliers &&
         a.adders == b.adders && a.comparators == b.comparators;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::OneStep: return "1s";
    case Variant::OneStepSimplified: return "1s-simplified";
    case Variant::L2s: return "l2s";
    case Variant::L2sSimplified: return "l2s-simplified";
  }
  throw std::invalid_argument("variant_name: unknown variant");
}

Variant parse_variant(const std::string& name) {
  if (name == "1s") return Variant::OneStep;
  if (name == "1s-simplified") return Variant::OneStepSimplified;
  if (name == "l2s") return Variant::L2s;
  if (name == "l2s-simplified") return Variant::L2sSimplified;
  throw std::invalid_argument("unknown variant '" + name +
                              "' (expected 1s, 1s-simplified, l2s, l2s-simplified)");
}

bool variant_is_layered(Variant v) {
  return v == Variant::L2s || v == Variant::L2sSimplified;
}

bool variant_is_simplified(Variant v) {
  return v == Variant::OneStepSimplified || v == Variant::L2sSimplified;
}

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

void validate_n(Variant v, int n) {
  if (n < 2) throw std::invalid_argument("block length must be >= 2");
  if (variant_is_layered(v) && !is_pow2(n))
    throw std::invalid_argument("block length must be a power of two for layered variants");
}

}  // namespace

ResourceCounts static_counts(Variant v, int n) {
  validate_n(v, n);
  const long N = n;
  switch (v) {
    case Variant::OneStep:
      // 16 squarings per symbol; one 3a product per block; 16 reference
      // adds per block, 16 metric adds per symbol, 16 path adds per ACS step
      // after the first; 12 ACS comparators per symbol plus 3 at the end.
      return {16 * N, 1, 32 * N, 12 * N + 3};
    case Variant::OneStepSimplified:
      // a^2 once plus a*y per symbol; 3 per-alpha constants plus 2 per
      // symbol; 12 setup adds, 8 table adds and 8 trellis adds per symbol
      // (4 of the path adds vanish at the first step); 2 comparators per
      // symbol plus the final survivor.
      return {N + 1, 2 * N + 3, 16 * N + 8, 2 * N + 1};
    case Variant::L2s:
      // Same squaring front end as the one-step detector, then N/2 - 1
      // min-plus merges of 64 adders and 48 comparators each on top of the
      // 48N + 16 first layer, and a 15-comparator survivor.
      return {16 * N, 1, 80 * N - 48, 48 * N - 33};
    case Variant::L2sSimplified:
      // a^2 once plus two a*y per pair; 4 per-alpha constants plus 3 per
      // pair; first layer 49N/2 + 31 adders and 2N comparators, then
      // N/2 - 1 merges of 8 adders and 4 comparators, plus 3 at the end.
      return {N + 1, 3 * N / 2 + 4, 57 * N / 2 + 23, 4 * N - 1};
  }
  throw std::invalid_argument("static_counts: unknown variant");
}

int latency_units(Variant v, int n) {
  validate_n(v, n);
  return variant_is_layered(v) ? log2i(n) + 2 : n + 2;
}

ResourceCounts first_layer_counts(FirstLayer v, int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("first_layer_counts: block length must be even and >= 2");
  const long N = n;
  switch (v) {
    case FirstLayer::L2s:
      // 16N squarings, 16 + 16N metric adds, 32N two-step sum adds,
      // 24N comparators across N/2 pair groups.
      return {16 * N, 1, 48 * N + 16, 24 * N};
    case FirstLayer::L2sSimplified3State:
      return {N + 1, 3 * N / 2 + 4, 34 * N + 31, 9 * N};
    case FirstLayer::L2sSimplified2State:
      return {N + 1, 3 * N / 2 + 4, 49 * N / 2 + 31, 2 * N};
  }
  throw std::invalid_argument("first_layer_counts: unknown variant");
}

ResourceCounts merge_group_counts(int num_states) {
  if (num_states < 1 || num_states > 4)
    throw std::invalid_argument("merge_group_counts: num_states must be 1..4");
  const long s = num_states;
  return {0, 0, s * s * s, s * s * (s - 1)};
}

ResourceCounts survivor_counts(int num_states) {
  if (num_states < 1 || num_states > 4)
    throw std::invalid_argument("survivor_counts: num_states must be 1..4");
  const long s = num_states;
  return {0, 0, 0, s * s - 1};
}

ResourceCounts simplified_full_state_counts(bool layered, int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("simplified_full_state_counts: block length must be even");
  const long N = n;
  if (!layered) {
    // Setup 12 adds, then per symbol: 8 table adds, 16 sum adds, 16 path
    // adds (skipped on the first step), 12 comparators.
    return {N + 1, 2 * N + 3, 40 * N - 4, 12 * N + 3};
  }
  // Setup 31 adds, per pair 41 table adds plus 64 first-layer adds and 48
  // comparators, then full-state merges and survivor.
  return {N + 1, 3 * N / 2 + 4, 169 * N / 2 - 33, 48 * N - 33};
}

std::vector<std::pair<std::string, ResourceCounts>> stage_breakdown(Variant v, int n) {
  validate_n(v, n);
  const long N = n;
  std::vector<std::pair<std::string, ResourceCounts>> out;
  switch (v) {
    case Variant::OneStep:
      out.emplace_back("branch-metrics", ResourceCounts{16 * N, 1, 16 * N + 16, 0});
      out.emplace_back("acs", ResourceCounts{0, 0, 16 * (N - 1), 12 * N});
      out.emplace_back("survivor", ResourceCounts{0, 0, 0, 3});  // min over 4 path metrics
      break;
    case Variant::OneStepSimplified:
      out.emplace_back("alpha-tables", ResourceCounts{1, 3, 12, 0});
      out.emplace_back("symbol-tables", ResourceCounts{N, 2 * N, 8 * N, 0});
      out.emplace_back("acs", ResourceCounts{0, 0, 8 * N - 4, 2 * N});
      out.emplace_back("survivor", ResourceCounts{0, 0, 0, 1});
      break;
    case Variant::L2s:
      out.emplace_back("first-layer", first_layer_counts(FirstLayer::L2s, n));
      out.emplace_back("merge-layers", (N / 2 - 1) * merge_group_counts(4));
      out.emplace_back("survivor", survivor_counts(4));
      break;
    case Variant::L2sSimplified:
      out.emplace_back("first-layer", first_layer_counts(FirstLayer::L2sSimplified2State, n));
      out.emplace_back("merge-layers", (N / 2 - 1) * merge_group_counts(2));
      out.emplace_back("survivor", survivor_counts(2));
      break;
  }
  return out;
}

ResourceCounts dynamic_counts(const CostTrace& trace) {
  if (trace.alpha_refreshes == 0)
    throw std::invalid_argument("dynamic_counts: trace holds no instrumented block");
  if (trace.alpha_refreshes > 1)
    throw std::invalid_argument("dynamic_counts: trace mixes multiple instrumented blocks");
  return {trace.var_mult, trace.const_mult, trace.adders, trace.comparators};
}

}  // namespace mlse
