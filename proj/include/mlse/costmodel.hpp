#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mlse {

// Hardware cost accounting. Conventions used throughout:
//  * Multiplications by a power of two are bit shifts and cost nothing; this
//    includes 2y, 4a, 8a, 2m and every sign flip.
//  * Multiplications between two runtime values (squarings, a*y, a*a) are
//    variable multipliers; products of a runtime value with a non-power-of-two
//    constant (3a, 6y, 10a^2, ...) are constant multipliers.
//  * Quantities that depend only on the channel estimate (anything built from
//    alpha alone) are computed once per block, not per symbol; the static
//    formulas below bake that in, and instrumented runs must match them.
//  * Latency is counted in abstract unit delays: one unit per trellis step for
//    the one-step detectors, one unit per reduction layer for the layered
//    detectors, plus two fixed units (metric setup, survivor selection).
struct ResourceCounts {
  long variable_multipliers = 0;
  long constant_multipliers = 0;
  long adders = 0;
  long comparators = 0;
};

ResourceCounts operator+(const ResourceCounts& a, const ResourceCounts& b);
ResourceCounts operator*(long k, const ResourceCounts& c);
bool operator==(const ResourceCounts& a, const ResourceCounts& b);

enum class Variant {
  OneStep,            // 4-state one-step sliding-block detector
  OneStepSimplified,  // shared-term metrics + 2-state reduction
  L2s,                // 4-state layered two-step detector
  L2sSimplified,      // shared-term two-step tables + 2-state reduction
};

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
bool variant_is_layered(Variant v);
bool variant_is_simplified(Variant v);

// Closed-form totals for one block of N symbols.
ResourceCounts static_counts(Variant v, int n);

// Latency in unit delays for one block of N symbols: N + 2 for the one-step
// detectors, log2(N) + 2 for the layered ones.
int latency_units(Variant v, int n);

// First layer (branch metrics plus the first reduction layer) of the layered
// detector, by surviving state count.
enum class FirstLayer { L2s, L2sSimplified3State, L2sSimplified2State };
ResourceCounts first_layer_counts(FirstLayer v, int n);

// One min-plus merge group over `num_states` surviving states: s^3 adders and
// s^2*(s-1) comparators.
ResourceCounts merge_group_counts(int num_states);

// Final survivor selection over num_states^2 table entries.
ResourceCounts survivor_counts(int num_states);

// Shared-term metric evaluation with all four states kept (no candidate-set
// reduction). Not a standalone detector configuration in static_counts, but
// instrumented 4-state runs of the simplified kernels must match these.
ResourceCounts simplified_full_state_counts(bool layered, int n);

// Named stages whose counts sum to static_counts(v, n) exactly.
std::vector<std::pair<std::string, ResourceCounts>> stage_breakdown(Variant v, int n);

// Event counters filled in by an instrumented detector run. A trace is only
// meaningful for a single block processed with a single alpha refresh.
struct CostTrace {
  long var_mult = 0;
  long const_mult = 0;
  long adders = 0;
  long comparators = 0;
  int block_len = 0;
  int alpha_refreshes = 0;

  void begin_block(int n) {
    block_len = n;
    ++alpha_refreshes;
  }
};

// Converts a trace into ResourceCounts; rejects traces that cover zero or
// multiple instrumented blocks.
ResourceCounts dynamic_counts(const CostTrace& trace);

}  // namespace mlse
