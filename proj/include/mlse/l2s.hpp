#pragma once

#include <cstdint>
#include <vector>

#include "mlse/block.hpp"

namespace mlse {

inline constexpr std::int8_t kNoMid = 127;  // argmin marker for span <= 1 tables

// Partial path metrics over a span of trellis epochs, indexed by the
// (entry state, exit state) pair. entry is row-major with stride
// right.size; mid records the winning level at the seam the table was last
// merged across (the interior epoch for a freshly built two-step table).
struct MetricTable {
  int first_epoch = 0;
  int last_epoch = 0;
  CandidateSet left, right;
  std::array<double, 16> entry{};
  std::array<std::int8_t, 16> mid{};

  double value(int i, int j) const { return entry[i * right.size + j]; }
};

// Two-step metric table over samples (y_n, y_np1), spanning epochs
// first_epoch .. first_epoch + 2 with all four levels on both ends:
// entry(a, c) = min_b BM(y_n; a, b) + BM(y_np1; b, c). Ties pick the
// smaller b.
MetricTable two_step_unit(double y_n, double y_np1, double alpha,
                          int first_epoch = 0, CostTrace* trace = nullptr);

// Single-sample table (span 1): entry(a, c) = BM(y; a, c). Used to close a
// block with an odd sample count.
MetricTable one_step_table(double y, double alpha, int first_epoch = 0,
                           CostTrace* trace = nullptr);

// Min-plus identity: zero on the diagonal, +inf elsewhere, span 0.
MetricTable identity_table(int epoch);

// Min-plus product of two adjacent tables:
// entry(a, c) = min_b left(a, b) + right(b, c), argmin recorded in mid.
// Spans must abut and the shared state set must agree.
MetricTable merge_tables(const MetricTable& left, const MetricTable& right,
                         CostTrace* trace = nullptr);

// Reduction schedule for a power-of-two block: tables_per_layer[0] = N/2
// two-step tables, halving per merge layer down to 1. depth == log2(N).
struct LayerPlan {
  int depth = 0;
  std::vector<int> tables_per_layer;
};
LayerPlan plan_layers(int n);

// Unit delays for the layered detector on a power-of-two block: log2(N) + 2.
int latency_of_plan(int n);

// Layered two-step detector over one block. Power-of-two lengths reduce
// through the balanced binary tree of plan_layers; other lengths split at
// power-of-two boundaries (an odd tail uses a one-step table), which keeps
// the result exactly the free-boundary sequence minimum for any N >= 1.
// decoded holds N + 1 states; survivor_metric is the smallest final entry.
DetectionResult detect_block_l2s(const Block& blk, double alpha,
                                 CostTrace* trace = nullptr);

// Reduces ready-made leaf tables covering epochs 0..n_samples and runs the
// survivor selection and traceback. Shared by the simplified variant.
DetectionResult reduce_leaves(std::vector<MetricTable> leaves, int n_samples,
                              CostTrace* trace = nullptr);

}  // namespace mlse
