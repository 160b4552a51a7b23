#include "mlse/l2s.hpp"

#include <limits>
#include <stdexcept>

namespace mlse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

bool same_set(const CandidateSet& a, const CandidateSet& b) {
  if (a.size != b.size) return false;
  for (int i = 0; i < a.size; ++i)
    if (a.levels[i] != b.levels[i]) return false;
  return true;
}

}  // namespace

MetricTable two_step_unit(double y_n, double y_np1, double alpha,
                          int first_epoch, CostTrace* trace) {
  MetricTable t;
  t.first_epoch = first_epoch;
  t.last_epoch = first_epoch + 2;
  t.left = full_pam4_set();
  t.right = full_pam4_set();

  // Branch metrics for both samples: 16 references once per block are
  // accounted by the caller; here each (state pair, sample) costs one adder
  // for y - ref and one squaring.
  double bm0[4][4], bm1[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double ref = alpha * kPam4Levels[i] + kPam4Levels[j];
      const double d0 = y_n - ref;
      const double d1 = y_np1 - ref;
      bm0[i][j] = d0 * d0;
      bm1[i][j] = d1 * d1;
    }
  if (trace) {
    trace->adders += 32;
    trace->var_mult += 32;
  }

  for (int ia = 0; ia < 4; ++ia)
    for (int ic = 0; ic < 4; ++ic) {
      double best = kInf;
      int best_b = -1;
      for (int ib = 0; ib < 4; ++ib) {
        const double cand = bm0[ia][ib] + bm1[ib][ic];
        if (cand < best) {
          best = cand;
          best_b = ib;
        }
      }
      t.entry[ia * 4 + ic] = best;
      t.mid[ia * 4 + ic] = static_cast<std::int8_t>(kPam4Levels[best_b]);
    }
  if (trace) {
    trace->adders += 64;
    trace->comparators += 48;
  }
  return t;
}

MetricTable one_step_table(double y, double alpha, int first_epoch,
                           CostTrace* trace) {
  MetricTable t;
  t.first_epoch = first_epoch;
  t.last_epoch = first_epoch + 1;
  t.left = full_pam4_set();
  t.right = full_pam4_set();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double d = y - (alpha * kPam4Levels[i] + kPam4Levels[j]);
      t.entry[i * 4 + j] = d * d;
      t.mid[i * 4 + j] = kNoMid;
    }
  if (trace) {
    trace->adders += 16;
    trace->var_mult += 16;
  }
  return t;
}

MetricTable identity_table(int epoch) {
  MetricTable t;
  t.first_epoch = epoch;
  t.last_epoch = epoch;
  t.left = full_pam4_set();
  t.right = full_pam4_set();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      t.entry[i * 4 + j] = i == j ? 0.0 : kInf;
      t.mid[i * 4 + j] = kNoMid;
    }
  return t;
}

MetricTable merge_tables(const MetricTable& left, const MetricTable& right,
                         CostTrace* trace) {
  if (left.last_epoch != right.first_epoch)
    throw std::invalid_argument("merge_tables: spans do not abut");
  if (!same_set(left.right, right.left))
    throw std::invalid_argument("merge_tables: shared state sets differ");

  MetricTable out;
  out.first_epoch = left.first_epoch;
  out.last_epoch = right.last_epoch;
  out.left = left.left;
  out.right = right.right;
  const CandidateSet& mid = left.right;
  for (int ia = 0; ia < out.left.size; ++ia)
    for (int ic = 0; ic < out.right.size; ++ic) {
      double best = kInf;
      int best_b = -1;
      for (int ib = 0; ib < mid.size; ++ib) {
        const double cand = left.value(ia, ib) + right.value(ib, ic);
        if (cand < best) {
          best = cand;
          best_b = ib;
        }
      }
      out.entry[ia * out.right.size + ic] = best;
      out.mid[ia * out.right.size + ic] =
          best_b < 0 ? kNoMid : mid.levels[best_b];
    }
  if (trace) {
    trace->adders +=
        static_cast<long>(out.left.size) * mid.size * out.right.size;
    trace->comparators +=
        static_cast<long>(out.left.size) * out.right.size * (mid.size - 1);
  }
  return out;
}

LayerPlan plan_layers(int n) {
  if (!is_pow2(n) || n < 2)
    throw std::invalid_argument("plan_layers: block length must be a power of two >= 2");
  LayerPlan plan;
  for (int tables = n / 2; tables >= 1; tables /= 2) {
    plan.tables_per_layer.push_back(tables);
    ++plan.depth;
  }
  return plan;
}

int latency_of_plan(int n) {
  return plan_layers(n).depth + 2;
}

namespace {

struct TableNode {
  MetricTable tbl;
  int left_child = -1;
  int right_child = -1;
};

// Merges leaves[lo, hi) splitting at the largest power of two below the
// count, so power-of-two blocks reduce through a perfectly balanced tree.
int reduce_range(std::vector<TableNode>& arena, int lo, int hi,
                 CostTrace* trace) {
  if (hi - lo == 1) return lo;
  int split = 1;
  while (2 * split < hi - lo) split *= 2;
  const int l = reduce_range(arena, lo, lo + split, trace);
  const int r = reduce_range(arena, lo + split, hi, trace);
  TableNode node;
  node.tbl = merge_tables(arena[l].tbl, arena[r].tbl, trace);
  node.left_child = l;
  node.right_child = r;
  arena.push_back(node);
  return static_cast<int>(arena.size()) - 1;
}

void expand_path(const std::vector<TableNode>& arena, int node, int a_level,
                 int c_level, std::vector<int>& states) {
  const TableNode& nd = arena[node];
  states[nd.tbl.first_epoch] = a_level;
  states[nd.tbl.last_epoch] = c_level;
  const int ia = nd.tbl.left.index_of(a_level);
  const int ic = nd.tbl.right.index_of(c_level);
  const std::int8_t mid = nd.tbl.mid[ia * nd.tbl.right.size + ic];
  if (nd.left_child < 0) {
    if (mid != kNoMid) states[nd.tbl.first_epoch + 1] = mid;
    return;
  }
  expand_path(arena, nd.left_child, a_level, mid, states);
  expand_path(arena, nd.right_child, mid, c_level, states);
}

}  // namespace

DetectionResult reduce_leaves(std::vector<MetricTable> leaves, int n_samples,
                              CostTrace* trace) {
  if (leaves.empty())
    throw std::invalid_argument("reduce_leaves: no tables");
  std::vector<TableNode> arena;
  arena.reserve(2 * leaves.size());
  for (auto& t : leaves) arena.push_back({std::move(t), -1, -1});
  const int root =
      reduce_range(arena, 0, static_cast<int>(leaves.size()), trace);
  const MetricTable& final_tbl = arena[root].tbl;
  if (final_tbl.first_epoch != 0 || final_tbl.last_epoch != n_samples)
    throw std::invalid_argument("reduce_leaves: tables do not cover the block");

  // Survivor: scan exit states first so ties resolve like the serial
  // detector's final-metric scan, then entry states.
  double best = kInf;
  int best_a = -1, best_c = -1;
  for (int ic = 0; ic < final_tbl.right.size; ++ic)
    for (int ia = 0; ia < final_tbl.left.size; ++ia) {
      const double cand = final_tbl.value(ia, ic);
      if (cand < best) {
        best = cand;
        best_a = ia;
        best_c = ic;
      }
    }
  if (trace)
    trace->comparators +=
        static_cast<long>(final_tbl.left.size) * final_tbl.right.size - 1;

  DetectionResult result;
  result.survivor_metric = best;
  std::vector<int> states(n_samples + 1, 0);
  expand_path(arena, root, final_tbl.left.levels[best_a],
              final_tbl.right.levels[best_c], states);
  result.decoded = std::move(states);
  return result;
}

DetectionResult detect_block_l2s(const Block& blk, double alpha,
                                 CostTrace* trace) {
  const int n = static_cast<int>(blk.samples.size());
  if (n < 1) throw std::invalid_argument("detect_block_l2s: empty block");
  if (trace) {
    trace->begin_block(n);
    // 3a once per block, then 16 reference sums shared by every table.
    trace->const_mult += 1;
    trace->adders += 16;
  }
  std::vector<MetricTable> leaves;
  leaves.reserve((n + 1) / 2);
  for (int k = 0; k + 1 < n; k += 2)
    leaves.push_back(
        two_step_unit(blk.samples[k], blk.samples[k + 1], alpha, k, trace));
  if (n % 2 == 1)
    leaves.push_back(one_step_table(blk.samples[n - 1], alpha, n - 1, trace));
  return reduce_leaves(std::move(leaves), n, trace);
}

}  // namespace mlse
