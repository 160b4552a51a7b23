/**
 * Layered two-step detector tests: metric tables, min-plus merging, the
 * reduction schedule and end-to-end agreement with the one-step detector.
 */

#include <cmath>
#include <iostream>
#include <vector>

#include "mlse/l2s.hpp"
#include "test_util.hpp"

using namespace mlse;

/** Test 4.1: two-step table values against direct minimization. */
bool test_two_step_unit() {
  std::cout << "Test 4.1: two-step table\n";
  bool ok = true;

  TestRng rng(41);
  for (int t = 0; t < 200; ++t) {
    const double y0 = rng.next_range(-4, 4), y1 = rng.next_range(-4, 4);
    const double alpha = 0.55;
    const MetricTable tbl = two_step_unit(y0, y1, alpha, 3);
    CHECK(tbl.first_epoch == 3 && tbl.last_epoch == 5);
    CHECK(tbl.left.size == 4 && tbl.right.size == 4);

    for (int ia = 0; ia < 4; ++ia)
      for (int ic = 0; ic < 4; ++ic) {
        double want = 1e300;
        int want_b = 0;
        for (int ib = 0; ib < 4; ++ib) {
          const double m =
              branch_metric(y0, alpha, kPam4Levels[ia], kPam4Levels[ib]) +
              branch_metric(y1, alpha, kPam4Levels[ib], kPam4Levels[ic]);
          if (m < want) {
            want = m;
            want_b = ib;
          }
        }
        CHECK(approx_rel(tbl.value(ia, ic), want, 1e-12));
        CHECK(tbl.mid[ia * 4 + ic] == kPam4Levels[want_b]);
      }
  }

  // alpha = 0 removes the entry-state dependence: all rows coincide.
  const MetricTable flat = two_step_unit(0.7, -1.3, 0.0, 0);
  for (int ia = 1; ia < 4; ++ia)
    for (int ic = 0; ic < 4; ++ic)
      CHECK(flat.value(ia, ic) == flat.value(0, ic));

  report(ok);
  return ok;
}

/** Test 4.2: one-step and identity tables. */
bool test_small_tables() {
  std::cout << "Test 4.2: one-step and identity tables\n";
  bool ok = true;

  const MetricTable os = one_step_table(1.2, 0.5, 7);
  CHECK(os.first_epoch == 7 && os.last_epoch == 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(os.value(i, j) ==
            branch_metric(1.2, 0.5, kPam4Levels[i], kPam4Levels[j]));
      CHECK(os.mid[i * 4 + j] == kNoMid);
    }

  const MetricTable id = identity_table(4);
  CHECK(id.first_epoch == 4 && id.last_epoch == 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j)
        CHECK(id.value(i, j) == 0.0);
      else
        CHECK(std::isinf(id.value(i, j)));
    }

  report(ok);
  return ok;
}

/** Test 4.3: min-plus merge semantics. */
bool test_merge() {
  std::cout << "Test 4.3: table merging\n";
  bool ok = true;

  TestRng rng(43);
  const double alpha = 0.55;

  // Three samples: merge(two-step, one-step) equals the direct minimum over
  // both interior states.
  for (int t = 0; t < 100; ++t) {
    const double y0 = rng.next_range(-4, 4);
    const double y1 = rng.next_range(-4, 4);
    const double y2 = rng.next_range(-4, 4);
    const MetricTable m =
        merge_tables(two_step_unit(y0, y1, alpha, 0), one_step_table(y2, alpha, 2));
    CHECK(m.first_epoch == 0 && m.last_epoch == 3);
    for (int ia = 0; ia < 4; ++ia)
      for (int id = 0; id < 4; ++id) {
        double want = 1e300;
        for (int b : kPam4Levels)
          for (int c : kPam4Levels) {
            const double v = branch_metric(y0, alpha, kPam4Levels[ia], b) +
                             branch_metric(y1, alpha, b, c) +
                             branch_metric(y2, alpha, c, kPam4Levels[id]);
            want = std::min(want, v);
          }
        CHECK(approx_rel(m.value(ia, id), want, 1e-12));
      }
  }

  // Identity is neutral on both sides.
  const MetricTable ts = two_step_unit(0.4, -2.1, alpha, 1);
  const MetricTable left_id = merge_tables(identity_table(1), ts);
  const MetricTable right_id = merge_tables(ts, identity_table(3));
  for (int i = 0; i < 16; ++i) {
    CHECK(left_id.entry[i] == ts.entry[i]);
    CHECK(right_id.entry[i] == ts.entry[i]);
  }

  // Associativity within floating-point tolerance.
  const MetricTable t01 = two_step_unit(0.3, 1.7, alpha, 0);
  const MetricTable t2 = one_step_table(-0.9, alpha, 2);
  const MetricTable t3 = one_step_table(2.2, alpha, 3);
  const MetricTable ab_c = merge_tables(merge_tables(t01, t2), t3);
  const MetricTable a_bc = merge_tables(t01, merge_tables(t2, t3));
  for (int i = 0; i < 16; ++i)
    CHECK(approx_rel(ab_c.entry[i], a_bc.entry[i], 1e-12));

  bool threw = false;
  try {
    merge_tables(two_step_unit(0.1, 0.2, alpha, 0),
                 two_step_unit(0.3, 0.4, alpha, 4));
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK_MSG(threw, "gap between spans must be rejected");

  report(ok);
  return ok;
}

/** Test 4.4: reduction schedule and latency. */
bool test_layer_plan() {
  std::cout << "Test 4.4: layer plan and latency\n";
  bool ok = true;

  const LayerPlan p32 = plan_layers(32);
  CHECK(p32.depth == 5);
  CHECK(p32.tables_per_layer == std::vector<int>({16, 8, 4, 2, 1}));
  CHECK(latency_of_plan(32) == 7);

  CHECK(plan_layers(8).depth == 3);
  CHECK(latency_of_plan(8) == 5);
  CHECK(plan_layers(2).depth == 1);
  CHECK(latency_of_plan(2) == 3);

  for (int bad : {0, -4, 3, 12, 33}) {
    bool threw = false;
    try {
      plan_layers(bad);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    CHECK_MSG(threw, "non-power-of-two plan must be rejected");
  }

  report(ok);
  return ok;
}

/** Test 4.5: layered detector equals the one-step detector on full blocks. */
bool test_l2s_vs_1s() {
  std::cout << "Test 4.5: layered vs one-step block detector\n";
  bool ok = true;

  const double alpha = 0.55;
  for (int t = 0; t < 2000; ++t) {
    TestRng rng(6000 + t);
    Block blk;
    for (int i = 0; i < 32; ++i) {
      // Roughly channel-shaped samples with noise.
      const double s = rng.next_level() + alpha * rng.next_level();
      blk.samples.push_back(s + rng.next_range(-1, 1) * 0.4);
    }
    const DetectionResult a = detect_block_1s(blk, alpha);
    const DetectionResult b = detect_block_l2s(blk, alpha);
    CHECK(approx_rel(a.survivor_metric, b.survivor_metric, 1e-12));
    CHECK_MSG(a.decoded == b.decoded, "decisions must agree exactly");
  }

  report(ok);
  return ok;
}

/** Test 4.6: the layered detector covers any block length. */
bool test_l2s_general_length() {
  std::cout << "Test 4.6: layered detector at general lengths\n";
  bool ok = true;

  const double alpha = 0.55;
  for (int n : {1, 2, 3, 5, 7, 10, 12}) {
    for (int t = 0; t < 50; ++t) {
      TestRng rng(100 * n + t);
      Block blk;
      for (int i = 0; i < n; ++i) blk.samples.push_back(rng.next_range(-4, 4));

      const DetectionResult l2s = detect_block_l2s(blk, alpha);
      CHECK(l2s.decoded.size() == static_cast<std::size_t>(n) + 1);

      const DetectionResult one = detect_block_1s(blk, alpha);
      CHECK(approx_rel(l2s.survivor_metric, one.survivor_metric, 1e-12));
      CHECK(l2s.decoded == one.decoded);

      const DetectionResult bf = brute_force_detect(blk.samples, alpha);
      CHECK(approx_rel(l2s.survivor_metric, bf.survivor_metric, 1e-12));
    }
  }

  report(ok);
  return ok;
}

/** Test 4.7: the decoded path reproduces the reported metric. */
bool test_traceback_consistency() {
  std::cout << "Test 4.7: traceback consistency\n";
  bool ok = true;

  const double alpha = 0.48;
  for (int n : {4, 9, 16, 31, 32}) {
    for (int t = 0; t < 40; ++t) {
      TestRng rng(7000 + 100 * n + t);
      Block blk;
      for (int i = 0; i < n; ++i) blk.samples.push_back(rng.next_range(-4, 4));
      const DetectionResult r = detect_block_l2s(blk, alpha);
      CHECK(approx_rel(path_metric(blk.samples, alpha, r.decoded),
                       r.survivor_metric, 1e-12));
    }
  }

  report(ok);
  return ok;
}

/** Test 4.8: leaf coverage validation. */
bool test_reduce_validation() {
  std::cout << "Test 4.8: reduction validation\n";
  bool ok = true;

  bool threw = false;
  try {
    std::vector<MetricTable> leaves;
    leaves.push_back(one_step_table(0.5, 0.5, 0));
    reduce_leaves(std::move(leaves), 2);  // covers only epoch 0..1
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK_MSG(threw, "incomplete coverage must be rejected");

  threw = false;
  try {
    reduce_leaves({}, 0);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK_MSG(threw, "empty table list must be rejected");

  threw = false;
  try {
    Block empty;
    detect_block_l2s(empty, 0.5);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  CHECK_MSG(threw, "empty block must be rejected");

  report(ok);
  return ok;
}

int main() {
  int total = 0, passed = 0;
  std::cout << "==========================================================\n";
  std::cout << "Layered two-step detector tests\n";
  std::cout << "==========================================================\n\n";

  total++; if (test_two_step_unit()) passed++;
  total++; if (test_small_tables()) passed++;
  total++; if (test_merge()) passed++;
  total++; if (test_layer_plan()) passed++;
  total++; if (test_l2s_vs_1s()) passed++;
  total++; if (test_l2s_general_length()) passed++;
  total++; if (test_traceback_consistency()) passed++;
  total++; if (test_reduce_validation()) passed++;

  std::cout << "==========================================================\n";
  std::cout << "Passed: " << passed << "/" << total << "\n";
  return passed == total ? 0 : 1;
}
