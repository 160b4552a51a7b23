/**
 * Acceptance gate. One line per criterion; the binary exits nonzero if any
 * criterion fails. Tolerances are pinned here and nowhere else:
 *
 *   metric agreement      1e-9  (relative)
 *   table fidelity        1e-12 (relative, scaled by max(1, |value|))
 *   parallel/serial gap   < 1e-3 at overlap 8
 *   savings ratios        +/- 5e-4 around 0.372 and 0.0845
 *   operating point       slicer BER in [3e-3, 3e-2], MLSE BER in [2e-4, 5e-3]
 *   reduced-state penalty 2-state BER <= 1.5x the 4-state BER
 */

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "mlse/harness.hpp"
#include "mlse/l2s.hpp"
#include "mlse/simplified.hpp"
#include "mlse/trellis.hpp"
#include "test_util.hpp"

using namespace mlse;
using namespace mlse::harness;

namespace {

constexpr double kMetricTol = 1e-9;
constexpr double kTableTol = 1e-12;
constexpr double kMismatchBound = 1e-3;
constexpr double kRatioTol = 5e-4;
constexpr double kSlicerBerLo = 3e-3, kSlicerBerHi = 3e-2;
constexpr double kMlseBerLo = 2e-4, kMlseBerHi = 5e-3;
constexpr double kTwoStateFactor = 1.5;
constexpr double kSigma = 0.38;
constexpr double kAlpha = 0.55;

long bit_errors_of(const SymbolFrame& decoded, const std::vector<int>& tx_bits) {
  const std::vector<int> bits = demap_pam4(decoded);
  long errors = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i] != tx_bits[i]) ++errors;
  return errors;
}

}  // namespace

/** Criterion 1: every detector reproduces the exhaustive optimum. */
bool criterion_exactness() {
  bool ok = true;
  int unique_frames = 0;
  for (int t = 0; t < 200; ++t) {
    TestRng rng(20000 + t);
    SymbolFrame s;
    for (int i = 0; i < 10; ++i) s.push_back(rng.next_level());
    ChannelModel m;
    m.taps = {1.0, kAlpha};
    m.noise_sigma = (t % 2 == 0) ? 0.2 : 0.5;
    m.noise_seed = 30000 + t;
    const SampleFrame y = apply_channel(s, m);

    int num_opt = 0;
    const DetectionResult bf =
        brute_force_detect(y, kAlpha, Boundary::FreeInitial, -3, &num_opt);

    const DetectionResult serial = viterbi_detect_serial(y, kAlpha, 10, 0);
    Block blk;
    blk.samples = y;
    const DetectionResult one = detect_block_1s(blk, kAlpha);
    const DetectionResult layered = detect_block_l2s(blk, kAlpha);

    ok &= approx_rel(serial.survivor_metric, bf.survivor_metric, kMetricTol);
    ok &= approx_rel(one.survivor_metric, bf.survivor_metric, kMetricTol);
    ok &= approx_rel(layered.survivor_metric, bf.survivor_metric, kMetricTol);
    if (num_opt == 1) {
      ++unique_frames;
      const SymbolFrame one_tail(one.decoded.begin() + 1, one.decoded.end());
      const SymbolFrame l2s_tail(layered.decoded.begin() + 1,
                                 layered.decoded.end());
      ok &= serial.decoded == bf.decoded;
      ok &= one_tail == bf.decoded;
      ok &= l2s_tail == bf.decoded;
    }
  }
  std::printf("    200 frames, %d with a unique optimum\n", unique_frames);
  ok &= unique_frames >= 150;
  return ok;
}

/** Criterion 2: shared-term detectors decode identically at four states. */
bool criterion_simplified_equivalence() {
  bool ok = true;

  ExperimentConfig cfg;
  cfg.variant = Variant::OneStepSimplified;
  cfg.frame_symbols = 100000;
  cfg.sigmas = {kSigma};
  const EquivReport one = run_equiv(cfg, Variant::OneStep, 4);
  cfg.variant = Variant::L2sSimplified;
  const EquivReport two = run_equiv(cfg, Variant::L2s, 4);
  std::printf("    frame mismatches: one-step %ld, layered %ld\n",
              one.mismatches, two.mismatches);
  ok &= one.mismatches == 0 && two.mismatches == 0;

  // Offset-corrected block metrics agree to 1e-9.
  for (int t = 0; t < 200; ++t) {
    TestRng rng(40000 + t);
    Block blk;
    int prev = rng.next_level();
    for (int i = 0; i < 32; ++i) {
      const int cur = rng.next_level();
      blk.samples.push_back(cur + kAlpha * prev + 0.38 * rng.next_range(-1, 1));
      prev = cur;
    }
    double offset = 0.0;
    for (double y : blk.samples) offset += y * y;
    const DetectionResult p1 = detect_block_1s(blk, kAlpha);
    const DetectionResult s1 = detect_block_1s_simplified(blk, {}, kAlpha, 4);
    const DetectionResult p2 = detect_block_l2s(blk, kAlpha);
    const DetectionResult s2 = detect_block_l2s_simplified(blk, {}, kAlpha, 4);
    ok &= p1.decoded == s1.decoded && p2.decoded == s2.decoded;
    ok &= approx_rel(s1.survivor_metric + offset, p1.survivor_metric, kMetricTol);
    ok &= approx_rel(s2.survivor_metric + offset, p2.survivor_metric, kMetricTol);
  }
  return ok;
}

/** Criterion 3: shared-term tables reproduce the metrics to 1e-12. */
bool criterion_table_fidelity() {
  bool ok = true;
  TestRng rng(50000);
  for (int t = 0; t < 1000; ++t) {
    const double alpha = 0.05 + 0.9 * rng.next_unit();
    const double y0 = rng.next_range(-5, 5);
    const double y1 = rng.next_range(-5, 5);
    const AbcdTables tbl = build_abcd(alpha, y0, y1);
    const std::array<double, 8> e = build_e(alpha);
    const std::array<double, 8> f = build_f(alpha, y0);
    for (int a : kPam4Levels)
      for (int b : kPam4Levels) {
        for (int c : kPam4Levels) {
          const double direct = branch_metric(y0, alpha, a, b) +
                                branch_metric(y1, alpha, b, c) -
                                y0 * y0 - y1 * y1;
          const RowRef rr = abcd_row(a, b, c);
          const double shared = rr.uses_ab
                                    ? tbl.A[rr.row] + rr.sign * tbl.B[rr.row]
                                    : tbl.C[rr.row] + rr.sign * tbl.D[rr.row];
          ok &= approx_rel(shared, direct, kTableTol);
        }
        const EfRowRef er = ef_row(a, b);
        ok &= approx_rel(e[er.row] + er.sign * f[er.row],
                         branch_metric(y0, alpha, a, b) - y0 * y0, kTableTol);
      }
    if (!ok) break;
  }
  return ok;
}

/** Criterion 4: hardware totals, latency and savings at N = 32. */
bool criterion_cost_totals() {
  bool ok = true;

  ok &= static_counts(Variant::OneStep, 32) ==
        ResourceCounts{512, 1, 1024, 387};
  ok &= static_counts(Variant::OneStepSimplified, 32) ==
        ResourceCounts{33, 67, 520, 65};
  ok &= static_counts(Variant::L2s, 32) == ResourceCounts{512, 1, 2512, 1503};
  ok &= static_counts(Variant::L2sSimplified, 32) ==
        ResourceCounts{33, 52, 935, 127};

  ok &= latency_units(Variant::OneStep, 32) == 34;
  ok &= latency_units(Variant::L2s, 32) == 7;

  const double add_ratio = 935.0 / 2512.0;
  const double cmp_ratio = 127.0 / 1503.0;
  ok &= std::fabs(add_ratio - 0.372) < kRatioTol;
  ok &= std::fabs(cmp_ratio - 0.0845) < kRatioTol;
  std::printf("    adder ratio %.4f, comparator ratio %.4f\n", add_ratio,
              cmp_ratio);

  // Instrumented detectors match the closed forms exactly.
  for (int n : {8, 16, 32}) {
    TestRng rng(60000 + n);
    Block blk;
    std::vector<double> pre(n + 1);
    for (int i = 0; i < n; ++i) blk.samples.push_back(rng.next_range(-4, 4));
    for (int i = 0; i <= n; ++i) pre[i] = rng.next_range(-4, 4);

    CostTrace t1, t2, t3, t4;
    detect_block_1s(blk, kAlpha, &t1);
    detect_block_l2s(blk, kAlpha, &t2);
    detect_block_1s_simplified(blk, pre, kAlpha, 2, &t3);
    detect_block_l2s_simplified(blk, pre, kAlpha, 2, &t4);
    ok &= dynamic_counts(t1) == static_counts(Variant::OneStep, n);
    ok &= dynamic_counts(t2) == static_counts(Variant::L2s, n);
    ok &= dynamic_counts(t3) == static_counts(Variant::OneStepSimplified, n);
    ok &= dynamic_counts(t4) == static_counts(Variant::L2sSimplified, n);
  }
  return ok;
}

/** Criterion 5: stage decompositions sum to the totals exactly. */
bool criterion_decomposition() {
  bool ok = true;
  for (int n : {8, 16, 32, 64}) {
    for (Variant v : {Variant::OneStep, Variant::OneStepSimplified,
                      Variant::L2s, Variant::L2sSimplified}) {
      ResourceCounts sum;
      for (const auto& [name, counts] : stage_breakdown(v, n))
        sum = sum + counts;
      ok &= sum == static_counts(v, n);
    }
    ok &= first_layer_counts(FirstLayer::L2s, n) +
              (n / 2 - 1) * merge_group_counts(4) + survivor_counts(4) ==
          static_counts(Variant::L2s, n);
    ok &= first_layer_counts(FirstLayer::L2sSimplified2State, n) +
              (n / 2 - 1) * merge_group_counts(2) + survivor_counts(2) ==
          static_counts(Variant::L2sSimplified, n);
  }
  return ok;
}

/** Criterion 6: block parallelism tracks the serial detector. */
bool criterion_parallel_serial() {
  bool ok = true;

  ExperimentConfig cfg;
  cfg.frame_symbols = 1000000;
  const FrameData frame = make_frame(cfg, kSigma, frame_seed_for(1, 0));

  long prev = -1;
  for (int overlap : {0, 2, 4, 8}) {
    const BlockConfig bc{overlap, 16};
    DetectOptions opt;
    opt.workers = 4;
    const SymbolFrame par =
        detect_frame(frame.y, kAlpha, bc, DetectorKind::OneStep, opt);
    const DetectionResult ser =
        viterbi_detect_serial(frame.y, kAlpha, bc.data_len, bc.overlap);
    long mismatches = 0;
    for (std::size_t i = 0; i < par.size(); ++i)
      if (par[i] != ser.decoded[i]) ++mismatches;
    const double rate = static_cast<double>(mismatches) / cfg.frame_symbols;
    std::printf("    O=%d: %ld mismatches (rate %.2e)\n", overlap, mismatches,
                rate);
    if (prev >= 0) ok &= mismatches <= prev;
    prev = mismatches;
    if (overlap == 8) ok &= rate < kMismatchBound;
  }
  return ok;
}

/** Criterion 7: error-rate ordering at the operating point. */
bool criterion_error_rates() {
  bool ok = true;

  ExperimentConfig cfg;
  cfg.frame_symbols = 1000000;
  const FrameData frame = make_frame(cfg, kSigma, frame_seed_for(2, 0));
  const long bits = static_cast<long>(frame.tx_bits.size());

  // Slicer baseline on the pre-detection samples.
  SymbolFrame sliced(frame.tx.size());
  for (std::size_t i = 0; i < frame.pre.size(); ++i)
    sliced[i] = slice_pam4(frame.pre[i]);
  const double slicer_ber =
      static_cast<double>(bit_errors_of(sliced, frame.tx_bits)) / bits;
  std::printf("    slicer ber %.3e\n", slicer_ber);
  ok &= slicer_ber > kSlicerBerLo && slicer_ber < kSlicerBerHi;

  const BlockConfig bc{8, 16};
  DetectOptions opt;
  opt.workers = 4;
  double l2s4_ber = 0.0;
  for (DetectorKind kind : {DetectorKind::OneStep, DetectorKind::L2s,
                            DetectorKind::OneStepSimplified,
                            DetectorKind::L2sSimplified}) {
    const SymbolFrame decoded = detect_frame(frame.y, kAlpha, bc, kind, opt);
    const double ber =
        static_cast<double>(bit_errors_of(decoded, frame.tx_bits)) / bits;
    std::printf("    detector %d ber %.3e\n", static_cast<int>(kind), ber);
    ok &= ber < slicer_ber;
    ok &= ber > kMlseBerLo && ber < kMlseBerHi;
    if (kind == DetectorKind::L2s) l2s4_ber = ber;
  }

  DetectOptions reduced;
  reduced.workers = 4;
  reduced.num_states = 2;
  reduced.pre_decisions = &frame.pre;
  const SymbolFrame two =
      detect_frame(frame.y, kAlpha, bc, DetectorKind::L2sSimplified, reduced);
  const double two_ber =
      static_cast<double>(bit_errors_of(two, frame.tx_bits)) / bits;
  std::printf("    2-state layered ber %.3e (4-state %.3e, factor %.3f)\n",
              two_ber, l2s4_ber, two_ber / l2s4_ber);
  ok &= two_ber < slicer_ber;
  ok &= two_ber <= kTwoStateFactor * l2s4_ber;
  return ok;
}

/** Criterion 8: artifacts are bytewise identical for any worker count. */
bool criterion_reproducibility() {
  bool ok = true;

  for (int pass = 0; pass < 2; ++pass) {
    ExperimentConfig cfg;
    cfg.frame_symbols = 100000;
    cfg.sigmas = {kSigma};
    cfg.seeds = {1, 2};
    if (pass == 1) {
      cfg.variant = Variant::L2sSimplified;
      cfg.num_states = 2;
    }
    ExperimentConfig quad = cfg;
    quad.workers = 4;
    const std::string a = ber_csv(run_ber(cfg));
    const std::string b = ber_csv(run_ber(quad));
    ok &= !a.empty() && a == b;
  }
  return ok;
}

int main() {
  struct Criterion {
    const char* name;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {"detectors reproduce the exhaustive optimum", criterion_exactness},
      {"shared-term detectors decode identically", criterion_simplified_equivalence},
      {"shared-term tables reproduce the metrics", criterion_table_fidelity},
      {"hardware totals and savings at N = 32", criterion_cost_totals},
      {"stage decompositions sum exactly", criterion_decomposition},
      {"parallel blocks track the serial detector", criterion_parallel_serial},
      {"error-rate ordering at the operating point", criterion_error_rates},
      {"bytewise reproducibility across workers", criterion_reproducibility},
  };

  int failed = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    std::printf("criterion %d: %s\n", index, c.name);
    const bool ok = c.fn();
    std::printf("criterion %d: %s - %s\n", index, ok ? "PASS" : "FAIL", c.name);
    if (!ok) ++failed;
  }
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
