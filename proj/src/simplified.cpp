#include "mlse/simplified.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

AcTables build_ac(double alpha, CostTrace* trace) {
  const double a2 = alpha * alpha;
  const double a2_10 = 10.0 * a2;
  const double a2_18 = 18.0 * a2;
  const double al_12 = 12.0 * alpha;
  const double al_36 = 36.0 * alpha;
  if (trace) {
    trace->var_mult += 1;
    trace->const_mult += 4;
  }
  // Shifts, free: 2a^2 and the power-of-two alpha multiples.
  const double a2_2 = 2.0 * a2;
  const double al_24 = 2.0 * al_12;
  const double al_8 = 8.0 * alpha;
  const double al_4 = 4.0 * alpha;

  // Seven base sums cover every (squared-term, constant-term) combination.
  const double b_18_18 = a2_18 + 18.0;
  const double b_10_10 = a2_10 + 10.0;
  const double b_10_18 = a2_10 + 18.0;
  const double b_2_10 = a2_2 + 10.0;
  const double b_18_10 = a2_18 + 10.0;
  const double b_10_2 = a2_10 + 2.0;
  const double b_2_2 = a2_2 + 2.0;
  if (trace) trace->adders += 7;

  auto base = [&](int sq, int cst) {
    if (sq == 18) return cst == 18 ? b_18_18 : b_18_10;
    if (sq == 10) {
      if (cst == 18) return b_10_18;
      return cst == 10 ? b_10_10 : b_10_2;
    }
    return cst == 10 ? b_2_10 : b_2_2;  // sq == 2
  };
  auto alpha_multiple = [&](int coef) {
    const int mag = coef < 0 ? -coef : coef;
    double v = 0.0;
    switch (mag) {
      case 36: v = al_36; break;
      case 24: v = al_24; break;
      case 12: v = al_12; break;
      case 8: v = al_8; break;
      case 4: v = al_4; break;
      default: break;
    }
    return coef < 0 ? -v : v;
  };

  AcTables t;
  for (int ia = 0; ia < 4; ++ia)
    for (int ib = 0; ib < 4; ++ib) {
      const int a = kPam4Levels[ia];
      const int b = kPam4Levels[ib];
      const int row = ia * 4 + ib;
      const int sq = a * a + b * b;
      const int coef_a = 2 * b * (a - 3);  // exit to -3
      const int coef_c = 2 * b * (a - 1);  // exit to -1
      if (coef_a != 0) {
        t.A[row] = base(sq, b * b + 9) + alpha_multiple(coef_a);
        if (trace) trace->adders += 1;
      } else {
        t.A[row] = base(sq, b * b + 9);
      }
      if (coef_c != 0) {
        t.C[row] = base(sq, b * b + 1) + alpha_multiple(coef_c);
        if (trace) trace->adders += 1;
      } else {
        t.C[row] = base(sq, b * b + 1);
      }
    }
  return t;
}

BdTables build_bd(double alpha, double y_n, double y_np1, CostTrace* trace) {
  const double ay_n = alpha * y_n;
  const double ay_np1 = alpha * y_np1;
  if (trace) trace->var_mult += 2;
  const double m1 = y_n + ay_np1;
  if (trace) trace->adders += 1;
  const double m6 = 6.0 * m1;
  const double n6 = 6.0 * ay_n;
  const double j6 = 6.0 * y_np1;
  if (trace) trace->const_mult += 3;
  const double m2 = 2.0 * m1;  // shifts
  const double n2 = 2.0 * ay_n;
  const double k2 = 2.0 * y_np1;

  // Entry-state component plus the shared tail terms 6*y_np1 (exit -3) and
  // 2*y_np1 (exit -1), four values each.
  const double nterm[4] = {n6, n2, -n2, -n6};
  double nj[4], nk[4];
  for (int ia = 0; ia < 4; ++ia) {
    nj[ia] = nterm[ia] + j6;
    nk[ia] = nterm[ia] + k2;
  }
  if (trace) trace->adders += 8;

  const double mterm[4] = {m6, m2, -m2, -m6};
  BdTables t;
  for (int ia = 0; ia < 4; ++ia)
    for (int ib = 0; ib < 4; ++ib) {
      t.B[ia * 4 + ib] = mterm[ib] + nj[ia];
      t.D[ia * 4 + ib] = mterm[ib] + nk[ia];
    }
  if (trace) trace->adders += 32;
  return t;
}

AbcdTables build_abcd(double alpha, double y_n, double y_np1, CostTrace* trace) {
  const AcTables ac = build_ac(alpha, trace);
  const BdTables bd = build_bd(alpha, y_n, y_np1, trace);
  AbcdTables t;
  t.A = ac.A;
  t.C = ac.C;
  t.B = bd.B;
  t.D = bd.D;
  return t;
}

std::array<double, 8> build_e(double alpha, CostTrace* trace) {
  const double a2 = alpha * alpha;
  const double e9 = 9.0 * a2;
  const double al_6 = 6.0 * alpha;
  const double al_18 = 18.0 * alpha;
  if (trace) {
    trace->var_mult += 1;
    trace->const_mult += 3;
  }
  const double al_2 = 2.0 * alpha;  // shift
  const double b_9_9 = e9 + 9.0;
  const double b_1_9 = a2 + 9.0;
  const double b_9_1 = e9 + 1.0;
  const double b_1_1 = a2 + 1.0;
  if (trace) trace->adders += 4;
  const std::array<double, 8> e{
      b_9_9 + al_18, b_1_9 + al_6, b_1_9 - al_6, b_9_9 - al_18,
      b_9_1 + al_6,  b_1_1 + al_2, b_1_1 - al_2, b_9_1 - al_6,
  };
  if (trace) trace->adders += 8;
  return e;
}

std::array<double, 8> build_f(double alpha, double y, CostTrace* trace) {
  const double ay = alpha * y;
  if (trace) trace->var_mult += 1;
  const double f6a = 6.0 * ay;
  const double f6y = 6.0 * y;
  if (trace) trace->const_mult += 2;
  const double f2a = 2.0 * ay;  // shifts
  const double f2y = 2.0 * y;
  const std::array<double, 8> f{
      f6y + f6a, f6y + f2a, f6y - f2a, f6y - f6a,
      f2y + f6a, f2y + f2a, f2y - f2a, f2y - f6a,
  };
  if (trace) trace->adders += 8;
  return f;
}

RowRef abcd_row(int a, int b, int c) {
  const int row = 4 * pam4_index(a) + pam4_index(b);
  switch (c) {
    case -3: return {row, 1.0, true};
    case -1: return {row, 1.0, false};
    case 1: return {15 - row, -1.0, false};
    case 3: return {15 - row, -1.0, true};
  }
  throw std::invalid_argument("abcd_row: exit state must be a PAM4 level");
}

EfRowRef ef_row(int a, int b) {
  const int ia = pam4_index(a);
  switch (b) {
    case -3: return {ia, 1.0};
    case -1: return {4 + ia, 1.0};
    case 1: return {7 - ia, -1.0};
    case 3: return {3 - ia, -1.0};
  }
  throw std::invalid_argument("ef_row: target state must be a PAM4 level");
}

CandidateSet candidate_set(double d, int num_states) {
  if (!std::isfinite(d))
    throw std::invalid_argument("candidate_set: pre-decision must be finite");
  switch (num_states) {
    case 4:
      return full_pam4_set();
    case 3:
      return slice_pam4(d) <= -1 ? CandidateSet{{-3, -1, 1}, 3}
                                 : CandidateSet{{-1, 1, 3}, 3};
    case 2: {
      const int s = slice_pam4(d);
      if (s == -3) return CandidateSet{{-3, -1}, 2};
      if (s == 3) return CandidateSet{{1, 3}, 2};
      // Interior level: keep the nearer neighbor, rounding down on a tie.
      const int lo = s - 2, hi = s + 2;
      const int other = (d - lo) <= (hi - d) ? lo : hi;
      if (other < s) return CandidateSet{{static_cast<std::int8_t>(other),
                                          static_cast<std::int8_t>(s)}, 2};
      return CandidateSet{{static_cast<std::int8_t>(s),
                           static_cast<std::int8_t>(other)}, 2};
    }
  }
  throw std::invalid_argument("candidate_set: num_states must be 2, 3 or 4");
}

MetricTable eval_two_step_simplified(const AbcdTables& t,
                                     const CandidateSet& left,
                                     const CandidateSet& mid,
                                     const CandidateSet& right,
                                     int first_epoch, CostTrace* trace) {
  if (left.size < 1 || mid.size < 1 || right.size < 1)
    throw std::invalid_argument("eval_two_step_simplified: empty candidate set");
  MetricTable out;
  out.first_epoch = first_epoch;
  out.last_epoch = first_epoch + 2;
  out.left = left;
  out.right = right;
  for (int ia = 0; ia < left.size; ++ia)
    for (int ic = 0; ic < right.size; ++ic) {
      double best = kInf;
      int best_b = -1;
      for (int ib = 0; ib < mid.size; ++ib) {
        const RowRef rr = abcd_row(left.levels[ia], mid.levels[ib],
                                   right.levels[ic]);
        const double val = rr.uses_ab ? t.A[rr.row] + rr.sign * t.B[rr.row]
                                      : t.C[rr.row] + rr.sign * t.D[rr.row];
        if (val < best) {
          best = val;
          best_b = ib;
        }
      }
      out.entry[ia * right.size + ic] = best;
      out.mid[ia * right.size + ic] = mid.levels[best_b];
    }
  if (trace) {
    trace->adders += static_cast<long>(left.size) * mid.size * right.size;
    trace->comparators +=
        static_cast<long>(left.size) * right.size * (mid.size - 1);
  }
  return out;
}

namespace {

std::vector<CandidateSet> epoch_sets(const Block& blk,
                                     std::span<const double> pre,
                                     int num_states) {
  const std::size_t n = blk.samples.size();
  if (num_states == 4) {
    if (!pre.empty() && pre.size() != n + 1)
      throw std::invalid_argument("pre-decisions must hold one value per state epoch");
    return std::vector<CandidateSet>(n + 1, full_pam4_set());
  }
  if (num_states != 2 && num_states != 3)
    throw std::invalid_argument("num_states must be 2, 3 or 4");
  if (pre.size() != n + 1)
    throw std::invalid_argument(
        "reduced-state detection needs one pre-decision per state epoch");
  std::vector<CandidateSet> sets(n + 1);
  for (std::size_t i = 0; i <= n; ++i) sets[i] = candidate_set(pre[i], num_states);
  return sets;
}

}  // namespace

DetectionResult detect_block_1s_simplified(const Block& blk,
                                           std::span<const double> pre,
                                           double alpha, int num_states,
                                           CostTrace* trace) {
  const int n = static_cast<int>(blk.samples.size());
  if (n < 1)
    throw std::invalid_argument("detect_block_1s_simplified: empty block");
  const std::vector<CandidateSet> sets = epoch_sets(blk, pre, num_states);
  if (trace) trace->begin_block(n);
  const std::array<double, 8> e = build_e(alpha, trace);

  std::array<double, 4> pm{};  // indexed within sets[t]
  std::vector<std::array<std::int8_t, 4>> pred(n);
  for (int t = 0; t < n; ++t) {
    const std::array<double, 8> f = build_f(alpha, blk.samples[t], trace);
    std::array<double, 4> next{};
    for (int jb = 0; jb < sets[t + 1].size; ++jb) {
      const int b = sets[t + 1].levels[jb];
      double best = kInf;
      int best_i = -1;
      for (int ia = 0; ia < sets[t].size; ++ia) {
        const EfRowRef rr = ef_row(sets[t].levels[ia], b);
        const double val = e[rr.row] + rr.sign * f[rr.row];
        const double cand = t == 0 ? val : pm[ia] + val;
        if (cand < best) {
          best = cand;
          best_i = ia;
        }
      }
      next[jb] = best;
      pred[t][jb] = static_cast<std::int8_t>(best_i);
      if (trace) {
        trace->adders += sets[t].size * (t == 0 ? 1 : 2);
        trace->comparators += sets[t].size - 1;
      }
    }
    pm = next;
  }

  int best_j = 0;
  for (int j = 1; j < sets[n].size; ++j)
    if (pm[j] < pm[best_j]) best_j = j;
  if (trace) trace->comparators += sets[n].size - 1;

  DetectionResult result;
  result.survivor_metric = pm[best_j];
  result.decoded.resize(n + 1);
  int cur = best_j;
  for (int t = n; t-- > 0;) {
    result.decoded[t + 1] = sets[t + 1].levels[cur];
    cur = pred[t][cur];
  }
  result.decoded[0] = sets[0].levels[cur];
  return result;
}

DetectionResult detect_block_l2s_simplified(const Block& blk,
                                            std::span<const double> pre,
                                            double alpha, int num_states,
                                            CostTrace* trace) {
  const int n = static_cast<int>(blk.samples.size());
  if (n < 1)
    throw std::invalid_argument("detect_block_l2s_simplified: empty block");
  const std::vector<CandidateSet> sets = epoch_sets(blk, pre, num_states);
  if (trace) trace->begin_block(n);
  const AcTables ac = build_ac(alpha, trace);

  std::vector<MetricTable> leaves;
  leaves.reserve((n + 1) / 2);
  AbcdTables t;
  t.A = ac.A;
  t.C = ac.C;
  for (int k = 0; k + 1 < n; k += 2) {
    const BdTables bd = build_bd(alpha, blk.samples[k], blk.samples[k + 1], trace);
    t.B = bd.B;
    t.D = bd.D;
    leaves.push_back(
        eval_two_step_simplified(t, sets[k], sets[k + 1], sets[k + 2], k, trace));
  }
  if (n % 2 == 1) {
    // Odd tail: one-step table on the shared-term metrics.
    const std::array<double, 8> e = build_e(alpha, trace);
    const std::array<double, 8> f = build_f(alpha, blk.samples[n - 1], trace);
    MetricTable tail;
    tail.first_epoch = n - 1;
    tail.last_epoch = n;
    tail.left = sets[n - 1];
    tail.right = sets[n];
    for (int ia = 0; ia < tail.left.size; ++ia)
      for (int ic = 0; ic < tail.right.size; ++ic) {
        const EfRowRef rr = ef_row(tail.left.levels[ia], tail.right.levels[ic]);
        tail.entry[ia * tail.right.size + ic] = e[rr.row] + rr.sign * f[rr.row];
        tail.mid[ia * tail.right.size + ic] = kNoMid;
      }
    if (trace) trace->adders += static_cast<long>(tail.left.size) * tail.right.size;
    leaves.push_back(tail);
  }
  return reduce_leaves(std::move(leaves), n, trace);
}

}  // namespace mlse
