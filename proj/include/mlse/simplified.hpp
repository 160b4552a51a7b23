#pragma once

#include <array>
#include <span>

#include "mlse/l2s.hpp"

namespace mlse {

// Shared-term decomposition of the two-step path metric
//   BM(y_n; a, b) + BM(y_np1; b, c) - y_n^2 - y_np1^2
// split into a part that depends only on alpha (A for exits to -3, C for
// exits to -1) and a part linear in the samples (B, D). Rows are indexed by
// the entry pair: row(a, b) = 4 * pam4_index(a) + pam4_index(b). Exits to
// +1 and +3 reuse the -1 / -3 rows through the sign symmetry
// value(a, b, c) = value(-a, -b, -c) with the sample part negated, i.e.
// row 15 - row(a, b) with a minus sign on B or D.
struct AcTables {
  std::array<double, 16> A{}, C{};
};
struct BdTables {
  std::array<double, 16> B{}, D{};
};
struct AbcdTables {
  std::array<double, 16> A{}, B{}, C{}, D{};
};

// Alpha-only vectors, built once per block: one variable multiplier (a^2),
// constants 10a^2, 18a^2, 12a, 36a, and 31 adders.
AcTables build_ac(double alpha, CostTrace* trace = nullptr);

// Sample-dependent vectors for one (y_n, y_np1) pair: variable products
// a*y_n and a*y_np1, constants 6*m1, 6*a*y_n, 6*y_np1 with
// m1 = y_n + a*y_np1, and 41 adders. Every remaining product is a shift.
BdTables build_bd(double alpha, double y_n, double y_np1,
                  CostTrace* trace = nullptr);

AbcdTables build_abcd(double alpha, double y_n, double y_np1,
                      CostTrace* trace = nullptr);

// One-step analogue for BM(y; a, b) - y^2: alpha-only part E (rows
// 4 * idx2(b) + pam4_index(a) for b in {-3, -1}), sample part F. b in
// {1, 3} mirrors rows 7 - idx(a) and 3 - idx(a) with F negated.
std::array<double, 8> build_e(double alpha, CostTrace* trace = nullptr);
std::array<double, 8> build_f(double alpha, double y, CostTrace* trace = nullptr);

struct RowRef {
  int row;
  double sign;    // applied to the sample-dependent part
  bool uses_ab;   // true: A/B pair, false: C/D pair
};
RowRef abcd_row(int a, int b, int c);

struct EfRowRef {
  int row;
  double sign;
};
EfRowRef ef_row(int a, int b);

// Candidate levels around a real-valued pre-decision d. Sizes:
//   4 -> the full alphabet;
//   3 -> {-3,-1,1} when d slices negative, {-1,1,3} otherwise;
//   2 -> the sliced level and its nearest neighbor by |level - d|
//        (respecting the slicer's round-down tie rule), always an
//        adjacent pair.
CandidateSet candidate_set(double d, int num_states);

// Two-step table over restricted state sets, evaluated from the shared-term
// vectors. Entries carry the -(y_n^2 + y_np1^2) offset of the tables.
MetricTable eval_two_step_simplified(const AbcdTables& t,
                                     const CandidateSet& left,
                                     const CandidateSet& mid,
                                     const CandidateSet& right,
                                     int first_epoch = 0,
                                     CostTrace* trace = nullptr);

// One-step and layered detectors on the shared-term metrics. `pre` holds
// one pre-decision value per block state epoch (samples.size() + 1 entries,
// out-of-frame epochs 0); it may be empty when num_states == 4.
// survivor_metric carries the -sum(y^2) offset relative to the unsimplified
// detectors, with identical decisions.
DetectionResult detect_block_1s_simplified(const Block& blk,
                                           std::span<const double> pre,
                                           double alpha, int num_states,
                                           CostTrace* trace = nullptr);
DetectionResult detect_block_l2s_simplified(const Block& blk,
                                            std::span<const double> pre,
                                            double alpha, int num_states,
                                            CostTrace* trace = nullptr);

}  // namespace mlse
