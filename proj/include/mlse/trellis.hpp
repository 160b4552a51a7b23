#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "mlse/pam4.hpp"

namespace mlse {

// Squared-error branch metric for the two-tap channel [1, alpha]:
// |y - (alpha * s_prev + s_cur)|^2.
double branch_metric(double y, double alpha, int s_prev, int s_cur);

// General-L form: |y - sum_k coeffs[k] * states[k]|^2 with states[k] the
// symbol k steps in the past (states[0] is the current symbol).
double branch_metric_general(double y, std::span<const double> coeffs,
                             std::span<const int> states);

// Path metrics over the four PAM4 states after some number of trellis steps.
// predecessor[i] is the pam4_index of the surviving previous state feeding
// state i (-1 before any step has run).
struct PathMetrics {
  std::array<double, 4> metric{};
  std::array<std::int8_t, 4> predecessor{-1, -1, -1, -1};
};

// One add-compare-select update. Ties select the smaller predecessor level.
PathMetrics acs_step(const PathMetrics& prev, double y, double alpha);

struct DetectionResult {
  SymbolFrame decoded;
  double survivor_metric = 0.0;
};

// Serial sliding-block Viterbi. Each pass covers data_len symbols plus
// `overlap` post-cursor samples; path metrics at the data boundary carry
// into the next pass, so the metric recursion matches a single full-frame
// Viterbi exactly. decoded holds one symbol per input sample;
// survivor_metric re-sums the branch metrics along the decoded sequence
// (initial state free).
DetectionResult viterbi_detect_serial(const SampleFrame& y, double alpha,
                                      int data_len, int overlap);

enum class Boundary { FreeInitial, FixedInitial };

// Exhaustive minimization over all 4^T symbol sequences, T = y.size()
// (capped at 12). Ties resolve to the lexicographically smallest sequence in
// level order. With Boundary::FreeInitial the metric of a sequence is
// minimized over the virtual state preceding it; FixedInitial pins that
// state to `fixed_initial`. If num_optimal is given it receives the number
// of sequences whose metric falls within 1e-12 (relative) of the minimum.
DetectionResult brute_force_detect(const SampleFrame& y, double alpha,
                                   Boundary boundary = Boundary::FreeInitial,
                                   int fixed_initial = -3,
                                   int* num_optimal = nullptr);

// Metric of a fixed state path. `states` holds y.size() + 1 entries, the
// leading one being the state before the first sample.
double path_metric(std::span<const double> y, double alpha,
                   std::span<const int> states);

// Same with the leading state minimized out; `symbols` holds y.size() entries.
double path_metric_free_start(std::span<const double> y, double alpha,
                              std::span<const int> symbols);

}  // namespace mlse
