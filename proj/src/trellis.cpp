#include "mlse/trellis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mlse {

double branch_metric(double y, double alpha, int s_prev, int s_cur) {
  if (!is_pam4_level(s_prev) || !is_pam4_level(s_cur))
    throw std::invalid_argument("branch_metric: states must be PAM4 levels");
  const double d = y - (alpha * s_prev + s_cur);
  return d * d;
}

double branch_metric_general(double y, std::span<const double> coeffs,
                             std::span<const int> states) {
  if (coeffs.empty() || coeffs.size() != states.size())
    throw std::invalid_argument("branch_metric_general: need one coefficient per state");
  double ref = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!is_pam4_level(states[k]))
      throw std::invalid_argument("branch_metric_general: states must be PAM4 levels");
    ref += coeffs[k] * states[k];
  }
  const double d = y - ref;
  return d * d;
}

PathMetrics acs_step(const PathMetrics& prev, double y, double alpha) {
  PathMetrics next;
  for (int j = 0; j < 4; ++j) {
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (int i = 0; i < 4; ++i) {
      const double d = y - (alpha * kPam4Levels[i] + kPam4Levels[j]);
      const double cand = prev.metric[i] + d * d;
      if (cand < best) {
        best = cand;
        best_i = i;
      }
    }
    next.metric[j] = best;
    next.predecessor[j] = static_cast<std::int8_t>(best_i);
  }
  return next;
}

double path_metric(std::span<const double> y, double alpha,
                   std::span<const int> states) {
  if (states.size() != y.size() + 1)
    throw std::invalid_argument("path_metric: need y.size() + 1 states");
  double acc = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n)
    acc += branch_metric(y[n], alpha, states[n], states[n + 1]);
  return acc;
}

double path_metric_free_start(std::span<const double> y, double alpha,
                              std::span<const int> symbols) {
  if (symbols.size() != y.size())
    throw std::invalid_argument("path_metric_free_start: need one symbol per sample");
  if (y.empty()) return 0.0;
  double first = std::numeric_limits<double>::infinity();
  for (int v : kPam4Levels)
    first = std::min(first, branch_metric(y[0], alpha, v, symbols[0]));
  double acc = first;
  for (std::size_t n = 1; n < y.size(); ++n)
    acc += branch_metric(y[n], alpha, symbols[n - 1], symbols[n]);
  return acc;
}

namespace {

// Viterbi over y[lo, hi) with stored predecessors. pm is carried in and out;
// pm_at_data_end captures the metrics after `data_len` steps when the range
// is longer than that.
struct SpanDecode {
  std::vector<int> states;  // one per sample in [lo, hi)
  PathMetrics final_pm;
  PathMetrics pm_at_data_end;
  bool have_data_end = false;
};

SpanDecode viterbi_span(const SampleFrame& y, double alpha, std::size_t lo,
                        std::size_t hi, const PathMetrics& start, int data_len) {
  const std::size_t steps = hi - lo;
  std::vector<std::array<std::int8_t, 4>> pred(steps);
  PathMetrics pm = start;
  SpanDecode out;
  for (std::size_t n = 0; n < steps; ++n) {
    pm = acs_step(pm, y[lo + n], alpha);
    pred[n] = {pm.predecessor[0], pm.predecessor[1], pm.predecessor[2],
               pm.predecessor[3]};
    if (static_cast<int>(n + 1) == data_len) {
      out.pm_at_data_end = pm;
      out.have_data_end = true;
    }
  }
  int best = 0;
  for (int j = 1; j < 4; ++j)
    if (pm.metric[j] < pm.metric[best]) best = j;
  out.states.resize(steps);
  int cur = best;
  for (std::size_t n = steps; n-- > 0;) {
    out.states[n] = kPam4Levels[cur];
    cur = pred[n][cur];
  }
  out.final_pm = pm;
  return out;
}

}  // namespace

DetectionResult viterbi_detect_serial(const SampleFrame& y, double alpha,
                                      int data_len, int overlap) {
  if (data_len < 1)
    throw std::invalid_argument("viterbi_detect_serial: data_len must be >= 1");
  if (overlap < 0)
    throw std::invalid_argument("viterbi_detect_serial: overlap must be >= 0");

  DetectionResult result;
  result.decoded.reserve(y.size());
  PathMetrics pm;  // all-zero metrics before the first sample
  std::size_t pos = 0;
  while (pos < y.size()) {
    const std::size_t hi =
        std::min(y.size(), pos + static_cast<std::size_t>(data_len + overlap));
    SpanDecode dec = viterbi_span(y, alpha, pos, hi, pm, data_len);
    const std::size_t emit =
        std::min(static_cast<std::size_t>(data_len), hi - pos);
    for (std::size_t n = 0; n < emit; ++n)
      result.decoded.push_back(dec.states[n]);
    pm = dec.have_data_end ? dec.pm_at_data_end : dec.final_pm;
    pos += emit;
  }
  result.survivor_metric = path_metric_free_start(y, alpha, result.decoded);
  return result;
}

namespace {

constexpr std::size_t kBruteForceCap = 12;

double best_first_metric(double y0, double alpha, int s0, Boundary boundary,
                         int fixed_initial) {
  if (boundary == Boundary::FixedInitial)
    return branch_metric(y0, alpha, fixed_initial, s0);
  double best = std::numeric_limits<double>::infinity();
  for (int v : kPam4Levels)
    best = std::min(best, branch_metric(y0, alpha, v, s0));
  return best;
}

// Depth-first enumeration in level order, so the first sequence reaching the
// minimum is the lexicographically smallest one.
void enumerate(const SampleFrame& y, double alpha, Boundary boundary,
               int fixed_initial, std::size_t depth, double acc,
               std::vector<int>& prefix, double& best_metric,
               std::vector<int>& best_seq) {
  if (depth == y.size()) {
    if (acc < best_metric) {
      best_metric = acc;
      best_seq = prefix;
    }
    return;
  }
  for (int s : kPam4Levels) {
    const double step =
        depth == 0 ? best_first_metric(y[0], alpha, s, boundary, fixed_initial)
                   : branch_metric(y[depth], alpha, prefix[depth - 1], s);
    prefix.push_back(s);
    enumerate(y, alpha, boundary, fixed_initial, depth + 1, acc + step, prefix,
              best_metric, best_seq);
    prefix.pop_back();
  }
}

void count_near_optimal(const SampleFrame& y, double alpha, Boundary boundary,
                        int fixed_initial, std::size_t depth, double acc,
                        std::vector<int>& prefix, double threshold, int& count) {
  if (depth == y.size()) {
    if (acc <= threshold) ++count;
    return;
  }
  if (acc > threshold) return;  // metrics only grow
  for (int s : kPam4Levels) {
    const double step =
        depth == 0 ? best_first_metric(y[0], alpha, s, boundary, fixed_initial)
                   : branch_metric(y[depth], alpha, prefix[depth - 1], s);
    prefix.push_back(s);
    count_near_optimal(y, alpha, boundary, fixed_initial, depth + 1, acc + step,
                       prefix, threshold, count);
    prefix.pop_back();
  }
}

}  // namespace

DetectionResult brute_force_detect(const SampleFrame& y, double alpha,
                                   Boundary boundary, int fixed_initial,
                                   int* num_optimal) {
  if (y.size() > kBruteForceCap)
    throw std::invalid_argument("brute_force_detect: frame too long (cap 12)");
  if (boundary == Boundary::FixedInitial && !is_pam4_level(fixed_initial))
    throw std::invalid_argument("brute_force_detect: fixed initial state must be a PAM4 level");

  DetectionResult result;
  if (y.empty()) {
    if (num_optimal) *num_optimal = 1;
    return result;
  }
  double best_metric = std::numeric_limits<double>::infinity();
  std::vector<int> best_seq, prefix;
  prefix.reserve(y.size());
  enumerate(y, alpha, boundary, fixed_initial, 0, 0.0, prefix, best_metric,
            best_seq);
  result.decoded = best_seq;
  result.survivor_metric = best_metric;
  if (num_optimal) {
    const double threshold = best_metric + 1e-12 * std::max(1.0, best_metric);
    int count = 0;
    count_near_optimal(y, alpha, boundary, fixed_initial, 0, 0.0, prefix,
                       threshold, count);
    *num_optimal = count;
  }
  return result;
}

}  // namespace mlse
