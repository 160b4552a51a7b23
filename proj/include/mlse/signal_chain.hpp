#pragma once

#include <cstdint>
#include <vector>

#include "mlse/pam4.hpp"

namespace mlse {

// PRBS-15 bit generator (x^15 + x^14 + 1, Fibonacci form). The 15-bit state
// is seeded from the low bits of `seed`; an all-zero state is rejected. The
// sequence repeats with period 2^15 - 1 and carries 2^14 ones per period.
std::vector<int> generate_prbs(std::uint32_t seed, std::size_t length);

// k-th draw of the unit-variance Gaussian stream identified by `seed`.
// Draw j of the underlying uniform stream is
//   u_j = mix64(seed + (j + 1) * 0x9e3779b97f4a7c15) * 2^-64  in [0, 1)
// with mix64 the SplitMix64 finalizer, and
//   z_k = sqrt(-2 ln(1 - u_{2k})) * cos(2 pi u_{2k+1}).
// Each draw depends only on (seed, k), so noise is reproducible regardless
// of evaluation order or thread count.
double gaussian_draw(std::uint64_t seed, std::uint64_t k);

struct ChannelModel {
  std::vector<double> taps;   // FIR response, taps[0] applies to the newest symbol
  double noise_sigma = 0.0;   // additive white Gaussian noise, std deviation
  std::uint64_t noise_seed = 1;
};

// y_n = sum_k taps[k] * s_{n-k} + sigma * z_n, with s_m = 0 for m < 0.
// Output length equals input length.
SampleFrame apply_channel(const SymbolFrame& symbols, const ChannelModel& model);

struct FfeState {
  std::vector<double> taps;   // odd count; output is referenced to the center tap
  double step_size = 1e-3;
  bool trained = false;
};

// Fresh equalizer with a unit spike at the center tap.
FfeState make_ffe(int num_taps, double step_size);

struct LmsReport {
  std::vector<double> epoch_mse;  // mean squared symbol error per training pass
  bool diverged = false;
};

// LMS training against known symbols. Runs `epochs` passes over the first
// train_symbols.size() samples; a non-finite tap aborts training and reports
// divergence (the returned state keeps trained == false).
FfeState lms_ffe_train(const SymbolFrame& train_symbols, const SampleFrame& received,
                       FfeState state, int epochs, LmsReport* report = nullptr);

// x_n = sum_j taps[j] * r_{n + center - j}, out-of-range samples read as 0.
SampleFrame ffe_apply(const FfeState& state, const SampleFrame& received);

// Two-tap ISI shaper: y_n = x_n + alpha * x_{n-1}, x_{-1} = 0.
SampleFrame post_filter(const SampleFrame& x, double alpha);

// Inverse of post_filter: x_n = y_n - alpha * x_{n-1}.
SampleFrame invert_post_filter(const SampleFrame& y, double alpha);

}  // namespace mlse
