#include "mlse/signal_chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mlse {

std::vector<int> generate_prbs(std::uint32_t seed, std::size_t length) {
  std::uint32_t state = seed & 0x7fff;
  if (state == 0)
    throw std::invalid_argument("generate_prbs: seed must be nonzero in the low 15 bits");
  std::vector<int> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const int bit = (state >> 14) & 1;
    const std::uint32_t feedback = ((state >> 14) ^ (state >> 13)) & 1;
    state = ((state << 1) | feedback) & 0x7fff;
    out.push_back(bit);
  }
  return out;
}

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t j) {
  return static_cast<double>(mix64(seed + (j + 1) * kGamma) >> 11) * 0x1.0p-53;
}

}  // namespace

double gaussian_draw(std::uint64_t seed, std::uint64_t k) {
  const double u1 = uniform01(seed, 2 * k);
  const double u2 = uniform01(seed, 2 * k + 1);
  // 1 - u1 lies in (0, 1], so the log is finite.
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SampleFrame apply_channel(const SymbolFrame& symbols, const ChannelModel& model) {
  if (model.taps.empty())
    throw std::invalid_argument("apply_channel: channel needs at least one tap");
  if (!(model.noise_sigma >= 0.0))
    throw std::invalid_argument("apply_channel: noise_sigma must be >= 0");
  SampleFrame y(symbols.size());
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < model.taps.size() && k <= n; ++k)
      acc += model.taps[k] * symbols[n - k];
    if (model.noise_sigma > 0.0)
      acc += model.noise_sigma * gaussian_draw(model.noise_seed, n);
    y[n] = acc;
  }
  return y;
}

FfeState make_ffe(int num_taps, double step_size) {
  if (num_taps < 1 || num_taps % 2 == 0)
    throw std::invalid_argument("make_ffe: tap count must be odd and positive");
  FfeState state;
  state.taps.assign(num_taps, 0.0);
  state.taps[num_taps / 2] = 1.0;
  state.step_size = step_size;
  return state;
}

namespace {

double ffe_output_at(const std::vector<double>& taps, const SampleFrame& r, long n) {
  const long center = static_cast<long>(taps.size()) / 2;
  double acc = 0.0;
  for (long j = 0; j < static_cast<long>(taps.size()); ++j) {
    const long idx = n + center - j;
    if (idx >= 0 && idx < static_cast<long>(r.size()))
      acc += taps[j] * r[idx];
  }
  return acc;
}

}  // namespace

FfeState lms_ffe_train(const SymbolFrame& train_symbols, const SampleFrame& received,
                       FfeState state, int epochs, LmsReport* report) {
  if (state.taps.empty() || state.taps.size() % 2 == 0)
    throw std::invalid_argument("lms_ffe_train: tap count must be odd and positive");
  if (received.size() < train_symbols.size())
    throw std::invalid_argument("lms_ffe_train: received frame shorter than training frame");
  if (state.taps.size() > train_symbols.size())
    throw std::invalid_argument("lms_ffe_train: more taps than training symbols");
  if (epochs < 0)
    throw std::invalid_argument("lms_ffe_train: epochs must be >= 0");

  const long center = static_cast<long>(state.taps.size()) / 2;
  const long train_len = static_cast<long>(train_symbols.size());
  if (report) {
    report->epoch_mse.clear();
    report->diverged = false;
  }

  for (int e = 0; e < epochs; ++e) {
    double se = 0.0;
    for (long n = 0; n < train_len; ++n) {
      const double out = ffe_output_at(state.taps, received, n);
      const double err = train_symbols[n] - out;
      if (!std::isfinite(err)) {
        if (report) report->diverged = true;
        state.trained = false;
        return state;
      }
      se += err * err;
      for (long j = 0; j < static_cast<long>(state.taps.size()); ++j) {
        const long idx = n + center - j;
        if (idx >= 0 && idx < static_cast<long>(received.size()))
          state.taps[j] += state.step_size * err * received[idx];
      }
    }
    if (report) report->epoch_mse.push_back(se / static_cast<double>(train_len));
  }
  for (double t : state.taps) {
    if (!std::isfinite(t)) {
      if (report) report->diverged = true;
      state.trained = false;
      return state;
    }
  }
  state.trained = true;
  return state;
}

SampleFrame ffe_apply(const FfeState& state, const SampleFrame& received) {
  if (state.taps.empty() || state.taps.size() % 2 == 0)
    throw std::invalid_argument("ffe_apply: tap count must be odd and positive");
  SampleFrame out(received.size());
  for (long n = 0; n < static_cast<long>(received.size()); ++n)
    out[n] = ffe_output_at(state.taps, received, n);
  return out;
}

SampleFrame post_filter(const SampleFrame& x, double alpha) {
  SampleFrame y(x.size());
  double prev = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y[n] = x[n] + alpha * prev;
    prev = x[n];
  }
  return y;
}

SampleFrame invert_post_filter(const SampleFrame& y, double alpha) {
  SampleFrame x(y.size());
  double prev = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    x[n] = y[n] - alpha * prev;
    prev = x[n];
  }
  return x;
}

}  // namespace mlse
