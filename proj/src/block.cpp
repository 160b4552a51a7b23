#include "mlse/block.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mlse/l2s.hpp"
#include "mlse/simplified.hpp"

namespace mlse {

void BlockConfig::validate() const {
  if (data_len < 1)
    throw std::invalid_argument("BlockConfig: data_len must be >= 1");
  if (overlap < 0)
    throw std::invalid_argument("BlockConfig: overlap must be >= 0");
}

std::vector<Block> segment_frame(const SampleFrame& y, const BlockConfig& cfg) {
  cfg.validate();
  const long frame = static_cast<long>(y.size());
  const long n = cfg.total();
  std::vector<Block> blocks;
  if (frame == 0) return blocks;
  const long count = (frame + cfg.data_len - 1) / cfg.data_len;
  blocks.reserve(count);
  for (long b = 0; b < count; ++b) {
    Block blk;
    blk.frame_offset = b * cfg.data_len;
    const long start = blk.frame_offset - cfg.overlap;
    blk.samples.assign(n, 0.0);
    for (long i = 0; i < n; ++i) {
      const long src = start + i;
      if (src >= 0 && src < frame) blk.samples[i] = y[src];
    }
    blk.pre_pad = static_cast<int>(std::max(0L, -start));
    blk.post_pad = static_cast<int>(std::max(0L, start + n - frame));
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

DetectionResult detect_block_1s(const Block& blk, double alpha,
                                CostTrace* trace) {
  const int n = static_cast<int>(blk.samples.size());
  if (n < 1) throw std::invalid_argument("detect_block_1s: empty block");
  if (trace) trace->begin_block(n);

  // References alpha * a + b, shared by every step of the block: one 3a
  // product, the power-of-two multiples are shifts, 16 adds.
  double ref[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      ref[i][j] = alpha * kPam4Levels[i] + kPam4Levels[j];
  if (trace) {
    trace->const_mult += 1;
    trace->adders += 16;
  }

  std::array<double, 4> pm{};
  std::vector<std::array<std::int8_t, 4>> pred(n);
  for (int t = 0; t < n; ++t) {
    const double y = blk.samples[t];
    double bm[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double d = y - ref[i][j];
        bm[i][j] = d * d;
      }
    if (trace) {
      trace->adders += 16;
      trace->var_mult += 16;
    }
    std::array<double, 4> next{};
    for (int j = 0; j < 4; ++j) {
      double best = std::numeric_limits<double>::infinity();
      int best_i = -1;
      for (int i = 0; i < 4; ++i) {
        const double cand = t == 0 ? bm[i][j] : pm[i] + bm[i][j];
        if (cand < best) {
          best = cand;
          best_i = i;
        }
      }
      next[j] = best;
      pred[t][j] = static_cast<std::int8_t>(best_i);
    }
    if (trace) {
      if (t > 0) trace->adders += 16;
      trace->comparators += 12;
    }
    pm = next;
  }

  int best_j = 0;
  for (int j = 1; j < 4; ++j)
    if (pm[j] < pm[best_j]) best_j = j;
  if (trace) trace->comparators += 3;

  DetectionResult result;
  result.survivor_metric = pm[best_j];
  result.decoded.resize(n + 1);
  int cur = best_j;
  for (int t = n; t-- > 0;) {
    result.decoded[t + 1] = kPam4Levels[cur];
    cur = pred[t][cur];
  }
  result.decoded[0] = kPam4Levels[cur];
  return result;
}

namespace {

// Pre-decision values aligned to the block's state epochs: epoch i holds the
// value for frame symbol frame_offset - overlap + i - 1, or 0 outside the
// frame.
std::vector<double> epoch_pre_decisions(const Block& blk, int overlap,
                                        const SampleFrame& pre) {
  const long n = static_cast<long>(blk.samples.size());
  std::vector<double> out(n + 1, 0.0);
  const long start = blk.frame_offset - overlap;
  for (long i = 0; i <= n; ++i) {
    const long src = start + i - 1;
    if (src >= 0 && src < static_cast<long>(pre.size())) out[i] = pre[src];
  }
  return out;
}

void run_indexed(long count, int workers, const std::function<void(long)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const int used = static_cast<int>(std::min<long>(workers, count));
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (long i = w; i < count; i += used) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

SymbolFrame detect_frame(const SampleFrame& y, double alpha,
                         const BlockConfig& cfg, DetectorKind kind,
                         const DetectOptions& opt) {
  cfg.validate();
  if (opt.workers < 1)
    throw std::invalid_argument("detect_frame: workers must be >= 1");
  const bool simplified = kind == DetectorKind::OneStepSimplified ||
                          kind == DetectorKind::L2sSimplified;
  if (opt.num_states != 4) {
    if (!simplified)
      throw std::invalid_argument(
          "detect_frame: state reduction applies to the simplified detectors only");
    if (opt.pre_decisions == nullptr)
      throw std::invalid_argument(
          "detect_frame: reduced-state detection needs pre_decisions");
    if (opt.pre_decisions->size() != y.size())
      throw std::invalid_argument(
          "detect_frame: pre_decisions must match the frame length");
  }

  const std::vector<Block> blocks = segment_frame(y, cfg);
  SymbolFrame decoded(y.size(), 0);
  const long frame = static_cast<long>(y.size());

  run_indexed(static_cast<long>(blocks.size()), opt.workers, [&](long bi) {
    const Block& blk = blocks[bi];
    DetectionResult res;
    switch (kind) {
      case DetectorKind::OneStep:
        res = detect_block_1s(blk, alpha);
        break;
      case DetectorKind::L2s:
        res = detect_block_l2s(blk, alpha);
        break;
      case DetectorKind::OneStepSimplified:
      case DetectorKind::L2sSimplified: {
        std::vector<double> pre_epochs;
        std::span<const double> pre;
        if (opt.num_states != 4) {
          pre_epochs = epoch_pre_decisions(blk, cfg.overlap, *opt.pre_decisions);
          pre = pre_epochs;
        }
        res = kind == DetectorKind::OneStepSimplified
                  ? detect_block_1s_simplified(blk, pre, alpha, opt.num_states)
                  : detect_block_l2s_simplified(blk, pre, alpha, opt.num_states);
        break;
      }
    }
    // Data-region states sit at epochs overlap + 1 .. overlap + data_len.
    for (int k = 0; k < cfg.data_len; ++k) {
      const long dst = blk.frame_offset + k;
      if (dst < frame) decoded[dst] = res.decoded[cfg.overlap + 1 + k];
    }
  });
  return decoded;
}

}  // namespace mlse
