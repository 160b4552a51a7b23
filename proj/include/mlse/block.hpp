#pragma once

#include <vector>

#include "mlse/costmodel.hpp"
#include "mlse/trellis.hpp"

namespace mlse {

// Sliding-block geometry: each block spans `overlap` pre-cursor samples,
// data_len data samples and `overlap` post-cursor samples. Consecutive data
// regions tile the frame with stride data_len.
struct BlockConfig {
  int overlap = 8;    // O
  int data_len = 16;  // R

  int total() const { return 2 * overlap + data_len; }  // N
  void validate() const;
};

struct Block {
  SampleFrame samples;  // length N; out-of-frame positions are zero-filled
  int pre_pad = 0;      // leading zero-filled samples
  int post_pad = 0;     // trailing zero-filled samples
  long frame_offset = 0;  // frame index of the first data symbol
};

// Cuts a frame into ceil(frame / data_len) blocks. Data regions partition
// the frame; overlap zones and any tail beyond the frame are zero-filled and
// recorded in pre_pad / post_pad.
std::vector<Block> segment_frame(const SampleFrame& y, const BlockConfig& cfg);

// Free-boundary Viterbi over one block. decoded holds N + 1 states (the
// leading entry is the chosen state before the first sample);
// survivor_metric is the smallest final path metric, which for a single
// block equals the global sequence minimum. Pass a CostTrace to count
// hardware operations for the block.
DetectionResult detect_block_1s(const Block& blk, double alpha,
                                CostTrace* trace = nullptr);

enum class DetectorKind { OneStep, L2s, OneStepSimplified, L2sSimplified };

struct DetectOptions {
  int num_states = 4;  // candidate-set size for the simplified detectors
  // Per frame index, the equalized sample feeding the slicer; required when
  // num_states < 4. Block epochs outside the frame use 0.
  const SampleFrame* pre_decisions = nullptr;
  int workers = 1;  // blocks processed concurrently; output is identical for any value
};

// Runs the chosen detector over every block and concatenates the data-region
// decisions. Output holds exactly one symbol per input sample and does not
// depend on worker count or scheduling.
SymbolFrame detect_frame(const SampleFrame& y, double alpha,
                         const BlockConfig& cfg, DetectorKind kind,
                         const DetectOptions& opt = {});

}  // namespace mlse
