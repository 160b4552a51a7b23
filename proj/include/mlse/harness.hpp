#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlse/block.hpp"
#include "mlse/costmodel.hpp"
#include "mlse/signal_chain.hpp"

namespace mlse::harness {

enum class ChainMode { DirectIsi, FullFfeChain };

const char* chain_mode_name(ChainMode m);
ChainMode parse_chain_mode(const std::string& name);

// One experiment grid: every (sigma, seed) pair runs a fresh frame.
struct ExperimentConfig {
  Variant variant = Variant::OneStep;
  int num_states = 4;
  double alpha = 0.55;          // detection alpha
  double channel_alpha = -1.0;  // ISI tap of the generated channel; < 0 -> alpha
  BlockConfig block{8, 16};
  long frame_symbols = 100000;
  std::vector<double> sigmas{0.38};
  std::vector<std::uint64_t> seeds{1};
  ChainMode chain_mode = ChainMode::DirectIsi;
  std::string output_path;  // empty: no files written
  int workers = 1;

  // Full-chain knobs (chain_mode == FullFfeChain).
  std::vector<double> channel_taps{1.0, 0.45, 0.15};
  int ffe_taps = 15;
  double ffe_step = 1e-3;
  int ffe_epochs = 5;
  int train_symbols = 1000;

  double effective_channel_alpha() const {
    return channel_alpha < 0.0 ? alpha : channel_alpha;
  }
  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Transmitted data and the received/equalized observations for one frame.
struct FrameData {
  SymbolFrame tx;
  std::vector<int> tx_bits;
  SampleFrame y;    // post-filter-domain samples the detectors consume
  SampleFrame pre;  // slicer-domain samples (pre-decision source)
};

// Deterministic per-frame seed for grid point (seed, sigma index).
std::uint64_t frame_seed_for(std::uint64_t seed, int sigma_index);

// Builds one frame. DirectIsi: y = s * [1, a*] + noise, pre = inverse
// post-filter of y. FullFfeChain: r = s * channel_taps + noise, FFE trained
// on the frame head, pre = FFE output, y = post_filter(pre, alpha).
FrameData make_frame(const ExperimentConfig& cfg, double sigma,
                     std::uint64_t frame_seed);

// Runs cfg.variant / cfg.num_states over the frame.
SymbolFrame run_detector(const ExperimentConfig& cfg, const FrameData& frame);

struct BerRecord {
  Variant variant;
  int num_states;
  double alpha;
  int overlap;
  int data_len;
  double sigma;
  std::uint64_t seed;
  long symbols;
  long bit_errors;
  long bits;
  double ber;
  long symbol_errors;
};

// One record per (sigma, seed). Writes <output_path> plus a companion plot
// script when output_path is set.
std::vector<BerRecord> run_ber(const ExperimentConfig& cfg);

struct EquivFrame {
  double sigma;
  std::uint64_t seed;
  long symbols;
  long mismatches;
  double metric_test;  // re-summed sequence metric of the test decoding
  double metric_ref;
  bool tie;  // metrics agree within 1e-9: mismatches are tie artifacts
};
struct EquivReport {
  std::vector<EquivFrame> frames;
  long symbols = 0;
  long mismatches = 0;
};

// Decodes every frame with cfg.variant and with the reference variant and
// counts per-symbol disagreements.
EquivReport run_equiv(const ExperimentConfig& cfg, Variant reference,
                      int reference_states);

struct ComplexityRow {
  std::string variant;
  int n;
  ResourceCounts counts;
  int latency;
};

// Static rows per (variant, N); with `instrument`, a second "<name>/measured"
// row per pair carries instrumented counts from one random block (the
// latency column repeats the model value).
std::vector<ComplexityRow> run_complexity(const std::vector<Variant>& variants,
                                          const std::vector<int>& lengths,
                                          bool instrument);

enum class SweepParam { Alpha, Overlap, States };

SweepParam parse_sweep_param(const std::string& name);

struct MismatchRecord {
  int overlap;
  double sigma;
  std::uint64_t seed;
  long symbols;
  long mismatches;
};

struct SweepResult {
  std::vector<BerRecord> ber;
  // Overlap sweeps only: disagreement against the serial detector.
  std::vector<MismatchRecord> mismatch;
};

// BER grid with one config field swept. Overlap sweeps additionally compare
// each parallel decoding against viterbi_detect_serial on the same frame.
SweepResult run_sweep(const ExperimentConfig& cfg, SweepParam param,
                      const std::vector<double>& values);

// CSV renderers (header included; fixed formats, so identical inputs give
// identical bytes).
std::string ber_csv(const std::vector<BerRecord>& rows);
std::string complexity_csv(const std::vector<ComplexityRow>& rows);
std::string mismatch_csv(const std::vector<MismatchRecord>& rows, int data_len);
std::string equiv_text(const EquivReport& report);

// Writes `text` to path and, for CSV outputs, drops a matching matplotlib
// script next to it.
void write_output(const std::string& path, const std::string& text);
void write_plot_script(const std::string& csv_path, const std::string& kind);

}  // namespace mlse::harness
