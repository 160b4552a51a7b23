#include "mlse/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mlse/l2s.hpp"
#include "mlse/simplified.hpp"
#include "mlse/trellis.hpp"

namespace mlse::harness {

const char* chain_mode_name(ChainMode m) {
  return m == ChainMode::DirectIsi ? "direct-isi" : "full-ffe-chain";
}

ChainMode parse_chain_mode(const std::string& name) {
  if (name == "direct-isi") return ChainMode::DirectIsi;
  if (name == "full-ffe-chain") return ChainMode::FullFfeChain;
  throw std::invalid_argument("unknown chain_mode '" + name +
                              "' (expected direct-isi or full-ffe-chain)");
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha: must lie in (0, 1)");
  if (channel_alpha >= 0.0 && !(channel_alpha > 0.0 && channel_alpha < 1.0))
    throw std::invalid_argument("channel_alpha: must lie in (0, 1)");
  if (num_states != 2 && num_states != 3 && num_states != 4)
    throw std::invalid_argument("states: must be 2, 3 or 4");
  if (num_states != 4 && !variant_is_simplified(variant))
    throw std::invalid_argument(
        "states: reduction applies to the simplified variants only");
  block.validate();
  if (frame_symbols < 1)
    throw std::invalid_argument("symbols: must be >= 1");
  if (sigmas.empty())
    throw std::invalid_argument("sigma: at least one value required");
  for (double s : sigmas)
    if (!(s > 0.0))
      throw std::invalid_argument("sigma: values must be > 0");
  if (seeds.empty())
    throw std::invalid_argument("seed: at least one value required");
  if (workers < 1)
    throw std::invalid_argument("workers: must be >= 1");
  if (chain_mode == ChainMode::FullFfeChain) {
    if (channel_taps.empty())
      throw std::invalid_argument("channel_taps: at least one tap required");
    if (ffe_taps < 1 || ffe_taps % 2 == 0)
      throw std::invalid_argument("ffe_taps: must be odd and positive");
    if (train_symbols < ffe_taps)
      throw std::invalid_argument("train_symbols: must be >= ffe_taps");
    if (train_symbols > frame_symbols)
      throw std::invalid_argument("train_symbols: must be <= symbols");
    if (ffe_epochs < 0)
      throw std::invalid_argument("ffe_epochs: must be >= 0");
  }
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

DetectorKind kind_of(Variant v) {
  switch (v) {
    case Variant::OneStep: return DetectorKind::OneStep;
    case Variant::OneStepSimplified: return DetectorKind::OneStepSimplified;
    case Variant::L2s: return DetectorKind::L2s;
    case Variant::L2sSimplified: return DetectorKind::L2sSimplified;
  }
  throw std::invalid_argument("unknown variant");
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_u64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t frame_seed_for(std::uint64_t seed, int sigma_index) {
  return mix64(seed + 0x9e3779b97f4a7c15ULL *
                          (static_cast<std::uint64_t>(sigma_index) + 1));
}

FrameData make_frame(const ExperimentConfig& cfg, double sigma,
                     std::uint64_t frame_seed) {
  FrameData frame;
  const std::uint32_t prbs_seed =
      static_cast<std::uint32_t>(mix64(frame_seed) % 32767) + 1;
  frame.tx_bits = generate_prbs(prbs_seed, 2 * cfg.frame_symbols);
  frame.tx = map_pam4(frame.tx_bits);

  if (cfg.chain_mode == ChainMode::DirectIsi) {
    ChannelModel model;
    model.taps = {1.0, cfg.effective_channel_alpha()};
    model.noise_sigma = sigma;
    model.noise_seed = frame_seed;
    frame.y = apply_channel(frame.tx, model);
    frame.pre = invert_post_filter(frame.y, cfg.alpha);
    return frame;
  }

  ChannelModel model;
  model.taps = cfg.channel_taps;
  model.noise_sigma = sigma;
  model.noise_seed = frame_seed;
  const SampleFrame received = apply_channel(frame.tx, model);
  SymbolFrame head(frame.tx.begin(), frame.tx.begin() + cfg.train_symbols);
  FfeState ffe = lms_ffe_train(head, received,
                               make_ffe(cfg.ffe_taps, cfg.ffe_step),
                               cfg.ffe_epochs);
  if (!ffe.trained)
    throw std::runtime_error("make_frame: FFE training diverged");
  frame.pre = ffe_apply(ffe, received);
  frame.y = post_filter(frame.pre, cfg.alpha);
  return frame;
}

SymbolFrame run_detector(const ExperimentConfig& cfg, const FrameData& frame) {
  DetectOptions opt;
  opt.num_states = cfg.num_states;
  opt.workers = cfg.workers;
  if (cfg.num_states != 4) opt.pre_decisions = &frame.pre;
  return detect_frame(frame.y, cfg.alpha, cfg.block, kind_of(cfg.variant), opt);
}

namespace {

BerRecord score_frame(const ExperimentConfig& cfg, const FrameData& frame,
                      const SymbolFrame& decoded, double sigma,
                      std::uint64_t seed) {
  BerRecord rec;
  rec.variant = cfg.variant;
  rec.num_states = cfg.num_states;
  rec.alpha = cfg.alpha;
  rec.overlap = cfg.block.overlap;
  rec.data_len = cfg.block.data_len;
  rec.sigma = sigma;
  rec.seed = seed;
  rec.symbols = static_cast<long>(frame.tx.size());
  rec.symbol_errors = 0;
  for (std::size_t i = 0; i < frame.tx.size(); ++i)
    if (decoded[i] != frame.tx[i]) ++rec.symbol_errors;
  const std::vector<int> rx_bits = demap_pam4(decoded);
  rec.bits = static_cast<long>(frame.tx_bits.size());
  rec.bit_errors = 0;
  for (std::size_t i = 0; i < frame.tx_bits.size(); ++i)
    if (rx_bits[i] != frame.tx_bits[i]) ++rec.bit_errors;
  rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits);
  return rec;
}

}  // namespace

std::vector<BerRecord> run_ber(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<BerRecord> rows;
  rows.reserve(cfg.sigmas.size() * cfg.seeds.size());
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si)
    for (std::uint64_t seed : cfg.seeds) {
      const FrameData frame = make_frame(
          cfg, cfg.sigmas[si], frame_seed_for(seed, static_cast<int>(si)));
      const SymbolFrame decoded = run_detector(cfg, frame);
      rows.push_back(score_frame(cfg, frame, decoded, cfg.sigmas[si], seed));
    }
  if (!cfg.output_path.empty()) {
    write_output(cfg.output_path, ber_csv(rows));
    write_plot_script(cfg.output_path, "ber");
  }
  return rows;
}

EquivReport run_equiv(const ExperimentConfig& cfg, Variant reference,
                      int reference_states) {
  cfg.validate();
  ExperimentConfig ref_cfg = cfg;
  ref_cfg.variant = reference;
  ref_cfg.num_states = reference_states;
  ref_cfg.output_path.clear();
  ref_cfg.validate();

  EquivReport report;
  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si)
    for (std::uint64_t seed : cfg.seeds) {
      const FrameData frame = make_frame(
          cfg, cfg.sigmas[si], frame_seed_for(seed, static_cast<int>(si)));
      const SymbolFrame a = run_detector(cfg, frame);
      const SymbolFrame b = run_detector(ref_cfg, frame);
      EquivFrame ef;
      ef.sigma = cfg.sigmas[si];
      ef.seed = seed;
      ef.symbols = static_cast<long>(frame.tx.size());
      ef.mismatches = 0;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++ef.mismatches;
      ef.metric_test = path_metric_free_start(frame.y, cfg.alpha, a);
      ef.metric_ref = path_metric_free_start(frame.y, cfg.alpha, b);
      const double gap = ef.metric_test - ef.metric_ref;
      ef.tie = std::fabs(gap) <= 1e-9 * std::max(1.0, std::fabs(ef.metric_ref));
      report.frames.push_back(ef);
      report.symbols += ef.symbols;
      report.mismatches += ef.mismatches;
    }
  if (!cfg.output_path.empty())
    write_output(cfg.output_path, equiv_text(report));
  return report;
}

std::vector<ComplexityRow> run_complexity(const std::vector<Variant>& variants,
                                          const std::vector<int>& lengths,
                                          bool instrument) {
  std::vector<ComplexityRow> rows;
  for (Variant v : variants)
    for (int n : lengths) {
      ComplexityRow row;
      row.variant = variant_name(v);
      row.n = n;
      row.counts = static_counts(v, n);
      row.latency = latency_units(v, n);
      rows.push_back(row);
      if (!instrument) continue;

      Block blk;
      blk.samples.resize(n);
      std::vector<double> pre(n + 1);
      const std::uint64_t seed = 0xc0ffee ^ static_cast<std::uint64_t>(n);
      for (int i = 0; i < n; ++i)
        blk.samples[i] = 2.0 * gaussian_draw(seed, i);
      for (int i = 0; i <= n; ++i)
        pre[i] = 2.0 * gaussian_draw(seed ^ 0xabcd, i);

      CostTrace trace;
      switch (v) {
        case Variant::OneStep:
          detect_block_1s(blk, 0.55, &trace);
          break;
        case Variant::L2s:
          detect_block_l2s(blk, 0.55, &trace);
          break;
        case Variant::OneStepSimplified:
          detect_block_1s_simplified(blk, pre, 0.55, 2, &trace);
          break;
        case Variant::L2sSimplified:
          detect_block_l2s_simplified(blk, pre, 0.55, 2, &trace);
          break;
      }
      ComplexityRow meas;
      meas.variant = std::string(variant_name(v)) + "/measured";
      meas.n = n;
      meas.counts = dynamic_counts(trace);
      meas.latency = row.latency;  // instrumentation does not time pipelines
      rows.push_back(meas);
    }
  return rows;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "alpha") return SweepParam::Alpha;
  if (name == "overlap") return SweepParam::Overlap;
  if (name == "states") return SweepParam::States;
  throw std::invalid_argument("unknown sweep parameter '" + name +
                              "' (expected alpha, overlap or states)");
}

SweepResult run_sweep(const ExperimentConfig& cfg, SweepParam param,
                      const std::vector<double>& values) {
  cfg.validate();
  if (values.empty())
    throw std::invalid_argument("sweep: at least one value required");

  SweepResult result;
  for (double value : values) {
    ExperimentConfig cur = cfg;
    cur.output_path.clear();
    // Pin the generated channel to the base config so every sweep point sees
    // identical frames.
    cur.channel_alpha = cfg.effective_channel_alpha();
    switch (param) {
      case SweepParam::Alpha:
        cur.alpha = value;
        break;
      case SweepParam::Overlap:
        cur.block.overlap = static_cast<int>(value);
        if (cur.block.overlap != value)
          throw std::invalid_argument("sweep: overlap values must be integers");
        break;
      case SweepParam::States:
        cur.num_states = static_cast<int>(value);
        if (cur.num_states != value)
          throw std::invalid_argument("sweep: states values must be integers");
        break;
    }
    cur.validate();
    for (std::size_t si = 0; si < cur.sigmas.size(); ++si)
      for (std::uint64_t seed : cur.seeds) {
        const FrameData frame = make_frame(
            cur, cur.sigmas[si], frame_seed_for(seed, static_cast<int>(si)));
        const SymbolFrame decoded = run_detector(cur, frame);
        result.ber.push_back(
            score_frame(cur, frame, decoded, cur.sigmas[si], seed));
        if (param == SweepParam::Overlap) {
          const DetectionResult serial = viterbi_detect_serial(
              frame.y, cur.alpha, cur.block.data_len, cur.block.overlap);
          MismatchRecord mm;
          mm.overlap = cur.block.overlap;
          mm.sigma = cur.sigmas[si];
          mm.seed = seed;
          mm.symbols = static_cast<long>(decoded.size());
          mm.mismatches = 0;
          for (std::size_t i = 0; i < decoded.size(); ++i)
            if (decoded[i] != serial.decoded[i]) ++mm.mismatches;
          result.mismatch.push_back(mm);
        }
      }
  }
  if (!cfg.output_path.empty()) {
    write_output(cfg.output_path, ber_csv(result.ber));
    write_plot_script(cfg.output_path, "ber");
    if (param == SweepParam::Overlap) {
      const std::string mm_path = cfg.output_path + ".mismatch.csv";
      write_output(mm_path, mismatch_csv(result.mismatch, cfg.block.data_len));
    }
  }
  return result;
}

std::string ber_csv(const std::vector<BerRecord>& rows) {
  std::string out =
      "variant,num_states,alpha,O,R,N,sigma,seed,symbols,bit_errors,bits,ber,"
      "symbol_errors\n";
  for (const BerRecord& r : rows) {
    out += variant_name(r.variant);
    out += ',' + std::to_string(r.num_states);
    out += ',' + fmt_g(r.alpha);
    out += ',' + std::to_string(r.overlap);
    out += ',' + std::to_string(r.data_len);
    out += ',' + std::to_string(2 * r.overlap + r.data_len);
    out += ',' + fmt_g(r.sigma);
    out += ',' + fmt_u64(r.seed);
    out += ',' + std::to_string(r.symbols);
    out += ',' + std::to_string(r.bit_errors);
    out += ',' + std::to_string(r.bits);
    out += ',' + fmt_g(r.ber);
    out += ',' + std::to_string(r.symbol_errors);
    out += '\n';
  }
  return out;
}

std::string complexity_csv(const std::vector<ComplexityRow>& rows) {
  std::string out = "variant,N,var_mult,const_mult,adders,comparators,latency\n";
  for (const ComplexityRow& r : rows) {
    out += r.variant;
    out += ',' + std::to_string(r.n);
    out += ',' + std::to_string(r.counts.variable_multipliers);
    out += ',' + std::to_string(r.counts.constant_multipliers);
    out += ',' + std::to_string(r.counts.adders);
    out += ',' + std::to_string(r.counts.comparators);
    out += ',' + std::to_string(r.latency);
    out += '\n';
  }
  return out;
}

std::string mismatch_csv(const std::vector<MismatchRecord>& rows, int data_len) {
  std::string out = "O,R,N,sigma,seed,symbols,mismatches,mismatch_rate\n";
  for (const MismatchRecord& r : rows) {
    out += std::to_string(r.overlap);
    out += ',' + std::to_string(data_len);
    out += ',' + std::to_string(2 * r.overlap + data_len);
    out += ',' + fmt_g(r.sigma);
    out += ',' + fmt_u64(r.seed);
    out += ',' + std::to_string(r.symbols);
    out += ',' + std::to_string(r.mismatches);
    out += ',' + fmt_g(static_cast<double>(r.mismatches) /
                       static_cast<double>(r.symbols));
    out += '\n';
  }
  return out;
}

std::string equiv_text(const EquivReport& report) {
  std::string out;
  for (const EquivFrame& f : report.frames) {
    out += "sigma=" + fmt_g(f.sigma);
    out += " seed=" + fmt_u64(f.seed);
    out += " symbols=" + std::to_string(f.symbols);
    out += " mismatches=" + std::to_string(f.mismatches);
    out += " metric_test=" + fmt_g(f.metric_test);
    out += " metric_ref=" + fmt_g(f.metric_ref);
    out += " gap=" + fmt_g(f.metric_test - f.metric_ref);
    out += std::string(" tie=") + (f.tie ? "yes" : "no");
    out += '\n';
  }
  out += "total symbols=" + std::to_string(report.symbols);
  out += " mismatches=" + std::to_string(report.mismatches);
  out += " rate=" + fmt_g(report.symbols == 0
                              ? 0.0
                              : static_cast<double>(report.mismatches) /
                                    static_cast<double>(report.symbols));
  out += '\n';
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing output file: " + path);
}

void write_plot_script(const std::string& csv_path, const std::string& kind) {
  std::string script = "#!/usr/bin/env python3\n";
  script += "import csv\n";
  script += "import matplotlib\n";
  script += "matplotlib.use(\"Agg\")\n";
  script += "import matplotlib.pyplot as plt\n\n";
  script += "rows = list(csv.DictReader(open(\"" + csv_path + "\")))\n";
  if (kind == "complexity") {
    script +=
        "variants = sorted({r[\"variant\"] for r in rows})\n"
        "fig, ax = plt.subplots()\n"
        "for v in variants:\n"
        "    pts = [(int(r[\"N\"]), int(r[\"adders\"])) for r in rows if r[\"variant\"] == v]\n"
        "    pts.sort()\n"
        "    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=\"o\", label=v)\n"
        "ax.set_xlabel(\"block length N\")\n"
        "ax.set_ylabel(\"adders per block\")\n"
        "ax.set_xscale(\"log\", base=2)\n"
        "ax.set_yscale(\"log\")\n"
        "ax.legend()\n";
  } else {
    script +=
        "keys = sorted({(r[\"variant\"], r[\"num_states\"], r[\"alpha\"], r[\"O\"]) for r in rows})\n"
        "fig, ax = plt.subplots()\n"
        "for v, k, a, o in keys:\n"
        "    pts = [(float(r[\"sigma\"]), float(r[\"ber\"])) for r in rows\n"
        "           if (r[\"variant\"], r[\"num_states\"], r[\"alpha\"], r[\"O\"]) == (v, k, a, o)]\n"
        "    pts.sort()\n"
        "    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=\"o\",\n"
        "            label=f\"{v} states={k} alpha={a} O={o}\")\n"
        "ax.set_xlabel(\"noise sigma\")\n"
        "ax.set_ylabel(\"BER\")\n"
        "ax.set_yscale(\"log\")\n"
        "ax.legend()\n";
  }
  script += "fig.savefig(\"" + csv_path + ".png\", dpi=150)\n";
  write_output(csv_path + ".plot.py", script);
}

}  // namespace mlse::harness
