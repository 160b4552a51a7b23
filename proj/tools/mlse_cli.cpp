// Command line harness for the PAM4 MLSE detector library.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlse/harness.hpp"

namespace {

using mlse::Variant;
using mlse::harness::ExperimentConfig;

struct Opts {
  ExperimentConfig cfg;
  std::string variant = "1s";
  std::string chain_mode = "direct-isi";
  std::string reference = "1s";
  int reference_states = 4;
  std::string param;
  std::vector<double> values;
  std::vector<std::string> cvariants;
  std::vector<int> lengths{8, 16, 32, 64};
  bool instrument = false;
};

// Options shared by the frame-running subcommands.
void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--variant", o.variant,
                  "detector: 1s, 1s-simplified, l2s, l2s-simplified")
      ->capture_default_str();
  cmd->add_option("--states", o.cfg.num_states,
                  "candidate-set size for the simplified detectors (2, 3, 4)")
      ->capture_default_str();
  cmd->add_option("--alpha", o.cfg.alpha, "detection alpha")
      ->capture_default_str();
  cmd->add_option("--channel-alpha", o.cfg.channel_alpha,
                  "ISI tap of the generated channel (default: alpha)");
  cmd->add_option("--sigma", o.cfg.sigmas, "noise sigma (repeatable)")
      ->capture_default_str();
  cmd->add_option("--symbols", o.cfg.frame_symbols, "symbols per frame")
      ->capture_default_str();
  cmd->add_option("--overlap", o.cfg.block.overlap, "block overlap O")
      ->capture_default_str();
  cmd->add_option("--data-len", o.cfg.block.data_len, "block data length R")
      ->capture_default_str();
  cmd->add_option("--seed", o.cfg.seeds, "run seed (repeatable)")
      ->capture_default_str();
  cmd->add_option("--out", o.cfg.output_path, "output CSV path");
  cmd->add_option("--workers", o.cfg.workers, "concurrent block workers")
      ->capture_default_str();
  cmd->add_option("--chain-mode", o.chain_mode, "direct-isi or full-ffe-chain")
      ->capture_default_str();
  cmd->add_option("--channel-taps", o.cfg.channel_taps,
                  "FIR taps for full-ffe-chain");
  cmd->add_option("--ffe-taps", o.cfg.ffe_taps, "FFE tap count (odd)");
  cmd->add_option("--ffe-step", o.cfg.ffe_step, "LMS step size");
  cmd->add_option("--ffe-epochs", o.cfg.ffe_epochs, "LMS training passes");
  cmd->add_option("--train-symbols", o.cfg.train_symbols,
                  "training symbols per frame");
}

ExperimentConfig finish_config(Opts& o) {
  o.cfg.variant = mlse::parse_variant(o.variant);
  o.cfg.chain_mode = mlse::harness::parse_chain_mode(o.chain_mode);
  return o.cfg;
}

int do_ber(Opts& o) {
  const ExperimentConfig cfg = finish_config(o);
  const auto rows = mlse::harness::run_ber(cfg);
  if (cfg.output_path.empty())
    std::cout << mlse::harness::ber_csv(rows);
  else
    std::cout << "wrote " << cfg.output_path << " (" << rows.size()
              << " rows)\n";
  return 0;
}

int do_equiv(Opts& o) {
  const ExperimentConfig cfg = finish_config(o);
  const Variant ref = mlse::parse_variant(o.reference);
  const auto report = mlse::harness::run_equiv(cfg, ref, o.reference_states);
  std::cout << mlse::harness::equiv_text(report);
  if (!cfg.output_path.empty())
    std::cout << "wrote " << cfg.output_path << "\n";
  return 0;
}

int do_complexity(Opts& o) {
  std::vector<Variant> variants;
  if (o.cvariants.empty())
    variants = {Variant::OneStep, Variant::OneStepSimplified, Variant::L2s,
                Variant::L2sSimplified};
  else
    for (const std::string& name : o.cvariants)
      variants.push_back(mlse::parse_variant(name));
  const auto rows =
      mlse::harness::run_complexity(variants, o.lengths, o.instrument);
  const std::string csv = mlse::harness::complexity_csv(rows);
  if (o.cfg.output_path.empty()) {
    std::cout << csv;
  } else {
    mlse::harness::write_output(o.cfg.output_path, csv);
    mlse::harness::write_plot_script(o.cfg.output_path, "complexity");
    std::cout << "wrote " << o.cfg.output_path << " (" << rows.size()
              << " rows)\n";
  }
  return 0;
}

int do_sweep(Opts& o) {
  const ExperimentConfig cfg = finish_config(o);
  const auto param = mlse::harness::parse_sweep_param(o.param);
  const auto result = mlse::harness::run_sweep(cfg, param, o.values);
  if (cfg.output_path.empty()) {
    std::cout << mlse::harness::ber_csv(result.ber);
    if (!result.mismatch.empty())
      std::cout << mlse::harness::mismatch_csv(result.mismatch,
                                               cfg.block.data_len);
  } else {
    std::cout << "wrote " << cfg.output_path << " (" << result.ber.size()
              << " rows)\n";
    if (!result.mismatch.empty())
      std::cout << "wrote " << cfg.output_path << ".mismatch.csv\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAM4 MLSE detectors over a two-tap ISI channel"};
  app.require_subcommand(1);
  // Keys live under a [subcommand] section; command line flags win. The
  // option sits on the top-level app because CLI11 only reads config files
  // there; fallthrough lets it appear after the subcommand name too.
  app.fallthrough();
  app.set_config("--config", "",
                 "key=value config file with a [subcommand] section");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Opts o;

  CLI::App* ber = app.add_subcommand("ber", "Monte Carlo bit error rate");
  add_common(ber, o);

  CLI::App* equiv =
      app.add_subcommand("equiv", "cross-validate two detector variants");
  add_common(equiv, o);
  equiv->add_option("--reference", o.reference, "reference variant")
      ->capture_default_str();
  equiv->add_option("--reference-states", o.reference_states,
                    "reference candidate-set size")
      ->capture_default_str();

  CLI::App* complexity =
      app.add_subcommand("complexity", "hardware cost model tables");
  complexity->add_option("--variant", o.cvariants,
                         "variant (repeatable; default: all four)");
  complexity->add_option("--block-len", o.lengths,
                         "block length N (repeatable)")
      ->capture_default_str();
  complexity->add_flag("--instrument", o.instrument,
                       "add instrumented counts from a live block");
  complexity->add_option("--out", o.cfg.output_path, "output CSV path");

  CLI::App* sweep =
      app.add_subcommand("sweep", "sweep alpha, overlap or states");
  add_common(sweep, o);
  sweep->add_option("--param", o.param, "alpha, overlap or states")
      ->required();
  sweep->add_option("--values", o.values, "sweep grid (repeatable)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ber->parsed()) return do_ber(o);
    if (equiv->parsed()) return do_equiv(o);
    if (complexity->parsed()) return do_complexity(o);
    if (sweep->parsed()) return do_sweep(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
