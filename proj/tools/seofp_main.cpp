/* Copyright 2026 The seofp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line driver: seofp <command> [options]. Exit status 0 on success, 1 on errors and 2
// when an equivalence check finds mismatched words.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seofp/commands.hpp"

namespace {

constexpr int kMismatchExit = 2;

std::optional<seofp::fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return seofp::fs::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace seofp;

  CLI::App app{"Sign-exponent-only floating point networks: train, quantize, pack, infer, verify and time."};
  app.require_subcommand(1);

  const std::vector<std::string> encodings = {"full32", "se9", "codebook"};
  const TrainOptions train_defaults;

  // gen-data
  DatasetConfig data_cfg;
  std::string data_out;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic noisy/clean dataset");
  gen->add_option("--seed", data_cfg.seed, "Random seed")->capture_default_str();
  gen->add_option("--utterances", data_cfg.utterances, "Number of utterances")->capture_default_str();
  gen->add_option("--snr-db", data_cfg.snr_db, "SNR levels in dB (repeatable)")->capture_default_str();
  gen->add_option("--length", data_cfg.length, "Samples per utterance")->capture_default_str();
  gen->add_option("--out", data_out, "Output directory")->required();

  // train
  TrainOptions train_opt;
  std::string train_data, train_out;
  auto* tr = app.add_subcommand("train", "Train with quantization after every update");
  tr->add_option("--data", train_data, "Dataset directory")->required();
  tr->add_option("--seed", train_opt.train.seed, "Initialization and shuffle seed")->capture_default_str();
  tr->add_option("--bits", train_opt.train.bits, "Retained bits per parameter")
      ->check(CLI::Range(9, 32))
      ->capture_default_str();
  tr->add_option("--epochs", train_opt.train.epochs, "Training epochs")->capture_default_str();
  tr->add_option("--layers", train_opt.layers, "Layer list, e.g. c8k9,c1k9 or d128,d64")->capture_default_str();
  tr->add_option("--lr", train_opt.train.learning_rate, "Learning rate")->capture_default_str();
  tr->add_option("--batch", train_opt.train.batch_size, "Batch size")->capture_default_str();
  tr->add_option("--frame", train_opt.frame_length, "Frame length in samples")->capture_default_str();
  tr->add_option("--out", train_out, "Output .seofp file")->required();

  // quantize
  std::string q_model, q_out, q_mode = "fraction";
  int q_bits = 9;
  auto* qz = app.add_subcommand("quantize", "Quantize a trained model after the fact");
  qz->add_option("--model", q_model, "Input .seofp file")->required();
  qz->add_option("--bits", q_bits, "Retained bits per parameter")->check(CLI::Range(9, 32))->capture_default_str();
  qz->add_option("--mode", q_mode, "fraction (rounding-like) or direct (truncating)")
      ->check(CLI::IsMember({"fraction", "direct"}))
      ->capture_default_str();
  qz->add_option("--out", q_out, "Output .seofp file")->required();

  // pack
  std::string p_model, p_out, p_encoding = "codebook";
  auto* pk = app.add_subcommand("pack", "Re-encode a model file");
  pk->add_option("--model", p_model, "Input .seofp file")->required();
  pk->add_option("--encoding", p_encoding, "full32, se9 or codebook")
      ->check(CLI::IsMember(encodings))
      ->capture_default_str();
  pk->add_option("--out", p_out, "Output .seofp file")->required();

  // infer
  std::string i_model, i_data, i_out;
  int i_frame = train_defaults.frame_length;
  auto* inf = app.add_subcommand("infer", "Enhance the test split and report quality");
  inf->add_option("--model", i_model, "Model .seofp file")->required();
  inf->add_option("--data", i_data, "Dataset directory")->required();
  inf->add_option("--frame", i_frame, "Frame length in samples")->capture_default_str();
  inf->add_option("--out", i_out, "Write enhanced samples as float32");

  // verify
  std::string v_model, v_data;
  int v_frame = train_defaults.frame_length;
  int v_count = 100;
  std::uint64_t v_seed = 1;
  auto* ver = app.add_subcommand("verify", "Compare integer-add inference with native multiplies word by word");
  ver->add_option("--model", v_model, "Model .seofp file with sign-exponent parameters")->required();
  ver->add_option("--data", v_data, "Dataset directory (random inputs when omitted)");
  ver->add_option("--frame", v_frame, "Frame length in samples")->capture_default_str();
  ver->add_option("--count", v_count, "Random inputs")->capture_default_str();
  ver->add_option("--seed", v_seed, "Seed for random inputs")->capture_default_str();

  // bench
  std::string b_model, b_data, b_baseline;
  int b_frame = train_defaults.frame_length;
  int b_repeats = 5;
  auto* bn = app.add_subcommand("bench", "Time native and integer-add inference");
  bn->add_option("--model", b_model, "Model .seofp file with sign-exponent parameters")->required();
  bn->add_option("--data", b_data, "Dataset directory")->required();
  bn->add_option("--frame", b_frame, "Frame length in samples")->capture_default_str();
  bn->add_option("--baseline-model", b_baseline, "Separate baseline model (defaults to --model)");
  bn->add_option("--repeats", b_repeats, "Timed repetitions")->capture_default_str();

  // report
  ReportOptions r_opt;
  std::string r_out;
  auto* rp = app.add_subcommand("report", "Run the whole pipeline and print markdown tables");
  rp->add_option("--seed", r_opt.train.train.seed, "Training seed")->capture_default_str();
  rp->add_option("--data-seed", r_opt.data.seed, "Dataset seed")->capture_default_str();
  rp->add_option("--snr-db", r_opt.data.snr_db, "SNR levels in dB (repeatable)")->capture_default_str();
  rp->add_option("--epochs", r_opt.train.train.epochs, "Training epochs")->capture_default_str();
  rp->add_option("--layers", r_opt.train.layers, "Layer list")->capture_default_str();
  rp->add_option("--bits", r_opt.bits, "Bit-widths to sweep (repeatable, must include 9)")
      ->check(CLI::Range(9, 32))
      ->capture_default_str();
  rp->add_option("--repeats", r_opt.bench_repeats, "Timed repetitions")->capture_default_str();
  rp->add_option("--out", r_out, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const Dataset ds = cmd_gen_data(data_cfg, data_out);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t u = 0; u < ds.utterances.size(); ++u) {
        const Utterance& ut = ds.utterances[u];
        rows.push_back({std::to_string(u), to_string(ut.noise), fixed(ut.snr_db, 1),
                        fixed(measured_snr_db(ut.clean, ut.noisy), 3), ut.test ? "test" : "train"});
      }
      std::cout << markdown_table({"Utterance", "Noise", "Requested SNR (dB)", "Measured SNR (dB)", "Split"}, rows);
    } else if (*tr) {
      std::cout << cmd_train(train_data, train_opt, train_out).to_markdown();
    } else if (*qz) {
      const Model m = cmd_quantize(q_model, q_bits, parse_quant_mode(q_mode), q_out);
      std::cout << markdown_table({"Mode", "Bits", "Parameters"},
                                  {{q_mode, std::to_string(q_bits), std::to_string(m.parameter_count())}});
    } else if (*pk) {
      std::cout << cmd_pack(p_model, parse_encoding(p_encoding), p_out).to_markdown();
    } else if (*inf) {
      std::cout << cmd_infer(i_model, i_data, i_frame, optional_path(i_out)).to_markdown();
    } else if (*ver) {
      const VerifyReport report = cmd_verify(v_model, optional_path(v_data), v_frame, v_count, v_seed);
      std::cout << report.to_markdown();
      if (!report.pass()) return kMismatchExit;
    } else if (*bn) {
      const BenchReport report = cmd_bench(b_model, b_data, b_frame, optional_path(b_baseline), b_repeats);
      std::cout << report.to_markdown();
      if (!report.equivalent()) return kMismatchExit;
    } else if (*rp) {
      const std::string md = cmd_report(r_opt);
      std::cout << md;
      if (!r_out.empty()) {
        std::ofstream out(r_out);
        out << md;
        if (!out) throw std::runtime_error("report: cannot write " + r_out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "seofp " << e.what() << "\n";
    return 1;
  }
  return 0;
}
