// tools/tandem-phone.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Phoneme recognition experiments with MFCC or local-feature front-ends,
// an MLN posterior estimator and Gaussian-mixture HMMs.
//
// Usage:
//   tandem-phone synth --synth-out corpus
//   tandem-phone run-all --train-manifest corpus/train.tsv
//       --test-manifest corpus/test.tsv --inventory corpus/phones.txt
//       --out exp --mixtures 1,2,4
//
// Every option can also be given in a key = value file passed by --config;
// flags on the command line override the file.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tandem/experiment.h"

int main(int argc, char **argv) {
  using namespace tandem;

  CLI::App app{"Tandem MLN/HMM phoneme recognizer (MFCC39 vs LF25)"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file");

  ExperimentConfig cfg;
  std::vector<std::string> front_ends = {"mfcc39", "lf25"};
  std::string loss = "sse";
  bool quiet = false;

  app.add_option("--train-manifest", cfg.train_manifest, "training manifest");
  app.add_option("--test-manifest", cfg.test_manifest, "test manifest");
  app.add_option("--inventory", cfg.inventory,
                 "phoneme inventory (default: shipped 53-symbol list)");
  app.add_option("--front-end", front_ends, "mfcc39 and/or lf25")
      ->delimiter(',')
      ->check(CLI::IsMember({"mfcc39", "lf25"}));
  app.add_option("--out", cfg.out_dir, "experiment directory")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "worker threads for per-utterance stages")
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "suppress progress logging");
  app.add_option("--preemphasis", cfg.preemphasis)->capture_default_str();
  app.add_option("--delta-window", cfg.delta_window)->capture_default_str();
  app.add_option("--mln-hidden", cfg.mln_hidden, "hidden layer sizes")
      ->delimiter(',');
  app.add_option("--mln-lr", cfg.mln.learning_rate)->capture_default_str();
  app.add_option("--mln-epochs", cfg.mln.epochs)->capture_default_str();
  app.add_option("--mln-minibatch", cfg.mln.minibatch)->capture_default_str();
  app.add_option("--mln-seed", cfg.mln.seed)->capture_default_str();
  app.add_option("--mln-loss", loss, "sse or xent")
      ->check(CLI::IsMember({"sse", "xent"}))
      ->capture_default_str();
  app.add_option("--mixtures", cfg.mixtures, "mixture ladder, e.g. 1,2,4,8,16")
      ->delimiter(',');
  app.add_option("--em-iterations", cfg.em_iterations, "EM iterations per rung")
      ->capture_default_str();
  app.add_option("--variance-floor", cfg.variance_floor)->capture_default_str();
  app.add_option("--insertion-penalty", cfg.insertion_penalty)->capture_default_str();
  app.add_flag("--log-posteriors", cfg.log_posteriors,
               "model ln(max(y,1e-6)) instead of raw posteriors");

  SynthConfig synth;
  auto *synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--synth-out", synth.out_dir)->capture_default_str();
  synth_cmd->add_option("--synth-inventory", synth.inventory,
                        "inventory to synthesize (default: sil + N symbols)");
  synth_cmd->add_option("--num-phonemes", synth.num_phonemes)->capture_default_str();
  synth_cmd->add_option("--num-train", synth.num_train)->capture_default_str();
  synth_cmd->add_option("--num-test", synth.num_test)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

  auto *extract = app.add_subcommand("extract", "compute feature files");
  auto *train_mln = app.add_subcommand("train-mln", "train the MLN");
  auto *posteriors = app.add_subcommand("posteriors", "write MLN posterior files");
  auto *train_hmm = app.add_subcommand("train-hmm", "train HMMs up the mixture ladder");
  auto *decode = app.add_subcommand("decode", "phone-loop Viterbi decoding");
  auto *score = app.add_subcommand("score", "PCR/accuracy table and CSV");
  auto *run_all = app.add_subcommand("run-all", "every stage from extract to score");
  for (auto *sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.front_ends.clear();
    for (const auto &fe : front_ends) cfg.front_ends.push_back(ParseFrontEnd(fe));
    cfg.mln.loss = loss == "xent" ? MlnLoss::kCrossEntropy : MlnLoss::kSquaredError;
    cfg.verbose = !quiet;

    int failures = 0;
    if (synth_cmd->parsed()) {
      const SynthOutputs out = RunSynth(synth);
      std::cout << "inventory " << out.inventory << "\ntrain " << out.train_manifest
                << "\ntest " << out.test_manifest << '\n';
    } else if (extract->parsed()) {
      failures = RunExtract(cfg);
    } else if (train_mln->parsed()) {
      failures = RunTrainMln(cfg);
    } else if (posteriors->parsed()) {
      failures = RunPosteriors(cfg);
    } else if (train_hmm->parsed()) {
      failures = RunTrainHmm(cfg);
    } else if (decode->parsed()) {
      failures = RunDecode(cfg);
    } else if (score->parsed()) {
      failures = RunScore(cfg);
    } else if (run_all->parsed()) {
      failures = RunAll(cfg);
    }
    if (failures) {
      std::cerr << "ERROR: " << failures << " item(s) failed\n";
      return 1;
    }
  } catch (const std::exception &e) {
    std::cerr << "ERROR: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
