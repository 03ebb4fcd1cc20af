// src/experiment.cc
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

#include "tandem/experiment.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "tandem/hmm.h"
#include "tandem/scoring.h"

namespace tandem {

namespace fs = std::filesystem;

namespace {

const char *const kSplits[] = {"train", "test"};

std::mutex log_mutex;

void Log(const ExperimentConfig &cfg, const std::string &msg) {
  if (!cfg.verbose) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "LOG: " << msg << '\n';
}

void Warn(const std::string &msg) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "WARNING: " << msg << '\n';
}

const std::string &ManifestFor(const ExperimentConfig &cfg,
                               const std::string &split) {
  return split == "train" ? cfg.train_manifest : cfg.test_manifest;
}

PhonemeInventory LoadConfiguredInventory(const ExperimentConfig &cfg) {
  return LoadInventory(cfg.inventory.empty() ? DefaultInventoryPath()
                                             : cfg.inventory);
}

std::vector<UtteranceRecord> LoadSplit(const ExperimentConfig &cfg,
                                       const PhonemeInventory &inv,
                                       const std::string &split) {
  const std::string &path = ManifestFor(cfg, split);
  if (path.empty()) throw TandemError("no " + split + " manifest configured");
  return LoadManifest(path, inv);
}

void RequireFile(const std::string &path, const std::string &what,
                 const std::string &stage) {
  if (!fs::exists(path))
    throw TandemError("missing " + what + " " + path + " (run " + stage +
                      " first)");
}

std::string FormatPercent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string JoinSymbols(const PhonemeInventory &inv, const std::vector<int> &ids) {
  std::string s;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ' ';
    s += inv.Symbol(ids[i]);
  }
  return s;
}

// Reads posteriors of one split as HMM observations.
std::vector<Matrix> LoadObservations(const ExperimentConfig &cfg, FrontEnd fe,
                                     const std::string &split,
                                     const std::vector<UtteranceRecord> &recs) {
  std::vector<Matrix> obs(recs.size());
  ParallelFor(static_cast<int>(recs.size()), cfg.jobs, [&](int u) {
    const std::string path = PosteriorPath(cfg, fe, split, recs[u].id);
    RequireFile(path, "posterior file", "posteriors");
    obs[u] = ReadTpf(path);
    if (cfg.log_posteriors) obs[u] = LogTransformObservations(obs[u]);
  });
  return obs;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (front_ends.empty()) throw TandemError("no front end configured");
  if (mixtures.empty()) throw TandemError("empty mixture ladder");
  static const std::set<int> allowed = {1, 2, 4, 8, 16};
  for (size_t i = 0; i < mixtures.size(); ++i) {
    if (!allowed.count(mixtures[i]))
      throw TandemError("mixture count " + std::to_string(mixtures[i]) +
                        " not in {1,2,4,8,16}");
    if (i > 0 && mixtures[i] <= mixtures[i - 1])
      throw TandemError("mixture ladder must be strictly ascending");
  }
  if (jobs < 1) throw TandemError("jobs must be >= 1");
  if (em_iterations < 1) throw TandemError("em iterations must be >= 1");
  if (variance_floor <= 0.0) throw TandemError("variance floor must be positive");
  if (mln.epochs < 0 || mln.minibatch < 1)
    throw TandemError("bad MLN epochs/minibatch");
  for (int h : mln_hidden)
    if (h < 1) throw TandemError("MLN hidden layer sizes must be positive");
  if (delta_window < 1) throw TandemError("delta window must be >= 1");
}

std::string FeaturePath(const ExperimentConfig &cfg, FrontEnd fe,
                        const std::string &split, const std::string &id) {
  return (fs::path(cfg.out_dir) / FrontEndName(fe) / "features" / split /
          (id + ".tpf"))
      .string();
}

std::string PosteriorPath(const ExperimentConfig &cfg, FrontEnd fe,
                          const std::string &split, const std::string &id) {
  return (fs::path(cfg.out_dir) / FrontEndName(fe) / "posteriors" / split /
          (id + ".tpf"))
      .string();
}

std::string MlnPath(const ExperimentConfig &cfg, FrontEnd fe) {
  return (fs::path(cfg.out_dir) / FrontEndName(fe) / "mln.bin").string();
}

std::string HmmPath(const ExperimentConfig &cfg, FrontEnd fe, int mixtures) {
  return (fs::path(cfg.out_dir) / FrontEndName(fe) / "hmm" /
          ("mix" + std::to_string(mixtures) + ".bin"))
      .string();
}

std::string DecodePath(const ExperimentConfig &cfg, FrontEnd fe,
                       const std::string &split, int mixtures) {
  return (fs::path(cfg.out_dir) / FrontEndName(fe) / "decode" /
          (split + ".mix" + std::to_string(mixtures) + ".txt"))
      .string();
}

int RunExtract(const ExperimentConfig &cfg) {
  cfg.Validate();
  const PhonemeInventory inv = LoadConfiguredInventory(cfg);
  int failures = 0;
  for (const char *split : kSplits) {
    const auto recs = LoadSplit(cfg, inv, split);
    for (FrontEnd fe : cfg.front_ends) {
      fs::create_directories(fs::path(FeaturePath(cfg, fe, split, "x")).parent_path());
      std::vector<char> failed(recs.size(), 0);
      ParallelFor(static_cast<int>(recs.size()), cfg.jobs, [&](int u) {
        try {
          const Matrix feats = ExtractFeatures(fe, ReadWav(recs[u].audio_path),
                                               cfg.preemphasis, cfg.delta_window);
          WriteTpf(FeaturePath(cfg, fe, split, recs[u].id), feats);
        } catch (const std::exception &e) {
          Warn("extract: utterance " + recs[u].id + ": " + e.what());
          failed[u] = 1;
        }
      });
      const int n_failed = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
      failures += n_failed;
      Log(cfg, "extract " + FrontEndName(fe) + "/" + split + ": " +
                   std::to_string(recs.size() - n_failed) + " utterances");
    }
  }
  return failures;
}

int RunTrainMln(const ExperimentConfig &cfg) {
  cfg.Validate();
  const PhonemeInventory inv = LoadConfiguredInventory(cfg);
  const auto recs = LoadSplit(cfg, inv, "train");
  if (recs.empty()) throw TandemError("train-mln: training manifest is empty");
  for (FrontEnd fe : cfg.front_ends) {
    std::vector<Matrix> feats(recs.size());
    for (size_t u = 0; u < recs.size(); ++u) {
      const std::string path = FeaturePath(cfg, fe, "train", recs[u].id);
      RequireFile(path, "feature file", "extract");
      feats[u] = ReadTpf(path);
      if (feats[u].cols() != FeatureDim(fe))
        throw TandemError(path + ": dimension " + std::to_string(feats[u].cols()) +
                          " does not match front end " + FrontEndName(fe));
    }
    MlnModel model;
    model.loss = cfg.mln.loss;
    model.normalizer = InputNormalizer::Fit(feats);

    Eigen::Index total = 0;
    for (const auto &f : feats) total += f.rows();
    const int in_dim = 3 * FeatureDim(fe);
    Matrix inputs(total, in_dim);
    std::vector<int> labels;
    labels.reserve(total);
    Eigen::Index row = 0;
    for (size_t u = 0; u < recs.size(); ++u) {
      const int frames = static_cast<int>(feats[u].rows());
      std::vector<int> lab = recs[u].frame_labels
                                 ? *recs[u].frame_labels
                                 : UniformSegmentLabels(recs[u].transcription, frames);
      if (static_cast<int>(lab.size()) != frames)
        throw TandemError("utterance " + recs[u].id + ": " +
                          std::to_string(lab.size()) + " frame labels for " +
                          std::to_string(frames) + " frames");
      if (frames == 0) continue;
      inputs.middleRows(row, frames) = ContextWindow(model.normalizer.Apply(feats[u]));
      row += frames;
      labels.insert(labels.end(), lab.begin(), lab.end());
    }

    MlnTopology topo;
    topo.input_dim = in_dim;
    topo.hidden = cfg.mln_hidden;
    topo.output_dim = inv.Size();
    Log(cfg, "train-mln " + FrontEndName(fe) + ": " + std::to_string(total) +
                 " frames, " + std::to_string(cfg.mln.epochs) + " epochs");
    MlnTrainResult trained =
        TrainMln(InitMlnWeights(topo, cfg.mln.seed), inputs, labels, cfg.mln);
    model.weights = std::move(trained.weights);
    fs::create_directories(fs::path(MlnPath(cfg, fe)).parent_path());
    SaveMln(MlnPath(cfg, fe), model);
    std::ofstream trace(fs::path(MlnPath(cfg, fe)).parent_path() / "mln-loss.txt");
    for (size_t e = 0; e < trained.loss_trace.size(); ++e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu %.17g\n", e, trained.loss_trace[e]);
      trace << buf;
    }
    if (!trained.loss_trace.empty())
      Log(cfg, "train-mln " + FrontEndName(fe) + ": final loss " +
                   std::to_string(trained.loss_trace.back()));
  }
  return 0;
}

int RunPosteriors(const ExperimentConfig &cfg) {
  cfg.Validate();
  const PhonemeInventory inv = LoadConfiguredInventory(cfg);
  int failures = 0;
  for (FrontEnd fe : cfg.front_ends) {
    RequireFile(MlnPath(cfg, fe), "MLN checkpoint", "train-mln");
    const MlnModel model = LoadMln(MlnPath(cfg, fe));
    if (model.weights.InputDim() != 3 * FeatureDim(fe))
      throw TandemError(MlnPath(cfg, fe) + ": network input " +
                        std::to_string(model.weights.InputDim()) +
                        " does not match front end " + FrontEndName(fe));
    if (model.weights.OutputDim() != inv.Size())
      throw TandemError(MlnPath(cfg, fe) + ": network has " +
                        std::to_string(model.weights.OutputDim()) +
                        " outputs but the inventory has " + std::to_string(inv.Size()));
    for (const char *split : kSplits) {
      const auto recs = LoadSplit(cfg, inv, split);
      fs::create_directories(fs::path(PosteriorPath(cfg, fe, split, "x")).parent_path());
      std::vector<char> failed(recs.size(), 0);
      ParallelFor(static_cast<int>(recs.size()), cfg.jobs, [&](int u) {
        try {
          const std::string in = FeaturePath(cfg, fe, split, recs[u].id);
          RequireFile(in, "feature file", "extract");
          WriteTpf(PosteriorPath(cfg, fe, split, recs[u].id),
                   Posteriors(model, ReadTpf(in)));
        } catch (const std::exception &e) {
          Warn("posteriors: utterance " + recs[u].id + ": " + e.what());
          failed[u] = 1;
        }
      });
      failures += static_cast<int>(std::count(failed.begin(), failed.end(), 1));
      Log(cfg, "posteriors " + FrontEndName(fe) + "/" + split + " done");
    }
  }
  return failures;
}

int RunTrainHmm(const ExperimentConfig &cfg) {
  cfg.Validate();
  const PhonemeInventory inv = LoadConfiguredInventory(cfg);
  const auto recs = LoadSplit(cfg, inv, "train");
  if (recs.empty()) throw TandemError("train-hmm: training manifest is empty");
  std::vector<std::vector<int>> transcriptions;
  for (const auto &r : recs) transcriptions.push_back(r.transcription);
  HmmOptions opts;
  opts.variance_floor = cfg.variance_floor;

  for (FrontEnd fe : cfg.front_ends) {
    const std::vector<Matrix> obs = LoadObservations(cfg, fe, "train", recs);
    for (size_t u = 0; u < obs.size(); ++u)
      if (obs[u].cols() != inv.Size())
        throw TandemError("posteriors of " + recs[u].id + " have dimension " +
                          std::to_string(obs[u].cols()) + ", inventory has " +
                          std::to_string(inv.Size()));
    HmmSet set = FlatStart(inv.Size(), inv.Size(), inv.Hash(), obs, opts);
    fs::create_directories(fs::path(HmmPath(cfg, fe, 1)).parent_path());
    const int top = cfg.mixtures.back();
    for (int m = 1; m <= top; m *= 2) {
      const auto trace =
          TrainEmbedded(&set, obs, transcriptions, cfg.em_iterations, opts, cfg.jobs);
      Log(cfg, "train-hmm " + FrontEndName(fe) + " mix" + std::to_string(m) +
                   ": loglik " + std::to_string(trace.front()) + " -> " +
                   std::to_string(trace.back()));
      if (std::find(cfg.mixtures.begin(), cfg.mixtures.end(), m) != cfg.mixtures.end()) {
        SaveHmmSet(HmmPath(cfg, fe, m), set);
        std::ofstream os(fs::path(HmmPath(cfg, fe, m)).replace_extension(".trace.txt"));
        for (size_t i = 0; i < trace.size(); ++i) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%zu %.17g\n", i, trace[i]);
          os << buf;
        }
      }
      if (m < top) set = SplitMixtures(set);
    }
  }
  return 0;
}

int RunDecode(const ExperimentConfig &cfg) {
  cfg.Validate();
  const PhonemeInventory inv = LoadConfiguredInventory(cfg);
  DecodeConfig dc;
  dc.insertion_penalty = cfg.insertion_penalty;
  int failures = 0;
  for (FrontEnd fe : cfg.front_ends) {
    for (int m : cfg.mixtures) {
      RequireFile(HmmPath(cfg, fe, m), "HMM set", "train-hmm");
      const HmmSet set = LoadHmmSet(HmmPath(cfg, fe, m));
      if (set.inventory_hash != inv.Hash())
        throw TandemError(HmmPath(cfg, fe, m) +
                          " was trained with a different phoneme inventory");
      for (const char *split : kSplits) {
        const auto recs = LoadSplit(cfg, inv, split);
        std::vector<std::string> lines(recs.size());
        std::vector<char> failed(recs.size(), 0);
        ParallelFor(static_cast<int>(recs.size()), cfg.jobs, [&](int u) {
          try {
            const std::string path = PosteriorPath(cfg, fe, split, recs[u].id);
            RequireFile(path, "posterior file", "posteriors");
            Matrix obs = ReadTpf(path);
            if (cfg.log_posteriors) obs = LogTransformObservations(obs);
            const DecodeResult r = ViterbiDecode(set, obs, dc);
            std::ostringstream os;
            os << recs[u].id << '\t' << JoinSymbols(inv, r.phonemes) << '\t';
            for (size_t i = 0; i < r.segments.size(); ++i)
              os << (i ? " " : "") << r.segments[i].first << '-' << r.segments[i].second;
            char buf[64];
            std::snprintf(buf, sizeof buf, "\t%.6f", r.log_score);
            os << buf;
            lines[u] = os.str();
          } catch (const std::exception &e) {
            Warn("decode: utterance " + recs[u].id + ": " + e.what());
            failed[u] = 1;
          }
        });
        fs::create_directories(fs::path(DecodePath(cfg, fe, split, m)).parent_path());
        std::ofstream os(DecodePath(cfg, fe, split, m));
        for (size_t u = 0; u < recs.size(); ++u)
          if (!failed[u]) os << lines[u] << '\n';
        failures += static_cast<int>(std::count(failed.begin(), failed.end(), 1));
        Log(cfg, "decode " + FrontEndName(fe) + " mix" + std::to_string(m) + "/" +
                     split + " done");
      }
    }
  }
  return failures;
}

namespace {

std::map<std::string, std::vector<int>> ReadDecodes(const std::string &path,
                                                    const PhonemeInventory &inv) {
  std::ifstream is(path);
  if (!is) throw TandemError("cannot open " + path);
  std::map<std::string, std::vector<int>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw TandemError(path + ":" + std::to_string(line_no) + ": malformed line");
    const size_t tab2 = line.find('\t', tab + 1);
    std::vector<int> ids;
    for (const auto &sym : SplitWhitespace(line.substr(tab + 1, tab2 - tab - 1)))
      ids.push_back(inv.Id(sym));
    out[line.substr(0, tab)] = std::move(ids);
  }
  return out;
}

}  // namespace

int RunScore(const ExperimentConfig &cfg, ResultTable *table_out) {
  cfg.Validate();
  const PhonemeInventory inv = LoadConfiguredInventory(cfg);
  std::map<std::string, std::vector<UtteranceRecord>> refs;
  for (const char *split : kSplits) refs[split] = LoadSplit(cfg, inv, split);

  ResultTable table;
  for (FrontEnd fe : cfg.front_ends) {
    for (int m : cfg.mixtures) {
      for (const char *split : kSplits) {
        const std::string cell = FrontEndName(fe) + "/mix" + std::to_string(m) + "/" + split;
        const std::string path = DecodePath(cfg, fe, split, m);
        if (!fs::exists(path)) {
          table.missing.push_back(cell);
          continue;
        }
        const auto hyps = ReadDecodes(path, inv);
        ResultRow row;
        row.front_end = fe;
        row.mixtures = m;
        row.dataset = split;
        std::vector<AlignmentResult> results;
        bool incomplete = false;
        for (const auto &r : refs[split]) {
          auto it = hyps.find(r.id);
          if (it == hyps.end()) {
            incomplete = true;
            continue;
          }
          AlignmentPath path_pairs;
          results.push_back(Align(r.transcription, it->second, &path_pairs));
          for (const auto &pr : path_pairs) ++row.confusion[pr];
        }
        if (incomplete || results.empty()) {
          table.missing.push_back(cell);
          if (results.empty()) continue;
        }
        row.pcr = Pcr(results);
        row.acc = Accuracy(results);
        table.rows.push_back(std::move(row));
      }
    }
  }
  for (const auto &cell : table.missing)
    Warn("score: missing or incomplete decodes for " + cell);

  fs::create_directories(cfg.out_dir);
  WriteResultCsv((fs::path(cfg.out_dir) / "results.csv").string(), table);
  std::ofstream conf(fs::path(cfg.out_dir) / "confusion.csv", std::ios::binary);
  conf << "front_end,mixtures,dataset,ref,hyp,count\n";
  for (const auto &row : table.rows)
    for (const auto &[pair, count] : row.confusion)
      conf << FrontEndName(row.front_end) << ',' << row.mixtures << ','
           << row.dataset << ',' << (pair.first < 0 ? "*" : inv.Symbol(pair.first))
           << ',' << (pair.second < 0 ? "*" : inv.Symbol(pair.second)) << ','
           << count << '\n';
  for (const auto &row : table.rows)
    Log(cfg, "score " + FrontEndName(row.front_end) + " mix" +
                 std::to_string(row.mixtures) + " " + row.dataset + ": PCR " +
                 FormatPercent(row.pcr) + "% Acc " + FormatPercent(row.acc) + "%");
  const int failures = static_cast<int>(table.missing.size());
  if (table_out) *table_out = std::move(table);
  return failures;
}

int RunAll(const ExperimentConfig &cfg, ResultTable *table) {
  int failures = RunExtract(cfg);
  if (failures) return failures;
  RunTrainMln(cfg);
  if ((failures = RunPosteriors(cfg))) return failures;
  RunTrainHmm(cfg);
  if ((failures = RunDecode(cfg))) return failures;
  return RunScore(cfg, table);
}

void WriteResultCsv(const std::string &path, const ResultTable &table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TandemError("cannot write " + path);
  os << "front_end,mixtures,dataset,pcr,acc\n";
  for (const auto &r : table.rows)
    os << FrontEndName(r.front_end) << ',' << r.mixtures << ',' << r.dataset << ','
       << FormatPercent(r.pcr) << ',' << FormatPercent(r.acc) << '\n';
  if (!os) throw TandemError("write failed: " + path);
}

std::vector<ResultRow> ReadResultCsv(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw TandemError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != "front_end,mixtures,dataset,pcr,acc")
    throw TandemError(path + ": unexpected CSV header");
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5)
      throw TandemError(path + ":" + std::to_string(line_no) + ": expected 5 fields");
    ResultRow r;
    r.front_end = ParseFrontEnd(f[0]);
    r.mixtures = std::stoi(f[1]);
    r.dataset = f[2];
    r.pcr = std::stod(f[3]);
    r.acc = std::stod(f[4]);
    rows.push_back(std::move(r));
  }
  return rows;
}

SynthOutputs RunSynth(const SynthConfig &cfg) {
  if (cfg.num_train < 0 || cfg.num_test < 0)
    throw TandemError("synth: utterance counts must be non-negative");
  fs::create_directories(fs::path(cfg.out_dir) / "wav" / "train");
  fs::create_directories(fs::path(cfg.out_dir) / "wav" / "test");

  PhonemeInventory inv;
  if (!cfg.inventory.empty()) {
    inv = LoadInventory(cfg.inventory);
  } else {
    static const char *const kSymbols[] = {"aa", "m",  "r", "ax", "ch", "ow",
                                           "n",  "b",  "ae", "d"};
    const int max_phonemes = static_cast<int>(std::size(kSymbols));
    if (cfg.num_phonemes < 1 || cfg.num_phonemes > max_phonemes)
      throw TandemError("synth: phoneme count must be in 1.." +
                        std::to_string(max_phonemes));
    std::vector<std::string> symbols{"sil"};
    for (int i = 0; i < cfg.num_phonemes; ++i) symbols.emplace_back(kSymbols[i]);
    inv = PhonemeInventory(std::move(symbols));
  }

  SynthOutputs out;
  out.inventory = (fs::path(cfg.out_dir) / "phones.txt").string();
  SaveInventory(out.inventory, inv);
  const auto profiles = DefaultSyntheticProfiles(inv);

  for (const char *split : kSplits) {
    const bool train = std::string(split) == "train";
    const int count = train ? cfg.num_train : cfg.num_test;
    const uint64_t split_seed = DeriveSeed(cfg.seed, train ? 1 : 2);
    const auto specs = RandomUtteranceSpecs(count, inv, split_seed);
    auto utts = GenerateSyntheticCorpus(profiles, specs, split_seed);
    std::vector<UtteranceRecord> records;
    for (int u = 0; u < count; ++u) {
      char id[32];
      std::snprintf(id, sizeof id, "%s%04d", split, u);
      const std::string rel = (fs::path("wav") / split / (std::string(id) + ".wav")).string();
      WriteWav((fs::path(cfg.out_dir) / rel).string(), utts[u].wave);
      UtteranceRecord rec = std::move(utts[u].record);
      rec.id = id;
      rec.audio_path = rel;
      records.push_back(std::move(rec));
    }
    const std::string manifest =
        (fs::path(cfg.out_dir) / (std::string(split) + ".tsv")).string();
    SaveManifest(manifest, records, inv);
    (train ? out.train_manifest : out.test_manifest) = manifest;
  }
  return out;
}

}  // namespace tandem
