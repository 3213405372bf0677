// Copyright 2026 The Mathlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, predict, evaluate, sweep and aggregate, plus
// corpus conversion and synthetic corpus generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mathlink/aggregate.h"
#include "mathlink/corpus.h"
#include "mathlink/errors.h"
#include "mathlink/model.h"
#include "mathlink/predict.h"
#include "mathlink/synthetic.h"
#include "mathlink/trainer.h"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

int ReportError(const std::string &kind, const std::string &message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mathlink::FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mathlink::FormatError("cannot write " + path.string());
  out << content;
}

bool IsCorpusPath(const fs::path &path) {
  const std::string ext = path.extension().string();
  return ext == ".json" || ext == ".jsonl";
}

struct TrainArgs {
  std::string config, train, dev, out, log;
};

void RunTrain(const TrainArgs &args) {
  const mathlink::TrainConfig config = mathlink::LoadTrainConfig(args.config);
  const auto train = mathlink::LoadCorpus(args.train);
  const auto dev = mathlink::LoadCorpus(args.dev);
  const mathlink::TrainResult result =
      mathlink::Train(config, train, dev, [](const mathlink::EpochRecord &record) {
        std::cout << record.ToJson().dump() << std::endl;
      });
  mathlink::SaveCheckpoint(result.best, args.out);
  if (!args.log.empty()) WriteFile(args.log, result.RunLog().dump(2) + "\n");
  std::cout << json{{"checkpoint", args.out},
                    {"best_epoch", result.best.epoch},
                    {"best_dev_f1", result.best.best_dev_f1}}
                   .dump()
            << std::endl;
}

struct PredictArgs {
  std::string ckpt, in, out;
  std::optional<int> k;
};

void RunPredict(const PredictArgs &args) {
  const mathlink::Checkpoint checkpoint = mathlink::LoadCheckpoint(args.ckpt);
  const int k = args.k.value_or(checkpoint.model.config().mention.k);
  std::vector<mathlink::DocumentPrediction> predictions;
  const fs::path in(args.in);
  if (IsCorpusPath(in)) {
    for (const auto &doc : mathlink::LoadCorpus(in)) {
      predictions.push_back(mathlink::PredictDocument(checkpoint.model, doc, k));
    }
  } else {
    predictions.push_back(
        mathlink::PredictDocument(checkpoint.model, ReadFile(in), k, in.stem().string()));
  }
  mathlink::SavePredictions(predictions, args.out);
}

struct EvaluateArgs {
  std::string pred, gold;
  double iou = mathlink::kDefaultIouThreshold;
};

void RunEvaluate(const EvaluateArgs &args) {
  const auto predictions = mathlink::LoadPredictions(args.pred);
  const auto gold = mathlink::LoadCorpus(args.gold);
  const auto report = mathlink::EvaluatePredictions(predictions, gold, args.iou);
  std::cout << report.ToJson().dump(2) << std::endl;
}

struct SweepArgs {
  std::string ckpt, gold, out;
  int k_min = 50, k_max = 400, k_step = 50;
};

void RunSweep(const SweepArgs &args) {
  const auto ks = mathlink::SweepRange(args.k_min, args.k_max, args.k_step);
  const mathlink::Checkpoint checkpoint = mathlink::LoadCheckpoint(args.ckpt);
  std::vector<mathlink::PreparedDocument> docs;
  for (const auto &doc : mathlink::LoadCorpus(args.gold)) {
    docs.push_back(checkpoint.model.Prepare(doc));
  }
  const auto rows = mathlink::KSweep(checkpoint.model, docs, ks);
  WriteFile(args.out, mathlink::SweepCsv(rows));
}

void RunAggregate(const std::string &runs) {
  const auto logs = mathlink::LoadRunLogs(runs);
  const auto summary = mathlink::AggregateRuns(logs);
  std::cout << json{{"runs", logs.size()}, {"metrics", mathlink::ToJson(summary)}}.dump(2)
            << std::endl;
}

struct ConvertArgs {
  std::string brat, domain, out;
};

void RunConvert(const ConvertArgs &args) {
  const auto docs =
      mathlink::LoadBratDirectory(args.brat, mathlink::ParseDomain(args.domain));
  mathlink::SaveCorpus(docs, args.out);
}

struct SynthArgs {
  int documents = 20;
  uint64_t seed = 7;
  double mid_token = 0.0;
  std::string out;
};

void RunSynth(const SynthArgs &args) {
  mathlink::SyntheticOptions options;
  options.num_documents = args.documents;
  options.seed = args.seed;
  options.mid_token_probability = args.mid_token;
  mathlink::SaveCorpus(mathlink::GeneratePlantedCorpus(options).documents, args.out);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Symbol/description entity and relation extraction"};
  app.require_subcommand(1);

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train a model and write the best checkpoint");
  train_cmd->add_option("--config", train.config, "JSON training config")->required();
  train_cmd->add_option("--train", train.train, "Training corpus")->required();
  train_cmd->add_option("--dev", train.dev, "Dev corpus")->required();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
  train_cmd->add_option("--log", train.log, "Optional run log JSON for aggregation");

  PredictArgs predict;
  auto *predict_cmd = app.add_subcommand("predict", "Extract mentions and relations");
  predict_cmd->add_option("--ckpt", predict.ckpt, "Checkpoint path")->required();
  predict_cmd->add_option("--in", predict.in, "LaTeX file or corpus (.json/.jsonl)")->required();
  predict_cmd->add_option("--k", predict.k, "Candidate spans kept per document")
      ->check(CLI::PositiveNumber);
  predict_cmd->add_option("--out", predict.out, "Prediction JSON")->required();

  EvaluateArgs evaluate;
  auto *evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold");
  evaluate_cmd->add_option("--pred", evaluate.pred, "Prediction JSON")->required();
  evaluate_cmd->add_option("--gold", evaluate.gold, "Gold corpus")->required();
  evaluate_cmd->add_option("--iou", evaluate.iou, "Relaxed matching IOU threshold")
      ->capture_default_str();

  SweepArgs sweep;
  auto *sweep_cmd = app.add_subcommand("sweep", "Relation F1 and entity recall across k");
  sweep_cmd->add_option("--ckpt", sweep.ckpt, "Checkpoint path")->required();
  sweep_cmd->add_option("--gold", sweep.gold, "Gold corpus")->required();
  sweep_cmd->add_option("--k-min", sweep.k_min)->capture_default_str();
  sweep_cmd->add_option("--k-max", sweep.k_max)->capture_default_str();
  sweep_cmd->add_option("--k-step", sweep.k_step)->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "CSV output")->required();

  std::string runs;
  auto *aggregate_cmd = app.add_subcommand("aggregate", "Median and std over run logs");
  aggregate_cmd->add_option("--runs", runs, "Directory of run log JSON files")->required();

  ConvertArgs convert;
  auto *convert_cmd = app.add_subcommand("convert", "Convert brat .txt/.ann pairs to JSONL");
  convert_cmd->add_option("--brat", convert.brat, "Directory of brat files")->required();
  convert_cmd->add_option("--domain", convert.domain, "Domain tag")->default_val("unknown");
  convert_cmd->add_option("--out", convert.out, "JSONL corpus")->required();

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  synth_cmd->add_option("--documents", synth.documents)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--mid-token", synth.mid_token,
                        "Probability of a description boundary inside a token")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "JSONL corpus")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return ReportError("usage_error", e.what(), 2);
  }

  try {
    if (*train_cmd) RunTrain(train);
    if (*predict_cmd) RunPredict(predict);
    if (*evaluate_cmd) RunEvaluate(evaluate);
    if (*sweep_cmd) RunSweep(sweep);
    if (*aggregate_cmd) RunAggregate(runs);
    if (*convert_cmd) RunConvert(convert);
    if (*synth_cmd) RunSynth(synth);
  } catch (const mathlink::Error &e) {
    return ReportError(e.kind(), e.what(), 1);
  } catch (const std::exception &e) {
    return ReportError("internal_error", e.what(), 1);
  }
  return 0;
}
