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

// Tests for the optimizer, training loop, checkpoints, prediction,
// evaluation plumbing, k sweeps and multi-seed aggregation.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mathlink/aggregate.h"
#include "mathlink/errors.h"
#include "mathlink/model.h"
#include "mathlink/optimizer.h"
#include "mathlink/predict.h"
#include "mathlink/synthetic.h"
#include "mathlink/trainer.h"
#include "mathlink/utf8.h"
#include "test_util.h"
#include "toy_recipe.h"

namespace mathlink {
namespace {

using testing::MaxGradientError;
using testing::RandomMatrix;

std::filesystem::path TempDir(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mathlink_pipeline_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<RawDocument> Planted(int documents, uint64_t seed = 7) {
  SyntheticOptions options;
  options.num_documents = documents;
  options.seed = seed;
  return GeneratePlantedCorpus(options).documents;
}

// The overfit toy model, trained once and shared by several tests.
const TrainResult &OverfitRun() {
  static const TrainResult result = [] {
    const auto corpus = Planted(20);
    return Train(testing::ToyRecipe(), corpus, corpus);
  }();
  return result;
}

// ---------------------------------------------------------------------------
// Optimizer.

TEST_CASE("learning rate warms up then decays to zero", "[pipeline][optimizer]") {
  const LinearWarmupDecay schedule(1.0, 4, 10);
  const std::vector<double> expected = {0.25, 0.5, 0.75, 1.0, 1.0,       5.0 / 6, 4.0 / 6,
                                        3.0 / 6, 2.0 / 6, 1.0 / 6, 0.0};
  for (int step = 0; step <= 10; ++step) {
    CHECK(schedule.LearningRate(step) == Catch::Approx(expected[step]));
  }
  CHECK(schedule.LearningRate(0) > 0.0);
  CHECK_THROWS_AS(LinearWarmupDecay(1.0, 0, 10), ConfigError);
  CHECK_THROWS_AS(LinearWarmupDecay(1.0, 11, 10), ConfigError);
  CHECK_THROWS_AS(LinearWarmupDecay(0.0, 1, 10), ConfigError);
}

TEST_CASE("schedule shape on random horizons", "[pipeline][optimizer][property]") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int warmup = testing::RandomInt(rng, 1, 20);
    const int total = warmup * testing::RandomInt(rng, 1, 60);
    const LinearWarmupDecay schedule(5e-5, warmup, total);
    for (int step = 1; step < total; ++step) {
      const double prev = schedule.LearningRate(step - 1), cur = schedule.LearningRate(step);
      if (step < warmup) REQUIRE(cur > prev);
      if (step > warmup) REQUIRE(cur < prev);
      REQUIRE(cur <= 5e-5 * (1 + 1e-12));
      REQUIRE(cur > 0.0);
    }
    REQUIRE(schedule.LearningRate(warmup - 1) == Catch::Approx(5e-5));
    REQUIRE(schedule.LearningRate(total) == 0.0);
  }
}

TEST_CASE("clipping bounds the global norm and reports the original", "[pipeline][optimizer]") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Parameter a, b;
    a.Resize(3, 4);
    b.Resize(2, 2);
    const double scale = std::exp(std::uniform_real_distribution<double>(-4, 4)(rng));
    a.grad = RandomMatrix(rng, 3, 4, scale);
    b.grad = RandomMatrix(rng, 2, 2, scale);
    const double before = std::sqrt(a.grad.squaredNorm() + b.grad.squaredNorm());
    const std::vector<NamedParameter> params = {{"a", &a}, {"b", &b}};
    REQUIRE(ClipGradNorm(params, 1.0) == Catch::Approx(before));
    const double after = GlobalGradNorm(params);
    REQUIRE(after <= 1.0 + 1e-6);
    if (before <= 1.0) REQUIRE(after == Catch::Approx(before));
  }
}

TEST_CASE("AdamW follows the decoupled update rule", "[pipeline][optimizer]") {
  Parameter p;
  p.Resize(1, 2);
  p.value << 1.0, -2.0;
  AdamW::Options options;
  options.weight_decay = 0.1;
  AdamW adam({{"p", &p}}, options);
  // Scalar re-derivation of the same recurrence.
  double x[2] = {1.0, -2.0}, m[2] = {0, 0}, v[2] = {0, 0};
  const double grads[3][2] = {{0.5, -1.0}, {0.1, 0.3}, {-0.7, 0.2}};
  const double lrs[3] = {0.01, 0.02, 0.005};
  for (int t = 0; t < 3; ++t) {
    p.grad << grads[t][0], grads[t][1];
    adam.Step(lrs[t]);
    for (int i = 0; i < 2; ++i) {
      x[i] -= lrs[t] * 0.1 * x[i];
      m[i] = 0.9 * m[i] + 0.1 * grads[t][i];
      v[i] = 0.999 * v[i] + 0.001 * grads[t][i] * grads[t][i];
      const double m_hat = m[i] / (1 - std::pow(0.9, t + 1));
      const double v_hat = v[i] / (1 - std::pow(0.999, t + 1));
      x[i] -= lrs[t] * m_hat / (std::sqrt(v_hat) + 1e-8);
      CHECK(p.value(0, i) == Catch::Approx(x[i]).epsilon(1e-12));
    }
  }
  CHECK(adam.steps() == 3);
}

// ---------------------------------------------------------------------------
// Configuration.

TEST_CASE("training defaults follow the reference recipe", "[pipeline][config]") {
  const TrainConfig c;
  CHECK(c.learning_rate == 5e-5);
  CHECK(c.epochs == 60);
  CHECK(c.warmup_epochs == 1);
  CHECK(c.batch_size == 4);
  CHECK(c.max_grad_norm == 1.0);
  CHECK(c.downsample == 1000);
  CHECK(c.k_train == 50);
  CHECK(c.k_eval_dev == 50);
  CHECK(c.k_eval_test == 400);
  CHECK(c.patience == 10);
  CHECK(c.nota == 4);
  CHECK(c.max_span_length == 16);
  CHECK_NOTHROW(ValidateTrainConfig(c));
}

TEST_CASE("training configuration is validated", "[pipeline][config]") {
  TrainConfig c;
  c.k_train = 500;
  CHECK_THROWS_AS(ValidateTrainConfig(c), ConfigError);
  c = TrainConfig();
  c.batch_size = 0;
  CHECK_THROWS_AS(ValidateTrainConfig(c), ConfigError);
  c = TrainConfig();
  c.stride = 1024;
  CHECK_THROWS_AS(ValidateTrainConfig(c), ConfigError);

  CHECK_THROWS_AS(TrainConfigFromJson({{"learnin_rate", 1e-3}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromJson({{"epochs", "many"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromJson({{"pooling", "sum"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromJson(nlohmann::json::array()), ConfigError);
}

TEST_CASE("training configuration round-trips through JSON", "[pipeline][config]") {
  TrainConfig c = testing::ToyRecipe();
  c.pooling = Pooling::kMean;
  c.preprocess = Preprocess::kLatexToText;
  c.seed = 123456789012345ULL;
  const TrainConfig back = TrainConfigFromJson(ToJson(c));
  CHECK(ToJson(back) == ToJson(c));
  CHECK(TrainConfigFromJson({{"epochs", 3}}).learning_rate == 5e-5);
}

// ---------------------------------------------------------------------------
// Synthetic data.

TEST_CASE("planted corpora are valid and deterministic", "[pipeline][synthetic]") {
  const auto a = Planted(20), b = Planted(20);
  CHECK(a == b);
  CHECK(a != Planted(20, 8));
  std::set<std::string> ids;
  for (const RawDocument &doc : a) {
    CHECK_NOTHROW(ValidateDocument(doc));
    ids.insert(doc.id);
    REQUIRE(doc.relations.size() == 1);
    CHECK(doc.relations[0].type == RelationType::kDirect);
    const std::u32string text = DecodeUtf8(doc.text);
    const auto &symbol = doc.entities[doc.FindEntity(doc.relations[0].tail)];
    CHECK(symbol.type == EntityType::kSymbol);
    CHECK(text[symbol.span.start - 1] == U'$');
    CHECK(text[symbol.span.end] == U'$');
  }
  CHECK(ids.size() == 20);
  CHECK_THROWS_AS(GeneratePlantedCorpus({.num_documents = -1}), ConfigError);
}

// ---------------------------------------------------------------------------
// Model gradients.

TEST_CASE("document gradients match finite differences", "[pipeline][gradient]") {
  for (Pooling pooling : {Pooling::kMean, Pooling::kMax}) {
    INFO(PoolingName(pooling));
    ModelConfig config;
    config.encoder.hidden_size = 4;
    config.encoder.window = 6;
    config.encoder.stride = 3;
    config.mention.max_span_length = 2;
    config.mention.pooling = pooling;
    config.nota = 2;
    Model model(config, Tokenizer(), 3);
    std::mt19937_64 rng(4);
    for (const NamedParameter &p : model.Parameters()) {
      p.param->value += RandomMatrix(rng, p.param->value.rows(), p.param->value.cols(), 0.3);
    }
    RawDocument raw = Planted(1)[0];
    raw.text = "Let $v$ denote the mass of it.";
    raw.entities = {{"T1", EntityType::kPrimary, {19, 23}}, {"T2", EntityType::kSymbol, {5, 6}}};
    const PreparedDocument doc = model.Prepare(raw);
    TrainingSettings settings;
    settings.k = 1000;  // every span is a candidate, so selection is fixed
    settings.mention_weight = 0.7;
    settings.relation_weight = 3.0;
    settings.gradient_scale = 0.5;

    auto params = model.Parameters();
    for (const NamedParameter &p : params) p.param->ZeroGrad();
    std::mt19937_64 sample(0);
    AccumulateDocumentGradients(model, doc, settings, sample);
    std::vector<Matrix> analytic;
    for (const NamedParameter &p : params) analytic.push_back(p.param->grad);

    auto loss = [&]() {
      for (const NamedParameter &p : params) p.param->ZeroGrad();
      std::mt19937_64 again(0);
      return settings.gradient_scale *
             AccumulateDocumentGradients(model, doc, settings, again).total;
    };
    for (size_t i = 0; i < params.size(); ++i) {
      INFO(params[i].name);
      CHECK(MaxGradientError(params[i].param->value, analytic[i], loss) < 1e-4);
    }
  }
}

// ---------------------------------------------------------------------------
// Training.

TEST_CASE("seeded training is reproducible", "[pipeline][train]") {
  const auto corpus = Planted(6);
  TrainConfig config;
  config.epochs = 3;
  config.learning_rate = 1e-2;
  config.hidden_size = 16;
  config.seed = 5;
  const TrainResult a = Train(config, corpus, corpus);
  const TrainResult b = Train(config, corpus, corpus);
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (size_t e = 0; e < a.epochs.size(); ++e) {
    CHECK(a.epochs[e].ToJson() == b.epochs[e].ToJson());
  }
  CHECK(a.best.best_dev_f1 == b.best.best_dev_f1);
  CHECK(CheckpointToJson(a.best) == CheckpointToJson(b.best));
}

TEST_CASE("epoch records follow the schedule", "[pipeline][train]") {
  const auto corpus = Planted(8);
  TrainConfig config;
  config.epochs = 3;
  config.hidden_size = 8;
  std::vector<EpochRecord> seen;
  const TrainResult result =
      Train(config, corpus, corpus, [&](const EpochRecord &r) { seen.push_back(r); });
  REQUIRE(seen.size() == 3);
  // Two steps per epoch: warmup finishes at the end of epoch 1, then decay.
  CHECK(seen[0].learning_rate == Catch::Approx(5e-5));
  CHECK(seen[1].learning_rate == Catch::Approx(5e-5 * 3 / 4));
  CHECK(seen[2].learning_rate == Catch::Approx(5e-5 * 1 / 4));
  for (const EpochRecord &r : seen) {
    CHECK(std::isfinite(r.loss));
    CHECK(r.loss == Catch::Approx(r.mention_loss + r.relation_loss));
  }
  CHECK(result.epochs.size() == 3);
  CHECK(seen[0].improved);
}

TEST_CASE("patience stops training early", "[pipeline][train]") {
  const auto corpus = Planted(4);
  TrainConfig config;
  config.epochs = 10;
  config.hidden_size = 8;
  config.patience = 2;
  config.learning_rate = 1e-9;  // dev score cannot move
  const TrainResult result = Train(config, corpus, corpus);
  CHECK(result.epochs.size() == 3);
  CHECK(result.early_stopped);
  CHECK(result.best.epoch == 1);
}

TEST_CASE("divergence aborts with diagnostics", "[pipeline][train]") {
  const auto corpus = Planted(8);
  TrainConfig config;
  config.epochs = 2;
  config.hidden_size = 8;
  config.learning_rate = 1e200;
  config.weight_decay = 0.0;
  try {
    Train(config, corpus, corpus);
    FAIL("expected divergence");
  } catch (const DivergenceError &e) {
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    CHECK(std::string(e.kind()) == "divergence_error");
  }
}

TEST_CASE("empty corpora are rejected", "[pipeline][train]") {
  const auto corpus = Planted(2);
  CHECK_THROWS_AS(Train(TrainConfig(), {}, corpus), ValidationError);
  CHECK_THROWS_AS(Train(TrainConfig(), corpus, {}), ValidationError);
}

TEST_CASE("the toy model memorises the planted corpus", "[pipeline][train][slow]") {
  const TrainResult &run = OverfitRun();
  CHECK(run.best.best_dev_f1 >= 0.95);
  CHECK(run.epochs.size() <= 200);
  CHECK(run.best_dev.strict.overall.micro.f1 == run.best.best_dev_f1);
}

// ---------------------------------------------------------------------------
// Prediction and checkpoints.

TEST_CASE("empty input predicts nothing", "[pipeline][predict]") {
  const Model &model = OverfitRun().best.model;
  const DocumentPrediction pred = PredictDocument(model, "", 50);
  CHECK(pred.mentions.empty());
  CHECK(pred.relations.empty());
  CHECK(PredictDocument(model, "   \n ", 50).mentions.empty());
  CHECK_THROWS_AS(PredictDocument(model, "x", 0), ConfigError);
}

TEST_CASE("NOTA-dominated models predict nothing", "[pipeline][predict]") {
  Model model = OverfitRun().best.model;
  model.relation_bank().relation_parameter().value.setZero();
  model.relation_bank().nota_parameter().value.setZero();
  const DocumentPrediction pred = PredictDocument(model, Planted(1)[0], 50);
  CHECK(pred.relations.empty());
  CHECK(pred.mentions.empty());
}

TEST_CASE("the memorised pattern is predicted with its types", "[pipeline][predict][slow]") {
  const Model &model = OverfitRun().best.model;
  const RawDocument doc = Planted(20)[0];
  const DocumentPrediction pred = PredictDocument(model, doc, model.config().mention.k);
  REQUIRE(pred.relations.size() == 1);
  const PredictedRelation &rel = pred.relations[0];
  CHECK(rel.type == RelationType::kDirect);
  CHECK(rel.score > 0.0);
  const PredictedMention &head = pred.mentions[rel.head];
  const PredictedMention &tail = pred.mentions[rel.tail];
  CHECK(head.type == EntityType::kPrimary);
  CHECK(tail.type == EntityType::kSymbol);
  // Offsets index the original text.
  CHECK(head.span == doc.entities[0].span);
  CHECK(tail.span == doc.entities[1].span);
}

TEST_CASE("larger k draws pairs from a superset of candidates", "[pipeline][predict][property]") {
  const Model &model = OverfitRun().best.model;
  for (const RawDocument &doc : Planted(10, 99)) {
    const PreparedDocument prepared = model.Prepare(doc);
    const SpanAnalysis analysis = AnalyzeSpans(model, prepared.tokens);
    const DecodedDocument small = Decode(model, analysis, 10);
    const DecodedDocument large = Decode(model, analysis, 400);
    const std::set<TokenSpan> big(large.candidates.begin(), large.candidates.end());
    for (const TokenSpan &s : small.candidates) REQUIRE(big.count(s));
    REQUIRE(std::equal(small.candidates.begin(), small.candidates.end(), large.candidates.begin()));
    const auto gold = GoldSpans(prepared);
    const std::span<const double> scores(analysis.scores.data(), analysis.scores.size());
    REQUIRE(EntityRecallCounts(scores, analysis.spans, gold, 400).found >=
            EntityRecallCounts(scores, analysis.spans, gold, 10).found);
  }
}

TEST_CASE("checkpoints reproduce predictions exactly", "[pipeline][checkpoint]") {
  const Checkpoint &original = OverfitRun().best;
  const auto dir = TempDir("checkpoint");
  SaveCheckpoint(original, dir / "model.json");
  CHECK_FALSE(std::filesystem::exists(dir / "model.json.tmp"));
  const Checkpoint loaded = LoadCheckpoint(dir / "model.json");
  CHECK(loaded.epoch == original.epoch);
  CHECK(loaded.best_dev_f1 == original.best_dev_f1);
  CHECK(loaded.config_snapshot == original.config_snapshot);
  for (const RawDocument &doc : Planted(5, 3)) {
    CHECK(ToJson(PredictDocument(loaded.model, doc, 400)) ==
          ToJson(PredictDocument(original.model, doc, 400)));
  }
  CHECK_THROWS_AS(LoadCheckpoint(dir / "missing.json"), FormatError);
  std::ofstream(dir / "bad.json") << R"({"format": "something-else"})";
  CHECK_THROWS_AS(LoadCheckpoint(dir / "bad.json"), FormatError);
}

// ---------------------------------------------------------------------------
// Evaluation plumbing.

DocumentPrediction FromGold(const RawDocument &doc) {
  DocumentPrediction pred;
  pred.id = doc.id;
  pred.domain = doc.domain;
  pred.text = doc.text;
  for (const auto &e : doc.entities) pred.mentions.push_back({e.id, e.type, e.span});
  for (const auto &r : doc.relations) {
    pred.relations.push_back({r.type, doc.FindEntity(r.head), doc.FindEntity(r.tail), 1.0});
  }
  return pred;
}

TEST_CASE("gold-as-prediction scores perfectly", "[pipeline][evaluate]") {
  const auto gold = Planted(10);
  std::vector<DocumentPrediction> preds;
  for (const auto &doc : gold) preds.push_back(FromGold(doc));
  const auto dir = TempDir("predictions");
  SavePredictions(preds, dir / "pred.json");
  const auto loaded = LoadPredictions(dir / "pred.json");
  CHECK(loaded.size() == preds.size());
  const EvaluationReport report = EvaluatePredictions(loaded, gold);
  CHECK(report.strict.overall.micro.f1 == 1.0);
  CHECK(report.iou.overall.micro.f1 == 1.0);
  CHECK(report.ner.strict.f1 == 1.0);
  CHECK(report.iou_threshold == kDefaultIouThreshold);
  const auto json = report.ToJson();
  CHECK(json["relations_strict"]["micro"]["f1"] == 1.0);
  CHECK(json["entities"]["type"]["f1"] == 1.0);
}

TEST_CASE("missing predictions count as empty", "[pipeline][evaluate]") {
  const auto gold = Planted(4);
  std::vector<DocumentPrediction> preds = {FromGold(gold[0])};
  const EvaluationReport report = EvaluatePredictions(preds, gold);
  CHECK(report.strict.overall.micro.precision == 1.0);
  CHECK(report.strict.overall.micro.recall == Catch::Approx(0.25));
}

TEST_CASE("mentions outside relations are not scored", "[pipeline][evaluate]") {
  const auto gold = Planted(2);
  std::vector<DocumentPrediction> preds;
  for (const auto &doc : gold) preds.push_back(FromGold(doc));
  preds[0].mentions.push_back({"T9", EntityType::kSymbol, {0, 2}});
  CHECK(EvaluatePredictions(preds, gold).ner.strict.f1 == 1.0);
}

TEST_CASE("prediction files are checked against the gold corpus", "[pipeline][evaluate]") {
  const auto gold = Planted(2);
  std::vector<DocumentPrediction> preds = {FromGold(gold[0]), FromGold(gold[0])};
  CHECK_THROWS_AS(EvaluatePredictions(preds, gold), ValidationError);
  preds = {FromGold(gold[0])};
  preds[0].id = "elsewhere";
  CHECK_THROWS_AS(EvaluatePredictions(preds, gold), ValidationError);
  preds = {FromGold(gold[0])};
  preds[0].text += " changed";
  CHECK_THROWS_AS(EvaluatePredictions(preds, gold), ValidationError);
  preds = {FromGold(gold[0])};
  preds[0].mentions[0].span.end = 10000;
  CHECK_THROWS_AS(EvaluatePredictions(preds, gold), ValidationError);
}

TEST_CASE("unaligned gold relations still count towards recall", "[pipeline][evaluate]") {
  RawDocument doc = Planted(1)[0];
  doc.text = "\\textbf{} $x$ is the mass";
  doc.entities = {{"T1", EntityType::kPrimary, {1, 7}}, {"T2", EntityType::kSymbol, {11, 12}}};
  const Model &model = OverfitRun().best.model;
  Model latex_model = model;
  PreparedDocument prepared = PrepareDocument(doc, Tokenizer(), Preprocess::kLatexToText);
  REQUIRE_FALSE(prepared.entities[0].aligned);
  const auto gold = GoldRelationInstances(prepared);
  REQUIRE(gold.size() == 1);
  CHECK(gold[0].head == TokenSpan{-1, -1});
  const std::vector<PreparedDocument> docs = {prepared};
  CHECK(EvaluateModel(latex_model, docs, 50).strict.overall.total.gold == 1);
}

// ---------------------------------------------------------------------------
// k sweeps.

TEST_CASE("sweep ranges and CSV layout", "[pipeline][sweep]") {
  CHECK(SweepRange(10, 50, 20) == std::vector<int>{10, 30, 50});
  CHECK(SweepRange(5, 5, 1) == std::vector<int>{5});
  CHECK_THROWS_AS(SweepRange(0, 5, 1), ConfigError);
  CHECK_THROWS_AS(SweepRange(6, 5, 1), ConfigError);
  CHECK_THROWS_AS(SweepRange(1, 5, 0), ConfigError);
  const std::vector<SweepRow> rows = {{50, {0.674185, 0.335411, 0.447960}, 0.587185}};
  CHECK(SweepCsv(rows) == "k,p,r,f,entity_recall\n50,67.4185,33.5411,44.7960,58.7185\n");
}

TEST_CASE("sweep entity recall rises with k on the toy model", "[pipeline][sweep]") {
  const Model &model = OverfitRun().best.model;
  const auto prepared = PrepareCorpus(Planted(10, 11), model.tokenizer(), Preprocess::kNone);
  const auto ks = SweepRange(1, 201, 10);
  const auto rows = KSweep(model, prepared, ks);
  REQUIRE(rows.size() == ks.size());
  for (size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].entity_recall >= rows[i - 1].entity_recall);
  }
  // Each sweep row matches a direct evaluation at the same k.
  const EvaluationReport direct = EvaluateModel(model, prepared, 41);
  CHECK(rows[4].relation.f1 == direct.strict.overall.micro.f1);
  CHECK(rows[4].entity_recall ==
        static_cast<double>(direct.entity_recall.found) / direct.entity_recall.total);
}

// ---------------------------------------------------------------------------
// Aggregation.

TEST_CASE("median and population standard deviation", "[pipeline][aggregate]") {
  const std::vector<double> values = {1, 2, 10};
  CHECK(Median(values) == 2.0);
  CHECK(PopulationStdDev(values) == Catch::Approx(4.0277).margin(1e-4));
  const std::vector<double> even = {4, 1, 3, 2};
  CHECK(Median(even) == 2.5);
  const std::vector<double> same = {0.7, 0.7, 0.7};
  CHECK(PopulationStdDev(same) == 0.0);
}

TEST_CASE("aggregation checks its inputs", "[pipeline][aggregate]") {
  const std::vector<RunMetrics> one = {{{"f1", 0.5}}};
  CHECK_THROWS_AS(AggregateRuns(one), ConfigError);
  const std::vector<RunMetrics> mismatched = {{{"f1", 0.5}}, {{"p", 0.5}}};
  CHECK_THROWS_AS(AggregateRuns(mismatched), ValidationError);
  const std::vector<RunMetrics> runs = {{{"f1", 0.5}}, {{"f1", 0.5}}};
  const auto summary = AggregateRuns(runs);
  CHECK(summary.at("f1").stddev == 0.0);
  CHECK(ToJson(summary)["f1"]["median"] == 0.5);
}

TEST_CASE("seed aggregation matches the emitted run logs", "[pipeline][aggregate]") {
  const auto corpus = Planted(6);
  TrainConfig config;
  config.epochs = 3;
  config.hidden_size = 16;
  config.learning_rate = 1e-2;
  const auto dir = TempDir("seeds");
  const SeedsReport report = RunSeedsAggregate(config, corpus, corpus, {1, 2, 3}, dir);
  REQUIRE(report.runs.size() == 3);

  // Re-derive every statistic straight from the JSON files.
  std::map<std::string, std::vector<double>> values;
  for (uint64_t seed : {1, 2, 3}) {
    std::ifstream in(dir / ("run_" + std::to_string(seed) + ".json"));
    REQUIRE(in);
    const auto log = nlohmann::json::parse(in);
    CHECK(log["seed"] == seed);
    for (const auto &[name, value] : log["metrics"].items()) {
      values[name].push_back(value.get<double>());
    }
  }
  REQUIRE(values.size() == report.summary.size());
  for (auto &[name, v] : values) {
    INFO(name);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const double mean = (v[0] + v[1] + v[2]) / 3.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean) / 3.0;
    CHECK(report.summary.at(name).median == Catch::Approx(sorted[1]).margin(1e-12));
    CHECK(report.summary.at(name).stddev == Catch::Approx(std::sqrt(var)).margin(1e-12));
  }
  const auto reloaded = AggregateRuns(LoadRunLogs(dir));
  CHECK(ToJson(reloaded) == ToJson(report.summary));
  CHECK_THROWS_AS(RunSeedsAggregate(config, corpus, corpus, {1}), ConfigError);
}

}  // namespace
}  // namespace mathlink
