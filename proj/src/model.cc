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

#include "mathlink/model.h"

#include <fstream>
#include <map>
#include <sstream>

#include "mathlink/errors.h"
#include "mathlink/utf8.h"

namespace mathlink {
namespace {

using json = nlohmann::json;

constexpr std::string_view kCheckpointFormat = "mathlink-checkpoint";
constexpr int kCheckpointVersion = 1;

json MatrixToJson(const Matrix &m) {
  std::vector<double> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix MatrixFromJson(const json &j, const std::string &name) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto &data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw FormatError("checkpoint parameter " + name + " has wrong element count");
  }
  Matrix m(rows, cols);
  size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
  }
  return m;
}

}  // namespace

json ToJson(const ModelConfig &config) {
  return {{"encoder", EncoderKindName(config.encoder.kind)},
          {"hidden_size", config.encoder.hidden_size},
          {"window", config.encoder.window},
          {"stride", config.encoder.stride},
          {"hash_seed", config.encoder.hash_seed},
          {"max_span_length", config.mention.max_span_length},
          {"pooling", PoolingName(config.mention.pooling)},
          {"k", config.mention.k},
          {"downsample", config.mention.downsample},
          {"margin", config.mention.margin},
          {"nota", config.nota},
          {"preprocess", PreprocessName(config.preprocess)}};
}

ModelConfig ModelConfigFromJson(const json &j) {
  ModelConfig config;
  auto kind = ParseEncoderKind(j.at("encoder").get<std::string>());
  if (!kind) throw FormatError("unknown encoder kind in model config");
  config.encoder.kind = *kind;
  config.encoder.hidden_size = j.at("hidden_size").get<int>();
  config.encoder.window = j.at("window").get<int>();
  config.encoder.stride = j.at("stride").get<int>();
  config.encoder.hash_seed = j.at("hash_seed").get<uint64_t>();
  config.mention.max_span_length = j.at("max_span_length").get<int>();
  auto pooling = ParsePooling(j.at("pooling").get<std::string>());
  if (!pooling) throw FormatError("unknown pooling in model config");
  config.mention.pooling = *pooling;
  config.mention.k = j.at("k").get<int>();
  config.mention.downsample = j.at("downsample").get<int>();
  config.mention.margin = j.at("margin").get<double>();
  config.nota = j.at("nota").get<int>();
  auto preprocess = ParsePreprocess(j.at("preprocess").get<std::string>());
  if (!preprocess) throw FormatError("unknown preprocess mode in model config");
  config.preprocess = *preprocess;
  return config;
}

Model::Model(const ModelConfig &config, Tokenizer tokenizer, uint64_t seed)
    : config_(config), tokenizer_(std::move(tokenizer)) {
  if (config.mention.max_span_length < 1) throw ConfigError("max_span_length must be >= 1");
  if (config.mention.k < 1) throw ConfigError("k must be >= 1");
  std::mt19937_64 rng(seed);
  encoder_ = MakeEncoder(config.encoder, rng);
  entity_bank_ = EntityPrototypeBank(config.encoder.hidden_size, rng);
  relation_bank_ = RelationPrototypeBank(config.encoder.hidden_size, config.nota, rng);
}

Model::Model(const Model &other)
    : config_(other.config_),
      tokenizer_(other.tokenizer_),
      encoder_(other.encoder_ ? other.encoder_->Clone() : nullptr),
      entity_bank_(other.entity_bank_),
      relation_bank_(other.relation_bank_) {}

Model &Model::operator=(const Model &other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

std::vector<NamedParameter> Model::Parameters() {
  std::vector<NamedParameter> params = encoder_->Parameters();
  params.push_back({"entity.prototypes", &entity_bank_.parameter()});
  params.push_back({"relation.prototypes", &relation_bank_.relation_parameter()});
  params.push_back({"relation.nota", &relation_bank_.nota_parameter()});
  return params;
}

PreparedDocument Model::Prepare(const RawDocument &doc) const {
  return PrepareDocument(doc, tokenizer_, config_.preprocess);
}

TokenizedDocument Model::TokenizeText(std::u32string_view text) const {
  return tokenizer_.Tokenize(PreprocessText(text, config_.preprocess));
}

SpanAnalysis AnalyzeSpans(const Model &model, const TokenizedDocument &tokens) {
  SpanAnalysis analysis;
  const Matrix embeddings = EncodeLongDocument(model.encoder(), tokens.ids);
  analysis.spans = EnumerateSpans(tokens.size(), model.config().mention.max_span_length);
  analysis.embeddings =
      PoolSpans(embeddings, analysis.spans, model.config().mention.pooling).embeddings;
  if (analysis.spans.empty()) {
    analysis.embeddings = Matrix(0, model.config().encoder.hidden_size);
    analysis.scores = Vector(0);
  } else {
    analysis.scores = ScoreSpans(analysis.embeddings, model.entity_bank().prototypes());
  }
  return analysis;
}

DecodedDocument Decode(const Model &model, const SpanAnalysis &analysis, int k) {
  DecodedDocument out;
  if (analysis.spans.empty()) return out;
  const std::span<const double> scores(analysis.scores.data(),
                                       static_cast<size_t>(analysis.scores.size()));
  const std::vector<int> selected = SelectTopK(scores, analysis.spans, k);
  Matrix candidates(static_cast<Eigen::Index>(selected.size()), analysis.embeddings.cols());
  for (size_t i = 0; i < selected.size(); ++i) {
    candidates.row(i) = analysis.embeddings.row(selected[i]);
    out.candidates.push_back(analysis.spans[selected[i]]);
  }
  const std::vector<CandidatePair> pairs = BuildPairs(static_cast<int>(selected.size()));
  const Matrix logits = ScorePairs(candidates, pairs, model.relation_bank());
  out.relations = DeduplicatePredictions(PredictRelations(logits, pairs, out.candidates));
  out.typing = AssignEntityTypes(out.relations);
  return out;
}

DocumentLoss AccumulateDocumentGradients(Model &model, const PreparedDocument &doc,
                                         const TrainingSettings &settings,
                                         std::mt19937_64 &rng) {
  DocumentLoss result;
  const int num_tokens = doc.tokens.size();
  if (num_tokens == 0) return result;
  const MentionConfig &mention = model.config().mention;

  LongDocumentTape tape;
  const Matrix token_embeddings = EncodeLongDocument(model.encoder(), doc.tokens.ids, &tape);

  // All enumerable spans plus gold spans that exceed the length limit.
  std::vector<TokenSpan> spans = EnumerateSpans(num_tokens, mention.max_span_length);
  std::map<TokenSpan, int> span_index;
  for (size_t i = 0; i < spans.size(); ++i) span_index[spans[i]] = static_cast<int>(i);
  std::map<TokenSpan, EntityType> gold_type;
  for (const auto &entity : doc.entities) {
    if (!entity.aligned) continue;
    gold_type.emplace(entity.tokens, entity.type);
    if (!span_index.count(entity.tokens)) {
      span_index[entity.tokens] = static_cast<int>(spans.size());
      spans.push_back(entity.tokens);
    }
  }
  std::vector<int> gold_indices;
  for (const auto &[span, type] : gold_type) gold_indices.push_back(span_index.at(span));

  const std::vector<int> kept = DownsampleTrainingCandidates(
      static_cast<int>(spans.size()), gold_indices,
      std::max(settings.downsample, static_cast<int>(gold_indices.size())), rng);
  std::vector<TokenSpan> pool_spans;
  pool_spans.reserve(kept.size());
  std::vector<int> forced;
  for (size_t i = 0; i < kept.size(); ++i) {
    pool_spans.push_back(spans[kept[i]]);
    if (gold_type.count(spans[kept[i]])) forced.push_back(static_cast<int>(i));
  }

  const Pooling pooling = mention.pooling;
  const PooledSpans pooled = PoolSpans(token_embeddings, pool_spans, pooling);
  const Vector scores = ScoreSpans(pooled.embeddings, model.entity_bank().prototypes());
  const std::vector<int> selected =
      SelectTopK(std::span<const double>(scores.data(), static_cast<size_t>(scores.size())),
                 pool_spans, settings.k, forced);

  const int k = static_cast<int>(selected.size());
  result.candidates = k;
  Matrix candidates(k, pooled.embeddings.cols());
  std::vector<std::optional<EntityType>> labels(k);
  std::map<TokenSpan, int> candidate_of;
  for (int i = 0; i < k; ++i) {
    const TokenSpan span = pool_spans[selected[i]];
    candidates.row(i) = pooled.embeddings.row(selected[i]);
    candidate_of[span] = i;
    if (auto it = gold_type.find(span); it != gold_type.end()) labels[i] = it->second;
  }

  const MentionLossResult mention_loss =
      MentionLoss(candidates, labels, model.entity_bank().prototypes(), mention.margin);

  const std::vector<CandidatePair> pairs = BuildPairs(k);
  std::map<std::pair<int, int>, RelationLabelSet> gold_pairs;
  for (const auto &relation : doc.relations) {
    const auto &head = doc.entities[relation.head];
    const auto &tail = doc.entities[relation.tail];
    if (!head.aligned || !tail.aligned) continue;
    auto h = candidate_of.find(head.tokens);
    auto t = candidate_of.find(tail.tokens);
    if (h == candidate_of.end() || t == candidate_of.end() || h->second == t->second) continue;
    gold_pairs[{h->second, t->second}].set(static_cast<int>(relation.type));
  }
  std::vector<RelationLabelSet> pair_labels(pairs.size());
  for (size_t p = 0; p < pairs.size(); ++p) {
    if (auto it = gold_pairs.find({pairs[p].head, pairs[p].tail}); it != gold_pairs.end()) {
      pair_labels[p] = it->second;
    }
  }
  const RelationLossResult relation_loss =
      RelationLoss(candidates, pairs, pair_labels, model.relation_bank());
  result.pairs = static_cast<int64_t>(pairs.size());

  result.mention = mention_loss.loss;
  result.relation = relation_loss.loss;
  result.total = settings.mention_weight * result.mention +
                 settings.relation_weight * result.relation;

  const double wm = settings.mention_weight * settings.gradient_scale;
  const double wr = settings.relation_weight * settings.gradient_scale;
  model.entity_bank().parameter().grad += wm * mention_loss.grad_prototypes;
  model.relation_bank().relation_parameter().grad += wr * relation_loss.grad_relations;
  model.relation_bank().nota_parameter().grad += wr * relation_loss.grad_nota;

  const Matrix grad_candidates =
      wm * mention_loss.grad_embeddings + wr * relation_loss.grad_candidates;
  Matrix grad_pooled = Matrix::Zero(pooled.embeddings.rows(), pooled.embeddings.cols());
  for (int i = 0; i < k; ++i) grad_pooled.row(selected[i]) += grad_candidates.row(i);
  Matrix grad_tokens = Matrix::Zero(token_embeddings.rows(), token_embeddings.cols());
  PoolSpansBackward(pooled, pool_spans, pooling, grad_pooled, &grad_tokens);
  BackwardLongDocument(model.encoder(), tape, grad_tokens);
  return result;
}

json CheckpointToJson(const Checkpoint &checkpoint) {
  Model &model = const_cast<Model &>(checkpoint.model);
  json params = json::object();
  for (const auto &p : model.Parameters()) params[p.name] = MatrixToJson(p.param->value);
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"model_config", ToJson(model.config())},
          {"tokenizer",
           {{"lowercase", model.tokenizer().lowercase()}, {"vocab", model.tokenizer().vocab()}}},
          {"parameters", params},
          {"config_snapshot", checkpoint.config_snapshot},
          {"best_dev_f1", checkpoint.best_dev_f1},
          {"epoch", checkpoint.epoch}};
}

Checkpoint CheckpointFromJson(const json &j) {
  if (j.value("format", "") != kCheckpointFormat) throw FormatError("not a mathlink checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version");
  }
  Checkpoint checkpoint;
  const ModelConfig config = ModelConfigFromJson(j.at("model_config"));
  const auto &tok = j.at("tokenizer");
  Tokenizer tokenizer(tok.at("vocab").get<std::vector<std::string>>(),
                      tok.at("lowercase").get<bool>());
  checkpoint.model = Model(config, std::move(tokenizer), 0);
  const auto &params = j.at("parameters");
  for (const auto &p : checkpoint.model.Parameters()) {
    if (!params.contains(p.name)) throw FormatError("checkpoint lacks parameter " + p.name);
    Matrix value = MatrixFromJson(params.at(p.name), p.name);
    if (value.rows() != p.param->value.rows() || value.cols() != p.param->value.cols()) {
      throw FormatError("checkpoint parameter " + p.name + " has wrong shape");
    }
    p.param->value = std::move(value);
    p.param->ZeroGrad();
  }
  checkpoint.config_snapshot = j.value("config_snapshot", json::object());
  checkpoint.best_dev_f1 = j.value("best_dev_f1", 0.0);
  checkpoint.epoch = j.value("epoch", 0);
  return checkpoint;
}

void SaveCheckpoint(const Checkpoint &checkpoint, const std::filesystem::path &path) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + temp.string());
    out << CheckpointToJson(checkpoint).dump();
    if (!out) throw FormatError("short write to " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return CheckpointFromJson(j);
}

}  // namespace mathlink
