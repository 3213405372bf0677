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

#include "mathlink/encoder.h"

#include <cmath>

#include "mathlink/errors.h"

namespace mathlink {
namespace {

uint64_t SplitMix64(uint64_t &state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double UnitUniform(uint64_t &state) {
  return (static_cast<double>(SplitMix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

struct ToyTape : EncoderTape {
  Matrix input;   // X
  Matrix query;   // X Wq
  Matrix key;     // X Wk
  Matrix value;   // X Wv
  Matrix attention;
  Matrix hidden;  // X + A V
};

}  // namespace

std::string_view EncoderKindName(EncoderKind kind) {
  return kind == EncoderKind::kToy ? "toy" : "pretrained-adapter";
}

std::optional<EncoderKind> ParseEncoderKind(std::string_view name) {
  if (name == "toy") return EncoderKind::kToy;
  if (name == "pretrained-adapter") return EncoderKind::kPretrainedAdapter;
  return std::nullopt;
}

void ValidateEncoderConfig(const EncoderConfig &config) {
  if (config.hidden_size <= 0) throw ConfigError("encoder hidden_size must be positive");
  if (config.window <= 0) throw ConfigError("encoder window must be positive");
  if (config.stride <= 0 || config.stride > config.window) {
    throw ConfigError("encoder stride must satisfy 0 < stride <= window");
  }
}

ToyEncoder::ToyEncoder(const EncoderConfig &config, std::mt19937_64 &rng) : config_(config) {
  ValidateEncoderConfig(config);
  const int d = config.hidden_size;
  for (Parameter *p : {&query_, &key_, &value_, &output_}) p->Resize(d, d);
  InitNormal(query_.value, 0.02, rng);
  InitNormal(key_.value, 0.02, rng);
  InitNormal(value_.value, 0.02, rng);
  output_.value = Matrix::Identity(d, d);
}

RowVector ToyEncoder::InputRow(TokenId id, int position) const {
  const int d = config_.hidden_size;
  RowVector row(d);
  uint64_t state = static_cast<uint64_t>(id) ^ config_.hash_seed;
  SplitMix64(state);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int c = 0; c < d; c += 2) {
    // Box-Muller, two normals per draw.
    const double u1 = UnitUniform(state);
    const double u2 = UnitUniform(state);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    row(c) = radius * std::cos(2.0 * M_PI * u2) * scale;
    if (c + 1 < d) row(c + 1) = radius * std::sin(2.0 * M_PI * u2) * scale;
  }
  const double position_scale = 0.5 * scale;
  for (int c = 0; c < d; ++c) {
    const double rate = std::pow(10000.0, -static_cast<double>(c - c % 2) / d);
    const double angle = position * rate;
    row(c) += position_scale * (c % 2 == 0 ? std::sin(angle) : std::cos(angle));
  }
  return row;
}

Matrix ToyEncoder::EncodeWindow(std::span<const TokenId> ids,
                                std::unique_ptr<EncoderTape> *tape) const {
  const int length = static_cast<int>(ids.size());
  const int d = config_.hidden_size;
  if (length > config_.window) {
    throw OverflowError("window of " + std::to_string(length) + " tokens exceeds " +
                        std::to_string(config_.window));
  }
  if (length == 0) return Matrix(0, d);

  Matrix input(length, d);
  for (int t = 0; t < length; ++t) input.row(t) = InputRow(ids[t], t);

  Matrix query = input * query_.value;
  Matrix key = input * key_.value;
  Matrix value = input * value_.value;
  Matrix attention = (query * key.transpose()) / std::sqrt(static_cast<double>(d));
  for (int r = 0; r < length; ++r) {
    const double max = attention.row(r).maxCoeff();
    attention.row(r) = (attention.row(r).array() - max).exp().matrix();
    attention.row(r) /= attention.row(r).sum();
  }
  Matrix hidden = input + attention * value;
  Matrix output = hidden * output_.value;

  if (tape != nullptr) {
    auto t = std::make_unique<ToyTape>();
    t->input = std::move(input);
    t->query = std::move(query);
    t->key = std::move(key);
    t->value = std::move(value);
    t->attention = std::move(attention);
    t->hidden = std::move(hidden);
    *tape = std::move(t);
  }
  return output;
}

void ToyEncoder::BackwardWindow(const EncoderTape &tape, const Matrix &grad_output) {
  const auto &t = static_cast<const ToyTape &>(tape);
  if (grad_output.rows() == 0) return;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(config_.hidden_size));

  output_.grad.noalias() += t.hidden.transpose() * grad_output;
  const Matrix grad_hidden = grad_output * output_.value.transpose();
  // hidden = X + A V; X is fixed.
  const Matrix grad_attention = grad_hidden * t.value.transpose();
  const Matrix grad_value = t.attention.transpose() * grad_hidden;
  // Row-wise softmax backward.
  Matrix grad_scores = t.attention.cwiseProduct(grad_attention);
  const Vector row_sums = grad_scores.rowwise().sum();
  grad_scores -= t.attention.cwiseProduct(row_sums.replicate(1, t.attention.cols()));
  grad_scores *= inv_sqrt_d;
  const Matrix grad_query = grad_scores * t.key;
  const Matrix grad_key = grad_scores.transpose() * t.query;

  query_.grad.noalias() += t.input.transpose() * grad_query;
  key_.grad.noalias() += t.input.transpose() * grad_key;
  value_.grad.noalias() += t.input.transpose() * grad_value;
}

std::vector<NamedParameter> ToyEncoder::Parameters() {
  return {{"encoder.query", &query_},
          {"encoder.key", &key_},
          {"encoder.value", &value_},
          {"encoder.output", &output_}};
}

std::unique_ptr<Encoder> ToyEncoder::Clone() const {
  return std::make_unique<ToyEncoder>(*this);
}

std::unique_ptr<Encoder> MakeEncoder(const EncoderConfig &config, std::mt19937_64 &rng) {
  ValidateEncoderConfig(config);
  switch (config.kind) {
    case EncoderKind::kToy:
      return std::make_unique<ToyEncoder>(config, rng);
    case EncoderKind::kPretrainedAdapter:
      throw ConfigError(
          "encoder kind 'pretrained-adapter' needs an external language-model backend; "
          "none is linked into this build (implement mathlink::Encoder to provide one)");
  }
  throw ConfigError("unknown encoder kind");
}

Matrix Encode(const Encoder &encoder, std::span<const TokenId> ids) {
  if (static_cast<int>(ids.size()) > encoder.window()) {
    throw OverflowError(std::to_string(ids.size()) + " tokens exceed the encoder window of " +
                        std::to_string(encoder.window()) +
                        "; use EncodeLongDocument for long inputs");
  }
  return encoder.EncodeWindow(ids, nullptr);
}

WindowPlan PlanWindows(int length, int window, int stride) {
  WindowPlan plan;
  if (length <= 0) return plan;
  int start = 0;
  while (true) {
    plan.starts.push_back(start);
    plan.lengths.push_back(std::min(window, length - start));
    if (start + window >= length) break;
    start += stride;
    if (start + window > length) start = length - window;
  }
  plan.owner.assign(length, 0);
  for (int i = 0; i < length; ++i) {
    int best = -1;
    int best_centrality = -1;
    for (size_t w = 0; w < plan.starts.size(); ++w) {
      const int s = plan.starts[w];
      const int e = s + plan.lengths[w];
      if (i < s || i >= e) continue;
      const int centrality = std::min(i - s, e - 1 - i);
      if (centrality > best_centrality) {
        best_centrality = centrality;
        best = static_cast<int>(w);
      }
    }
    plan.owner[i] = best;
  }
  return plan;
}

Matrix EncodeLongDocument(const Encoder &encoder, std::span<const TokenId> ids,
                          LongDocumentTape *tape) {
  const int length = static_cast<int>(ids.size());
  const WindowPlan plan = PlanWindows(length, encoder.window(), encoder.config().stride);
  Matrix out(length, encoder.hidden_size());
  if (tape != nullptr) tape->windows.clear();
  for (size_t w = 0; w < plan.starts.size(); ++w) {
    std::unique_ptr<EncoderTape> window_tape;
    const Matrix rows = encoder.EncodeWindow(ids.subspan(plan.starts[w], plan.lengths[w]),
                                             tape != nullptr ? &window_tape : nullptr);
    for (int r = 0; r < plan.lengths[w]; ++r) {
      const int token = plan.starts[w] + r;
      if (plan.owner[token] == static_cast<int>(w)) out.row(token) = rows.row(r);
    }
    if (tape != nullptr) tape->windows.push_back(std::move(window_tape));
  }
  if (tape != nullptr) tape->plan = plan;
  return out;
}

void BackwardLongDocument(Encoder &encoder, const LongDocumentTape &tape,
                          const Matrix &grad_output) {
  const WindowPlan &plan = tape.plan;
  for (size_t w = 0; w < plan.starts.size(); ++w) {
    Matrix grad = Matrix::Zero(plan.lengths[w], grad_output.cols());
    for (int r = 0; r < plan.lengths[w]; ++r) {
      const int token = plan.starts[w] + r;
      if (plan.owner[token] == static_cast<int>(w)) grad.row(r) = grad_output.row(token);
    }
    encoder.BackwardWindow(*tape.windows[w], grad);
  }
}

}  // namespace mathlink
