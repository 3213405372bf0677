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

#ifndef MATHLINK_ENCODER_H_
#define MATHLINK_ENCODER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mathlink/parameter.h"
#include "mathlink/tokenizer.h"

namespace mathlink {

enum class EncoderKind { kToy, kPretrainedAdapter };

std::string_view EncoderKindName(EncoderKind kind);
std::optional<EncoderKind> ParseEncoderKind(std::string_view name);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kToy;
  int hidden_size = 32;
  int window = 512;
  int stride = 256;
  // Seeds the toy encoder's fixed token vectors.
  uint64_t hash_seed = 0x6d6c696e6bULL;
};

// Throws ConfigError unless 0 < stride <= window and hidden_size > 0.
void ValidateEncoderConfig(const EncoderConfig &config);

// Forward state an encoder keeps for its backward pass.
class EncoderTape {
 public:
  virtual ~EncoderTape() = default;
};

// Maps token ids to one contextual embedding row per token. Implementations
// are read-only during encoding; weights change only through Parameters().
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual const EncoderConfig &config() const = 0;

  // Encodes at most window() ids. With a tape, records what
  // BackwardWindow needs.
  virtual Matrix EncodeWindow(std::span<const TokenId> ids,
                              std::unique_ptr<EncoderTape> *tape) const = 0;

  // Accumulates parameter gradients given dLoss/dOutput for one window.
  virtual void BackwardWindow(const EncoderTape &tape, const Matrix &grad_output) = 0;

  virtual std::vector<NamedParameter> Parameters() = 0;
  virtual std::unique_ptr<Encoder> Clone() const = 0;

  int hidden_size() const { return config().hidden_size; }
  int window() const { return config().window; }
};

// Hash-derived token vectors plus sinusoidal positions, followed by one
// single-head self-attention mixing layer with a residual connection and an
// output projection.
class ToyEncoder : public Encoder {
 public:
  ToyEncoder(const EncoderConfig &config, std::mt19937_64 &rng);

  const EncoderConfig &config() const override { return config_; }
  Matrix EncodeWindow(std::span<const TokenId> ids,
                      std::unique_ptr<EncoderTape> *tape) const override;
  void BackwardWindow(const EncoderTape &tape, const Matrix &grad_output) override;
  std::vector<NamedParameter> Parameters() override;
  std::unique_ptr<Encoder> Clone() const override;

  // Untrained input row for a token at a window position.
  RowVector InputRow(TokenId id, int position) const;

 private:
  EncoderConfig config_;
  Parameter query_;
  Parameter key_;
  Parameter value_;
  Parameter output_;
};

// Throws ConfigError for kinds without a backend in this build.
std::unique_ptr<Encoder> MakeEncoder(const EncoderConfig &config, std::mt19937_64 &rng);

// Single-window encoding. Throws OverflowError when ids exceed the window;
// use EncodeLongDocument for those.
Matrix Encode(const Encoder &encoder, std::span<const TokenId> ids);

// Sliding windows of config().window tokens advanced by config().stride, the
// last window aligned to the end of the input. Each token is owned by the
// window in which it sits most centrally (earlier window on ties).
struct WindowPlan {
  std::vector<int> starts;
  std::vector<int> lengths;
  std::vector<int> owner;  // per token, index into starts
};

WindowPlan PlanWindows(int length, int window, int stride);

struct LongDocumentTape {
  WindowPlan plan;
  std::vector<std::unique_ptr<EncoderTape>> windows;
};

Matrix EncodeLongDocument(const Encoder &encoder, std::span<const TokenId> ids,
                          LongDocumentTape *tape = nullptr);

// Routes each row's gradient to the window that produced it.
void BackwardLongDocument(Encoder &encoder, const LongDocumentTape &tape,
                          const Matrix &grad_output);

}  // namespace mathlink

#endif  // MATHLINK_ENCODER_H_
