//
// Copyright 2026 The ActAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ACTAUDIT_MITIGATIONS_DEFENSES_HPP
#define ACTAUDIT_MITIGATIONS_DEFENSES_HPP

#include <string>
#include <vector>

#include "actaudit/core/rng.hpp"
#include "actaudit/core/types.hpp"

namespace actaudit::mitigations {

// Inference-time defenses, applied at three hook points: observation
// (jitter), decode distribution (temperature/nucleus sampling, MC dropout),
// and generated action (Gaussian noise, rounding). Identity parameter
// settings reproduce undefended inference bit for bit.

enum class DefenseKind {
  kNone,
  kGaussian,   // additive noise on motion dimensions
  kRound,      // fixed-grid quantization of motion dimensions
  kDecode,     // temperature scaling + nucleus sampling
  kJitter,     // observation perturbation
  kMcDropout,  // dropout masks resampled per forward pass
};

struct JitterParams {
  bool vector_variant = false;
  double vector_sigma = 0.0;  // vector-observation analogue
  // Pixel path: random crop (area fraction >= min_area) resized back,
  // brightness/contrast in +/-range, then Gaussian pixel noise.
  double min_area = 1.0;
  double range = 0.0;
  double noise_sigma = 0.0;
  std::string strength;  // "light" | "medium" | "strong" | "" for custom

  bool is_identity() const {
    return vector_variant ? vector_sigma == 0.0
                          : min_area >= 1.0 && range == 0.0 &&
                                noise_sigma == 0.0;
  }
  bool operator==(const JitterParams&) const = default;
};

struct DefenseSpec {
  DefenseKind kind = DefenseKind::kNone;
  double sigma = 0.0;        // gaussian
  double delta = 0.0;        // round
  double temperature = 1.0;  // decode
  double top_p = 1.0;        // decode
  JitterParams jitter;       // jitter
  double dropout_p = 0.0;    // mcdropout

  // True when the configured parameters make the defense a no-op.
  bool is_identity() const;
  bool operator==(const DefenseSpec&) const = default;
};

// Canonical tag, e.g. "gaussian:0.2", "decode:T=2,p=0.95", "jitter:light",
// "jitter:sigma=0.05", "mcdropout:0.2", "none". parse(tag(x)) == x.
std::string defense_tag(const DefenseSpec& spec);
DefenseSpec parse_defense(const std::string& tag);

// Strength presets from the standard three-level jitter schedule.
JitterParams jitter_strength(const std::string& name);

Action defend_gaussian(const Action& action, double sigma,
                       rng::Stream& stream);

Action defend_round(const Action& action, double delta);

struct DecodeDraw {
  int token = 0;
  // Post-temperature, renormalized log-probability row: the distribution the
  // deployed decoder exposes.
  std::vector<double> post_temperature_logprobs;
};

// Temperature-scale the row, renormalize, nucleus-filter to the smallest
// descending-probability prefix with mass >= top_p, renormalize, sample.
DecodeDraw defend_decode(const std::vector<double>& logprob_row,
                         double temperature, double top_p,
                         rng::Stream& stream);

// The post-temperature, renormalized row on its own (no draw consumed).
std::vector<double> temperature_rescale(const std::vector<double>& logprob_row,
                                        double temperature);

Observation defend_obs_jitter(const Observation& obs,
                              const JitterParams& params,
                              rng::Stream& stream);

}  // namespace actaudit::mitigations

#endif  // ACTAUDIT_MITIGATIONS_DEFENSES_HPP
