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

#include "actaudit/mitigations/defenses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "actaudit/core/errors.hpp"

namespace actaudit::mitigations {
namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_number(const std::string& s, const std::string& tag) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    raise(ErrorKind::kUsage,
          "bad numeric parameter '" + s + "' in defense '" + tag + "'");
  }
  return v;
}

}  // namespace

bool DefenseSpec::is_identity() const {
  switch (kind) {
    case DefenseKind::kNone:
      return true;
    case DefenseKind::kGaussian:
      return sigma == 0.0;
    case DefenseKind::kRound:
      return delta == 0.0;
    case DefenseKind::kDecode:
      return false;  // sampling itself is the defense
    case DefenseKind::kJitter:
      return jitter.is_identity();
    case DefenseKind::kMcDropout:
      return dropout_p == 0.0;
  }
  return true;
}

std::string defense_tag(const DefenseSpec& spec) {
  switch (spec.kind) {
    case DefenseKind::kNone:
      return "none";
    case DefenseKind::kGaussian:
      return "gaussian:" + shortest(spec.sigma);
    case DefenseKind::kRound:
      return "round:" + shortest(spec.delta);
    case DefenseKind::kDecode:
      return "decode:T=" + shortest(spec.temperature) + ",p=" +
             shortest(spec.top_p);
    case DefenseKind::kJitter:
      if (!spec.jitter.strength.empty()) {
        return "jitter:" + spec.jitter.strength;
      }
      return "jitter:sigma=" + shortest(spec.jitter.vector_sigma);
    case DefenseKind::kMcDropout:
      return "mcdropout:" + shortest(spec.dropout_p);
  }
  return "none";
}

JitterParams jitter_strength(const std::string& name) {
  JitterParams p;
  p.strength = name;
  if (name == "light") {
    p.min_area = 0.75;
    p.range = 0.20;
    p.noise_sigma = 0.05;
  } else if (name == "medium") {
    p.min_area = 0.60;
    p.range = 0.35;
    p.noise_sigma = 0.10;
  } else if (name == "strong") {
    p.min_area = 0.45;
    p.range = 0.50;
    p.noise_sigma = 0.20;
  } else if (name == "none") {
    p.min_area = 1.0;
    p.range = 0.0;
    p.noise_sigma = 0.0;
  } else {
    raise(ErrorKind::kUsage, "unknown jitter strength '" + name + "'");
  }
  return p;
}

DefenseSpec parse_defense(const std::string& tag) {
  DefenseSpec spec;
  if (tag.empty() || tag == "none") return spec;
  const size_t colon = tag.find(':');
  if (colon == std::string::npos) {
    raise(ErrorKind::kUsage,
          "defense '" + tag + "' must look like '<name>:<params>'");
  }
  const std::string name = tag.substr(0, colon);
  const std::string args = tag.substr(colon + 1);
  if (name == "gaussian") {
    spec.kind = DefenseKind::kGaussian;
    spec.sigma = parse_number(args, tag);
    if (spec.sigma < 0.0) raise(ErrorKind::kUsage, "gaussian sigma < 0");
  } else if (name == "round") {
    spec.kind = DefenseKind::kRound;
    spec.delta = parse_number(args, tag);
    if (spec.delta < 0.0) raise(ErrorKind::kUsage, "rounding delta < 0");
  } else if (name == "decode") {
    spec.kind = DefenseKind::kDecode;
    size_t pos = 0;
    while (pos < args.size()) {
      size_t comma = args.find(',', pos);
      if (comma == std::string::npos) comma = args.size();
      const std::string item = args.substr(pos, comma - pos);
      const size_t eq = item.find('=');
      if (eq == std::string::npos) {
        raise(ErrorKind::kUsage, "decode parameter '" + item +
                                     "' must look like key=value");
      }
      const std::string key = item.substr(0, eq);
      const double value = parse_number(item.substr(eq + 1), tag);
      if (key == "T") {
        spec.temperature = value;
      } else if (key == "p") {
        spec.top_p = value;
      } else {
        raise(ErrorKind::kUsage, "unknown decode parameter '" + key + "'");
      }
      pos = comma + 1;
    }
    if (!(spec.temperature > 0.0)) {
      raise(ErrorKind::kUsage, "decode temperature must be > 0");
    }
    if (!(spec.top_p > 0.0 && spec.top_p <= 1.0)) {
      raise(ErrorKind::kUsage, "decode top_p must lie in (0, 1]");
    }
  } else if (name == "jitter") {
    spec.kind = DefenseKind::kJitter;
    if (args.rfind("sigma=", 0) == 0) {
      spec.jitter.vector_variant = true;
      spec.jitter.vector_sigma = parse_number(args.substr(6), tag);
      if (spec.jitter.vector_sigma < 0.0) {
        raise(ErrorKind::kUsage, "jitter sigma < 0");
      }
    } else {
      spec.jitter = jitter_strength(args);
    }
  } else if (name == "mcdropout") {
    spec.kind = DefenseKind::kMcDropout;
    spec.dropout_p = parse_number(args, tag);
    if (!(spec.dropout_p >= 0.0 && spec.dropout_p < 1.0)) {
      raise(ErrorKind::kUsage, "mcdropout p must lie in [0, 1)");
    }
  } else {
    raise(ErrorKind::kUsage, "unknown defense '" + name + "'");
  }
  return spec;
}

Action defend_gaussian(const Action& action, double sigma,
                       rng::Stream& stream) {
  if (action.dim() < 2) {
    raise(ErrorKind::kDimensionMismatch,
          "gaussian defense needs motion dimensions plus a gripper");
  }
  if (sigma == 0.0) return action;
  Action out = action;
  for (size_t i = 0; i + 1 < out.dim(); ++i) {
    out.values[i] += stream.normal(0.0, sigma);
  }
  return out;  // gripper dimension untouched
}

Action defend_round(const Action& action, double delta) {
  if (action.dim() < 2) {
    raise(ErrorKind::kDimensionMismatch,
          "rounding defense needs motion dimensions plus a gripper");
  }
  if (delta == 0.0) return action;
  Action out = action;
  for (size_t i = 0; i + 1 < out.dim(); ++i) {
    out.values[i] = std::round(out.values[i] / delta) * delta;
  }
  return out;
}

std::vector<double> temperature_rescale(const std::vector<double>& logprob_row,
                                        double temperature) {
  if (logprob_row.empty()) {
    raise(ErrorKind::kDimensionMismatch, "empty log-probability row");
  }
  if (!(temperature > 0.0)) {
    raise(ErrorKind::kUsage, "decode temperature must be > 0");
  }
  std::vector<double> post(logprob_row.size());
  double max_scaled = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logprob_row.size(); ++i) {
    post[i] = logprob_row[i] / temperature;
    max_scaled = std::max(max_scaled, post[i]);
  }
  double z = 0.0;
  for (double lp : post) z += std::exp(lp - max_scaled);
  const double log_z = max_scaled + std::log(z);
  for (double& lp : post) lp -= log_z;
  return post;
}

DecodeDraw defend_decode(const std::vector<double>& logprob_row,
                         double temperature, double top_p,
                         rng::Stream& stream) {
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    raise(ErrorKind::kUsage, "decode top_p must lie in (0, 1]");
  }

  DecodeDraw draw;
  draw.post_temperature_logprobs = temperature_rescale(logprob_row, temperature);
  const auto& post = draw.post_temperature_logprobs;

  // Nucleus: smallest descending-probability prefix with mass >= top_p.
  // The argmax is always inside, so the nucleus is never empty.
  std::vector<size_t> order(post.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return post[a] > post[b]; });
  double mass = 0.0;
  size_t nucleus_size = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    mass += std::exp(post[order[i]]);
    nucleus_size = i + 1;
    if (mass >= top_p) break;
  }

  const double u = stream.uniform() * mass;
  double cumulative = 0.0;
  draw.token = static_cast<int>(order[nucleus_size - 1]);
  for (size_t i = 0; i < nucleus_size; ++i) {
    cumulative += std::exp(post[order[i]]);
    if (u < cumulative) {
      draw.token = static_cast<int>(order[i]);
      break;
    }
  }
  return draw;
}

namespace {

PixelObs jitter_pixels(const PixelObs& src, const JitterParams& params,
                       rng::Stream& stream) {
  const int h = src.height;
  const int w = src.width;
  const int channels = src.channels;

  // Crop geometry: ceil keeps the realized area fraction >= the draw.
  const double area = stream.uniform(params.min_area, 1.0);
  const double aspect = stream.uniform(0.75, 4.0 / 3.0);
  const int crop_w = std::clamp(
      static_cast<int>(std::ceil(w * std::sqrt(area * aspect))), 1, w);
  const int crop_h = std::clamp(
      static_cast<int>(std::ceil(h * std::sqrt(area / aspect))), 1, h);
  const int left = static_cast<int>(
      stream.uniform_int(static_cast<uint64_t>(w - crop_w + 1)));
  const int top = static_cast<int>(
      stream.uniform_int(static_cast<uint64_t>(h - crop_h + 1)));

  const double contrast = stream.uniform(1.0 - params.range, 1.0 + params.range);
  const double brightness = stream.uniform(-params.range, params.range);

  PixelObs out;
  out.height = h;
  out.width = w;
  out.channels = channels;
  out.pixels.resize(src.pixels.size());
  for (int y = 0; y < h; ++y) {
    // Half-pixel-center bilinear resize of the crop back to (h, w).
    const double sy = std::clamp(
        (y + 0.5) * crop_h / h - 0.5, 0.0, static_cast<double>(crop_h - 1));
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, crop_h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < w; ++x) {
      const double sx = std::clamp(
          (x + 0.5) * crop_w / w - 0.5, 0.0, static_cast<double>(crop_w - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, crop_w - 1);
      const double fx = sx - x0;
      for (int c = 0; c < channels; ++c) {
        const double v00 = src.at(top + y0, left + x0, c);
        const double v01 = src.at(top + y0, left + x1, c);
        const double v10 = src.at(top + y1, left + x0, c);
        const double v11 = src.at(top + y1, left + x1, c);
        double v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
                   fy * ((1.0 - fx) * v10 + fx * v11);
        v = v * contrast + brightness;
        if (params.noise_sigma > 0.0) {
          v += stream.normal(0.0, params.noise_sigma);
        }
        out.at(y, x, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace

Observation defend_obs_jitter(const Observation& obs,
                              const JitterParams& params,
                              rng::Stream& stream) {
  if (params.vector_variant) {
    const auto* vec = std::get_if<VectorObs>(&obs);
    if (vec == nullptr) {
      raise(ErrorKind::kDimensionMismatch,
            "vector jitter requires a vector observation");
    }
    if (params.vector_sigma == 0.0) return obs;
    VectorObs out = *vec;
    for (double& v : out.values) {
      v += stream.normal(0.0, params.vector_sigma);
    }
    return out;
  }
  const auto* px = std::get_if<PixelObs>(&obs);
  if (px == nullptr) {
    raise(ErrorKind::kDimensionMismatch,
          "pixel jitter requires a pixel observation");
  }
  if (params.is_identity()) return obs;
  return jitter_pixels(*px, params, stream);
}

}  // namespace actaudit::mitigations
