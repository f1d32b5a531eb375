// Copyright 2026 The dpnc Authors.
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


#include "dpnc/experiment_config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dpnc/link_function.h"
#include "dpnc/status_macros.h"
#include "json.hpp"

namespace dpnc {
namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::kGlmRiskCurve, "glm-risk-curve"},
    {ExperimentKind::kReluWellSpec, "relu-wellspec"},
    {ExperimentKind::kReluMisspec, "relu-misspec"},
    {ExperimentKind::kTwoLayer, "twolayer"},
    {ExperimentKind::kMlpClipSweep, "mlp-clip-sweep"},
    {ExperimentKind::kMlpWidthSweep, "mlp-width-sweep"},
    {ExperimentKind::kMlpIterSweep, "mlp-iter-sweep"},
    {ExperimentKind::kMlpNSweep, "mlp-n-sweep"},
    {ExperimentKind::kNtrfFit, "ntrf-fit"},
};

// Reads typed fields out of one JSON object and rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where)
      : obj_(obj), where_(std::move(where)) {}

  absl::Status Begin() const {
    if (!obj_.is_object()) {
      return absl::InvalidArgumentError(where_ + " must be a JSON object");
    }
    return absl::OkStatus();
  }

  const json* Find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  absl::Status Number(const std::string& key, double& out) {
    const json* v = Find(key);
    if (v == nullptr) return absl::OkStatus();
    if (!v->is_number()) return TypeError(key, "a number");
    out = v->get<double>();
    return absl::OkStatus();
  }

  absl::Status Number(const std::string& key, std::optional<double>& out) {
    const json* v = Find(key);
    if (v == nullptr) return absl::OkStatus();
    if (!v->is_number()) return TypeError(key, "a number");
    out = v->get<double>();
    return absl::OkStatus();
  }

  absl::Status Integer(const std::string& key, int64_t& out) {
    const json* v = Find(key);
    if (v == nullptr) return absl::OkStatus();
    if (!v->is_number_integer()) return TypeError(key, "an integer");
    out = v->get<int64_t>();
    return absl::OkStatus();
  }

  absl::Status String(const std::string& key, std::string& out) {
    const json* v = Find(key);
    if (v == nullptr) return absl::OkStatus();
    if (!v->is_string()) return TypeError(key, "a string");
    out = v->get<std::string>();
    return absl::OkStatus();
  }

  absl::Status Finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.contains(item.key())) {
        return absl::InvalidArgumentError(
            absl::StrCat(where_, ": unknown key \"", item.key(), "\""));
      }
    }
    return absl::OkStatus();
  }

  absl::Status TypeError(const std::string& key, const char* want) const {
    return absl::InvalidArgumentError(
        absl::StrCat(where_, ".", key, " must be ", want));
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

absl::Status ParseDataset(const json& obj, DatasetSpec& out) {
  ObjectReader r(obj, "dataset");
  DPNC_RETURN_IF_ERROR(r.Begin());
  DPNC_RETURN_IF_ERROR(r.String("source", out.source));
  DPNC_RETURN_IF_ERROR(r.Integer("n", out.n));
  DPNC_RETURN_IF_ERROR(r.Integer("d", out.d));
  DPNC_RETURN_IF_ERROR(r.Number("w_norm", out.w_norm));
  DPNC_RETURN_IF_ERROR(r.Number("noise_std", out.noise_std));
  DPNC_RETURN_IF_ERROR(r.String("link", out.link));
  DPNC_RETURN_IF_ERROR(r.Number("label_bound", out.label_bound));
  DPNC_RETURN_IF_ERROR(r.Number("bias_amplitude", out.bias_amplitude));
  DPNC_RETURN_IF_ERROR(r.Integer("hidden_units", out.hidden_units));
  DPNC_RETURN_IF_ERROR(r.String("inner_link", out.inner_link));
  DPNC_RETURN_IF_ERROR(r.String("outer_link", out.outer_link));
  DPNC_RETURN_IF_ERROR(r.Number("flip_prob", out.flip_prob));
  DPNC_RETURN_IF_ERROR(r.String("mnist_images", out.mnist_images));
  DPNC_RETURN_IF_ERROR(r.String("mnist_labels", out.mnist_labels));
  if (const json* v = r.Find("positive_digits")) {
    if (!v->is_array()) return r.TypeError("positive_digits", "an array");
    out.positive_digits.clear();
    for (const json& e : *v) {
      if (!e.is_number_integer()) {
        return r.TypeError("positive_digits", "an array of integers");
      }
      out.positive_digits.push_back(e.get<int>());
    }
  }
  return r.Finish();
}

absl::Status ParseAlgorithm(const json& obj, AlgorithmSpec& out) {
  ObjectReader r(obj, "algorithm");
  DPNC_RETURN_IF_ERROR(r.Begin());
  DPNC_RETURN_IF_ERROR(r.String("variant", out.variant));
  DPNC_RETURN_IF_ERROR(r.Number("eta", out.eta));
  DPNC_RETURN_IF_ERROR(r.Number("eta_multiplier", out.eta_multiplier));
  DPNC_RETURN_IF_ERROR(r.Number("theta", out.theta));
  DPNC_RETURN_IF_ERROR(r.Number("beta", out.beta));
  DPNC_RETURN_IF_ERROR(r.Number("gamma", out.gamma));
  DPNC_RETURN_IF_ERROR(r.Integer("projection_dim", out.projection_dim));
  DPNC_RETURN_IF_ERROR(r.Number("w_bound", out.w_bound));
  DPNC_RETURN_IF_ERROR(r.Integer("iterations", out.iterations));
  DPNC_RETURN_IF_ERROR(r.Number("alpha", out.alpha));
  DPNC_RETURN_IF_ERROR(r.Integer("degree", out.degree));
  DPNC_RETURN_IF_ERROR(r.Integer("depth", out.depth));
  DPNC_RETURN_IF_ERROR(r.Integer("width", out.width));
  DPNC_RETURN_IF_ERROR(r.Number("clip", out.clip));
  DPNC_RETURN_IF_ERROR(r.Number("radius", out.radius));
  DPNC_RETURN_IF_ERROR(r.Number("expected_batch", out.expected_batch));
  DPNC_RETURN_IF_ERROR(r.Number("c1", out.c1));
  DPNC_RETURN_IF_ERROR(r.Number("c2", out.c2));
  DPNC_RETURN_IF_ERROR(r.String("calibration", out.calibration));
  DPNC_RETURN_IF_ERROR(r.String("loss", out.loss));
  DPNC_RETURN_IF_ERROR(r.Number("noise_std", out.noise_std));
  DPNC_RETURN_IF_ERROR(r.Integer("epochs", out.epochs));
  DPNC_RETURN_IF_ERROR(r.Integer("batch_size", out.batch_size));
  DPNC_RETURN_IF_ERROR(r.Number("radius_ratio", out.radius_ratio));
  return r.Finish();
}

absl::Status ParseSweep(const json& obj, SweepSpec& out) {
  ObjectReader r(obj, "sweep");
  DPNC_RETURN_IF_ERROR(r.Begin());
  DPNC_RETURN_IF_ERROR(r.String("knob", out.knob));
  if (const json* v = r.Find("values")) {
    if (!v->is_array()) return r.TypeError("values", "an array");
    for (const json& e : *v) {
      if (!e.is_number()) return r.TypeError("values", "an array of numbers");
      out.values.push_back(e.get<double>());
    }
  }
  return r.Finish();
}

absl::Status Require(bool ok, std::string_view message) {
  return ok ? absl::OkStatus()
            : absl::InvalidArgumentError(std::string(message));
}

bool IsWhole(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string_view KindName(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

absl::StatusOr<ExperimentKind> KindByName(std::string_view name) {
  for (const auto& [k, kind_name] : kKindNames) {
    if (kind_name == name) return k;
  }
  std::vector<std::string> names;
  for (const auto& entry : kKindNames) names.emplace_back(entry.second);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment kind \"", std::string(name),
                   "\"; expected one of ", absl::StrJoin(names, ", ")));
}

bool IsMlpKind(ExperimentKind kind) {
  return kind == ExperimentKind::kMlpClipSweep ||
         kind == ExperimentKind::kMlpWidthSweep ||
         kind == ExperimentKind::kMlpIterSweep ||
         kind == ExperimentKind::kMlpNSweep;
}

std::vector<std::string> AllowedKnobs(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kGlmRiskCurve:
      return {"n", "epsilon", "eta_multiplier", "theta"};
    case ExperimentKind::kReluWellSpec:
      return {"n", "epsilon", "iterations", "projection_dim"};
    case ExperimentKind::kReluMisspec:
      return {"n", "epsilon", "iterations", "bias_amplitude"};
    case ExperimentKind::kTwoLayer:
      return {"n", "epsilon", "degree", "eta_multiplier"};
    case ExperimentKind::kMlpClipSweep:
      return {"clip"};
    case ExperimentKind::kMlpWidthSweep:
      return {"width"};
    case ExperimentKind::kMlpIterSweep:
      return {"iterations"};
    case ExperimentKind::kMlpNSweep:
      return {"n"};
    case ExperimentKind::kNtrfFit:
      return {"radius_ratio", "width"};
  }
  return {};
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("config is not valid JSON");
  }
  ExperimentConfig cfg;
  ObjectReader r(doc, "config");
  DPNC_RETURN_IF_ERROR(r.Begin());
  DPNC_RETURN_IF_ERROR(r.String("id", cfg.id));
  std::string kind;
  DPNC_RETURN_IF_ERROR(r.String("kind", kind));
  if (kind.empty()) return absl::InvalidArgumentError("config.kind is required");
  DPNC_ASSIGN_OR_RETURN(cfg.kind, KindByName(kind));
  DPNC_RETURN_IF_ERROR(r.Number("epsilon", cfg.epsilon));
  if (const json* v = r.Find("delta")) {
    if (v->is_number()) {
      cfg.delta = v->get<double>();
    } else if (v->is_string()) {
      cfg.delta_rule = v->get<std::string>();
    } else {
      return r.TypeError("delta", "a number or \"1/n^2\" or \"1/n\"");
    }
  }
  std::string noise = "live";
  DPNC_RETURN_IF_ERROR(r.String("noise", noise));
  if (noise != "live" && noise != "zero") {
    return absl::InvalidArgumentError("config.noise must be \"live\" or \"zero\"");
  }
  cfg.noise_free = noise == "zero";
  if (const json* v = r.Find("seeds")) {
    if (!v->is_array()) return r.TypeError("seeds", "an array");
    cfg.seeds.clear();
    for (const json& e : *v) {
      if (!e.is_number_unsigned()) {
        return r.TypeError("seeds", "an array of nonnegative integers");
      }
      cfg.seeds.push_back(e.get<uint64_t>());
    }
  }
  DPNC_RETURN_IF_ERROR(r.Integer("n_test", cfg.n_test));
  if (const json* v = r.Find("dataset")) {
    DPNC_RETURN_IF_ERROR(ParseDataset(*v, cfg.dataset));
  }
  if (const json* v = r.Find("algorithm")) {
    DPNC_RETURN_IF_ERROR(ParseAlgorithm(*v, cfg.algorithm));
  }
  const json* sweep = r.Find("sweep");
  if (sweep == nullptr) {
    return absl::InvalidArgumentError("config.sweep is required");
  }
  DPNC_RETURN_IF_ERROR(ParseSweep(*sweep, cfg.sweep));
  DPNC_RETURN_IF_ERROR(r.Finish());
  DPNC_RETURN_IF_ERROR(ValidateExperimentConfig(cfg));
  return cfg;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto cfg = ParseExperimentConfig(buffer.str());
  if (!cfg.ok()) {
    return absl::Status(cfg.status().code(),
                        absl::StrCat(path, ": ", cfg.status().message()));
  }
  return cfg;
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& cfg) {
  const DatasetSpec& ds = cfg.dataset;
  const AlgorithmSpec& alg = cfg.algorithm;
  DPNC_RETURN_IF_ERROR(Require(!cfg.id.empty(), "config.id is required"));
  DPNC_RETURN_IF_ERROR(Require(
      cfg.id.find_first_of(",\n\r/") == std::string::npos,
      "config.id may not contain ',', '/' or newlines"));
  DPNC_RETURN_IF_ERROR(Require(cfg.epsilon > 0.0 && std::isfinite(cfg.epsilon),
                               "epsilon must be positive and finite"));
  if (cfg.delta.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*cfg.delta > 0.0 && *cfg.delta < 1.0,
                                 "delta must lie in (0, 1)"));
  } else {
    DPNC_RETURN_IF_ERROR(
        Require(cfg.delta_rule == "1/n^2" || cfg.delta_rule == "1/n",
                "delta rule must be \"1/n^2\" or \"1/n\""));
  }
  DPNC_RETURN_IF_ERROR(Require(!cfg.seeds.empty(), "seeds may not be empty"));
  DPNC_RETURN_IF_ERROR(Require(cfg.n_test >= 100, "n_test must be >= 100"));

  DPNC_RETURN_IF_ERROR(Require(ds.source == "synthetic" || ds.source == "mnist",
                               "dataset.source must be synthetic or mnist"));
  if (ds.source == "mnist") {
    DPNC_RETURN_IF_ERROR(Require(IsMlpKind(cfg.kind),
                                 "mnist data is only used by mlp-* kinds"));
    DPNC_RETURN_IF_ERROR(
        Require(!ds.mnist_images.empty() && !ds.mnist_labels.empty(),
                "mnist source needs dataset.mnist_images and mnist_labels"));
  }
  DPNC_RETURN_IF_ERROR(Require(ds.n >= 2, "dataset.n must be >= 2"));
  DPNC_RETURN_IF_ERROR(Require(ds.d >= 1, "dataset.d must be >= 1"));
  DPNC_RETURN_IF_ERROR(Require(ds.w_norm >= 0.0 && std::isfinite(ds.w_norm),
                               "dataset.w_norm must be finite and >= 0"));
  DPNC_RETURN_IF_ERROR(Require(ds.noise_std >= 0.0,
                               "dataset.noise_std must be >= 0"));
  DPNC_RETURN_IF_ERROR(LinkByName(ds.link).status());
  DPNC_RETURN_IF_ERROR(LinkByName(ds.inner_link).status());
  DPNC_RETURN_IF_ERROR(LinkByName(ds.outer_link).status());
  if (ds.label_bound.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*ds.label_bound > 0.0,
                                 "dataset.label_bound must be positive"));
  }
  DPNC_RETURN_IF_ERROR(Require(ds.bias_amplitude >= 0.0,
                               "dataset.bias_amplitude must be >= 0"));
  DPNC_RETURN_IF_ERROR(Require(ds.hidden_units >= 1,
                               "dataset.hidden_units must be >= 1"));
  DPNC_RETURN_IF_ERROR(Require(ds.flip_prob >= 0.0 && ds.flip_prob <= 0.5,
                               "dataset.flip_prob must lie in [0, 0.5]"));

  static const std::set<std::string> kVariants = {
      "auto", "phased", "projected", "moreau", "moreau-projected"};
  DPNC_RETURN_IF_ERROR(Require(kVariants.contains(alg.variant),
                               "algorithm.variant is not recognized"));
  if (alg.eta.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*alg.eta > 0.0, "algorithm.eta must be > 0"));
  }
  DPNC_RETURN_IF_ERROR(Require(alg.eta_multiplier > 0.0,
                               "algorithm.eta_multiplier must be > 0"));
  if (alg.theta.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*alg.theta > 0.0,
                                 "algorithm.theta must be > 0"));
  }
  if (alg.beta.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*alg.beta > 0.0, "algorithm.beta must be > 0"));
  }
  if (alg.gamma.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*alg.gamma > 0.0,
                                 "algorithm.gamma must be > 0"));
  }
  DPNC_RETURN_IF_ERROR(Require(alg.projection_dim >= 0,
                               "algorithm.projection_dim must be >= 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.w_bound > 0.0,
                               "algorithm.w_bound must be > 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.iterations >= 0,
                               "algorithm.iterations must be >= 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.alpha > 0.0, "algorithm.alpha must be > 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.degree >= 0,
                               "algorithm.degree must be >= 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.depth >= 2, "algorithm.depth must be >= 2"));
  DPNC_RETURN_IF_ERROR(Require(alg.width >= 1, "algorithm.width must be >= 1"));
  DPNC_RETURN_IF_ERROR(Require(alg.clip > 0.0, "algorithm.clip must be > 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.radius > 0.0,
                               "algorithm.radius must be > 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.expected_batch >= 1.0,
                               "algorithm.expected_batch must be >= 1"));
  DPNC_RETURN_IF_ERROR(Require(alg.c1 > 0.0 && alg.c2 > 0.0,
                               "algorithm.c1 and c2 must be > 0"));
  DPNC_RETURN_IF_ERROR(
      Require(alg.calibration == "theorem" || alg.calibration == "strict",
              "algorithm.calibration must be theorem or strict"));
  DPNC_RETURN_IF_ERROR(Require(alg.loss == "logistic" || alg.loss == "squared",
                               "algorithm.loss must be logistic or squared"));
  if (alg.noise_std.has_value()) {
    DPNC_RETURN_IF_ERROR(Require(*alg.noise_std >= 0.0,
                                 "algorithm.noise_std must be >= 0"));
  }
  DPNC_RETURN_IF_ERROR(Require(alg.epochs >= 0, "algorithm.epochs must be >= 0"));
  DPNC_RETURN_IF_ERROR(Require(alg.batch_size >= 1,
                               "algorithm.batch_size must be >= 1"));
  DPNC_RETURN_IF_ERROR(Require(alg.radius_ratio >= 0.0,
                               "algorithm.radius_ratio must be >= 0"));

  const std::vector<std::string> knobs = AllowedKnobs(cfg.kind);
  if (std::find(knobs.begin(), knobs.end(), cfg.sweep.knob) == knobs.end()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sweep.knob \"", cfg.sweep.knob, "\" is not valid for ",
        std::string(KindName(cfg.kind)), "; expected one of ",
        absl::StrJoin(knobs, ", ")));
  }
  DPNC_RETURN_IF_ERROR(Require(!cfg.sweep.values.empty(),
                               "sweep.values may not be empty"));
  const std::string& knob = cfg.sweep.knob;
  const bool integral = knob == "n" || knob == "width" ||
                        knob == "iterations" || knob == "projection_dim" ||
                        knob == "degree";
  std::set<double> distinct;
  for (double v : cfg.sweep.values) {
    DPNC_RETURN_IF_ERROR(Require(std::isfinite(v), "sweep values must be finite"));
    if (integral) {
      DPNC_RETURN_IF_ERROR(Require(IsWhole(v) && v >= 0.0,
                                   "sweep values must be whole numbers"));
    }
    if (knob == "n") {
      DPNC_RETURN_IF_ERROR(Require(v >= 2.0, "swept n must be >= 2"));
    } else if (knob == "width" || knob == "iterations") {
      DPNC_RETURN_IF_ERROR(Require(v >= 1.0, "swept value must be >= 1"));
    } else if (knob == "epsilon" || knob == "clip" || knob == "theta" ||
               knob == "eta_multiplier") {
      DPNC_RETURN_IF_ERROR(Require(v > 0.0, "swept value must be positive"));
    } else {
      DPNC_RETURN_IF_ERROR(Require(v >= 0.0, "swept value must be >= 0"));
    }
    DPNC_RETURN_IF_ERROR(Require(distinct.insert(v).second,
                                 "sweep values must be distinct"));
  }
  return absl::OkStatus();
}

double ResolveDelta(const ExperimentConfig& cfg, int64_t n) {
  if (cfg.delta.has_value()) return *cfg.delta;
  const double nn = static_cast<double>(n);
  return cfg.delta_rule == "1/n" ? 1.0 / nn : 1.0 / (nn * nn);
}

}  // namespace dpnc
