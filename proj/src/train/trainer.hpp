// Copyright 2026 The pano360 Authors
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

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "data/dataset.hpp"
#include "fov/fov_estimator.hpp"
#include "gan/discriminator.hpp"
#include "gan/generator.hpp"
#include "nn/checkpoint.hpp"
#include "nn/params.hpp"
#include "train/train_config.hpp"

namespace pano360::train {

// Network shapes used by one training run. Defaults are the shipped model;
// tests shrink them. Architecture descriptions are embedded in checkpoints
// and must match on resume.
struct TrainerArches {
  gan::GeneratorArch gen;
  gan::DiscriminatorArch disc;
  fov::FovNetArch fov_net;
  fov::FovClassSpec fov_bins;
};

struct TrainOptions {
  std::string manifest_path;
  gan::Stage stage = gan::Stage::small;
  TrainConfig config;
  // Checkpoint to start from. Required for medium/large: either the previous
  // stage's final checkpoint (lower groups are unified in, the new stage and
  // discriminator are freshly initialized) or a same-stage checkpoint
  // (training resumes from its step counter). Must be empty at the small
  // stage unless resuming.
  std::string init_checkpoint;
  std::string out_dir;          // receives stage_<name>.ckpt and loss_<name>.csv
  int checkpoint_interval = 500;
  TrainerArches arches;
};

struct TrainResult {
  std::string checkpoint_path;
  std::string loss_log_path;
  int steps_run = 0;       // steps executed in this call
  double final_pix = 0.0;  // pixel loss at the last executed step
};

// Promotes a finished stage's checkpoint into the next stage's parameter set:
// lower-stage generator groups and the fov classifier are copied verbatim
// (the lower-stage forward stays bit-identical), while the new stage's groups
// and its discriminator are freshly seeded from `seed`. `store` must be empty.
void unify_params(const nn::Checkpoint& ckpt, const TrainerArches& arches, gan::Stage next_stage,
                  std::uint64_t seed, nn::ParamStore<float>& store);

// Stage-wise loop: per sample one discriminator step then one generator step;
// only the active stage's generator groups move (plus the fov classifier,
// co-trained at the small stage only); ground-truth fov feeds the constrained
// inputs (the predicted fov is used at inference). Loss CSV columns:
// step,d_loss,g_adv,pix,fov_ce,total. A non-finite loss aborts with a
// diagnostic checkpoint. Checkpoints are written atomically at the interval
// and at the end.
TrainResult train_stage(const TrainOptions& opt);

// Everything inference needs, reconstructed from a checkpoint.
struct InferenceModel {
  gan::GeneratorArch gen_arch;
  fov::FovNetArch fov_arch;
  fov::FovClassSpec fov_bins;
  gan::Stage stage = gan::Stage::small;
  nn::ParamStore<float> params;   // generator + fov groups, frozen
  float fill = 0.0f;
  geometry::FovScaleLaw fov_law = geometry::FovScaleLaw::tangent;
};

InferenceModel load_inference_model(const std::string& ckpt_path);

struct InferResult {
  Image pano;  // normalized [-1,1] at the checkpoint stage's resolution
  fov::FovPrediction fov;
  bool fov_overridden = false;
};

// Four ordered views [north, west, south, east], normalized square RGB of one
// shared size. fov_override > 0 bypasses the classifier (degrees, snapped to
// the nearest bin); otherwise the classifier's prediction feeds the
// constrained inputs at every scale.
InferResult infer(const InferenceModel& model, const std::array<Image, 4>& views,
                  double fov_override = 0.0);

}  // namespace pano360::train
