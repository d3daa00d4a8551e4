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

#include "train/seam_demo.hpp"

#include <filesystem>
#include <vector>

#include "core/image_io.hpp"
#include "core/rng.hpp"
#include "data/dataset.hpp"
#include "gan/generator.hpp"
#include "nn/adam.hpp"
#include "nn/image_tensor.hpp"
#include "train/trainer.hpp"

namespace pano360::train {

namespace {

gan::GeneratorArch demo_arch(bool wrap) {
  gan::GeneratorArch arch;
  arch.bridge_channels = 16;
  arch.enc_channels = {16, 24, 32, 48};
  arch.horizontal_wrap = wrap;
  return arch;
}

// L1-only fitting of the small-stage core to (input, target) pairs, cycling
// through the pairs in order.
void fit_single_scale(const gan::GeneratorArch& arch, nn::ParamStore<float>& store,
                      const std::vector<nn::Tensor<float>>& inputs,
                      const std::vector<nn::Tensor<float>>& targets, int steps,
                      std::uint64_t seed) {
  for (const std::string& prefix : gan::generator_group_prefixes(gan::Stage::small))
    store.set_requires_grad(prefix, true);
  Rng rng(seed);
  for (const std::string& prefix : gan::generator_group_prefixes(gan::Stage::small))
    nn::init_params(store, rng, prefix);
  nn::Adam<float> adam(2e-4f, 0.5f, 0.99f);
  auto params = store.with_prefix("gen.");
  for (int step = 0; step < steps; ++step) {
    const std::size_t i = static_cast<std::size_t>(step) % inputs.size();
    auto out = gan::generator_single_scale(arch, store, gan::Stage::small, inputs[i]);
    auto loss = nn::l1_loss(out, targets[i]);
    nn::backward(loss);
    adam.step(params);
  }
}

Image predict_single_scale(const gan::GeneratorArch& arch, nn::ParamStore<float>& store,
                           const nn::Tensor<float>& input) {
  store.set_requires_grad("gen.", false);
  auto out = gan::generator_single_scale(arch, store, gan::Stage::small, input);
  store.set_requires_grad("gen.", true);
  return nn::image_from_tensor(out->value);
}

}  // namespace

SeamDemoResult run_seam_demo(const SeamDemoOptions& opt) {
  if (opt.steps < 1) throw DataError("seam demo needs at least one step");
  const data::DatasetManifest manifest = data::load_manifest(opt.manifest_path);
  const auto train_recs = manifest.split_records("train");
  if (train_recs.empty()) throw DataError("manifest has no train records");
  const data::LoadedSample sample = data::load_sample(manifest, *train_recs.front());
  std::filesystem::create_directories(opt.out_dir);

  const int pano_h = gan::stage_height(gan::Stage::small);
  const int face = pano_h / 2;
  const float fill = static_cast<float>(manifest.fill);
  const auto law = geometry::fov_scale_law_from_string(manifest.fov_law);
  const Image& gt_pano = sample.gt[0];

  // Cubemap format: one shared model fits each face separately, with plain
  // zero padding (faces are not periodic). Conditioning mirrors the
  // constrained input, split into its faces.
  geometry::CubeMapFaces cond_faces;
  cond_faces.face_size = face;
  geometry::CubeMapFaces gt_faces = geometry::equirect_to_cubemap(gt_pano, face);
  for (int f = 0; f < geometry::kNumFaces; ++f) {
    if (f < 4)
      cond_faces.faces[static_cast<std::size_t>(f)] = geometry::embed_view_with_fov(
          sample.views[static_cast<std::size_t>(f)], sample.fov_deg, face, fill, law);
    else
      cond_faces.faces[static_cast<std::size_t>(f)] =
          Image(face, face, 3, ValueRange::normalized, fill);
  }
  std::vector<nn::Tensor<float>> face_in, face_gt;
  for (int f = 0; f < geometry::kNumFaces; ++f) {
    face_in.push_back(nn::tensor_from_image(cond_faces.faces[static_cast<std::size_t>(f)]));
    face_gt.push_back(nn::tensor_from_image(gt_faces.faces[static_cast<std::size_t>(f)]));
  }
  const gan::GeneratorArch cube_arch = demo_arch(false);
  nn::ParamStore<float> cube_store;
  gan::create_generator_stage_params(cube_store, cube_arch, gan::Stage::small);
  fit_single_scale(cube_arch, cube_store, face_in, face_gt, opt.steps, opt.seed);
  geometry::CubeMapFaces out_faces;
  out_faces.face_size = face;
  for (int f = 0; f < geometry::kNumFaces; ++f)
    out_faces.faces[static_cast<std::size_t>(f)] =
        predict_single_scale(cube_arch, cube_store, face_in[static_cast<std::size_t>(f)]);

  SeamDemoResult res;
  res.cubemap_pano_path = opt.out_dir + "/seam_cubemap.png";
  save_image(geometry::cubemap_to_equirect(out_faces, pano_h), res.cubemap_pano_path);

  // Equirect format: the same capacity fits the panorama natively with
  // azimuth-periodic padding, so the output has no face seams.
  const Image cond_pano =
      fov::constrain_views(sample.views, sample.fov_deg, face, fill, pano_h, law);
  const gan::GeneratorArch eq_arch = demo_arch(true);
  nn::ParamStore<float> eq_store;
  gan::create_generator_stage_params(eq_store, eq_arch, gan::Stage::small);
  std::vector<nn::Tensor<float>> eq_in{nn::tensor_from_image(cond_pano)};
  std::vector<nn::Tensor<float>> eq_gt{nn::tensor_from_image(gt_pano)};
  fit_single_scale(eq_arch, eq_store, eq_in, eq_gt, opt.steps, opt.seed);
  res.equirect_pano_path = opt.out_dir + "/seam_equirect.png";
  save_image(predict_single_scale(eq_arch, eq_store, eq_in[0]), res.equirect_pano_path);
  return res;
}

}  // namespace pano360::train
