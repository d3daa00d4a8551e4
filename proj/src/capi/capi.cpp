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

#include "pano360/pano360.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "core/error.hpp"
#include "core/image.hpp"
#include "core/image_io.hpp"
#include "data/dataset.hpp"
#include "fov/fov_estimator.hpp"
#include "geometry/geometry.hpp"
#include "metrics/metrics.hpp"
#include "train/seam_demo.hpp"
#include "train/trainer.hpp"

struct p360_image {
  pano360::Image img;  // always u8 range at this boundary
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

p360_status usage_error(const std::string& msg) {
  set_error(msg);
  return P360_USAGE;
}

// Funnels C++ errors into status codes; any non-OK path leaves a message.
template <typename F>
p360_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return P360_OK;
  } catch (const pano360::DataError& e) {
    set_error(e.what());
    return P360_DATA;
  } catch (const pano360::RuntimeAbort& e) {
    set_error(e.what());
    return P360_RUNTIME;
  } catch (const std::exception& e) {
    set_error(e.what());
    return P360_RUNTIME;
  }
}

void copy_to_buf(const std::string& s, char* buf, size_t size) {
  if (buf == nullptr || size == 0) return;
  const size_t n = std::min(s.size(), size - 1);
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

float fill_from_u8(double fill_u8) {
  if (fill_u8 < 0.0 || fill_u8 > 255.0) throw pano360::DataError("fill must lie in [0,255]");
  return static_cast<float>(fill_u8);
}

// u8 fill level mapped into the normalized [-1,1] range.
float normalized_fill_from_u8(double fill_u8) {
  return fill_from_u8(fill_u8) / 127.5f - 1.0f;
}

bool views_present(const p360_image* const* views) {
  if (views == nullptr) return false;
  for (int i = 0; i < 4; ++i)
    if (views[i] == nullptr) return false;
  return true;
}

std::array<pano360::Image, 4> normalized_views(const p360_image* const* views) {
  std::array<pano360::Image, 4> out;
  for (int i = 0; i < 4; ++i)
    out[static_cast<std::size_t>(i)] = pano360::normalize_image(views[i]->img);
  return out;
}

p360_image* wrap(pano360::Image img) {
  if (img.range() == pano360::ValueRange::normalized) img = pano360::denormalize_image(img);
  return new p360_image{std::move(img)};
}

}  // namespace

extern "C" {

const char* p360_version(void) { return "0.1.0"; }

const char* p360_last_error(void) { return g_last_error.c_str(); }

p360_status p360_image_load(const char* path, p360_image** out) {
  if (path == nullptr || out == nullptr) return usage_error("p360_image_load: null argument");
  return guarded([&] { *out = wrap(pano360::load_image(path)); });
}

p360_status p360_image_create(int height, int width, int channels, const uint8_t* data,
                              p360_image** out) {
  if (out == nullptr) return usage_error("p360_image_create: null output");
  if (height < 1 || width < 1 || (channels != 1 && channels != 3))
    return usage_error("p360_image_create: bad dimensions");
  return guarded([&] {
    pano360::Image img(height, width, channels, pano360::ValueRange::u8);
    if (data != nullptr) {
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          for (int c = 0; c < channels; ++c)
            img.at(y, x, c) = static_cast<float>(
                data[(static_cast<size_t>(y) * width + x) * channels + c]);
    }
    *out = new p360_image{std::move(img)};
  });
}

p360_status p360_image_save(const p360_image* img, const char* path) {
  if (img == nullptr || path == nullptr) return usage_error("p360_image_save: null argument");
  return guarded([&] { pano360::save_image(img->img, path); });
}

int p360_image_height(const p360_image* img) { return img == nullptr ? 0 : img->img.height(); }
int p360_image_width(const p360_image* img) { return img == nullptr ? 0 : img->img.width(); }
int p360_image_channels(const p360_image* img) {
  return img == nullptr ? 0 : img->img.channels();
}

p360_status p360_image_read(const p360_image* img, uint8_t* buffer, size_t buffer_size) {
  if (img == nullptr || buffer == nullptr) return usage_error("p360_image_read: null argument");
  const pano360::Image& im = img->img;
  const size_t need = static_cast<size_t>(im.height()) * im.width() * im.channels();
  if (buffer_size < need) return usage_error("p360_image_read: buffer too small");
  for (int y = 0; y < im.height(); ++y)
    for (int x = 0; x < im.width(); ++x)
      for (int c = 0; c < im.channels(); ++c) {
        const long v = std::lround(static_cast<double>(im.at(y, x, c)));
        buffer[(static_cast<size_t>(y) * im.width() + x) * im.channels() + c] =
            static_cast<uint8_t>(std::clamp(v, 0L, 255L));
      }
  return P360_OK;
}

void p360_image_free(p360_image* img) { delete img; }

p360_status p360_equirect_to_cubemap(const p360_image* pano, int face_size,
                                     p360_image** out_faces) {
  if (pano == nullptr || out_faces == nullptr)
    return usage_error("p360_equirect_to_cubemap: null argument");
  return guarded([&] {
    auto cube = pano360::geometry::equirect_to_cubemap(pano->img, face_size);
    for (int f = 0; f < pano360::geometry::kNumFaces; ++f)
      out_faces[f] = wrap(std::move(cube.faces[static_cast<std::size_t>(f)]));
  });
}

p360_status p360_cubemap_to_equirect(const p360_image* const* faces, int height,
                                     p360_image** out) {
  if (faces == nullptr || out == nullptr)
    return usage_error("p360_cubemap_to_equirect: null argument");
  return guarded([&] {
    pano360::geometry::CubeMapFaces cube;
    for (int f = 0; f < pano360::geometry::kNumFaces; ++f) {
      if (faces[f] == nullptr) throw pano360::DataError("face handle is null");
      cube.faces[static_cast<std::size_t>(f)] = faces[f]->img;
    }
    cube.face_size = cube.faces[0].width();
    *out = wrap(pano360::geometry::cubemap_to_equirect(cube, height));
  });
}

p360_status p360_render_view(const p360_image* pano, double yaw_deg, double pitch_deg,
                             double fov_deg, int out_size, p360_image** out) {
  if (pano == nullptr || out == nullptr) return usage_error("p360_render_view: null argument");
  return guarded([&] {
    *out = wrap(pano360::geometry::render_view(pano->img, yaw_deg, pitch_deg, fov_deg, out_size));
  });
}

p360_status p360_embed_view(const p360_image* view, double fov_deg, int face_size, double fill_u8,
                            const char* law, p360_image** out) {
  if (view == nullptr || law == nullptr || out == nullptr)
    return usage_error("p360_embed_view: null argument");
  return guarded([&] {
    *out = wrap(pano360::geometry::embed_view_with_fov(
        view->img, fov_deg, face_size, fill_from_u8(fill_u8),
        pano360::geometry::fov_scale_law_from_string(law)));
  });
}

p360_status p360_constrain_views(const p360_image* const* views, double fov_deg, int face_size,
                                 double fill_u8, const char* law, int out_height,
                                 p360_image** out) {
  if (law == nullptr || out == nullptr || !views_present(views))
    return usage_error("p360_constrain_views: null argument");
  return guarded([&] {
    *out = wrap(pano360::fov::constrain_views(
        normalized_views(views), fov_deg, face_size, normalized_fill_from_u8(fill_u8), out_height,
        pano360::geometry::fov_scale_law_from_string(law)));
  });
}

p360_status p360_dataset_build(const p360_dataset_params* params, char* manifest_path_buf,
                               size_t buf_size) {
  if (params == nullptr || params->src_dir == nullptr || params->out_dir == nullptr)
    return usage_error("p360_dataset_build: null argument");
  return guarded([&] {
    pano360::data::BuildConfig cfg;
    cfg.src_dir = params->src_dir;
    cfg.out_dir = params->out_dir;
    cfg.split_ratio = params->split_ratio;
    cfg.fov_min = params->fov_min;
    cfg.fov_max = params->fov_max;
    cfg.seed = params->seed;
    cfg.view_size = params->view_size;
    pano360::data::build_dataset(cfg);
    copy_to_buf(std::string(params->out_dir) + "/manifest.txt", manifest_path_buf, buf_size);
  });
}

p360_status p360_fov_predict(const char* ckpt_path, const p360_image* const* views,
                             double* out_fov_deg, int* out_class) {
  if (ckpt_path == nullptr || !views_present(views))
    return usage_error("p360_fov_predict: null argument");
  return guarded([&] {
    const auto model = pano360::train::load_inference_model(ckpt_path);
    const auto pred = pano360::fov::fov_predict(model.fov_arch, model.fov_bins, model.params,
                                                normalized_views(views));
    if (out_fov_deg != nullptr) *out_fov_deg = pred.predicted_fov;
    if (out_class != nullptr) *out_class = pred.predicted_class;
  });
}

p360_status p360_train(const p360_train_params* params, char* ckpt_path_buf, size_t buf_size) {
  if (params == nullptr || params->manifest_path == nullptr || params->stage == nullptr ||
      params->out_dir == nullptr)
    return usage_error("p360_train: null argument");
  return guarded([&] {
    pano360::train::TrainOptions opt;
    opt.manifest_path = params->manifest_path;
    opt.stage = pano360::gan::stage_from_string(params->stage);
    if (params->config_path != nullptr)
      opt.config = pano360::train::TrainConfig::parse_file(params->config_path);
    if (params->init_ckpt != nullptr) opt.init_checkpoint = params->init_ckpt;
    opt.out_dir = params->out_dir;
    if (params->ckpt_interval > 0) opt.checkpoint_interval = params->ckpt_interval;
    const auto res = pano360::train::train_stage(opt);
    copy_to_buf(res.checkpoint_path, ckpt_path_buf, buf_size);
  });
}

p360_status p360_infer(const char* ckpt_path, const p360_image* const* views,
                       double fov_override_deg, p360_image** out_pano, double* out_fov_deg) {
  if (ckpt_path == nullptr || out_pano == nullptr || !views_present(views))
    return usage_error("p360_infer: null argument");
  return guarded([&] {
    const auto model = pano360::train::load_inference_model(ckpt_path);
    const auto res = pano360::train::infer(model, normalized_views(views), fov_override_deg);
    if (out_fov_deg != nullptr) *out_fov_deg = res.fov.predicted_fov;
    *out_pano = wrap(res.pano);
  });
}

p360_status p360_eval(const char* ckpt_path, const char* manifest_path, const char* split,
                      const char* out_csv, int plots, p360_eval_summary* summary) {
  if (ckpt_path == nullptr || manifest_path == nullptr || split == nullptr || out_csv == nullptr)
    return usage_error("p360_eval: null argument");
  return guarded([&] {
    const auto model = pano360::train::load_inference_model(ckpt_path);
    const auto manifest = pano360::data::load_manifest(manifest_path);
    pano360::metrics::EvalOptions opt;
    opt.split = split;
    opt.out_csv = out_csv;
    opt.plots = plots != 0;
    const auto report = pano360::metrics::evaluate(model, manifest, opt);
    if (summary != nullptr) {
      summary->mean_ssim = report.mean_ssim;
      summary->mean_psnr_db = report.mean_psnr;
      summary->n_records = static_cast<int>(report.rows.size());
    }
  });
}

p360_status p360_demo_seams(const char* manifest_path, const char* out_dir, int steps,
                            uint64_t seed, char* cubemap_path_buf, size_t cubemap_buf_size,
                            char* equirect_path_buf, size_t equirect_buf_size) {
  if (manifest_path == nullptr || out_dir == nullptr)
    return usage_error("p360_demo_seams: null argument");
  return guarded([&] {
    pano360::train::SeamDemoOptions opt;
    opt.manifest_path = manifest_path;
    opt.out_dir = out_dir;
    opt.steps = steps;
    opt.seed = seed;
    const auto res = pano360::train::run_seam_demo(opt);
    copy_to_buf(res.cubemap_pano_path, cubemap_path_buf, cubemap_buf_size);
    copy_to_buf(res.equirect_pano_path, equirect_path_buf, equirect_buf_size);
  });
}

}  // extern "C"
