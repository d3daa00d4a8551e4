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

// Command-line front end. Everything goes through the public C API; exit
// codes are the p360_status values (0 ok, 1 usage, 2 data error, 3 runtime).

#include <array>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pano360/pano360.h"

namespace {

constexpr const char* kFaceNames[6] = {"north", "west", "south", "east", "up", "down"};

int fail(p360_status st) {
  std::fprintf(stderr, "error: %s\n", p360_last_error());
  return static_cast<int>(st);
}

using ImagePtr = std::unique_ptr<p360_image, decltype(&p360_image_free)>;

ImagePtr own(p360_image* img) { return ImagePtr(img, &p360_image_free); }

// Loads the four compass views; returns nonzero exit code on failure.
int load_views(const std::vector<std::string>& paths, std::vector<ImagePtr>& owners,
               std::array<const p360_image*, 4>& out) {
  for (int i = 0; i < 4; ++i) {
    p360_image* img = nullptr;
    if (const p360_status st = p360_image_load(paths[static_cast<size_t>(i)].c_str(), &img);
        st != P360_OK)
      return fail(st);
    owners.push_back(own(img));
    out[static_cast<size_t>(i)] = img;
  }
  return 0;
}

struct GeomE2c {
  int face_size = 256;
  std::string input, outdir;

  int run() const {
    p360_image* pano = nullptr;
    if (const p360_status st = p360_image_load(input.c_str(), &pano); st != P360_OK)
      return fail(st);
    auto pano_owner = own(pano);
    p360_image* faces[6] = {};
    if (const p360_status st = p360_equirect_to_cubemap(pano, face_size, faces); st != P360_OK)
      return fail(st);
    std::vector<ImagePtr> owners;
    for (auto* f : faces) owners.push_back(own(f));
    for (int f = 0; f < 6; ++f) {
      const std::string path = outdir + "/" + kFaceNames[f] + ".png";
      if (const p360_status st = p360_image_save(faces[f], path.c_str()); st != P360_OK)
        return fail(st);
      std::printf("%s\n", path.c_str());
    }
    return 0;
  }
};

struct GeomC2e {
  int height = 512;
  std::string facedir, output;

  int run() const {
    std::vector<ImagePtr> owners;
    const p360_image* faces[6] = {};
    for (int f = 0; f < 6; ++f) {
      p360_image* img = nullptr;
      const std::string path = facedir + "/" + kFaceNames[f] + ".png";
      if (const p360_status st = p360_image_load(path.c_str(), &img); st != P360_OK)
        return fail(st);
      owners.push_back(own(img));
      faces[f] = img;
    }
    p360_image* pano = nullptr;
    if (const p360_status st = p360_cubemap_to_equirect(faces, height, &pano); st != P360_OK)
      return fail(st);
    auto pano_owner = own(pano);
    if (const p360_status st = p360_image_save(pano, output.c_str()); st != P360_OK)
      return fail(st);
    std::printf("%s\n", output.c_str());
    return 0;
  }
};

struct GeomView {
  double yaw = 0.0, pitch = 0.0, fov = 90.0;
  int size = 256;
  std::string input, output;

  int run() const {
    p360_image* pano = nullptr;
    if (const p360_status st = p360_image_load(input.c_str(), &pano); st != P360_OK)
      return fail(st);
    auto pano_owner = own(pano);
    p360_image* view = nullptr;
    if (const p360_status st = p360_render_view(pano, yaw, pitch, fov, size, &view);
        st != P360_OK)
      return fail(st);
    auto view_owner = own(view);
    if (const p360_status st = p360_image_save(view, output.c_str()); st != P360_OK)
      return fail(st);
    std::printf("%s\n", output.c_str());
    return 0;
  }
};

struct GeomEmbed {
  double fov = 60.0, fill = 128.0;
  int face_size = 256;
  std::string law = "tangent";
  std::string input, output;

  int run() const {
    p360_image* view = nullptr;
    if (const p360_status st = p360_image_load(input.c_str(), &view); st != P360_OK)
      return fail(st);
    auto view_owner = own(view);
    p360_image* out = nullptr;
    if (const p360_status st = p360_embed_view(view, fov, face_size, fill, law.c_str(), &out);
        st != P360_OK)
      return fail(st);
    auto out_owner = own(out);
    if (const p360_status st = p360_image_save(out, output.c_str()); st != P360_OK)
      return fail(st);
    std::printf("%s\n", output.c_str());
    return 0;
  }
};

struct DatasetBuild {
  std::string src, out;
  double split = 0.8, fov_min = 45.0, fov_max = 75.0;
  std::uint64_t seed = 0;
  int view_size = 256;

  int run() const {
    p360_dataset_params params{};
    params.src_dir = src.c_str();
    params.out_dir = out.c_str();
    params.split_ratio = split;
    params.fov_min = fov_min;
    params.fov_max = fov_max;
    params.seed = seed;
    params.view_size = view_size;
    char manifest[4096] = {};
    if (const p360_status st = p360_dataset_build(&params, manifest, sizeof(manifest));
        st != P360_OK)
      return fail(st);
    std::printf("%s\n", manifest);
    return 0;
  }
};

struct FovPredict {
  std::vector<std::string> views;
  std::string ckpt;

  int run() const {
    std::vector<ImagePtr> owners;
    std::array<const p360_image*, 4> handles{};
    if (const int rc = load_views(views, owners, handles); rc != 0) return rc;
    double fov = 0.0;
    int cls = 0;
    if (const p360_status st = p360_fov_predict(ckpt.c_str(), handles.data(), &fov, &cls);
        st != P360_OK)
      return fail(st);
    std::printf("fov_deg=%g class=%d\n", fov, cls);
    return 0;
  }
};

struct Train {
  std::string stage, manifest, config, init, out = ".";
  int ckpt_interval = 500;

  int run() const {
    p360_train_params params{};
    params.manifest_path = manifest.c_str();
    params.stage = stage.c_str();
    params.config_path = config.empty() ? nullptr : config.c_str();
    params.init_ckpt = init.empty() ? nullptr : init.c_str();
    params.out_dir = out.c_str();
    params.ckpt_interval = ckpt_interval;
    char ckpt[4096] = {};
    if (const p360_status st = p360_train(&params, ckpt, sizeof(ckpt)); st != P360_OK)
      return fail(st);
    std::printf("%s\n", ckpt);
    return 0;
  }
};

struct Infer {
  std::vector<std::string> views;
  std::string ckpt, out;
  double fov = 0.0;  // <= 0: predict

  int run() const {
    std::vector<ImagePtr> owners;
    std::array<const p360_image*, 4> handles{};
    if (const int rc = load_views(views, owners, handles); rc != 0) return rc;
    p360_image* pano = nullptr;
    double used_fov = 0.0;
    if (const p360_status st = p360_infer(ckpt.c_str(), handles.data(), fov, &pano, &used_fov);
        st != P360_OK)
      return fail(st);
    auto pano_owner = own(pano);
    if (const p360_status st = p360_image_save(pano, out.c_str()); st != P360_OK)
      return fail(st);
    std::printf("%s fov_deg=%g\n", out.c_str(), used_fov);
    return 0;
  }
};

struct Eval {
  std::string ckpt, manifest, split = "test", out;
  bool plots = false;

  int run() const {
    p360_eval_summary summary{};
    if (const p360_status st = p360_eval(ckpt.c_str(), manifest.c_str(), split.c_str(),
                                         out.c_str(), plots ? 1 : 0, &summary);
        st != P360_OK)
      return fail(st);
    std::printf("records=%d mean_ssim=%.6f mean_psnr_db=%.6f\n", summary.n_records,
                summary.mean_ssim, summary.mean_psnr_db);
    return 0;
  }
};

struct DemoSeams {
  std::string manifest, out = ".";
  int steps = 200;
  std::uint64_t seed = 0;

  int run() const {
    char cube[4096] = {}, eq[4096] = {};
    if (const p360_status st = p360_demo_seams(manifest.c_str(), out.c_str(), steps, seed, cube,
                                               sizeof(cube), eq, sizeof(eq));
        st != P360_OK)
      return fail(st);
    std::printf("cubemap_format=%s\nequirect_format=%s\n", cube, eq);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"360-degree panorama synthesis from four compass views with unknown fov. "
               "PANO360_CACHE, when set, receives intermediate per-record predictions "
               "during eval."};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto* geom = app.add_subcommand("geom", "Spherical geometry utilities");
  geom->require_subcommand(1);

  GeomE2c e2c;
  auto* e2c_cmd = geom->add_subcommand("e2c", "Equirect panorama to six cube face PNGs");
  e2c_cmd->add_option("--face-size", e2c.face_size, "Cube face side in pixels");
  e2c_cmd->add_option("input", e2c.input, "Equirect panorama (2:1)")->required();
  e2c_cmd->add_option("outdir", e2c.outdir, "Output directory (north/west/south/east/up/down.png)")
      ->required();

  GeomC2e c2e;
  auto* c2e_cmd = geom->add_subcommand("c2e", "Six cube face PNGs to an equirect panorama");
  c2e_cmd->add_option("--height", c2e.height, "Output panorama height (width is 2x)");
  c2e_cmd->add_option("facedir", c2e.facedir, "Directory holding north/.../down.png")->required();
  c2e_cmd->add_option("output", c2e.output, "Output panorama path")->required();

  GeomView view;
  auto* view_cmd = geom->add_subcommand("view", "Pinhole view render of a panorama");
  view_cmd->add_option("--yaw", view.yaw, "Yaw in degrees (0 north, 90 west)");
  view_cmd->add_option("--pitch", view.pitch, "Pitch in degrees upward");
  view_cmd->add_option("--fov", view.fov, "Field of view in degrees (0,120]");
  view_cmd->add_option("--size", view.size, "Square output side in pixels");
  view_cmd->add_option("input", view.input, "Equirect panorama")->required();
  view_cmd->add_option("output", view.output, "Output image path")->required();

  GeomEmbed embed;
  auto* embed_cmd =
      geom->add_subcommand("embed", "Embed a view into a 90-degree cube face at its fov");
  embed_cmd->add_option("--fov", embed.fov, "View field of view in degrees (0,90]");
  embed_cmd->add_option("--face-size", embed.face_size, "Face side in pixels");
  embed_cmd->add_option("--fill", embed.fill, "Border fill level, u8 units [0,255]");
  embed_cmd->add_option("--law", embed.law, "Fov-to-block scale law: tangent|linear");
  embed_cmd->add_option("input", embed.input, "View image")->required();
  embed_cmd->add_option("output", embed.output, "Output face path")->required();

  auto* dataset = app.add_subcommand("dataset", "Paired dataset generation");
  dataset->require_subcommand(1);

  DatasetBuild build;
  auto* build_cmd = dataset->add_subcommand("build", "Render views + pyramids from panoramas");
  build_cmd->add_option("--src", build.src, "Directory of source panoramas")->required();
  build_cmd->add_option("--out", build.out, "Output dataset directory")->required();
  build_cmd->add_option("--split", build.split, "Train fraction");
  build_cmd->add_option("--fov-min", build.fov_min, "Minimum sampled fov in degrees");
  build_cmd->add_option("--fov-max", build.fov_max, "Maximum sampled fov in degrees");
  build_cmd->add_option("--seed", build.seed, "Random seed");
  build_cmd->add_option("--view-size", build.view_size, "Square view side in pixels");

  auto* fov_grp = app.add_subcommand("fov", "Field-of-view classifier");
  fov_grp->require_subcommand(1);

  FovPredict predict;
  auto* predict_cmd = fov_grp->add_subcommand("predict", "Classify the shared fov of four views");
  predict_cmd->add_option("--views", predict.views, "north west south east image paths")
      ->expected(4)
      ->required();
  predict_cmd->add_option("--ckpt", predict.ckpt, "Stage checkpoint")->required();

  Train train;
  auto* train_cmd = app.add_subcommand("train", "Train one stage of the synthesis network");
  train_cmd->add_option("--stage", train.stage, "small|medium|large")->required();
  train_cmd->add_option("--manifest", train.manifest, "Dataset manifest")->required();
  train_cmd->add_option("--config", train.config, "key = value training config");
  train_cmd->add_option("--init", train.init,
                        "Previous stage's checkpoint (unify) or same stage's (resume)");
  train_cmd->add_option("--out", train.out, "Output directory for checkpoint + loss log");
  train_cmd->add_option("--ckpt-interval", train.ckpt_interval,
                        "Steps between periodic checkpoints");

  Infer infer;
  auto* infer_cmd = app.add_subcommand("infer", "Synthesize a panorama from four views");
  infer_cmd->add_option("--views", infer.views, "north west south east image paths")
      ->expected(4)
      ->required();
  infer_cmd->add_option("--ckpt", infer.ckpt, "Stage checkpoint")->required();
  infer_cmd->add_option("--out", infer.out, "Output panorama path")->required();
  infer_cmd->add_option("--fov", infer.fov, "Override the classifier with this fov in degrees");

  Eval eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a manifest split");
  eval_cmd->add_option("--ckpt", eval.ckpt, "Stage checkpoint")->required();
  eval_cmd->add_option("--manifest", eval.manifest, "Dataset manifest")->required();
  eval_cmd->add_option("--split", eval.split, "Manifest split: train|test");
  eval_cmd->add_option("--out", eval.out, "Report CSV path (histogram CSVs derive from it)")
      ->required();
  eval_cmd->add_flag("--plots", eval.plots, "Also render histogram PNG bar charts");

  DemoSeams seams;
  auto* seams_cmd = app.add_subcommand(
      "demo-seams", "Cube-face vs native-equirect output format comparison");
  seams_cmd->add_option("--manifest", seams.manifest, "Dataset manifest")->required();
  seams_cmd->add_option("--out", seams.out, "Output directory");
  seams_cmd->add_option("--steps", seams.steps, "Optimizer steps per format");
  seams_cmd->add_option("--seed", seams.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // --help exits 0, any parse failure is a usage error
  }

  if (e2c_cmd->parsed()) return e2c.run();
  if (c2e_cmd->parsed()) return c2e.run();
  if (view_cmd->parsed()) return view.run();
  if (embed_cmd->parsed()) return embed.run();
  if (build_cmd->parsed()) return build.run();
  if (predict_cmd->parsed()) return predict.run();
  if (train_cmd->parsed()) return train.run();
  if (infer_cmd->parsed()) return infer.run();
  if (eval_cmd->parsed()) return eval.run();
  if (seams_cmd->parsed()) return seams.run();
  return 1;
}
