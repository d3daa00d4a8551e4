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

#include <cstring>
#include <fstream>
#include <sstream>

#include "data/dataset.hpp"
#include "doctest.h"
#include "nn/ops.hpp"
#include "test_util.hpp"
#include "train/train_config.hpp"
#include "train/trainer.hpp"

using namespace pano360;
using namespace pano360::train;

namespace {

TrainerArches tiny_arches() {
  TrainerArches a;
  a.gen.bridge_channels = 8;
  a.gen.enc_channels = {8, 12, 12, 16};
  a.gen.res_blocks = 2;
  a.disc.channels = {8, 8, 8, 8};
  a.fov_net.channels = {8, 16, 16};
  a.fov_net.input_resize = 32;
  return a;
}

std::string build_toy_dataset(const std::string& tag, int n_panos, std::uint64_t seed,
                              double split = 1.0) {
  const std::string src = testutil::fresh_dir(tag + "_src");
  testutil::write_panos(src, n_panos, seed, 256);
  data::BuildConfig cfg;
  cfg.src_dir = src;
  cfg.out_dir = testutil::fresh_dir(tag + "_data");
  cfg.split_ratio = split;
  cfg.seed = seed;
  cfg.view_size = 64;
  data::build_dataset(cfg);
  return cfg.out_dir + "/manifest.txt";
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string l;
  while (std::getline(in, l)) lines.push_back(l);
  return lines;
}

}  // namespace

TEST_CASE("train config parses key=value text with defaults and comments") {
  const TrainConfig def = TrainConfig::parse_text("");
  CHECK(def.lr == 2e-4);
  CHECK(def.beta1 == 0.5);
  CHECK(def.beta2 == 0.99);
  CHECK(def.batch_size == 1);
  CHECK(def.lambda_pix == 100.0);
  CHECK(def.steps_per_stage == std::array<int, 3>{2000, 2000, 2000});

  const TrainConfig c = TrainConfig::parse_text(
      "# training setup\n"
      "lr = 1e-3\n"
      "beta1=0.9\n"
      "  beta2 = 0.999  \n"
      "lambda_pix = 50\n"
      "steps_per_stage = 10,20,30\n"
      "seed = 7\n");
  CHECK(c.lr == 1e-3);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.999);
  CHECK(c.lambda_pix == 50.0);
  CHECK(c.steps_per_stage == std::array<int, 3>{10, 20, 30});
  CHECK(c.seed == 7);

  // A single steps value applies to all three stages.
  CHECK(TrainConfig::parse_text("steps_per_stage = 12\n").steps_per_stage ==
        std::array<int, 3>{12, 12, 12});
}

TEST_CASE("train config rejects unknown keys and invalid values") {
  CHECK_THROWS_AS(TrainConfig::parse_text("learning_rate = 0.1\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("lr = 0\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("lr = -1e-4\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("beta1 = 1.0\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("batch_size = 2\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("steps_per_stage = 5,5\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("steps_per_stage = 0\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("stage_order = large,medium,small\n"), DataError);
  CHECK_THROWS_AS(TrainConfig::parse_text("lr\n"), DataError);
}

TEST_CASE("train config echo round trips through the parser") {
  TrainConfig c;
  c.lr = 3.5e-4;
  c.lambda_pix = 12.25;
  c.steps_per_stage = {3, 4, 5};
  c.seed = 123456789;
  std::string text;
  for (const auto& [k, v] : c.echo()) text += k + " = " + v + "\n";
  const TrainConfig d = TrainConfig::parse_text(text);
  CHECK(d.lr == c.lr);
  CHECK(d.lambda_pix == c.lambda_pix);
  CHECK(d.steps_per_stage == c.steps_per_stage);
  CHECK(d.seed == c.seed);
}

TEST_CASE("l1 pixel loss of a constant offset is the offset") {
  nn::Tensor<double> target({3, 8, 8});
  Rng rng(31);
  for (std::size_t i = 0; i < target.numel(); ++i) target[i] = rng.uniform(-0.5, 0.5);
  nn::Tensor<double> shifted(target.shape());
  for (std::size_t i = 0; i < target.numel(); ++i) shifted[i] = target[i] + 0.37;
  nn::Var<double> pred = nn::make_leaf(std::move(shifted), true);
  CHECK(nn::l1_loss(pred, target)->value[0] == doctest::Approx(0.37).epsilon(1e-9));
}

TEST_CASE("small-stage training writes a checkpoint and a loss log") {
  const std::string manifest = build_toy_dataset("tr_small", 2, 50);
  TrainOptions opt;
  opt.manifest_path = manifest;
  opt.stage = gan::Stage::small;
  opt.config = TrainConfig::parse_text("steps_per_stage = 4\nseed = 5\n");
  opt.out_dir = testutil::fresh_dir("tr_small_out");
  opt.arches = tiny_arches();

  const TrainResult res = train_stage(opt);
  CHECK(res.steps_run == 4);
  CHECK(res.checkpoint_path == opt.out_dir + "/stage_small.ckpt");

  const auto lines = read_lines(res.loss_log_path);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "step,d_loss,g_adv,pix,fov_ce,total");
  CHECK(lines[1].rfind("0,", 0) == 0);
  CHECK(lines[4].rfind("3,", 0) == 0);

  const nn::Checkpoint ck = nn::load_checkpoint(res.checkpoint_path);
  CHECK(ck.require_meta("format") == "pano360-stage-checkpoint");
  CHECK(ck.require_meta("stage") == "small");
  CHECK(ck.require_meta("step") == "4");
  CHECK_NOTHROW(gan::GeneratorArch::parse(ck.require_meta("arch.gen")));
  CHECK_NOTHROW(gan::DiscriminatorArch::parse(ck.require_meta("arch.disc")));
  CHECK_NOTHROW(fov::FovNetArch::parse(ck.require_meta("arch.fov")));
  CHECK(ck.has_tensor("gen.in_bridge_s.w"));
  CHECK(ck.has_tensor("fov.head.w"));
  CHECK(ck.has_tensor("disc.c1.w"));
  CHECK(ck.has_tensor("opt_g.m.gen.in_bridge_s.w"));
  CHECK(ck.has_tensor("opt_d.v.disc.c1.w"));
  CHECK(ck.require_meta("cfg.lr") == "0.0002");

  // The fov cross-entropy column is live at the small stage.
  bool any_ce = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream ss(lines[i]);
    std::string field;
    for (int f = 0; f < 5; ++f) std::getline(ss, field, ',');
    any_ce = any_ce || field != "0.000000";
  }
  CHECK(any_ce);
}

TEST_CASE("a split run resumes to the exact losses of an uninterrupted run") {
  const std::string manifest = build_toy_dataset("tr_resume", 3, 60);
  const TrainerArches arches = tiny_arches();

  TrainOptions a;
  a.manifest_path = manifest;
  a.stage = gan::Stage::small;
  a.config = TrainConfig::parse_text("steps_per_stage = 6\nseed = 11\n");
  a.out_dir = testutil::fresh_dir("tr_resume_a");
  a.arches = arches;
  const TrainResult ra = train_stage(a);

  TrainOptions b = a;
  b.config = TrainConfig::parse_text("steps_per_stage = 3\nseed = 11\n");
  b.out_dir = testutil::fresh_dir("tr_resume_b");
  const TrainResult rb1 = train_stage(b);
  CHECK(rb1.steps_run == 3);

  TrainOptions b2 = b;
  b2.config = TrainConfig::parse_text("steps_per_stage = 6\nseed = 11\n");
  b2.init_checkpoint = rb1.checkpoint_path;
  const TrainResult rb2 = train_stage(b2);
  CHECK(rb2.steps_run == 3);

  CHECK(testutil::files_identical(ra.loss_log_path, rb2.loss_log_path));
  CHECK(testutil::files_identical(ra.checkpoint_path, rb2.checkpoint_path));
}

TEST_CASE("resume rejects a changed config and skipped stages reject unify") {
  const std::string manifest = build_toy_dataset("tr_reject", 2, 70);
  TrainOptions opt;
  opt.manifest_path = manifest;
  opt.stage = gan::Stage::small;
  opt.config = TrainConfig::parse_text("steps_per_stage = 2\nseed = 1\n");
  opt.out_dir = testutil::fresh_dir("tr_reject_out");
  opt.arches = tiny_arches();
  const TrainResult res = train_stage(opt);

  TrainOptions changed = opt;
  changed.config = TrainConfig::parse_text("steps_per_stage = 4\nseed = 1\nlr = 1e-3\n");
  changed.init_checkpoint = res.checkpoint_path;
  CHECK_THROWS_AS(train_stage(changed), DataError);

  TrainOptions skip = opt;
  skip.stage = gan::Stage::large;  // small -> large without the medium pass
  skip.init_checkpoint = res.checkpoint_path;
  CHECK_THROWS_AS(train_stage(skip), DataError);

  TrainOptions fresh_medium = opt;
  fresh_medium.stage = gan::Stage::medium;
  fresh_medium.init_checkpoint.clear();
  CHECK_THROWS_AS(train_stage(fresh_medium), DataError);
}

TEST_CASE("unify keeps lower stages and the classifier bit-identical") {
  const std::string manifest = build_toy_dataset("tr_unify", 2, 80);
  TrainOptions opt;
  opt.manifest_path = manifest;
  opt.stage = gan::Stage::small;
  opt.config = TrainConfig::parse_text("steps_per_stage = 2\nseed = 21\n");
  opt.out_dir = testutil::fresh_dir("tr_unify_out");
  opt.arches = tiny_arches();
  const TrainResult res = train_stage(opt);
  const nn::Checkpoint ck = nn::load_checkpoint(res.checkpoint_path);

  nn::ParamStore<float> store;
  unify_params(ck, opt.arches, gan::Stage::medium, 21, store);

  // Verbatim copies of everything the small stage learned.
  for (const char* prefix : {"gen.in_bridge_s.", "gen.core_s.", "gen.out_bridge_s.", "fov."}) {
    for (const auto& [name, var] : store.with_prefix(prefix)) {
      nn::Tensor<float> expect(var->value.shape());
      ck.get_tensor(name, expect.shape(), expect.data());
      CHECK_MESSAGE(std::memcmp(var->value.data(), expect.data(),
                                expect.numel() * sizeof(float)) == 0,
                    name, " should be copied verbatim");
    }
  }

  // Fresh medium groups and discriminator exist and carry signal.
  CHECK_FALSE(store.with_prefix("gen.core_m.").empty());
  const auto w = store.get("gen.core_m.rb0.conv1.w");
  double mag = 0.0;
  for (std::size_t i = 0; i < w->value.numel(); ++i) mag += std::abs(w->value[i]);
  CHECK(mag > 0.0);
  CHECK(store.has("disc.out.w"));

  nn::ParamStore<float> occupied;
  occupied.create("x", {1});
  CHECK_THROWS_AS(unify_params(ck, opt.arches, gan::Stage::medium, 21, occupied), DataError);
  nn::ParamStore<float> empty2;
  CHECK_THROWS_AS(unify_params(ck, opt.arches, gan::Stage::large, 21, empty2), DataError);
}

TEST_CASE("the fov classifier freezes after the small stage") {
  const std::string manifest = build_toy_dataset("tr_freeze", 2, 90);
  TrainOptions opt;
  opt.manifest_path = manifest;
  opt.stage = gan::Stage::small;
  opt.config = TrainConfig::parse_text("steps_per_stage = 2\nseed = 31\n");
  opt.out_dir = testutil::fresh_dir("tr_freeze_out");
  opt.arches = tiny_arches();
  const TrainResult small = train_stage(opt);
  const nn::Checkpoint ck_small = nn::load_checkpoint(small.checkpoint_path);

  TrainOptions med = opt;
  med.stage = gan::Stage::medium;
  med.init_checkpoint = small.checkpoint_path;
  const TrainResult medium = train_stage(med);
  const nn::Checkpoint ck_med = nn::load_checkpoint(medium.checkpoint_path);

  const auto& a = ck_small.tensors.at("fov.head.w");
  const auto& b = ck_med.tensors.at("fov.head.w");
  CHECK(a.bytes == b.bytes);

  // And its loss column reads zero at the medium stage.
  const auto lines = read_lines(medium.loss_log_path);
  REQUIRE(lines.size() >= 2);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream ss(lines[i]);
    std::string field;
    for (int f = 0; f < 5; ++f) std::getline(ss, field, ',');
    CHECK(field == "0.000000");
  }
}

TEST_CASE("inference runs from a checkpoint and honors the fov override") {
  const std::string manifest = build_toy_dataset("tr_infer", 2, 95);
  TrainOptions opt;
  opt.manifest_path = manifest;
  opt.stage = gan::Stage::small;
  opt.config = TrainConfig::parse_text("steps_per_stage = 2\nseed = 41\n");
  opt.out_dir = testutil::fresh_dir("tr_infer_out");
  opt.arches = tiny_arches();
  const TrainResult res = train_stage(opt);

  const InferenceModel model = load_inference_model(res.checkpoint_path);
  CHECK(model.stage == gan::Stage::small);

  const data::DatasetManifest m = data::load_manifest(manifest);
  const data::LoadedSample s = data::load_sample(m, m.records[0]);
  const InferResult out = infer(model, s.views);
  CHECK(out.pano.height() == 128);
  CHECK(out.pano.width() == 256);
  CHECK(out.pano.channels() == 3);
  CHECK(out.pano.range() == ValueRange::normalized);
  CHECK_FALSE(out.fov_overridden);
  CHECK(out.fov.logits.size() == 7);

  const InferResult forced = infer(model, s.views, 58.0);
  CHECK(forced.fov_overridden);
  CHECK(forced.fov.predicted_fov == 60.0);

  // Determinism: the same views give bit-identical panoramas.
  const InferResult again = infer(model, s.views);
  CHECK(std::memcmp(out.pano.data(), again.pano.data(),
                    out.pano.size() * sizeof(float)) == 0);
}
