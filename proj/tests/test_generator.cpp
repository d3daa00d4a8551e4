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

#include <cmath>

#include "doctest.h"
#include "gan/generator.hpp"
#include "nn/ops.hpp"
#include "nn/params.hpp"
#include "test_util.hpp"

using namespace pano360;
using namespace pano360::gan;

namespace {

GeneratorArch tiny_arch() {
  GeneratorArch a;
  a.bridge_channels = 8;
  a.enc_channels = {8, 12, 12, 16};
  a.res_blocks = 2;
  return a;
}

std::vector<nn::Tensor<float>> random_inputs(Stage stage, int base_h, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<nn::Tensor<float>> inputs;
  for (int i = 0; i <= static_cast<int>(stage); ++i) {
    const int h = base_h << i;
    nn::Tensor<float> t({3, h, 2 * h});
    for (std::size_t j = 0; j < t.numel(); ++j)
      t[j] = static_cast<float>(rng.uniform(-1.0, 1.0));
    inputs.push_back(std::move(t));
  }
  return inputs;
}

}  // namespace

TEST_CASE("stage names, suffixes and heights") {
  CHECK(stage_from_string("small") == Stage::small);
  CHECK(stage_from_string("large") == Stage::large);
  CHECK_THROWS_AS(stage_from_string("tiny"), DataError);
  CHECK(stage_height(Stage::small) == 128);
  CHECK(stage_height(Stage::medium) == 256);
  CHECK(stage_height(Stage::large) == 512);
  CHECK(std::string(stage_suffix(Stage::medium)) == "m");
}

TEST_CASE("each stage owns bridge and core parameter groups") {
  const auto small = generator_group_prefixes(Stage::small);
  REQUIRE(small.size() == 3);
  CHECK(small[0] == "gen.in_bridge_s.");
  CHECK(small[1] == "gen.core_s.");
  CHECK(small[2] == "gen.out_bridge_s.");
  const auto large = generator_group_prefixes(Stage::large);
  CHECK(large[1] == "gen.core_l.");

  nn::ParamStore<float> store;
  const GeneratorArch arch = tiny_arch();
  create_generator_stage_params(store, arch, Stage::small);
  CHECK(store.has("gen.in_bridge_s.w"));
  CHECK(store.has("gen.core_s.d1.w"));
  CHECK(store.has("gen.core_s.bott.norm.g"));
  CHECK(store.has("gen.core_s.u0.w"));
  CHECK(store.has("gen.out_bridge_s.bias"));

  create_generator_stage_params(store, arch, Stage::medium);
  CHECK(store.has("gen.core_m.rb0.conv1.w"));
  CHECK(store.has("gen.core_m.rb1.norm2.b"));
  CHECK_FALSE(store.has("gen.core_m.rb2.conv1.w"));  // res_blocks = 2
}

TEST_CASE("generator produces one panorama per active scale") {
  const GeneratorArch arch = tiny_arch();
  nn::ParamStore<float> store;
  create_generator_stage_params(store, arch, Stage::small);
  create_generator_stage_params(store, arch, Stage::medium);
  Rng rng(3);
  nn::init_params(store, rng, "gen.");

  const auto inputs = random_inputs(Stage::medium, 32, 5);
  const auto outs = generator_forward(arch, store, Stage::medium, inputs);
  REQUIRE(outs.at(Stage::small)->value.shape() == std::vector<int>{3, 32, 64});
  REQUIRE(outs.at(Stage::medium)->value.shape() == std::vector<int>{3, 64, 128});

  // Outputs are bounded to [-1, 1].
  const auto& v = outs.at(Stage::medium)->value;
  float lo = 0.0f, hi = 0.0f;
  for (std::size_t i = 0; i < v.numel(); ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  CHECK(lo >= -1.0f);
  CHECK(hi <= 1.0f);
}

TEST_CASE("generator_forward validates input levels") {
  const GeneratorArch arch = tiny_arch();
  nn::ParamStore<float> store;
  create_generator_stage_params(store, arch, Stage::small);
  Rng rng(3);
  nn::init_params(store, rng, "gen.");

  CHECK_THROWS_AS(generator_forward(arch, store, Stage::small, {}), DataError);
  // 24 rows is not a multiple of 16.
  const auto bad = random_inputs(Stage::small, 24, 1);
  CHECK_THROWS_AS(generator_forward(arch, store, Stage::small, bad), DataError);
}

TEST_CASE("a zeroed refinement stage passes the upsampled lower scale through") {
  const GeneratorArch arch = tiny_arch();
  nn::ParamStore<float> store;
  create_generator_stage_params(store, arch, Stage::small);
  create_generator_stage_params(store, arch, Stage::medium);
  Rng rng(7);
  nn::init_params(store, rng, "gen.");
  for (const auto& [name, var] : store.with_prefix("gen.out_bridge_m."))
    for (std::size_t i = 0; i < var->value.numel(); ++i) var->value[i] = 0.0f;

  const auto inputs = random_inputs(Stage::medium, 32, 9);
  const auto outs = generator_forward(arch, store, Stage::medium, inputs);

  // Expected: bilinear 2x upsample (with azimuth wrap) of the small output,
  // then the [-1,1] bound. The residual contribution is exactly zero.
  nn::Var<float> low = nn::make_constant(nn::Tensor<float>(outs.at(Stage::small)->value));
  nn::Var<float> expect =
      nn::clamp_unit(nn::upsample2x(low, nn::UpsampleMode::bilinear, arch.horizontal_wrap));
  const auto& got = outs.at(Stage::medium)->value;
  double max_diff = 0.0;
  for (std::size_t i = 0; i < got.numel(); ++i)
    max_diff = std::max(max_diff,
                        std::abs(static_cast<double>(got[i]) - expect->value[i]));
  CHECK(max_diff == 0.0);
}

TEST_CASE("generator_single_scale matches the small scale of the joint forward") {
  const GeneratorArch arch = tiny_arch();
  nn::ParamStore<float> store;
  create_generator_stage_params(store, arch, Stage::small);
  Rng rng(13);
  nn::init_params(store, rng, "gen.");

  const auto inputs = random_inputs(Stage::small, 32, 21);
  const auto joint = generator_forward(arch, store, Stage::small, inputs);
  const auto single = generator_single_scale(arch, store, Stage::small, inputs[0]);
  const auto& a = joint.at(Stage::small)->value;
  const auto& b = single->value;
  REQUIRE(a.shape() == b.shape());
  for (std::size_t i = 0; i < a.numel(); i += 97) CHECK(a[i] == b[i]);
}

TEST_CASE("generator arch description round trips") {
  GeneratorArch a = tiny_arch();
  a.horizontal_wrap = false;
  a.skip_connections = false;
  const GeneratorArch b = GeneratorArch::parse(a.describe());
  CHECK(b.bridge_channels == a.bridge_channels);
  CHECK(b.enc_channels == a.enc_channels);
  CHECK(b.res_blocks == a.res_blocks);
  CHECK(b.skip_connections == a.skip_connections);
  CHECK(b.horizontal_wrap == a.horizontal_wrap);
  CHECK_NOTHROW(a.require_matches(a.describe()));
  CHECK_THROWS_AS(GeneratorArch().require_matches(a.describe()), DataError);
}
