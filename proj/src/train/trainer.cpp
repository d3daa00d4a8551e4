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

#include "train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <vector>

#include "core/rng.hpp"
#include "nn/adam.hpp"
#include "nn/checkpoint.hpp"
#include "nn/image_tensor.hpp"
#include "nn/params_io.hpp"

namespace pano360::train {

namespace {

constexpr const char* kFormat = "pano360-stage-checkpoint";

// Independent deterministic seed streams per purpose.
enum SeedTag : std::uint64_t {
  kTagGenInit = 1,   // + stage index
  kTagDiscInit = 16,  // + stage index
  kTagFovInit = 32,
  kTagEpochPerm = 64,  // + stage index, then mixed with the epoch
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Epoch sample order is derived, not streamed, so resuming from a step
// counter reproduces the exact visit order with no live rng state.
std::vector<int> epoch_permutation(int n, std::uint64_t seed, gan::Stage stage, int epoch) {
  Rng rng(mix(mix(seed, kTagEpochPerm + static_cast<std::uint64_t>(stage)),
              static_cast<std::uint64_t>(epoch)));
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  return perm;
}

void create_all_params(nn::ParamStore<float>& store, const TrainerArches& arches,
                       gan::Stage stage) {
  for (int s = 0; s <= static_cast<int>(stage); ++s)
    gan::create_generator_stage_params(store, arches.gen, static_cast<gan::Stage>(s));
  fov::create_fov_params(store, arches.fov_net, arches.fov_bins.n_classes());
  gan::create_discriminator_params(store, arches.disc);
}

void init_generator_stage(nn::ParamStore<float>& store, gan::Stage s, std::uint64_t seed) {
  Rng rng(mix(seed, kTagGenInit + static_cast<std::uint64_t>(s)));
  for (const std::string& prefix : gan::generator_group_prefixes(s))
    nn::init_params(store, rng, prefix);
}

std::string fmt_float(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Per-sample training tensors; deterministic, so cacheable.
struct PreparedSample {
  std::vector<nn::Tensor<float>> cond;  // fov-constrained equirect per level
  nn::Tensor<float> gt;                 // active level ground truth
  nn::Tensor<float> views12;            // classifier stack (small stage only)
  int fov_class = 0;
};

class SampleSource {
 public:
  SampleSource(const data::DatasetManifest& manifest,
               std::vector<const data::SampleRecord*> records, const TrainerArches& arches,
               gan::Stage stage)
      : manifest_(manifest), records_(std::move(records)), arches_(arches), stage_(stage) {
    // Caching only pays off when the whole split fits; otherwise a full epoch
    // cycles through everything and would just thrash the cache.
    static constexpr int kCapByStage[3] = {48, 16, 8};
    cache_enabled_ = static_cast<int>(records_.size()) <= kCapByStage[static_cast<int>(stage)];
  }

  const PreparedSample& get(int index) {
    if (cache_enabled_) {
      auto it = cache_.find(index);
      if (it != cache_.end()) return it->second;
      return cache_.emplace(index, prepare(index)).first->second;
    }
    scratch_ = prepare(index);
    return scratch_;
  }

 private:
  PreparedSample prepare(int index) const {
    const data::LoadedSample s =
        data::load_sample(manifest_, *records_[static_cast<std::size_t>(index)]);
    PreparedSample out;
    const float fill = static_cast<float>(manifest_.fill);
    const auto law = geometry::fov_scale_law_from_string(manifest_.fov_law);
    for (int lvl = 0; lvl <= static_cast<int>(stage_); ++lvl) {
      const int h = gan::stage_height(static_cast<gan::Stage>(lvl));
      out.cond.push_back(nn::tensor_from_image(
          fov::constrain_views(s.views, s.fov_deg, h / 2, fill, h, law)));
    }
    out.gt = nn::tensor_from_image(s.gt[static_cast<std::size_t>(static_cast<int>(stage_))]);
    if (stage_ == gan::Stage::small)
      out.views12 = fov::views_to_tensor(s.views, arches_.fov_net.input_resize);
    out.fov_class = arches_.fov_bins.class_of(s.fov_deg);
    return out;
  }

  const data::DatasetManifest& manifest_;
  std::vector<const data::SampleRecord*> records_;
  const TrainerArches& arches_;
  gan::Stage stage_;
  bool cache_enabled_ = false;
  std::map<int, PreparedSample> cache_;
  PreparedSample scratch_;
};

struct TrainerState {
  nn::ParamStore<float> store;
  nn::Adam<float> adam_g;
  nn::Adam<float> adam_d;
  int start_step = 0;

  TrainerState(const TrainConfig& cfg)
      : adam_g(static_cast<float>(cfg.lr), static_cast<float>(cfg.beta1),
               static_cast<float>(cfg.beta2)),
        adam_d(static_cast<float>(cfg.lr), static_cast<float>(cfg.beta1),
               static_cast<float>(cfg.beta2)) {}
};

void restore_adam(const nn::Checkpoint& ckpt, const std::string& prefix, nn::Adam<float>& adam) {
  const std::string m_prefix = prefix + ".m.";
  for (const auto& [name, blob] : ckpt.tensors) {
    if (name.rfind(m_prefix, 0) != 0) continue;
    const std::string param = name.substr(m_prefix.size());
    std::vector<float> m(blob.numel()), v(blob.numel());
    ckpt.get_tensor(name, blob.shape, m.data());
    ckpt.get_tensor(prefix + ".v." + param, blob.shape, v.data());
    adam.restore_slot(param, std::move(m), std::move(v));
  }
  adam.set_step_count(std::stol(ckpt.require_meta(prefix + ".t")));
}

void save_adam(nn::Checkpoint& ckpt, const std::string& prefix, const nn::Adam<float>& adam,
               const nn::ParamStore<float>& store) {
  for (const auto& [param, slot] : adam.slots()) {
    const auto& shape = store.get(param)->value.shape();
    ckpt.put_tensor(prefix + ".m." + param, shape, slot.m.data());
    ckpt.put_tensor(prefix + ".v." + param, shape, slot.v.data());
  }
  ckpt.meta[prefix + ".t"] = std::to_string(adam.step_count());
}

nn::Checkpoint make_checkpoint(const TrainerState& st, const TrainOptions& opt, int step,
                               const data::DatasetManifest& manifest) {
  nn::Checkpoint ckpt;
  ckpt.meta["format"] = kFormat;
  ckpt.meta["version"] = "1";
  ckpt.meta["stage"] = gan::stage_name(opt.stage);
  ckpt.meta["step"] = std::to_string(step);
  ckpt.meta["arch.gen"] = opt.arches.gen.describe();
  ckpt.meta["arch.disc"] = opt.arches.disc.describe();
  ckpt.meta["arch.fov"] = opt.arches.fov_net.describe();
  ckpt.meta["arch.fov_bins"] = opt.arches.fov_bins.describe();
  ckpt.meta["data.fill"] = fmt_float(manifest.fill);
  ckpt.meta["data.fov_law"] = manifest.fov_law;
  for (const auto& [k, v] : opt.config.echo()) ckpt.meta["cfg." + k] = v;
  nn::params_to_checkpoint(st.store, "", ckpt);
  save_adam(ckpt, "opt_g", st.adam_g, st.store);
  save_adam(ckpt, "opt_d", st.adam_d, st.store);
  return ckpt;
}

void require_same_config(const TrainConfig& cfg, const nn::Checkpoint& ckpt) {
  for (const auto& [k, v] : cfg.echo()) {
    if (k == "steps_per_stage") continue;  // extending a run is legitimate
    if (ckpt.require_meta("cfg." + k) != v)
      throw DataError("resume config mismatch on '" + k + "': checkpoint has " +
                      ckpt.require_meta("cfg." + k) + ", config has " + v);
  }
}

void require_arches_match(const TrainerArches& arches, const nn::Checkpoint& ckpt) {
  arches.gen.require_matches(ckpt.require_meta("arch.gen"));
  arches.fov_net.require_matches(ckpt.require_meta("arch.fov"));
  if (arches.fov_bins.describe() != ckpt.require_meta("arch.fov_bins"))
    throw DataError("fov bin mismatch between checkpoint and runtime");
}

}  // namespace

void unify_params(const nn::Checkpoint& ckpt, const TrainerArches& arches, gan::Stage next_stage,
                  std::uint64_t seed, nn::ParamStore<float>& store) {
  if (next_stage == gan::Stage::small)
    throw DataError("unify: there is no stage below small");
  const auto prev_stage = static_cast<gan::Stage>(static_cast<int>(next_stage) - 1);
  if (ckpt.require_meta("stage") != gan::stage_name(prev_stage))
    throw DataError(std::string("unify into ") + gan::stage_name(next_stage) +
                    " requires a " + gan::stage_name(prev_stage) + "-stage checkpoint, got " +
                    ckpt.require_meta("stage"));
  require_arches_match(arches, ckpt);
  if (store.size() != 0) throw DataError("unify_params expects an empty store");
  create_all_params(store, arches, next_stage);
  // Lower-stage groups and the fov classifier come over verbatim; only the
  // new stage's groups and the per-stage discriminator start fresh.
  for (int s = 0; s <= static_cast<int>(prev_stage); ++s)
    for (const std::string& prefix : gan::generator_group_prefixes(static_cast<gan::Stage>(s)))
      nn::params_from_checkpoint(ckpt, prefix, store);
  nn::params_from_checkpoint(ckpt, "fov.", store);
  init_generator_stage(store, next_stage, seed);
  Rng disc_rng(mix(seed, kTagDiscInit + static_cast<std::uint64_t>(next_stage)));
  nn::init_params(store, disc_rng, "disc.");
}

TrainResult train_stage(const TrainOptions& opt) {
  const TrainConfig& cfg = opt.config;
  const gan::Stage stage = opt.stage;
  opt.arches.fov_bins.validate();
  if (opt.checkpoint_interval < 1) throw DataError("checkpoint interval must be >= 1");

  data::DatasetManifest manifest = data::load_manifest(opt.manifest_path);
  auto train_recs = manifest.split_records("train");
  if (train_recs.empty()) throw DataError("manifest has no train records");

  std::filesystem::create_directories(opt.out_dir);
  const std::string ckpt_path =
      opt.out_dir + "/stage_" + gan::stage_name(stage) + ".ckpt";
  const std::string log_path = opt.out_dir + "/loss_" + gan::stage_name(stage) + ".csv";

  TrainerState st(cfg);
  if (opt.init_checkpoint.empty()) {
    if (stage != gan::Stage::small)
      throw DataError(std::string("training the ") + gan::stage_name(stage) +
                      " stage requires --init with the previous stage's checkpoint");
    create_all_params(st.store, opt.arches, stage);
    init_generator_stage(st.store, gan::Stage::small, cfg.seed);
    Rng fov_rng(mix(cfg.seed, kTagFovInit));
    nn::init_params(st.store, fov_rng, "fov.");
    Rng disc_rng(mix(cfg.seed, kTagDiscInit));
    nn::init_params(st.store, disc_rng, "disc.");
  } else {
    const nn::Checkpoint ckpt = nn::load_checkpoint(opt.init_checkpoint);
    if (ckpt.require_meta("format") != kFormat)
      throw DataError("not a stage checkpoint: " + opt.init_checkpoint);
    const std::string ckpt_stage = ckpt.require_meta("stage");
    if (ckpt_stage == gan::stage_name(stage)) {
      // Same stage: resume mid-run.
      require_arches_match(opt.arches, ckpt);
      opt.arches.disc.require_matches(ckpt.require_meta("arch.disc"));
      require_same_config(cfg, ckpt);
      create_all_params(st.store, opt.arches, stage);
      nn::params_from_checkpoint(ckpt, "", st.store);
      restore_adam(ckpt, "opt_g", st.adam_g);
      restore_adam(ckpt, "opt_d", st.adam_d);
      st.start_step = std::stoi(ckpt.require_meta("step"));
    } else {
      unify_params(ckpt, opt.arches, stage, cfg.seed, st.store);
    }
  }

  // Only the active stage's generator groups move; the fov classifier is
  // co-trained at the small stage and frozen afterwards. Frozen groups build
  // no tape, so lower stages cost forward compute only.
  st.store.set_requires_grad("gen.", false);
  std::vector<std::pair<std::string, nn::Var<float>>> g_params;
  for (const std::string& prefix : gan::generator_group_prefixes(stage)) {
    st.store.set_requires_grad(prefix, true);
    for (auto& p : st.store.with_prefix(prefix)) g_params.push_back(p);
  }
  const bool train_fov = stage == gan::Stage::small;
  st.store.set_requires_grad("fov.", train_fov);
  if (train_fov)
    for (auto& p : st.store.with_prefix("fov.")) g_params.push_back(p);
  st.store.set_requires_grad("disc.", true);
  auto d_params = st.store.with_prefix("disc.");

  SampleSource source(manifest, train_recs, opt.arches, stage);
  const int n = static_cast<int>(train_recs.size());
  const int target = cfg.steps_for(stage);
  const int stage_idx = static_cast<int>(stage);
  const float lambda = static_cast<float>(cfg.lambda_pix);

  std::ofstream log(log_path, st.start_step == 0 ? std::ios::trunc : std::ios::app);
  if (!log) throw RuntimeAbort("cannot open loss log: " + log_path);
  if (st.start_step == 0) log << "step,d_loss,g_adv,pix,fov_ce,total\n";

  std::vector<int> perm;
  int perm_epoch = -1;
  double last_pix = 0.0;
  char line[256];

  for (int step = st.start_step; step < target; ++step) {
    const int epoch = step / n;
    if (epoch != perm_epoch) {
      perm = epoch_permutation(n, cfg.seed, stage, epoch);
      perm_epoch = epoch;
    }
    const PreparedSample& ps = source.get(perm[static_cast<std::size_t>(step % n)]);

    // One generator forward serves both phases: the discriminator phase sees
    // the detached output, the generator phase reuses the live graph.
    auto outs = gan::generator_forward(opt.arches.gen, st.store, stage, ps.cond);
    auto fake = outs.at(stage);
    auto cond = nn::make_constant(nn::Tensor<float>(ps.cond[static_cast<std::size_t>(stage_idx)]));
    auto gt = nn::make_constant(nn::Tensor<float>(ps.gt));

    auto d_real = gan::discriminator_forward(opt.arches.disc, st.store, cond, gt);
    auto d_fake = gan::discriminator_forward(opt.arches.disc, st.store, cond, nn::detach(fake));
    auto d_loss = gan::discriminator_loss(d_real, d_fake);
    const double d_v = d_loss->value[0];
    nn::backward(d_loss);
    st.adam_d.step(d_params);

    auto abort_nonfinite = [&](const char* which, double value) {
      nn::save_checkpoint(make_checkpoint(st, opt, step, manifest), ckpt_path + ".diag");
      throw RuntimeAbort(std::string("non-finite ") + which + " (" + std::to_string(value) +
                         ") at step " + std::to_string(step) + "; diagnostic checkpoint at " +
                         ckpt_path + ".diag");
    };
    if (!std::isfinite(d_v)) abort_nonfinite("d_loss", d_v);

    // Freezing the discriminator for the generator phase keeps its gradients
    // clean for the next iteration and skips its weight-gradient GEMMs.
    st.store.set_requires_grad("disc.", false);
    auto g_patch = gan::discriminator_forward(opt.arches.disc, st.store, cond, fake);
    auto adv = gan::generator_adv_loss(g_patch);
    auto pix = nn::l1_loss(fake, ps.gt);
    auto total = nn::add(adv, nn::scale(pix, lambda));
    double ce_v = 0.0;
    if (train_fov) {
      auto logits = fov::fov_forward_logits(opt.arches.fov_net, st.store, ps.views12);
      auto ce = fov::fov_loss(logits, ps.fov_class);
      ce_v = ce->value[0];
      total = nn::add(total, ce);
    }
    const double adv_v = adv->value[0];
    const double pix_v = pix->value[0];
    const double total_v = total->value[0];
    nn::backward(total);
    st.adam_g.step(g_params);
    st.store.set_requires_grad("disc.", true);

    std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f,%.6f", step, d_v, adv_v, pix_v,
                  ce_v, total_v);
    log << line << '\n';
    if (!std::isfinite(adv_v) || !std::isfinite(pix_v) || !std::isfinite(ce_v) ||
        !std::isfinite(total_v)) {
      log.flush();
      abort_nonfinite("generator loss", total_v);
    }
    last_pix = pix_v;

    if ((step + 1) % opt.checkpoint_interval == 0 && step + 1 < target) {
      log.flush();
      nn::save_checkpoint(make_checkpoint(st, opt, step + 1, manifest), ckpt_path);
    }
  }
  log.flush();

  nn::save_checkpoint(make_checkpoint(st, opt, std::max(st.start_step, target), manifest),
                      ckpt_path);
  TrainResult res;
  res.checkpoint_path = ckpt_path;
  res.loss_log_path = log_path;
  res.steps_run = std::max(0, target - st.start_step);
  res.final_pix = last_pix;
  return res;
}

InferenceModel load_inference_model(const std::string& ckpt_path) {
  const nn::Checkpoint ckpt = nn::load_checkpoint(ckpt_path);
  if (ckpt.require_meta("format") != kFormat)
    throw DataError("not a stage checkpoint: " + ckpt_path);
  InferenceModel model;
  model.gen_arch = gan::GeneratorArch::parse(ckpt.require_meta("arch.gen"));
  model.fov_arch = fov::FovNetArch::parse(ckpt.require_meta("arch.fov"));
  model.fov_bins = fov::FovClassSpec::parse(ckpt.require_meta("arch.fov_bins"));
  model.stage = gan::stage_from_string(ckpt.require_meta("stage"));
  model.fill = std::stof(ckpt.require_meta("data.fill"));
  model.fov_law = geometry::fov_scale_law_from_string(ckpt.require_meta("data.fov_law"));
  for (int s = 0; s <= static_cast<int>(model.stage); ++s)
    gan::create_generator_stage_params(model.params, model.gen_arch, static_cast<gan::Stage>(s));
  fov::create_fov_params(model.params, model.fov_arch, model.fov_bins.n_classes());
  nn::params_from_checkpoint(ckpt, "gen.", model.params);
  nn::params_from_checkpoint(ckpt, "fov.", model.params);
  model.params.set_requires_grad("", false);
  return model;
}

InferResult infer(const InferenceModel& model, const std::array<Image, 4>& views,
                  double fov_override) {
  for (const Image& v : views) {
    if (v.empty() || v.channels() != 3) throw DataError("infer: views must be RGB");
    if (v.range() != ValueRange::normalized) throw DataError("infer: views must be normalized");
  }
  InferResult res;
  if (fov_override > 0.0) {
    const int cls = model.fov_bins.class_of(fov_override);
    res.fov.predicted_class = cls;
    res.fov.predicted_fov = model.fov_bins.center_of(cls);
    res.fov_overridden = true;
  } else {
    res.fov = fov::fov_predict(model.fov_arch, model.fov_bins, model.params, views);
  }
  std::vector<nn::Tensor<float>> cond;
  for (int lvl = 0; lvl <= static_cast<int>(model.stage); ++lvl) {
    const int h = gan::stage_height(static_cast<gan::Stage>(lvl));
    cond.push_back(nn::tensor_from_image(
        fov::constrain_views(views, res.fov.predicted_fov, h / 2, model.fill, h, model.fov_law)));
  }
  auto outs = gan::generator_forward(model.gen_arch, model.params, model.stage, cond);
  res.pano = nn::image_from_tensor(outs.at(model.stage)->value);
  return res;
}

}  // namespace pano360::train
