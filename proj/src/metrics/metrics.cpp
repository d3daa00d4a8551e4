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

#include "metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "core/image_io.hpp"

namespace pano360::metrics {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

void require_comparable(const Image& a, const Image& b) {
  if (a.empty() || a.height() != b.height() || a.width() != b.width() ||
      a.channels() != b.channels())
    throw DataError("metric inputs must share shape");
  if (a.range() != b.range()) throw DataError("metric inputs must share value range");
}

// Horizontal then vertical valid-mode pass with the normalized Gaussian tap.
std::vector<double> gaussian_filter_valid(const std::vector<double>& img, int h, int w,
                                          const std::array<double, kWindow>& k) {
  const int ow = w - kWindow + 1, oh = h - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < kWindow; ++t) s += k[static_cast<std::size_t>(t)] * img[static_cast<std::size_t>(y) * w + x + t];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < kWindow; ++t) s += k[static_cast<std::size_t>(t)] * tmp[static_cast<std::size_t>(y + t) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

std::string strip_extension(const std::string& path) {
  const std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

void write_histogram_csv(const Histogram& hist, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw RuntimeAbort("cannot write histogram: " + path);
  os << "bin_lo,bin_hi,count\n";
  const double step = (hist.hi - hist.lo) / static_cast<double>(hist.counts.size());
  char line[96];
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%ld", hist.lo + step * static_cast<double>(i),
                  hist.lo + step * static_cast<double>(i + 1), hist.counts[i]);
    os << line << '\n';
  }
}

// Minimal bar chart: white canvas, black bars scaled to the tallest bin.
void write_histogram_png(const Histogram& hist, const std::string& path) {
  const int bins = static_cast<int>(hist.counts.size());
  const int bar_w = 8, margin = 4, plot_h = 200;
  Image canvas(plot_h + 2 * margin, bins * bar_w + 2 * margin, 3, ValueRange::u8, 255.0f);
  const long peak = std::max(1L, *std::max_element(hist.counts.begin(), hist.counts.end()));
  for (int b = 0; b < bins; ++b) {
    const int bar_h = static_cast<int>(
        std::lround(static_cast<double>(hist.counts[static_cast<std::size_t>(b)]) * plot_h / static_cast<double>(peak)));
    for (int y = 0; y < bar_h; ++y)
      for (int x = 0; x < bar_w - 1; ++x)
        for (int c = 0; c < 3; ++c)
          canvas.at(margin + plot_h - 1 - y, margin + b * bar_w + x, c) = 0.0f;
  }
  save_image(canvas, path);
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_comparable(a, b);
  if (peak <= 0.0) throw DataError("psnr peak must be positive");
  double sq = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int c = 0; c < a.channels(); ++c) {
        const double d = static_cast<double>(a.at(y, x, c)) - static_cast<double>(b.at(y, x, c));
        sq += d * d;
      }
  const double mse = sq / (static_cast<double>(a.height()) * a.width() * a.channels());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b, double peak) {
  require_comparable(a, b);
  if (a.height() < kWindow || a.width() < kWindow)
    throw DataError("ssim inputs must be at least 11x11");
  const Image la = a.channels() == 1 ? a : to_luminance(a);
  const Image lb = b.channels() == 1 ? b : to_luminance(b);

  std::array<double, kWindow> k{};
  double ksum = 0.0;
  for (int t = 0; t < kWindow; ++t) {
    const double d = t - (kWindow - 1) / 2.0;
    k[static_cast<std::size_t>(t)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    ksum += k[static_cast<std::size_t>(t)];
  }
  for (double& v : k) v /= ksum;

  const int h = a.height(), w = a.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double va = la.at(y, x, 0), vb = lb.at(y, x, 0);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      pa[i] = va;
      pb[i] = vb;
      paa[i] = va * va;
      pbb[i] = vb * vb;
      pab[i] = va * vb;
    }
  const auto mu_a = gaussian_filter_valid(pa, h, w, k);
  const auto mu_b = gaussian_filter_valid(pb, h, w, k);
  const auto m_aa = gaussian_filter_valid(paa, h, w, k);
  const auto m_bb = gaussian_filter_valid(pbb, h, w, k);
  const auto m_ab = gaussian_filter_valid(pab, h, w, k);

  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = m_aa[i] - ma * ma;
    const double vb = m_bb[i] - mb * mb;
    const double cov = m_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

void Histogram::add(double v) {
  const int bins = static_cast<int>(counts.size());
  int idx;
  if (!(v > lo)) {
    idx = 0;
  } else if (!(v < hi)) {
    idx = bins - 1;
  } else {
    idx = static_cast<int>((v - lo) / (hi - lo) * bins);
    idx = std::clamp(idx, 0, bins - 1);
  }
  ++counts[static_cast<std::size_t>(idx)];
}

EvalReport evaluate(const train::InferenceModel& model, const data::DatasetManifest& manifest,
                    const EvalOptions& opt) {
  const auto records = manifest.split_records(opt.split);
  if (records.empty()) throw DataError("manifest has no '" + opt.split + "' records");
  if (opt.out_csv.empty()) throw DataError("eval needs an output report path");

  const char* cache_env = std::getenv("PANO360_CACHE");
  const std::string cache_dir = cache_env == nullptr ? "" : cache_env;
  if (!cache_dir.empty()) std::filesystem::create_directories(cache_dir);

  EvalReport report;
  const int stage_idx = static_cast<int>(model.stage);
  report.height = gan::stage_height(model.stage);
  report.width = 2 * report.height;

  double sum_ssim = 0.0, sum_psnr = 0.0;
  for (const data::SampleRecord* rec : records) {
    const data::LoadedSample sample = data::load_sample(manifest, *rec);
    const train::InferResult inf = train::infer(model, sample.views);
    const Image pred = denormalize_image(inf.pano);
    const Image gt = denormalize_image(sample.gt[static_cast<std::size_t>(stage_idx)]);
    if (!cache_dir.empty()) save_image(pred, cache_dir + "/" + rec->id + "_pred.png");

    EvalRow row;
    row.id = rec->id;
    row.fov_gt = rec->fov_deg;
    row.fov_pred = inf.fov.predicted_fov;
    row.ssim_v = ssim(pred, gt);
    row.psnr_db = psnr(pred, gt);
    report.ssim_hist.add(row.ssim_v);
    report.psnr_hist.add(row.psnr_db);
    sum_ssim += row.ssim_v;
    sum_psnr += row.psnr_db;
    report.rows.push_back(row);
  }
  report.mean_ssim = sum_ssim / static_cast<double>(report.rows.size());
  report.mean_psnr = sum_psnr / static_cast<double>(report.rows.size());

  const auto parent = std::filesystem::path(opt.out_csv).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(opt.out_csv);
  if (!os) throw RuntimeAbort("cannot write report: " + opt.out_csv);
  os << "# pano360-eval v1\n";
  os << "# stage=" << gan::stage_name(model.stage) << " resolution=" << report.width << "x"
     << report.height << " split=" << opt.split << "\n";
  os << "# peak=255 ssim_window=11 ssim_sigma=1.5 luminance=0.299,0.587,0.114\n";
  os << "id,fov_gt,fov_pred,ssim,psnr_db\n";
  char line[256];
  auto fmt_psnr = [](double v, char* buf, std::size_t cap) {
    if (std::isinf(v))
      std::snprintf(buf, cap, "inf");
    else
      std::snprintf(buf, cap, "%.6f", v);
  };
  char psnr_buf[48];
  for (const EvalRow& row : report.rows) {
    fmt_psnr(row.psnr_db, psnr_buf, sizeof(psnr_buf));
    std::snprintf(line, sizeof(line), "%s,%.6g,%.6g,%.6f,%s", row.id.c_str(), row.fov_gt,
                  row.fov_pred, row.ssim_v, psnr_buf);
    os << line << '\n';
  }
  fmt_psnr(report.mean_psnr, psnr_buf, sizeof(psnr_buf));
  std::snprintf(line, sizeof(line), "# mean_ssim=%.9f mean_psnr=%s", report.mean_ssim, psnr_buf);
  os << line << '\n';

  const std::string base = strip_extension(opt.out_csv);
  write_histogram_csv(report.ssim_hist, base + "_ssim_hist.csv");
  write_histogram_csv(report.psnr_hist, base + "_psnr_hist.csv");
  if (opt.plots) {
    write_histogram_png(report.ssim_hist, base + "_ssim_hist.png");
    write_histogram_png(report.psnr_hist, base + "_psnr_hist.png");
  }
  return report;
}

}  // namespace pano360::metrics
