/* Copyright 2026 The pano360 Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the pano360 library: 360-degree panorama synthesis from a
 * sparse set of four compass-aligned views with unknown field of view.
 *
 * Every entry point returns a p360_status; on failure a human-readable
 * message is available from p360_last_error() until the next call on the
 * same thread. All handles are opaque and freed with their _free function.
 */

#ifndef PANO360_PANO360_H_
#define PANO360_PANO360_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define P360_API __declspec(dllexport)
#else
#define P360_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum p360_status {
  P360_OK = 0,
  P360_USAGE = 1,   /* invalid arguments to a call */
  P360_DATA = 2,    /* unreadable/inconsistent inputs, files, checkpoints */
  P360_RUNTIME = 3  /* internal failure, non-finite training loss, I/O */
} p360_status;

P360_API const char* p360_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
P360_API const char* p360_last_error(void);

/* ---------------------------------------------------------------- images */

/* Opaque 8-bit image, interleaved rows (height x width x channels). */
typedef struct p360_image p360_image;

P360_API p360_status p360_image_load(const char* path, p360_image** out);

/* data may be NULL for a zero-filled image; otherwise it supplies
 * height*width*channels bytes, row-major interleaved. channels: 1 or 3. */
P360_API p360_status p360_image_create(int height, int width, int channels, const uint8_t* data,
                                       p360_image** out);

/* Format picked by extension: .png, .jpg, .jpeg. */
P360_API p360_status p360_image_save(const p360_image* img, const char* path);

P360_API int p360_image_height(const p360_image* img);
P360_API int p360_image_width(const p360_image* img);
P360_API int p360_image_channels(const p360_image* img);

/* Copies the pixels into buffer (row-major interleaved); buffer_size must be
 * at least height*width*channels. */
P360_API p360_status p360_image_read(const p360_image* img, uint8_t* buffer, size_t buffer_size);

P360_API void p360_image_free(p360_image* img);

/* -------------------------------------------------------------- geometry */

/* Face order used everywhere a cube map crosses this API:
 * 0 north (front), 1 west (left), 2 south (back), 3 east (right),
 * 4 up, 5 down. Side faces span a 90-degree field of view each. */

/* pano must be 2:1 equirect; writes six new handles into out_faces[0..5]. */
P360_API p360_status p360_equirect_to_cubemap(const p360_image* pano, int face_size,
                                              p360_image** out_faces);

P360_API p360_status p360_cubemap_to_equirect(const p360_image* const* faces, int height,
                                              p360_image** out);

/* Pinhole view of the panorama: yaw in degrees (0 north, 90 west), pitch in
 * degrees upward, square output. fov in (0,120]. */
P360_API p360_status p360_render_view(const p360_image* pano, double yaw_deg, double pitch_deg,
                                      double fov_deg, int out_size, p360_image** out);

/* Rescales a view into the centered block a fov-degree camera covers inside
 * a 90-degree face of face_size pixels, filling the border with fill_u8.
 * law is "tangent" (perspective containment) or "linear". */
P360_API p360_status p360_embed_view(const p360_image* view, double fov_deg, int face_size,
                                     double fill_u8, const char* law, p360_image** out);

/* The synthesis network's conditioning input: the four compass views
 * [north, west, south, east] embedded into their cube faces and warped into
 * an equirect of out_height rows. */
P360_API p360_status p360_constrain_views(const p360_image* const* views, double fov_deg,
                                          int face_size, double fill_u8, const char* law,
                                          int out_height, p360_image** out);

/* --------------------------------------------------------------- dataset */

typedef struct p360_dataset_params {
  const char* src_dir;  /* directory of source panoramas (PNG/JPEG, 2:1) */
  const char* out_dir;  /* receives views/, gt/, manifest.txt */
  double split_ratio;   /* train fraction, e.g. 0.8 */
  double fov_min;       /* sampled fov range in degrees */
  double fov_max;
  uint64_t seed;
  int view_size;        /* square view side, e.g. 256 */
} p360_dataset_params;

/* Builds the paired dataset and writes out_dir/manifest.txt; the manifest
 * path is copied into manifest_path_buf when non-NULL. */
P360_API p360_status p360_dataset_build(const p360_dataset_params* params,
                                        char* manifest_path_buf, size_t buf_size);

/* ------------------------------------------------------------------- fov */

/* Classifies the shared fov of the four ordered views using the classifier
 * stored in the checkpoint. Outputs are optional (NULL to skip). */
P360_API p360_status p360_fov_predict(const char* ckpt_path, const p360_image* const* views,
                                      double* out_fov_deg, int* out_class);

/* ---------------------------------------------------------------- training */

typedef struct p360_train_params {
  const char* manifest_path;
  const char* stage;        /* "small", "medium", "large" */
  const char* config_path;  /* NULL: built-in defaults */
  const char* init_ckpt;    /* NULL at the small stage; previous (unify) or
                               same (resume) stage checkpoint otherwise */
  const char* out_dir;      /* receives stage_<name>.ckpt, loss_<name>.csv */
  int ckpt_interval;        /* steps between periodic checkpoints; <=0: 500 */
} p360_train_params;

P360_API p360_status p360_train(const p360_train_params* params, char* ckpt_path_buf,
                                size_t buf_size);

/* Synthesizes the panorama from four ordered views [north, west, south,
 * east]. fov_override_deg > 0 bypasses the classifier; out_fov_deg (optional)
 * receives the fov actually used. Output resolution follows the checkpoint's
 * stage (512x1024 for large). */
P360_API p360_status p360_infer(const char* ckpt_path, const p360_image* const* views,
                                double fov_override_deg, p360_image** out_pano,
                                double* out_fov_deg);

/* ------------------------------------------------------------------ eval */

typedef struct p360_eval_summary {
  double mean_ssim;
  double mean_psnr_db;  /* +inf when every record is exact */
  int n_records;
} p360_eval_summary;

/* Evaluates the checkpoint on a manifest split: per-record CSV plus SSIM and
 * PSNR histogram CSVs next to it (PNG bar charts too when plots != 0).
 * The PANO360_CACHE environment variable, when set, receives each record's
 * predicted panorama. summary may be NULL. */
P360_API p360_status p360_eval(const char* ckpt_path, const char* manifest_path,
                               const char* split, const char* out_csv, int plots,
                               p360_eval_summary* summary);

/* ------------------------------------------------------------------ demo */

/* Trains a small model twice on one manifest sample - once per cube face,
 * once natively in equirect format - and writes the two panoramas (the
 * cube-face one shows seams at face boundaries). Paths are copied into the
 * optional buffers. */
P360_API p360_status p360_demo_seams(const char* manifest_path, const char* out_dir, int steps,
                                     uint64_t seed, char* cubemap_path_buf, size_t cubemap_buf_size,
                                     char* equirect_path_buf, size_t equirect_buf_size);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PANO360_PANO360_H_ */
