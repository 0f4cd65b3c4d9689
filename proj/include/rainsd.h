#ifndef RAINSD_H
#define RAINSD_H

/*
 * C interface to the rainsd toolkit: rainfall-parameterized rain-streak
 * synthesis, feature-level style transfer, dataset pipeline, style probes
 * and perception metrics.
 *
 * Conventions:
 *   - every fallible call returns a rainsd_status; RAINSD_OK is 0
 *   - on failure, rainsd_last_error() returns a thread-local message that
 *     stays valid until the next failing call on the same thread
 *   - objects returned through out-parameters are owned by the caller and
 *     released with the matching *_free function
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rainsd_status {
  RAINSD_OK = 0,
  RAINSD_ERR_INVALID_ARGUMENT = 1,
  RAINSD_ERR_IO = 2,
  RAINSD_ERR_FORMAT = 3,
  RAINSD_ERR_INTERNAL = 4
} rainsd_status;

const char* rainsd_last_error(void);
const char* rainsd_version(void);

typedef struct rainsd_image rainsd_image;
typedef struct rainsd_tensor rainsd_tensor;
typedef struct rainsd_config rainsd_config;

/* ---- images: 8-bit RGB, row-major; PNG or binary PPM (P6) on disk ---- */

rainsd_status rainsd_image_load(const char* path, rainsd_image** out);
rainsd_status rainsd_image_save(const rainsd_image* img, const char* path);
rainsd_status rainsd_image_create(int32_t width, int32_t height,
                                  const uint8_t* rgb_or_null, rainsd_image** out);
int32_t rainsd_image_width(const rainsd_image* img);
int32_t rainsd_image_height(const rainsd_image* img);
const uint8_t* rainsd_image_pixels(const rainsd_image* img);
void rainsd_image_free(rainsd_image* img);

/* ---- configuration (JSON file; NULL path loads the defaults) ---- */

rainsd_status rainsd_config_load(const char* path_or_null, rainsd_config** out);
void rainsd_config_free(rainsd_config* cfg);

/* ---- rain streak synthesis ---- */

rainsd_status rainsd_rain_apply(const rainsd_config* cfg, const rainsd_image* in,
                                double rate_mm_per_h, uint64_t seed,
                                rainsd_image** out);

/* Writes the generated layer as text, one "x y length angle thickness" line
 * per segment. */
rainsd_status rainsd_rain_dump_layer(const rainsd_config* cfg, int32_t width,
                                     int32_t height, double rate_mm_per_h,
                                     uint64_t seed, const char* path);

/* ---- tensors (RSDT files) ---- */

rainsd_status rainsd_tensor_read(const char* path, rainsd_tensor** out);
rainsd_status rainsd_tensor_write(const rainsd_tensor* t, const char* path);
rainsd_status rainsd_tensor_create(const uint64_t* extents, uint32_t rank,
                                   const float* data_or_null, rainsd_tensor** out);
uint32_t rainsd_tensor_rank(const rainsd_tensor* t);
uint64_t rainsd_tensor_extent(const rainsd_tensor* t, uint32_t axis);
const float* rainsd_tensor_data(const rainsd_tensor* t);
void rainsd_tensor_free(rainsd_tensor* t);

/* Feature adaptive instance normalization; epsilon <= 0 selects the default
 * (1e-5). */
rainsd_status rainsd_fadain(const rainsd_tensor* content, const rainsd_tensor* style,
                            double epsilon, rainsd_tensor** out);

/* ---- two-stream translation ---- */

rainsd_status rainsd_translate(const rainsd_config* cfg, const rainsd_image* content,
                               const rainsd_image* style,
                               const char* weights_dir_or_null, uint64_t seed,
                               rainsd_image** out);

/* ---- dataset pipeline ---- */

typedef struct rainsd_pipeline_report {
  uint64_t planned_total;
  uint64_t planned_train_a;
  uint64_t planned_train_b;
  uint64_t planned_test_a;
  uint64_t processed;
  uint64_t skipped;
  uint64_t failed;
} rainsd_pipeline_report;

/* Plans from the annotations plus the config's pipeline section, then
 * materializes under out_dir (unless dry_run). threads 0 honors the
 * RAINSD_THREADS environment variable (0 or unset = auto). When
 * report_json_or_null is given, a detailed report including per-entry
 * failures is written there. */
rainsd_status rainsd_pipeline_run(const rainsd_config* cfg, const char* annotations,
                                  const char* images_dir, const char* out_dir,
                                  int dry_run, int threads,
                                  const char* report_json_or_null,
                                  rainsd_pipeline_report* report);

/* ---- style probe ---- */

/* Reads f<k>.rsdt feature dumps, writes the report text to out_path and a
 * plot-ready CSV to "<out_path>.csv". baseline_dir_or_null enables the
 * relative-change comparison. */
rainsd_status rainsd_probe_run(const char* features_dir,
                               const char* baseline_dir_or_null,
                               const char* out_path);

/* ---- perception metrics ---- */

typedef struct rainsd_eval_report {
  double recall_pct;
  double map_pct;
  double miou_pct;
  double accuracy_pct;
  int recall_defined;
  int map_defined;
  int seg_defined;
} rainsd_eval_report;

rainsd_status rainsd_eval_run(const rainsd_config* cfg, const char* predictions,
                              const char* ground_truth,
                              const char* masks_pred_dir_or_null,
                              const char* masks_gt_dir_or_null,
                              rainsd_eval_report* out);

/* ---- loss self-check ---- */

/* Runs the loss invariant suite. *table_out receives the rendered pass/fail
 * table (release with rainsd_string_free); *failures_out the failing count. */
rainsd_status rainsd_loss_check(uint64_t seed, char** table_out, int32_t* failures_out);
void rainsd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RAINSD_H */
