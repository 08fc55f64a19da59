/* Copyright 2026 The sarcr Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the sarcr library: trihedral corner reflector scattering,
 * simulated SAR imaging, and reflector-placement attacks on SAR image
 * classifiers.
 *
 * Conventions:
 *   - Every fallible call returns a sarcr_status. On failure the calling
 *     thread's sarcr_last_error() / sarcr_last_error_kind() describe it.
 *   - Objects are opaque handles created by *_create / *_load / *_read and
 *     released by the matching *_destroy (NULL is accepted).
 *   - Strings returned through char** are owned by the caller and released
 *     with sarcr_string_free.
 *   - Angles are radians.
 */
#ifndef SARCR_SARCR_H_
#define SARCR_SARCR_H_

#include <stddef.h>

#if defined(SARCR_BUILDING_LIBRARY)
#define SARCR_API __attribute__((visibility("default")))
#else
#define SARCR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sarcr_status {
  SARCR_OK = 0,
  SARCR_ERR_INVALID_ARGUMENT = 1,
  SARCR_ERR_CONFIG = 2,
  SARCR_ERR_DATA = 3,
  SARCR_ERR_NUMERICAL = 4,
  SARCR_ERR_IO = 5,
  SARCR_ERR_INTERNAL = 6
} sarcr_status;

SARCR_API const char* sarcr_version(void);
SARCR_API const char* sarcr_last_error(void);
/* Short machine-readable error kind, e.g. "OutOfSwath". */
SARCR_API const char* sarcr_last_error_kind(void);
SARCR_API void sarcr_string_free(char* s);

/* ---- System specification ------------------------------------------- */

typedef struct sarcr_spec sarcr_spec;

/* json may be NULL for the reference system; otherwise a JSON object whose
 * keys override the defaults (see README for the key list). */
SARCR_API sarcr_status sarcr_spec_create(const char* json, sarcr_spec** out);
SARCR_API void sarcr_spec_destroy(sarcr_spec* spec);
SARCR_API sarcr_status sarcr_spec_to_json(const sarcr_spec* spec, char** out);

/* ---- Complex images ------------------------------------------------- */

typedef struct sarcr_image sarcr_image;

SARCR_API sarcr_status sarcr_image_read(const char* path, sarcr_image** out);
SARCR_API sarcr_status sarcr_image_write(const sarcr_image* image, const char* path);
/* 8-bit log-magnitude PNG, floor 40 dB below the image maximum. */
SARCR_API sarcr_status sarcr_image_write_png(const sarcr_image* image, const char* path);
SARCR_API size_t sarcr_image_rows(const sarcr_image* image);
SARCR_API size_t sarcr_image_cols(const sarcr_image* image);
/* Copies rows*cols interleaved (re, im) pairs, row-major, into buffer. */
SARCR_API sarcr_status sarcr_image_copy_pixels(const sarcr_image* image, double* buffer, size_t capacity);
SARCR_API void sarcr_image_destroy(sarcr_image* image);

/* Focused image of the reflectors described by params_text (the reflector
 * parameter text format) seen from (incidence, azimuth). full_chain != 0
 * runs echo synthesis, demodulation and range-Doppler focusing; otherwise a
 * tabulated point response is used. */
SARCR_API sarcr_status sarcr_simulate(const sarcr_spec* spec, const char* params_text, double incidence,
                                      double azimuth, int full_chain, sarcr_image** out);

/* ---- Classifiers ---------------------------------------------------- */

typedef struct sarcr_model sarcr_model;

/* Loads a model description: a trained reference model or a subprocess
 * adapter ({"kind": "subprocess", "command": ..., "labels": [...]}). */
SARCR_API sarcr_status sarcr_model_load(const char* path, sarcr_model** out);
SARCR_API size_t sarcr_model_class_count(const sarcr_model* model);
/* Probabilities for |image|; writes class_count values. */
SARCR_API sarcr_status sarcr_model_predict(const sarcr_model* model, const sarcr_image* image,
                                           double* probabilities, size_t capacity);
SARCR_API void sarcr_model_destroy(sarcr_model* model);

/* ---- Pipeline commands ---------------------------------------------- */

/* Runs one pipeline step ("synth", "train", "simulate", "attack",
 * "evaluate", "bbox", "desk") configured by a JSON object. Output files go under
 * out_dir; a JSON summary is returned through summary (may be NULL). */
SARCR_API sarcr_status sarcr_run(const char* command, const char* config_json, const char* out_dir,
                                 char** summary);

/* Git-style content hash (SHA-1 of "blob <size>\0" + content), 40 hex
 * characters plus terminator. */
SARCR_API sarcr_status sarcr_hash_file(const char* path, char out_hex[41]);

#ifdef __cplusplus
}
#endif

#endif /* SARCR_SARCR_H_ */
