/* Copyright 2026 The sarcr Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* Exercises the public C interface only; compiled as C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "sarcr/sarcr.h"

static int failures = 0;

#define EXPECT(cond)                                                     \
  do {                                                                   \
    if (!(cond)) {                                                       \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                        \
    }                                                                    \
  } while (0)

static const char* kOneReflector =
    "reflectors = 1\n"
    "scene_width = 38.4\n"
    "scene_height = 38.4\n"
    "1 0 0 75 0\n";

int main(void) {
  EXPECT(strcmp(sarcr_version(), "0.1.0") == 0);

  sarcr_spec* spec = NULL;
  EXPECT(sarcr_spec_create(NULL, &spec) == SARCR_OK);
  char* json = NULL;
  EXPECT(sarcr_spec_to_json(spec, &json) == SARCR_OK);
  EXPECT(json != NULL && strstr(json, "\"chip_rows\"") != NULL);
  sarcr_string_free(json);

  sarcr_spec* bad = NULL;
  EXPECT(sarcr_spec_create("{\"no_such_key\": 1}", &bad) == SARCR_ERR_CONFIG);
  EXPECT(bad == NULL);
  EXPECT(strlen(sarcr_last_error()) > 0);
  EXPECT(sarcr_spec_create("{", &bad) == SARCR_ERR_CONFIG);
  EXPECT(sarcr_spec_create("{\"bandwidth\": -1}", &bad) != SARCR_OK);

  sarcr_image* img = NULL;
  const double incidence = 75.0 * 3.14159265358979323846 / 180.0;
  EXPECT(sarcr_simulate(spec, kOneReflector, incidence, 0.0, 0, &img) == SARCR_OK);
  EXPECT(sarcr_image_rows(img) == 128 && sarcr_image_cols(img) == 128);
  {
    size_t n = 2 * 128 * 128;
    double* px = malloc(n * sizeof *px);
    double peak = 0.0;
    size_t peakAt = 0;
    EXPECT(sarcr_image_copy_pixels(img, px, n) == SARCR_OK);
    for (size_t i = 0; i < n / 2; ++i) {
      double m = hypot(px[2 * i], px[2 * i + 1]);
      if (m > peak) {
        peak = m;
        peakAt = i;
      }
    }
    EXPECT(peak > 0.0);
    EXPECT(peakAt / 128 == 64 && peakAt % 128 == 64);
    EXPECT(sarcr_image_copy_pixels(img, px, n - 1) == SARCR_ERR_INVALID_ARGUMENT);
    free(px);
  }
  EXPECT(sarcr_image_write(img, "capi_test.cimg") == SARCR_OK);
  EXPECT(sarcr_image_write_png(img, "capi_test.png") == SARCR_OK);
  sarcr_image* back = NULL;
  EXPECT(sarcr_image_read("capi_test.cimg", &back) == SARCR_OK);
  EXPECT(back != NULL && sarcr_image_rows(back) == 128);
  sarcr_image_destroy(back);
  sarcr_image_destroy(img);

  img = NULL;
  EXPECT(sarcr_simulate(spec, "1 0 0 0 0\n2 0 0 0 10\n", incidence, 0.0, 0, &img) == SARCR_ERR_CONFIG);
  EXPECT(strcmp(sarcr_last_error_kind(), "ConstraintViolation") == 0);
  EXPECT(sarcr_simulate(spec, NULL, incidence, 0.0, 0, &img) == SARCR_ERR_INVALID_ARGUMENT);
  EXPECT(sarcr_image_read("does/not/exist.cimg", &img) != SARCR_OK);

  sarcr_model* model = NULL;
  {
    FILE* f = fopen("capi_model.json", "w");
    fputs("{\"kind\": \"subprocess\", \"command\": \"cat > /dev/null; echo '[0.5, 0.5]'\", "
          "\"labels\": [\"a\", \"b\"]}", f);
    fclose(f);
  }
  EXPECT(sarcr_model_load("capi_model.json", &model) == SARCR_OK);
  EXPECT(sarcr_model_class_count(model) == 2);
  EXPECT(sarcr_simulate(spec, kOneReflector, incidence, 0.0, 0, &img) == SARCR_OK);
  {
    double p[2] = {0.0, 0.0};
    EXPECT(sarcr_model_predict(model, img, p, 2) == SARCR_OK);
    EXPECT(fabs(p[0] - 0.5) < 1e-12);
    EXPECT(sarcr_model_predict(model, img, p, 1) == SARCR_ERR_INVALID_ARGUMENT);
  }
  sarcr_image_destroy(img);
  sarcr_model_destroy(model);

  char* summary = NULL;
  EXPECT(sarcr_run("nonsense", "{}", "capi_out", &summary) != SARCR_OK);
  EXPECT(sarcr_run("train", "{\"dataset\": \"does/not/exist\"}", "capi_out", &summary) == SARCR_ERR_DATA);

  {
    FILE* f = fopen("capi_hello.txt", "w");
    fputs("hello\n", f);
    fclose(f);
    char hex[41];
    EXPECT(sarcr_hash_file("capi_hello.txt", hex) == SARCR_OK);
    EXPECT(strcmp(hex, "ce013625030ba8dba906f756967f9e9ca394464a") == 0);
  }

  sarcr_spec_destroy(spec);
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
