// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

// extern "C" surface over the core library. Exceptions never cross this
// boundary; they become status codes plus a thread-local message.

#include "sarcr/sarcr.h"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "core/attack.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/image_io.hpp"

struct sarcr_spec {
  sarcr::SarSystemSpec spec;
};

struct sarcr_image {
  sarcr::ComplexImage image;
};

struct sarcr_model {
  std::unique_ptr<sarcr::TargetModel> model;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_kind;

sarcr_status statusOf(sarcr::ErrorClass cls) {
  switch (cls) {
    case sarcr::ErrorClass::kInvalidArgument: return SARCR_ERR_INVALID_ARGUMENT;
    case sarcr::ErrorClass::kConfig: return SARCR_ERR_CONFIG;
    case sarcr::ErrorClass::kData: return SARCR_ERR_DATA;
    case sarcr::ErrorClass::kNumerical: return SARCR_ERR_NUMERICAL;
    case sarcr::ErrorClass::kIo: return SARCR_ERR_IO;
  }
  return SARCR_ERR_INTERNAL;
}

sarcr_status setError(sarcr_status status, std::string kind, std::string message) {
  g_kind = std::move(kind);
  g_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into a status.
template <class Fn>
sarcr_status guarded(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    g_kind.clear();
    return SARCR_OK;
  } catch (const sarcr::Error& e) {
    return setError(statusOf(e.errorClass()), e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return setError(SARCR_ERR_CONFIG, "InvalidJson", e.what());
  } catch (const std::bad_alloc&) {
    return setError(SARCR_ERR_INTERNAL, "OutOfMemory", "allocation failed");
  } catch (const std::exception& e) {
    return setError(SARCR_ERR_INTERNAL, "Internal", e.what());
  }
}

sarcr_status nullArgument(const char* name) {
  return setError(SARCR_ERR_INVALID_ARGUMENT, "NullArgument", std::string(name) + " is NULL");
}

char* copyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* sarcr_version(void) { return "0.1.0"; }
const char* sarcr_last_error(void) { return g_error.c_str(); }
const char* sarcr_last_error_kind(void) { return g_kind.c_str(); }
void sarcr_string_free(char* s) { std::free(s); }

sarcr_status sarcr_spec_create(const char* json, sarcr_spec** out) {
  if (!out) return nullArgument("out");
  *out = nullptr;
  return guarded([&] {
    const sarcr::Json j = json ? sarcr::Json::parse(json) : sarcr::Json();
    *out = new sarcr_spec{sarcr::specFromJson(j)};
  });
}

void sarcr_spec_destroy(sarcr_spec* spec) { delete spec; }

sarcr_status sarcr_spec_to_json(const sarcr_spec* spec, char** out) {
  if (!spec) return nullArgument("spec");
  if (!out) return nullArgument("out");
  return guarded([&] { *out = copyString(sarcr::specToJson(spec->spec).dump()); });
}

sarcr_status sarcr_image_read(const char* path, sarcr_image** out) {
  if (!path) return nullArgument("path");
  if (!out) return nullArgument("out");
  *out = nullptr;
  return guarded([&] { *out = new sarcr_image{sarcr::readCimg(path)}; });
}

sarcr_status sarcr_image_write(const sarcr_image* image, const char* path) {
  if (!image) return nullArgument("image");
  if (!path) return nullArgument("path");
  return guarded([&] { sarcr::writeCimg(path, image->image); });
}

sarcr_status sarcr_image_write_png(const sarcr_image* image, const char* path) {
  if (!image) return nullArgument("image");
  if (!path) return nullArgument("path");
  return guarded([&] { sarcr::writeMagnitudePng(path, image->image.magnitude()); });
}

size_t sarcr_image_rows(const sarcr_image* image) {
  return image ? static_cast<size_t>(image->image.pixels.rows()) : 0;
}

size_t sarcr_image_cols(const sarcr_image* image) {
  return image ? static_cast<size_t>(image->image.pixels.cols()) : 0;
}

sarcr_status sarcr_image_copy_pixels(const sarcr_image* image, double* buffer, size_t capacity) {
  if (!image) return nullArgument("image");
  if (!buffer) return nullArgument("buffer");
  const auto& px = image->image.pixels;
  const size_t needed = 2 * static_cast<size_t>(px.size());
  if (capacity < needed) {
    return setError(SARCR_ERR_INVALID_ARGUMENT, "BufferTooSmall",
                    "need " + std::to_string(needed) + " doubles, got " + std::to_string(capacity));
  }
  size_t k = 0;
  for (Eigen::Index r = 0; r < px.rows(); ++r) {
    for (Eigen::Index c = 0; c < px.cols(); ++c) {
      buffer[k++] = px(r, c).real();
      buffer[k++] = px(r, c).imag();
    }
  }
  return SARCR_OK;
}

void sarcr_image_destroy(sarcr_image* image) { delete image; }

sarcr_status sarcr_simulate(const sarcr_spec* spec, const char* params_text, double incidence, double azimuth,
                            int full_chain, sarcr_image** out) {
  if (!spec) return nullArgument("spec");
  if (!params_text) return nullArgument("params_text");
  if (!out) return nullArgument("out");
  *out = nullptr;
  return guarded([&] {
    const auto reflectors = sarcr::expandParams(sarcr::parseParams(params_text));
    const sarcr::AspectAngles aspect{incidence, azimuth};
    if (full_chain) {
      *out = new sarcr_image{sarcr::ChainRenderer(spec->spec).render(reflectors, aspect)};
    } else {
      *out = new sarcr_image{sarcr::FastRenderer(spec->spec).render(reflectors, aspect)};
    }
  });
}

sarcr_status sarcr_model_load(const char* path, sarcr_model** out) {
  if (!path) return nullArgument("path");
  if (!out) return nullArgument("out");
  *out = nullptr;
  return guarded([&] { *out = new sarcr_model{sarcr::loadModelFile(path)}; });
}

size_t sarcr_model_class_count(const sarcr_model* model) {
  return model ? static_cast<size_t>(model->model->classCount()) : 0;
}

sarcr_status sarcr_model_predict(const sarcr_model* model, const sarcr_image* image, double* probabilities,
                                 size_t capacity) {
  if (!model) return nullArgument("model");
  if (!image) return nullArgument("image");
  if (!probabilities) return nullArgument("probabilities");
  const size_t n = static_cast<size_t>(model->model->classCount());
  if (capacity < n) {
    return setError(SARCR_ERR_INVALID_ARGUMENT, "BufferTooSmall",
                    "need " + std::to_string(n) + " values, got " + std::to_string(capacity));
  }
  return guarded([&] {
    const auto p = model->model->predict(image->image.magnitude());
    sarcr::validateProbabilities(p);
    std::copy(p.begin(), p.end(), probabilities);
  });
}

void sarcr_model_destroy(sarcr_model* model) { delete model; }

sarcr_status sarcr_run(const char* command, const char* config_json, const char* out_dir, char** summary) {
  if (!command) return nullArgument("command");
  if (!out_dir) return nullArgument("out_dir");
  if (summary) *summary = nullptr;
  return guarded([&] {
    const sarcr::Json config = config_json ? sarcr::Json::parse(config_json) : sarcr::Json::object();
    const sarcr::Json result = sarcr::runCommand(command, config, out_dir);
    if (summary) *summary = copyString(result.dump());
  });
}

sarcr_status sarcr_hash_file(const char* path, char out_hex[41]) {
  if (!path) return nullArgument("path");
  if (!out_hex) return nullArgument("out_hex");
  return guarded([&] {
    const auto bytes = sarcr::readFileBytes(path);
    const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1 || len != 20) {
      sarcr::fail(sarcr::ErrorClass::kNumerical, "HashFailed", "SHA-1 failed");
    }
    for (unsigned int i = 0; i < len; ++i) std::snprintf(out_hex + 2 * i, 3, "%02x", digest[i]);
  });
}

}  // extern "C"
