/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The DRRD Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the DRRD rumour detector.
 *
 * Every object is an opaque handle created and destroyed through this API.
 * Functions return a drrd_status; on failure drrd_last_error() describes the
 * problem for the calling thread until its next failing call. Strings
 * returned through out-parameters are owned by the caller and released with
 * drrd_string_free().
 */
#ifndef DRRD_DRRD_H
#define DRRD_DRRD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DRRD_BUILDING_LIBRARY)
#define DRRD_API __declspec(dllexport)
#else
#define DRRD_API __declspec(dllimport)
#endif
#else
#define DRRD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drrd_status {
  DRRD_OK = 0,
  DRRD_ERR_USAGE = 1,
  DRRD_ERR_DATA = 2,
  DRRD_ERR_NUMERICAL = 3,
  DRRD_ERR_IO = 4,
  DRRD_ERR_INSUFFICIENT_EVIDENCE = 5,
  DRRD_ERR_INTERNAL = 6
} drrd_status;

typedef enum drrd_label { DRRD_NON_RUMOUR = 0, DRRD_RUMOUR = 1 } drrd_label;

typedef struct drrd_config drrd_config;
typedef struct drrd_corpus drrd_corpus;
typedef struct drrd_detector drrd_detector;

typedef void (*drrd_log_callback)(const char* message, void* user_data);

DRRD_API const char* drrd_version(void);
DRRD_API const char* drrd_last_error(void);
DRRD_API void drrd_string_free(char* s);
/* Progress messages from training. NULL silences them. */
DRRD_API void drrd_set_log_callback(drrd_log_callback callback, void* user_data);

/* ---- configuration ---- */

DRRD_API drrd_status drrd_config_create(drrd_config** out);
DRRD_API drrd_status drrd_config_load(const char* path, drrd_config** out);
DRRD_API drrd_status drrd_config_parse(const char* json_text, drrd_config** out);
/* key is dotted (train.lr); value is JSON text or a bare string. */
DRRD_API drrd_status drrd_config_set(drrd_config* config, const char* key, const char* value);
DRRD_API drrd_status drrd_config_to_json(const drrd_config* config, char** json_out);
DRRD_API void drrd_config_destroy(drrd_config* config);

/* ---- corpus ---- */

typedef struct drrd_corpus_summary {
  size_t events;
  size_t posts;
  size_t users;
  size_t rumours;
  size_t non_rumours;
} drrd_corpus_summary;

DRRD_API drrd_status drrd_corpus_load(const char* path, drrd_corpus** out);
DRRD_API drrd_status drrd_corpus_save(const drrd_corpus* corpus, const char* path);
/* Synthetic corpus from the config's synth section and seed. */
DRRD_API drrd_status drrd_synth_generate(const drrd_config* config, drrd_corpus** out);
DRRD_API drrd_status drrd_corpus_summary_get(const drrd_corpus* corpus, drrd_corpus_summary* out);
DRRD_API size_t drrd_corpus_size(const drrd_corpus* corpus);
/* Borrowed pointer, valid while the corpus lives. NULL when out of range. */
DRRD_API const char* drrd_corpus_event_id(const drrd_corpus* corpus, size_t index);
DRRD_API void drrd_corpus_destroy(drrd_corpus* corpus);

/* ---- detector ---- */

typedef struct drrd_prediction {
  int insufficient_evidence; /* nonzero: no post before the deadline */
  drrd_label label;
  double p_rumour;
  double p_non_rumour;
} drrd_prediction;

/* Trains on the split selected by the config (train.fold, train.use_holdout). */
DRRD_API drrd_status drrd_detector_train(const drrd_corpus* corpus, const drrd_config* config, drrd_detector** out);
/* Writes config.json, split.json, train_log.csv and the checkpoints. */
DRRD_API drrd_status drrd_detector_save(const drrd_detector* detector, const char* dir);
DRRD_API drrd_status drrd_detector_load(const char* dir, drrd_detector** out);
/* Mean training loss of the last epoch; 0 for a loaded detector. */
DRRD_API double drrd_detector_final_loss(const drrd_detector* detector);
/* deadline_hours <= 0 means no deadline. */
DRRD_API drrd_status drrd_detector_predict(const drrd_detector* detector, const drrd_corpus* corpus, size_t index,
                                           double deadline_hours, drrd_prediction* out);
/* Writes <dir>/<event_id>_text.csv and <event_id>_user.csv. */
DRRD_API drrd_status drrd_detector_dump_features(const drrd_detector* detector, const drrd_corpus* corpus,
                                                 size_t index, const char* dir);
DRRD_API void drrd_detector_destroy(drrd_detector* detector);

/* ---- evaluation ---- */

typedef struct drrd_eval_summary {
  double accuracy;
  double rumour_precision;
  double rumour_recall;
  double rumour_f1;
  double non_rumour_precision;
  double non_rumour_recall;
  double non_rumour_f1;
  size_t n_evaluated;
} drrd_eval_summary;

/* With detector == NULL, runs the k-fold protocol from scratch; otherwise
 * tests the detector on every corpus event it did not train on. Writes the
 * metrics CSV, and the early-detection CSV when early_csv is not NULL. */
DRRD_API drrd_status drrd_evaluate(const drrd_corpus* corpus, const drrd_config* config, const drrd_detector* detector,
                                   const char* metrics_csv, const char* early_csv, drrd_eval_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* DRRD_DRRD_H */
