#ifndef ONTOMATCH_H
#define ONTOMATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OmStatus {
  OM_STATUS_OK = 0,
  OM_STATUS_NULL_ARGUMENT = 1,
  OM_STATUS_INVALID_UTF8 = 2,
  OM_STATUS_PARSE_ERROR = 3,
  OM_STATUS_CONFIG_ERROR = 4,
  OM_STATUS_INDEX_OUT_OF_RANGE = 5,
  OM_STATUS_PANIC = 6,
} OmStatus;

typedef enum OmFormat {
  OM_FORMAT_TURTLE = 0,
  OM_FORMAT_RDF_XML = 1,
  /**
   * Guess from the first non-blank character.
   */
  OM_FORMAT_AUTO = 2,
} OmFormat;

typedef struct OmAlignment OmAlignment;

typedef struct OmConfig OmConfig;

typedef struct OmGraph OmGraph;

typedef struct OmModel OmModel;

typedef struct OmReference OmReference;

/**
 * Borrowed view of one mapping. The strings stay valid until the alignment
 * is freed.
 */
typedef struct OmMapping {
  const char *source;
  const char *target;
  double confidence;
  /**
   * Label, property, parent, instance, restriction, neighbourhood.
   */
  double signals[6];
  bool fallback_applied;
} OmMapping;

typedef struct OmMetrics {
  size_t true_positives;
  size_t false_positives;
  size_t false_negatives;
  double precision;
  double recall;
  double f1;
} OmMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *om_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *om_version(void);

void om_string_free(char *s);

enum OmStatus om_graph_parse(const char *text, enum OmFormat format, struct OmGraph **out);

size_t om_graph_len(const struct OmGraph *graph);

/**
 * Closure of `graph` under the built-in OWL RL rules.
 */
enum OmStatus om_graph_materialize(const struct OmGraph *graph, struct OmGraph **out);

enum OmStatus om_graph_to_turtle(const struct OmGraph *graph, char **out);

void om_graph_free(struct OmGraph *graph);

enum OmStatus om_model_build(const struct OmGraph *graph,
                             const struct OmConfig *config,
                             struct OmModel **out);

size_t om_model_class_count(const struct OmModel *model);

void om_model_free(struct OmModel *model);

/**
 * A config holding the default weights and thresholds.
 */
enum OmStatus om_config_new(struct OmConfig **out);

/**
 * Sets the six signal weights. Validation happens in `om_config_validate`
 * and `om_align`.
 */
enum OmStatus om_config_set_weights(struct OmConfig *config, const double *weights);

enum OmStatus om_config_set_min_confidence(struct OmConfig *config, double value);

enum OmStatus om_config_set_pre_filter(struct OmConfig *config, double value);

enum OmStatus om_config_set_stable(struct OmConfig *config, bool stable);

enum OmStatus om_config_set_synonyms(struct OmConfig *config, bool enabled);

enum OmStatus om_config_validate(const struct OmConfig *config);

void om_config_free(struct OmConfig *config);

/**
 * Aligns two models. A null config means the defaults.
 */
enum OmStatus om_align(const struct OmModel *source,
                       const struct OmModel *target,
                       const struct OmConfig *config,
                       struct OmAlignment **out);

size_t om_alignment_len(const struct OmAlignment *alignment);

/**
 * Mappings are ordered by confidence descending, then source and target.
 */
enum OmStatus om_alignment_get(const struct OmAlignment *alignment,
                               size_t index,
                               struct OmMapping *out);

/**
 * Alignment-format XML for the mappings.
 */
enum OmStatus om_alignment_to_xml(const struct OmAlignment *alignment,
                                  const char *onto1,
                                  const char *onto2,
                                  char **out);

void om_alignment_free(struct OmAlignment *alignment);

enum OmStatus om_reference_parse(const char *xml, struct OmReference **out);

size_t om_reference_len(const struct OmReference *reference);

void om_reference_free(struct OmReference *reference);

enum OmStatus om_evaluate(const struct OmAlignment *alignment,
                          const struct OmReference *reference,
                          struct OmMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONTOMATCH_H */
