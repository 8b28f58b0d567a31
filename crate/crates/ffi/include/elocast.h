#ifndef ELOCAST_H
#define ELOCAST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ElocastStatus {
  ELOCAST_STATUS_OK = 0,
  ELOCAST_STATUS_NULL_POINTER = 1,
  ELOCAST_STATUS_INVALID_UTF8 = 2,
  ELOCAST_STATUS_IO = 3,
  ELOCAST_STATUS_PARSE = 4,
  ELOCAST_STATUS_INVALID_INPUT = 5,
  ELOCAST_STATUS_INSUFFICIENT_DATA = 6,
  ELOCAST_STATUS_FIT_FAILED = 7,
  ELOCAST_STATUS_NOT_AVAILABLE = 8,
  ELOCAST_STATUS_PANIC = 9,
} ElocastStatus;

typedef enum ElocastFamily {
  ELOCAST_FAMILY_INDEPENDENT = 0,
  ELOCAST_FAMILY_NESTED = 1,
  ELOCAST_FAMILY_BIVARIATE = 2,
  ELOCAST_FAMILY_INFLATED = 3,
} ElocastFamily;

/**
 * Fitted coefficients for every participant.
 */
typedef struct ElocastCoefficients ElocastCoefficients;

/**
 * Simulated stage distribution.
 */
typedef struct ElocastDistribution ElocastDistribution;

/**
 * Loaded match data, tournament format, Elo snapshot and filter.
 */
typedef struct ElocastInputs ElocastInputs;

typedef struct ElocastSimConfig {
  uint64_t replications;
  uint64_t seed;
  bool update_elo;
  double k_factor;
  /**
   * 0 uses all cores.
   */
  uint32_t threads;
  /**
   * Decide shootouts by a fair coin instead of the expected-goals ratio.
   */
  bool fair_coin_penalties;
} ElocastSimConfig;

typedef struct ElocastScores {
  double e1;
  double e2;
  double brier;
  double rps;
} ElocastScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *elocast_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *elocast_version(void);

/**
 * Default simulation settings: 100000 replications, seed 2018, Elo
 * updating with K = 60, all cores, expected-goals penalties.
 */
struct ElocastSimConfig elocast_sim_config_default(void);

/**
 * Elo change of side A after a match, written to `out_delta`.
 * `draw_result` scores the match as a draw whatever the goals (shootouts).
 */
enum ElocastStatus elocast_elo_delta(double rating_a,
                                     double rating_b,
                                     uint32_t goals_a,
                                     uint32_t goals_b,
                                     double k_factor,
                                     bool draw_result,
                                     double *out_delta);

/**
 * Loads a built-in preset (2010, 2014 or 2018) with match data from
 * `data_path` (file or directory). `elo_path` may be null to use the
 * shipped snapshot.
 *
 * # Safety
 * String arguments must be null or valid NUL-terminated strings; `out`
 * must be a valid pointer.
 */
enum ElocastStatus elocast_inputs_from_preset(uint16_t year,
                                              const char *data_path,
                                              const char *elo_path,
                                              struct ElocastInputs **out);

/**
 * Loads a custom configuration from format JSON, Elo CSV, filter JSON and
 * match data paths.
 *
 * # Safety
 * As for [`elocast_inputs_from_preset`].
 */
enum ElocastStatus elocast_inputs_from_files(const char *format_path,
                                             const char *elo_path,
                                             const char *filter_path,
                                             const char *data_path,
                                             struct ElocastInputs **out);

/**
 * # Safety
 * `p` must be null or a handle from an `elocast_inputs_*` constructor,
 * not yet freed.
 */
void elocast_inputs_free(struct ElocastInputs *p);

/**
 * Fits one model family for every participant.
 *
 * # Safety
 * `inputs` must be a live handle; `out` a valid pointer.
 */
enum ElocastStatus elocast_fit(const struct ElocastInputs *inputs,
                               enum ElocastFamily family,
                               struct ElocastCoefficients **out);

/**
 * Coefficients as JSON; release the string with [`elocast_string_free`].
 *
 * # Safety
 * `coeffs` must be a live handle; `out` a valid pointer.
 */
enum ElocastStatus elocast_coefficients_json(const struct ElocastCoefficients *coeffs, char **out);

/**
 * # Safety
 * `p` must be null or a handle from [`elocast_fit`], not yet freed.
 */
void elocast_coefficients_free(struct ElocastCoefficients *p);

/**
 * Runs the Monte Carlo simulation. `config` may be null for defaults.
 *
 * # Safety
 * Handles must be live; `config` null or valid; `out` a valid pointer.
 */
enum ElocastStatus elocast_simulate(const struct ElocastInputs *inputs,
                                    const struct ElocastCoefficients *coeffs,
                                    enum ElocastFamily family,
                                    const struct ElocastSimConfig *config,
                                    struct ElocastDistribution **out);

/**
 * Number of teams in the distribution (0 for a null handle).
 *
 * # Safety
 * `dist` must be null or a live handle.
 */
size_t elocast_distribution_team_count(const struct ElocastDistribution *dist);

/**
 * Name of team `index`, borrowed from the handle; null when out of range.
 *
 * # Safety
 * `dist` must be null or a live handle.
 */
const char *elocast_distribution_team_name(const struct ElocastDistribution *dist, size_t index);

/**
 * Writes the six exit-level probabilities of team `index` (champion,
 * runner-up, semi-final, quarter-final, round of 16, group) to `out`.
 *
 * # Safety
 * `dist` must be a live handle; `out` must point to 6 doubles.
 */
enum ElocastStatus elocast_distribution_probs(const struct ElocastDistribution *dist,
                                              size_t index,
                                              double *out);

/**
 * Stage table as CSV; cumulative (reach) columns when `cumulative`,
 * exclusive exit levels otherwise. Release with [`elocast_string_free`].
 *
 * # Safety
 * `dist` must be a live handle; `out` a valid pointer.
 */
enum ElocastStatus elocast_distribution_stage_csv(const struct ElocastDistribution *dist,
                                                  bool cumulative,
                                                  char **out);

/**
 * Scores the distribution against the preset's realized result.
 * Returns `NotAvailable` when the inputs carry no realized result.
 *
 * # Safety
 * Handles must be live; `out` a valid pointer.
 */
enum ElocastStatus elocast_score(const struct ElocastInputs *inputs,
                                 const struct ElocastDistribution *dist,
                                 bool literal_rps,
                                 struct ElocastScores *out);

/**
 * # Safety
 * `p` must be null or a handle from [`elocast_simulate`], not yet freed.
 */
void elocast_distribution_free(struct ElocastDistribution *p);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from this library, not yet freed.
 */
void elocast_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELOCAST_H */
