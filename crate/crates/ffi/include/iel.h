#ifndef IEL_H
#define IEL_H

/* C interface to iel-core. Keep in sync with src/lib.rs. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IelStatus {
  IEL_STATUS_OK = 0,
  /* Derivation rejected, or the goal is not provable. */
  IEL_STATUS_REJECTED = 1,
  /* Search budget exhausted. */
  IEL_STATUS_BUDGET = 2,
  /* Malformed input text. */
  IEL_STATUS_INPUT = 3,
  IEL_STATUS_NULL_ARGUMENT = 4,
  IEL_STATUS_INVALID_UTF8 = 5,
  IEL_STATUS_INTERNAL = 6,
} IelStatus;

typedef enum IelLanguage {
  IEL_LANGUAGE_IEL = 0,
  IEL_LANGUAGE_MODAL = 1,
  IEL_LANGUAGE_EXPLICIT = 2,
} IelLanguage;

typedef enum IelSequentSystem {
  IEL_SEQUENT_SYSTEM_S4V_MINUS_G = 0,
  IEL_SEQUENT_SYSTEM_S4V_G = 1,
} IelSequentSystem;

typedef struct IelFormula IelFormula;

typedef struct IelProof IelProof;

typedef struct IelRealization IelRealization;

#ifdef __cplusplus
extern "C" {
#endif

const char *iel_last_error(void);

void iel_string_free(char *s);

IelStatus iel_formula_parse(const char *text, IelLanguage language, IelFormula **out_formula);

void iel_formula_free(IelFormula *f);

char *iel_formula_print(const IelFormula *f);

IelStatus iel_translate(const IelFormula *f, IelFormula **out_formula);

IelStatus iel_project(const IelFormula *f, IelFormula **out_formula);

IelStatus iel_prove(const char *goal,
                    IelSequentSystem system,
                    size_t max_depth,
                    size_t max_nodes,
                    IelProof **out_proof);

IelStatus iel_proof_from_json(const char *json, IelSequentSystem system, IelProof **out_proof);

char *iel_proof_to_json(const IelProof *p);

void iel_proof_free(IelProof *p);

IelStatus iel_realize(const IelProof *p, IelRealization **out_realization);

char *iel_realization_formula(const IelRealization *r);

char *iel_realization_to_json(const IelRealization *r);

void iel_realization_free(IelRealization *r);

int iel_run(int argc, const char *const *argv, const char *stdin_text, char **out_text);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* IEL_H */
