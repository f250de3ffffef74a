#ifndef FFEC_H
#define FFEC_H

/*
 * C interface to the ffec library.  Every handle is opaque and owned by the
 * caller; free it with the matching *_free.  Functions return a status code
 * and leave a message for ffec_last_error() (per thread) on failure.
 * Polynomials are strings of ascending comma-separated residues ("1,0,1" is
 * 1 + T^2, "0" is zero).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define FFEC_API __attribute__((visibility("default")))
#else
#define FFEC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ffec_status {
  FFEC_OK = 0,
  FFEC_NOT_PRIME,
  FFEC_FORBIDDEN_CHARACTERISTIC,
  FFEC_NO_IRREDUCIBLE_FOUND,
  FFEC_NOT_CUBE_ROOT_OF_UNITY,
  FFEC_ZERO_POLYNOMIAL,
  FFEC_EVEN_CHARACTERISTIC,
  FFEC_CONSTANT_MODULUS,
  FFEC_NO_CUBE_ROOTS_OF_UNITY,
  FFEC_NON_MINIMAL_MODEL,
  FFEC_ISOTRIVIAL_CURVE,
  FFEC_NOT_MORDELL_CURVE,
  FFEC_NOT_SQUAREFREE,
  FFEC_NOT_COPRIME_TO_DISCRIMINANT,
  FFEC_NOT_CUBEFREE,
  FFEC_NOT_COPRIME_TO_B,
  FFEC_DEGREE_MISMATCH,
  FFEC_BAD_PRIME_UNSUPPORTED,
  FFEC_BAD_PRIME,
  FFEC_DEGREE_DETECTION_FAILED,
  FFEC_UNSUPPORTED_POWER,
  FFEC_EVALUATION_AT_ROOT,
  FFEC_SIGN_SPLIT_UNDEFINED,
  FFEC_EMPTY_FAMILY,
  FFEC_METHOD_DISAGREEMENT,
  FFEC_POLICY_REQUIRED,
  FFEC_DEGENERATE_DEGREE,
  FFEC_PARSE_ERROR,
  FFEC_UNSUPPORTED_FEATURE,
  FFEC_BAD_POLYNOMIAL_LITERAL,
  FFEC_INVALID_ARGUMENT,
  FFEC_TOO_LARGE,
  FFEC_INTERNAL
} ffec_status;

FFEC_API const char* ffec_version(void);
FFEC_API const char* ffec_status_name(ffec_status s);
FFEC_API const char* ffec_last_error(void);
FFEC_API void ffec_string_free(char* s);

/* Exact rationals as decimal strings; value is the nearest double. */
#define FFEC_RATIONAL_DIGITS 160
typedef struct ffec_rational {
  char num[FFEC_RATIONAL_DIGITS];
  char den[FFEC_RATIONAL_DIGITS];
  double value;
} ffec_rational;

/* ---- fields ---- */

typedef struct ffec_field ffec_field;

typedef struct ffec_field_info {
  int p, m;
  uint32_t q;
  uint32_t g;      /* least generator, as an element code */
  uint32_t omega;  /* g^((q-1)/3), 0 without cube roots of unity */
  int has_mu3;
} ffec_field_info;

FFEC_API ffec_status ffec_field_new(int p, int m, ffec_field** out);
FFEC_API void ffec_field_free(ffec_field* f);
FFEC_API ffec_status ffec_field_get_info(const ffec_field* f, ffec_field_info* out);
/* Modulus over F_p as ascending coefficients. */
FFEC_API ffec_status ffec_field_modulus(const ffec_field* f, char** out);

/* ---- curves y^2 = x^3 + A x + B ---- */

typedef struct ffec_curve ffec_curve;

typedef struct ffec_curve_info {
  int n_frak;
  int is_mordell;
  int deg_delta;
  int deg_M, deg_Adot;
  int bad_primes;  /* finite bad primes */
  int inf_type;    /* 0 good, 1 multiplicative, 2 additive */
  int inf_f;       /* conductor exponent at infinity */
} ffec_curve_info;

FFEC_API ffec_status ffec_curve_new(const ffec_field* f, const char* A, const char* B, ffec_curve** out);
FFEC_API void ffec_curve_free(ffec_curve* c);
FFEC_API ffec_status ffec_curve_get_info(const ffec_curve* c, ffec_curve_info* out);
FFEC_API ffec_status ffec_curve_delta(const ffec_curve* c, char** out);

typedef struct ffec_place {
  char P[64];  /* polynomial string, or "inf" */
  int degree;
  int type;    /* 0 good, 1 multiplicative, 2 additive */
} ffec_place;

/* Bad places: the finite bad primes in order, then infinity when bad. */
FFEC_API size_t ffec_curve_bad_place_count(const ffec_curve* c);
FFEC_API ffec_status ffec_curve_bad_place(const ffec_curve* c, size_t i, ffec_place* out);

/* ---- bad-place policy for symmetric powers (NULL means tame) ---- */

typedef struct ffec_policy ffec_policy;

/* kind: "Tame", "TrivialFactor" or "UserSupplied" */
FFEC_API ffec_status ffec_policy_new(const char* kind, ffec_policy** out);
FFEC_API void ffec_policy_free(ffec_policy* p);
/* Local polynomial 1 + f[1] X + ... at a place keyed by its polynomial
 * string, or "inf". */
FFEC_API ffec_status ffec_policy_set_factor(ffec_policy* p, const char* place, const int64_t* f, size_t len);
FFEC_API const char* ffec_policy_kind(const ffec_policy* p);

/* ---- L-polynomials of E or sym^m E ---- */

typedef struct ffec_lpoly ffec_lpoly;

typedef struct ffec_lpoly_info {
  int m;
  int degree;
  int eps;
  int prime_degrees;
  int verified;  /* every reflection checked against Euler coefficients */
  int rh;        /* every zero certified on the circle */
  double max_dev;
} ffec_lpoly_info;

FFEC_API ffec_status ffec_lpoly_new(const ffec_curve* c, int max_prime_degree, ffec_lpoly** out);
FFEC_API ffec_status ffec_sym_lpoly_new(const ffec_curve* c, int m, const ffec_policy* pol, int max_prime_degree,
                               ffec_lpoly** out);
FFEC_API void ffec_lpoly_free(ffec_lpoly* l);
FFEC_API ffec_status ffec_lpoly_get_info(const ffec_lpoly* l, ffec_lpoly_info* out);
/* Coefficient of v^j in the polynomial in v with zeros on |v| = q^(-(m+1)/2). */
FFEC_API ffec_status ffec_lpoly_coeff(const ffec_lpoly* l, int j, char** out);
/* Writes min(cap, degree) zeros; *count gets the degree. */
FFEC_API ffec_status ffec_lpoly_zeros(const ffec_lpoly* l, double* re, double* im, size_t cap, size_t* count);

/* ---- exact identity suite ---- */

typedef struct ffec_identities ffec_identities;

typedef struct ffec_identity {
  const char* name;
  int pass;
  uint64_t checked;
  const char* detail;
} ffec_identity;

/* Et may be NULL; the cubic identities are then skipped. */
FFEC_API ffec_status ffec_identities_run(const ffec_curve* E, const ffec_curve* Et, int max_deg, int twists, uint64_t seed,
                                const ffec_policy* pol, ffec_identities** out);
FFEC_API void ffec_identities_free(ffec_identities* r);
FFEC_API size_t ffec_identities_count(const ffec_identities* r);
/* Strings stay valid while r lives. */
FFEC_API ffec_status ffec_identities_get(const ffec_identities* r, size_t i, ffec_identity* out);

/* ---- twist families ---- */

typedef struct ffec_family ffec_family;

typedef struct ffec_family_info {
  int cubic;
  int N;
  size_t size;
  const char* id;
} ffec_family_info;

typedef struct ffec_member {
  const char* D;
  const char* D1;  /* cubic only */
  const char* D2;
  int deg_D;
  int deg_rad;
  int chi;  /* quadratic: jacobi symbol (D/M) */
} ffec_member;

/* sign: "all", "plus", "minus".  variant: "F" or "K".  jobs only changes speed. */
FFEC_API ffec_status ffec_quad_family_new(const ffec_curve* E, int N, const char* sign, int jobs, ffec_family** out);
FFEC_API ffec_status ffec_cubic_family_new(const ffec_curve* Et, int N, const char* variant, int jobs, ffec_family** out);
FFEC_API void ffec_family_free(ffec_family* fam);
FFEC_API ffec_status ffec_family_get_info(const ffec_family* fam, ffec_family_info* out);
FFEC_API ffec_status ffec_family_member(const ffec_family* fam, size_t i, ffec_member* out);

typedef struct ffec_size_report {
  uint64_t exact;
  double predicted;
  double abs_err, rel_err;
  const char* formula;
  int has_series;
  uint64_t series;  /* coefficient of u^N in the generating series */
} ffec_size_report;

FFEC_API ffec_status ffec_family_size_report(const ffec_family* fam, ffec_size_report* out);

typedef struct ffec_ratio {
  char P[64];
  ffec_rational empirical;
  double predicted;
  double deviation;
} ffec_ratio;

/* P = NULL picks the least degree-1 prime allowed in the family. */
FFEC_API ffec_status ffec_family_coprime_ratio(const ffec_family* fam, const char* P, ffec_ratio* out);

/* ---- trace averages <Tr Theta^n> ---- */

typedef struct ffec_trace_avg {
  int n;
  size_t size;
  ffec_rational value;
  int has_lpoly, has_primesum;
  ffec_rational lpoly, primesum;
  double main_term, residual;
  /* quadratic main term */
  int eta;
  double sym2, Dn, good, bad, mp, inf;
  /* cubic decomposition */
  double M, S, E, M0, S0, D1, D2, mse;
} ffec_trace_avg;

/* method: "lpoly", "primesum" or "both" (both must agree exactly). */
FFEC_API ffec_status ffec_trace_average(const ffec_family* fam, int n, const char* method, const ffec_policy* pol,
                               ffec_trace_avg* out);

typedef struct ffec_conjecture_row {
  int n, N;
  ffec_rational lhs;
  double rhs, gap, scaled_gap;
  double sym3, tr1;
} ffec_conjecture_row;

FFEC_API ffec_status ffec_conjecture_probe(const ffec_family* fam, int n, ffec_conjecture_row* out);

/* ---- cubic character sums of a Mordell curve ---- */

typedef struct ffec_moment {
  int m;
  ffec_rational value;
  double deviation;
  uint64_t primes;
} ffec_moment;

FFEC_API ffec_status ffec_lambda_moment(const ffec_curve* Et, int m, ffec_moment* out);
/* Least C with |deviation_m| <= C q^(-m/3) over the given rows. */
FFEC_API double ffec_moment_envelope(uint32_t q, const ffec_moment* rows, size_t count);

/* ---- one-level densities ---- */

typedef enum ffec_test_kind { FFEC_FEJER = 0, FFEC_TRUNCATED_GAUSSIAN = 1 } ffec_test_kind;

typedef struct ffec_test_function {
  ffec_test_kind kind;
  double alpha;
  double sigma;
} ffec_test_function;

FFEC_API double ffec_rmt_baseline(int nn, const ffec_test_function* f);

typedef struct ffec_one_level_report {
  size_t members, degenerate;
  int nn;
  double trace_side, eigen_side, rmt, residual;
  size_t eigen_members;
  double eigen_trace_side;
  double max_gap, max_symmetry_err;
  int has_dev;
  double dev, dev_over_N, dev_log_deriv, dev_good, dev_bad, dev_tail_bound;
} ffec_one_level_report;

/* eigen_members caps the members whose zeros are computed (0: all).  With
 * with_dev the deviation term of a quadratic family is evaluated from primes
 * of degree <= max_prime_degree. */
FFEC_API ffec_status ffec_one_level_density(const ffec_family* fam, const ffec_test_function* f, size_t eigen_members,
                                   int with_dev, int max_prime_degree, const ffec_policy* pol,
                                   ffec_one_level_report* out);

#ifdef __cplusplus
}
#endif

#endif
