/*
 * C interface to the discriminator toolkit: computation and certification of
 * D(n), the least m making a^3 + a pairwise distinct mod m^2 on 1..n, window
 * collision certificates, exponential-sum identity/bound checks, and the
 * closing threshold inequalities.
 *
 * Every function returns a discrim_status (0 on success). On failure a
 * thread-local message is available via discrim_last_error(). Out-parameters
 * are written only on success. Handle types are opaque; each *_free releases
 * one handle and tolerates NULL.
 */
#ifndef DISCRIM_H
#define DISCRIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum discrim_status {
    DISCRIM_OK = 0,
    DISCRIM_DOMAIN = 1,    /* argument outside a function's mathematical domain */
    DISCRIM_RANGE = 2,     /* (n, m) violates the window inequalities */
    DISCRIM_NOCASE = 3,    /* modulus matches no construction case */
    DISCRIM_EXHAUSTED = 4, /* a construction found no admissible pair */
    DISCRIM_BUDGET = 5,    /* work or memory limit exceeded */
    DISCRIM_IO = 6,        /* checkpoint file error */
    DISCRIM_BADARG = 7     /* null pointer, bad index or malformed argument */
} discrim_status;

/* Message for the most recent failure on this thread; never NULL. */
const char* discrim_last_error(void);

/* ----- theorem-level checks ----------------------------------------- */

typedef struct discrim_theorem_row {
    uint64_t n;
    uint32_t k;  /* least k >= 1 with 3^{2k} >= n */
    uint64_t d;  /* computed D(n) */
    int match;   /* d == 3^k */
} discrim_theorem_row;

int discrim_k_of(uint64_t n, uint32_t* k_out);
int discrim_d_of(uint64_t n, uint64_t* d_out);
int discrim_check_theorem(uint64_t n, discrim_theorem_row* row_out);
int discrim_lemma1_check(uint64_t n, int* ok_out);

/* First collision a < b <= n of a^3+a mod m^2 (smallest b, then a).
 * *injective_out = 1 and the pair untouched when none exists. */
int discrim_residue_injective(uint64_t n, uint64_t m, uint64_t* a_out,
                              uint64_t* b_out, int* injective_out);

/* ----- window classification and collision certificates ------------- */

typedef struct discrim_case_info {
    char label[12]; /* "I".."VI" */
    uint64_t delta;
    uint64_t p;
    uint32_t r;
    uint32_t s;
    int has5;
} discrim_case_info;

typedef struct discrim_certificate {
    uint64_t n;
    uint64_t m;
    uint64_t a;
    uint64_t b;
    uint64_t quotient;  /* (b^3+b-a^3-a) / m^2 */
    char case_label[12]; /* construction used, or "brute-force" */
} discrim_certificate;

int discrim_classify(uint64_t n, uint64_t m, discrim_case_info* info_out);
int discrim_collide(uint64_t n, uint64_t m, discrim_certificate* cert_out);

/* Arithmetic re-check of a certificate: 1 <= a < b <= n, m^2 divides
 * b^3+b-a^3-a exactly, and the stored quotient agrees. */
int discrim_certificate_check(const discrim_certificate* cert, int* ok_out);

typedef struct discrim_cert_list discrim_cert_list;

/* One certificate per modulus in the window sqrt(n) < m < 3^k. */
int discrim_lemma2_scan(uint64_t n, discrim_cert_list** list_out);
size_t discrim_cert_list_size(const discrim_cert_list* list);
int discrim_cert_list_get(const discrim_cert_list* list, size_t index,
                          discrim_certificate* cert_out);
void discrim_cert_list_free(discrim_cert_list* list);

/* ----- range scanning ------------------------------------------------ */

typedef struct discrim_scan_report discrim_scan_report;

/* Scan [n_lo, n_hi]; workers = 0 picks the hardware thread count. A
 * non-NULL, non-empty checkpoint path enables resumable scanning. */
int discrim_range_scan(uint64_t n_lo, uint64_t n_hi, uint32_t workers,
                       const char* checkpoint_path, discrim_scan_report** report_out);
size_t discrim_scan_report_size(const discrim_scan_report* report);
int discrim_scan_report_get(const discrim_scan_report* report, size_t index,
                            discrim_theorem_row* row_out);
int discrim_scan_report_stats(const discrim_scan_report* report, uint64_t* n_lo_out,
                              uint64_t* n_hi_out, uint64_t* failures_out,
                              double* wall_time_s_out, uint32_t* worker_count_out);
/* CSV rendering ("n,k,D,match"); free with discrim_string_free. */
int discrim_scan_csv(const discrim_scan_report* report, char** csv_out);
void discrim_scan_report_free(discrim_scan_report* report);
void discrim_string_free(char* s);

/* ----- exponential-sum certification --------------------------------- */

typedef struct discrim_check_row {
    char name[64];
    double measured;
    double bound;
    int pass; /* measured <= bound */
} discrim_check_row;

typedef struct discrim_check_report discrim_check_report;

/* Identity cross-checks (direct vs closed/transform sums, solution-count
 * expansion vs brute count) for modulus p^{2r} with scale delta. */
int discrim_expsum_identity(uint64_t delta, uint64_t p, uint32_t r,
                            discrim_check_report** report_out);
/* Bound certification rows at level j (1 <= j <= 2r). */
int discrim_expsum_bounds(uint64_t delta, uint64_t p, uint32_t r, uint32_t j,
                          discrim_check_report** report_out);
size_t discrim_check_report_size(const discrim_check_report* report);
int discrim_check_report_get(const discrim_check_report* report, size_t index,
                             discrim_check_row* row_out);
int discrim_check_report_all_pass(const discrim_check_report* report, int* all_pass_out);
void discrim_check_report_free(discrim_check_report* report);

/* check1: p^r > 1250 (1 + ln p^r)^2;  check3: p^r > 2312 (1 + ln p^r)^2;
 * q = sqrt(p^r) and f_q = q - 34 sqrt(2) (1 + 2 ln q), positive iff check3. */
int discrim_threshold_check(uint64_t p, uint32_t r, int* check1_out, int* check3_out,
                            double* q_out, double* f_q_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DISCRIM_H */
