/* C interface to the qslkit library.
 *
 * Every function that can fail returns a qslk_status; QSLK_OK is 0. On
 * failure qslk_last_error() returns a thread-local message describing what
 * went wrong. Objects created through this interface are freed with the
 * matching *_free call; output parameters are only written on success.
 */
#ifndef QSLKIT_H
#define QSLKIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qslk_status {
  QSLK_OK = 0,
  QSLK_BAD_ARGUMENT = 1,
  QSLK_PARSE_ERROR = 2,
  QSLK_NOT_HERMITIAN = 3,
  QSLK_NOT_PSD = 4,
  QSLK_DIMENSION_MISMATCH = 5,
  QSLK_BLOCH_OUT_OF_BALL = 6,
  QSLK_BAD_INDEX = 7,
  QSLK_TOO_MANY_QUBITS = 8,
  QSLK_RATE_POLE = 9,
  QSLK_DEGENERATE_DENOMINATOR = 10,
  QSLK_MIXED_FACTOR_SINGULAR = 11,
  QSLK_COMPLEX_RADICAND = 12,
  QSLK_UNKNOWN_FIGURE = 13,
  QSLK_NUMERIC_FAILURE = 14,
  QSLK_INTERNAL = 99
} qslk_status;

/* Message for the most recent failing call on this thread. Never NULL. */
const char* qslk_last_error(void);

const char* qslk_version(void);

/* ---- channels ------------------------------------------------------- */

typedef struct qslk_channel qslk_channel;

typedef enum qslk_channel_kind {
  QSLK_CHANNEL_OUN = 0,  /* dephasing, Ornstein-Uhlenbeck noise   */
  QSLK_CHANNEL_RTN = 1,  /* dephasing, random telegraph noise     */
  QSLK_CHANNEL_NMAD = 2  /* non-Markovian amplitude damping       */
} qslk_channel_kind;

/* param is the noise bandwidth lambda for OUN/NMAD and the switching
 * strength c for RTN. kappa sets the time unit and must be positive. */
qslk_status qslk_channel_create(qslk_channel_kind kind, double kappa, double param,
                                qslk_channel** out);
void qslk_channel_free(qslk_channel* ch);

/* Decoherence function p(t) and canonical rate gamma(t). The rate has
 * poles at zeros of p; those report QSLK_RATE_POLE. */
qslk_status qslk_decoherence_function(const qslk_channel* ch, double t, double* p);
qslk_status qslk_decoherence_rate(const qslk_channel* ch, double t, double* gamma);

/* Zeros of p in (0, horizon]. Writes up to cap entries into out (which may
 * be NULL when cap is 0) and always stores the total count. */
qslk_status qslk_p_zero_times(const qslk_channel* ch, double horizon, double* out, size_t cap,
                              size_t* count);

/* ---- states ---------------------------------------------------------- */

typedef struct qslk_state qslk_state;

/* Grammar (case-insensitive):
 *   bloch:ex,ey,ez        single qubit from Bloch components
 *   bell:phi+|phi-|psi+|psi-
 *   ghz:N,k,+|-           GHZ-class basis state on N qubits
 *   werner:q,<state>      q * state + (1-q) * I/d
 *   mcb:<bell>            maximally coherent image of a Bell state
 *   mcbw:q,<bell>         Werner-type mixture of the above
 */
qslk_status qslk_state_parse(const char* spec, qslk_state** out);
qslk_status qslk_state_from_bloch(double x, double y, double z, qslk_state** out);

/* Row-major dim x dim complex matrix given as separate real and imaginary
 * parts; dim must be a power of two between 2 and 16. */
qslk_status qslk_state_from_matrix(int dim, const double* re, const double* im,
                                   qslk_state** out);
void qslk_state_free(qslk_state* s);

int qslk_state_dim(const qslk_state* s);

/* Both arrays hold dim*dim doubles; either may be NULL to skip it. */
qslk_status qslk_state_entries(const qslk_state* s, double* re, double* im);

/* ---- measures -------------------------------------------------------- */

qslk_status qslk_purity(const qslk_state* s, double* out);
qslk_status qslk_l1_coherence(const qslk_state* s, double* out);
qslk_status qslk_relative_entropy_coherence(const qslk_state* s, double* out);
qslk_status qslk_linear_entropy(const qslk_state* s, double* out);

/* Cl1^2/(d-1)^2 + linear entropy; <= 1 for every state. */
qslk_status qslk_mcl(const qslk_state* s, double* out);

/* ---- evolution ------------------------------------------------------- */

/* Applies the channel independently to every qubit of the register. */
qslk_status qslk_evolve(const qslk_state* s, const qslk_channel* ch, double t, qslk_state** out);

/* ---- speed limits ---------------------------------------------------- */

typedef enum qslk_method {
  QSLK_METHOD_RELATIVE_PURITY = 0,
  QSLK_METHOD_BURES = 1
} qslk_method;

typedef enum qslk_norm { QSLK_NORM_OP = 0, QSLK_NORM_HS = 1, QSLK_NORM_TR = 2 } qslk_norm;

typedef struct qslk_qsl_request {
  qslk_method method;
  qslk_norm norm;          /* Bures route only */
  double tau;              /* driving time, > 0 */
  int grid_points;         /* quadrature seeding; 0 picks the default 512 */
  int use_mixed_factor;    /* Bures route, mixed initial states */
  int use_exact_fidelity;  /* Bures route: Uhlmann instead of superfidelity */
} qslk_qsl_request;

/* Defaults: Bures, operator norm, tau 1, mixed factor on. */
void qslk_qsl_request_init(qslk_qsl_request* req);

typedef struct qslk_qsl_result {
  double tau_qsl;
  double angle;
  double averaged_norm;
  double numerator;
  double denominator;
  int degenerate;
} qslk_qsl_result;

qslk_status qslk_qsl_compute(const qslk_state* s, const qslk_channel* ch,
                             const qslk_qsl_request* req, qslk_qsl_result* out);

/* Closed forms. The qubit version takes the initial coherence and Bloch
 * z-component; the pair version the Bell-diagonal correlation triple.
 * The channel decides between the dephasing and damping families. */
qslk_status qslk_qsl_closed_qubit(const qslk_channel* ch, qslk_method method, double cl1,
                                  double eta_z, double tau, qslk_qsl_result* out);
qslk_status qslk_qsl_closed_belldiag(const qslk_channel* ch, qslk_method method, double k1,
                                     double k2, double k3, double tau, qslk_qsl_result* out);

qslk_status qslk_mcl_closed_qubit(const qslk_channel* ch, double eta_z, double t, double* out);
qslk_status qslk_mcl_closed_belldiag(const qslk_channel* ch, double k1, double k2, double k3,
                                     double t, double* out);

/* tau_qsl and evolved-state measures over an ascending time grid (all
 * entries > 0). Output arrays hold n_times doubles; any may be NULL. */
qslk_status qslk_trajectory(const qslk_state* s, const qslk_channel* ch,
                            const qslk_qsl_request* req, const double* times, size_t n_times,
                            double* tau_qsl, double* cl1, double* s_l, double* m_cl);

/* ---- non-Markovianity ------------------------------------------------ */

/* min over constant rates g >= 0 of (1/T) int |gamma - g| w dt, with w the
 * trace-norm separation rate of the optimal state pair. Any output pointer
 * may be NULL. */
qslk_status qslk_nonmarkovianity(const qslk_channel* ch, double horizon, double* n_l,
                                 double* gamma_star, double* weight);

/* Intervals in (0, horizon] where gamma < 0, as lo/hi pairs. Writes up to
 * cap intervals and always stores the total count. */
qslk_status qslk_gamma_negative_intervals(const qslk_channel* ch, double horizon, double* lo,
                                          double* hi, size_t cap, size_t* count);

/* ---- self checks ----------------------------------------------------- */

typedef void (*qslk_validate_cb)(const char* name, int passed, const char* detail, void* user);

/* Runs the built-in property checks. filter keeps properties whose name
 * contains the substring (NULL or "" keeps all); inject simulates a known
 * defect ("pt-sign") to show the checks would catch it. cb may be NULL;
 * n_failed may be NULL. */
qslk_status qslk_validate(const char* filter, const char* inject, qslk_validate_cb cb,
                          void* user, size_t* n_failed);

#ifdef __cplusplus
}
#endif

#endif /* QSLKIT_H */
