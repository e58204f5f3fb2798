#include "qslkit.h"

#include <cstring>
#include <string>
#include <vector>

#include "channels.hpp"
#include "matrix.hpp"
#include "nonmarkov.hpp"
#include "qsl.hpp"
#include "states.hpp"
#include "validate.hpp"

using namespace qslkit;

struct qslk_channel {
  ChannelConfig cfg;
};

struct qslk_state {
  DensityMatrix rho;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

qslk_status map_code(Errc c) {
  switch (c) {
    case Errc::ok: return QSLK_OK;
    case Errc::bad_argument: return QSLK_BAD_ARGUMENT;
    case Errc::parse_error: return QSLK_PARSE_ERROR;
    case Errc::not_hermitian: return QSLK_NOT_HERMITIAN;
    case Errc::not_psd: return QSLK_NOT_PSD;
    case Errc::dimension_mismatch: return QSLK_DIMENSION_MISMATCH;
    case Errc::bloch_out_of_ball: return QSLK_BLOCH_OUT_OF_BALL;
    case Errc::bad_index: return QSLK_BAD_INDEX;
    case Errc::too_many_qubits: return QSLK_TOO_MANY_QUBITS;
    case Errc::rate_pole: return QSLK_RATE_POLE;
    case Errc::degenerate_denominator: return QSLK_DEGENERATE_DENOMINATOR;
    case Errc::mixed_factor_singular: return QSLK_MIXED_FACTOR_SINGULAR;
    case Errc::complex_radicand: return QSLK_COMPLEX_RADICAND;
    case Errc::unknown_figure: return QSLK_UNKNOWN_FIGURE;
    case Errc::numeric_failure: return QSLK_NUMERIC_FAILURE;
  }
  return QSLK_INTERNAL;
}

template <typename F>
qslk_status guard(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    set_error(e.what());
    return map_code(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return QSLK_INTERNAL;
  }
}

qslk_status arg_error(const char* msg) {
  set_error(msg);
  return QSLK_BAD_ARGUMENT;
}

ChannelConfig make_config(qslk_channel_kind kind, double kappa, double param) {
  switch (kind) {
    case QSLK_CHANNEL_OUN: return ChannelConfig::oun_config(kappa, param);
    case QSLK_CHANNEL_RTN: return ChannelConfig::rtn_config(kappa, param);
    case QSLK_CHANNEL_NMAD: return ChannelConfig::nmad_config(kappa, param);
  }
  throw Error(Errc::bad_argument, "unknown channel kind");
}

QslRequest convert(const qslk_qsl_request& req) {
  QslRequest r;
  r.method = req.method == QSLK_METHOD_RELATIVE_PURITY ? Method::relative_purity : Method::bures;
  switch (req.norm) {
    case QSLK_NORM_OP: r.norm = NormKind::op; break;
    case QSLK_NORM_HS: r.norm = NormKind::hs; break;
    case QSLK_NORM_TR: r.norm = NormKind::tr; break;
    default: throw Error(Errc::bad_argument, "unknown norm");
  }
  r.tau = req.tau;
  r.grid_points = req.grid_points > 0 ? req.grid_points : 512;
  r.use_mixed_factor = req.use_mixed_factor != 0;
  r.use_exact_fidelity = req.use_exact_fidelity != 0;
  return r;
}

void convert(const QslResult& in, qslk_qsl_result& out) {
  out.tau_qsl = in.tau_qsl;
  out.angle = in.angle;
  out.averaged_norm = in.averaged_norm;
  out.numerator = in.numerator;
  out.denominator = in.denominator;
  out.degenerate = in.degenerate ? 1 : 0;
}

}  // namespace

extern "C" {

const char* qslk_last_error(void) { return g_last_error.c_str(); }

const char* qslk_version(void) { return "0.1.0"; }

qslk_status qslk_channel_create(qslk_channel_kind kind, double kappa, double param,
                                qslk_channel** out) {
  if (!out) return arg_error("qslk_channel_create: out is NULL");
  return guard([&] {
    *out = new qslk_channel{make_config(kind, kappa, param)};
    return QSLK_OK;
  });
}

void qslk_channel_free(qslk_channel* ch) { delete ch; }

qslk_status qslk_decoherence_function(const qslk_channel* ch, double t, double* p) {
  if (!ch || !p) return arg_error("qslk_decoherence_function: NULL argument");
  return guard([&] {
    *p = decoherence_function(ch->cfg, t);
    return QSLK_OK;
  });
}

qslk_status qslk_decoherence_rate(const qslk_channel* ch, double t, double* gamma) {
  if (!ch || !gamma) return arg_error("qslk_decoherence_rate: NULL argument");
  return guard([&] {
    *gamma = decoherence_rate(ch->cfg, t);
    return QSLK_OK;
  });
}

qslk_status qslk_p_zero_times(const qslk_channel* ch, double horizon, double* out, size_t cap,
                              size_t* count) {
  if (!ch || !count) return arg_error("qslk_p_zero_times: NULL argument");
  return guard([&] {
    auto zeros = p_zero_times(ch->cfg, horizon);
    *count = zeros.size();
    if (out)
      for (size_t i = 0; i < cap && i < zeros.size(); ++i) out[i] = zeros[i];
    return QSLK_OK;
  });
}

qslk_status qslk_state_parse(const char* spec, qslk_state** out) {
  if (!spec || !out) return arg_error("qslk_state_parse: NULL argument");
  return guard([&] {
    *out = new qslk_state{parse_state(spec)};
    return QSLK_OK;
  });
}

qslk_status qslk_state_from_bloch(double x, double y, double z, qslk_state** out) {
  if (!out) return arg_error("qslk_state_from_bloch: out is NULL");
  return guard([&] {
    *out = new qslk_state{bloch_state(BlochVector{x, y, z})};
    return QSLK_OK;
  });
}

qslk_status qslk_state_from_matrix(int dim, const double* re, const double* im,
                                   qslk_state** out) {
  if (!re || !out) return arg_error("qslk_state_from_matrix: NULL argument");
  return guard([&] {
    if (dim < 2) throw Error(Errc::bad_argument, "state dimension must be at least 2");
    Matrix m(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        size_t k = static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(j);
        m(i, j) = cplx(re[k], im ? im[k] : 0.0);
      }
    *out = new qslk_state{DensityMatrix(m)};
    return QSLK_OK;
  });
}

void qslk_state_free(qslk_state* s) { delete s; }

int qslk_state_dim(const qslk_state* s) { return s ? s->rho.dim() : 0; }

qslk_status qslk_state_entries(const qslk_state* s, double* re, double* im) {
  if (!s) return arg_error("qslk_state_entries: state is NULL");
  const Matrix& m = s->rho.matrix();
  const int d = m.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      size_t k = static_cast<size_t>(i) * static_cast<size_t>(d) + static_cast<size_t>(j);
      if (re) re[k] = m(i, j).real();
      if (im) im[k] = m(i, j).imag();
    }
  return QSLK_OK;
}

#define QSLK_MEASURE(fn, impl)                                       \
  qslk_status fn(const qslk_state* s, double* out) {                 \
    if (!s || !out) return arg_error(#fn ": NULL argument");         \
    return guard([&] {                                               \
      *out = impl(s->rho);                                           \
      return QSLK_OK;                                                \
    });                                                              \
  }

QSLK_MEASURE(qslk_purity, purity)
QSLK_MEASURE(qslk_l1_coherence, l1_coherence)
QSLK_MEASURE(qslk_relative_entropy_coherence, relative_entropy_coherence)
QSLK_MEASURE(qslk_linear_entropy, linear_entropy)
QSLK_MEASURE(qslk_mcl, mcl)

#undef QSLK_MEASURE

qslk_status qslk_evolve(const qslk_state* s, const qslk_channel* ch, double t,
                        qslk_state** out) {
  if (!s || !ch || !out) return arg_error("qslk_evolve: NULL argument");
  return guard([&] {
    *out = new qslk_state{evolve_nqubit(s->rho, ch->cfg, t).rho_t};
    return QSLK_OK;
  });
}

void qslk_qsl_request_init(qslk_qsl_request* req) {
  if (!req) return;
  req->method = QSLK_METHOD_BURES;
  req->norm = QSLK_NORM_OP;
  req->tau = 1.0;
  req->grid_points = 512;
  req->use_mixed_factor = 1;
  req->use_exact_fidelity = 0;
}

qslk_status qslk_qsl_compute(const qslk_state* s, const qslk_channel* ch,
                             const qslk_qsl_request* req, qslk_qsl_result* out) {
  if (!s || !ch || !req || !out) return arg_error("qslk_qsl_compute: NULL argument");
  return guard([&] {
    convert(qsl_compute(s->rho, ch->cfg, convert(*req)), *out);
    return QSLK_OK;
  });
}

qslk_status qslk_qsl_closed_qubit(const qslk_channel* ch, qslk_method method, double cl1,
                                  double eta_z, double tau, qslk_qsl_result* out) {
  if (!ch || !out) return arg_error("qslk_qsl_closed_qubit: NULL argument");
  return guard([&] {
    QslResult r;
    if (ch->cfg.kind == ChannelKind::nmad)
      r = method == QSLK_METHOD_RELATIVE_PURITY ? qsl_nmad_qubit_rp(cl1, eta_z, ch->cfg, tau)
                                                : qsl_nmad_qubit_bures(cl1, eta_z, ch->cfg, tau);
    else
      r = method == QSLK_METHOD_RELATIVE_PURITY
              ? qsl_dephasing_qubit_rp(cl1, eta_z, ch->cfg, tau)
              : qsl_dephasing_qubit_bures(cl1, eta_z, ch->cfg, tau);
    convert(r, *out);
    return QSLK_OK;
  });
}

qslk_status qslk_qsl_closed_belldiag(const qslk_channel* ch, qslk_method method, double k1,
                                     double k2, double k3, double tau, qslk_qsl_result* out) {
  if (!ch || !out) return arg_error("qslk_qsl_closed_belldiag: NULL argument");
  return guard([&] {
    BellDiagonalState k{k1, k2, k3};
    QslResult r = method == QSLK_METHOD_RELATIVE_PURITY ? qsl_belldiag_rp(k, ch->cfg, tau)
                                                        : qsl_belldiag_bures(k, ch->cfg, tau);
    convert(r, *out);
    return QSLK_OK;
  });
}

qslk_status qslk_mcl_closed_qubit(const qslk_channel* ch, double eta_z, double t, double* out) {
  if (!ch || !out) return arg_error("qslk_mcl_closed_qubit: NULL argument");
  return guard([&] {
    *out = mcl_qubit_closed_form(ch->cfg, eta_z, t);
    return QSLK_OK;
  });
}

qslk_status qslk_mcl_closed_belldiag(const qslk_channel* ch, double k1, double k2, double k3,
                                     double t, double* out) {
  if (!ch || !out) return arg_error("qslk_mcl_closed_belldiag: NULL argument");
  return guard([&] {
    *out = mcl_belldiag_closed_form(ch->cfg, BellDiagonalState{k1, k2, k3}, t);
    return QSLK_OK;
  });
}

qslk_status qslk_trajectory(const qslk_state* s, const qslk_channel* ch,
                            const qslk_qsl_request* req, const double* times, size_t n_times,
                            double* tau_qsl, double* cl1, double* s_l, double* m_cl) {
  if (!s || !ch || !req || !times) return arg_error("qslk_trajectory: NULL argument");
  return guard([&] {
    std::vector<double> grid(times, times + n_times);
    auto pts = trajectory(s->rho, ch->cfg, convert(*req), grid);
    for (size_t i = 0; i < pts.size(); ++i) {
      if (tau_qsl) tau_qsl[i] = pts[i].tau_qsl;
      if (cl1) cl1[i] = pts[i].cl1;
      if (s_l) s_l[i] = pts[i].s_l;
      if (m_cl) m_cl[i] = pts[i].m_cl;
    }
    return QSLK_OK;
  });
}

qslk_status qslk_nonmarkovianity(const qslk_channel* ch, double horizon, double* n_l,
                                 double* gamma_star, double* weight) {
  if (!ch) return arg_error("qslk_nonmarkovianity: channel is NULL");
  return guard([&] {
    NonMarkovReport rep = nonmarkovianity(ch->cfg, horizon);
    if (n_l) *n_l = rep.n_l;
    if (gamma_star) *gamma_star = rep.gamma_star;
    if (weight) *weight = rep.weight;
    return QSLK_OK;
  });
}

qslk_status qslk_gamma_negative_intervals(const qslk_channel* ch, double horizon, double* lo,
                                          double* hi, size_t cap, size_t* count) {
  if (!ch || !count) return arg_error("qslk_gamma_negative_intervals: NULL argument");
  return guard([&] {
    auto iv = gamma_negative_intervals(ch->cfg, horizon);
    *count = iv.size();
    for (size_t i = 0; i < cap && i < iv.size(); ++i) {
      if (lo) lo[i] = iv[i].lo;
      if (hi) hi[i] = iv[i].hi;
    }
    return QSLK_OK;
  });
}

qslk_status qslk_validate(const char* filter, const char* inject, qslk_validate_cb cb,
                          void* user, size_t* n_failed) {
  return guard([&] {
    auto results = run_validation(filter ? filter : "", inject ? inject : "");
    size_t failed = 0;
    for (const auto& r : results) {
      if (!r.passed) ++failed;
      if (cb) cb(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    if (n_failed) *n_failed = failed;
    return QSLK_OK;
  });
}

}  // extern "C"
