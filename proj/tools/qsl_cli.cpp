// qsl: command-line front end for the qslkit shared library. Talks to the
// library exclusively through the C interface in qslkit.h.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qslkit.h"

namespace {

struct AppError {
  int code;  // 2 usage, 3 computation
  std::string msg;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw AppError{code, msg}; }

void check(qslk_status st, const std::string& what) {
  if (st != QSLK_OK) fail(3, what + ": " + qslk_last_error());
}

struct Channel {
  qslk_channel* p = nullptr;
  Channel() = default;
  Channel(qslk_channel_kind kind, double kappa, double param) {
    check(qslk_channel_create(kind, kappa, param, &p), "channel");
  }
  Channel(Channel&& o) noexcept : p(o.p) { o.p = nullptr; }
  Channel& operator=(Channel&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;
  ~Channel() { qslk_channel_free(p); }
};

struct State {
  qslk_state* p = nullptr;
  State() = default;
  explicit State(const std::string& spec) {
    check(qslk_state_parse(spec.c_str(), &p), "state '" + spec + "'");
  }
  State(State&& o) noexcept : p(o.p) { o.p = nullptr; }
  State& operator=(State&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  State(const State&) = delete;
  State& operator=(const State&) = delete;
  ~State() { qslk_state_free(p); }
};

// ---- option plumbing --------------------------------------------------

struct ChannelOpts {
  std::string kind = "oun";
  double kappa = 1.0;
  double lambda = 0.1;
  double c = 0.6;
};

void add_channel_flags(CLI::App* cmd, ChannelOpts& ch) {
  cmd->add_option("--channel", ch.kind, "channel kind: oun, rtn or nmad")
      ->capture_default_str();
  cmd->add_option("--kappa", ch.kappa, "coupling constant (sets the time unit)")
      ->capture_default_str();
  cmd->add_option("--lambda", ch.lambda, "noise bandwidth (oun, nmad)")->capture_default_str();
  cmd->add_option("--c", ch.c, "telegraph switching strength (rtn)")->capture_default_str();
  cmd->add_option("--a", ch.c, "alias for --c");
}

qslk_channel_kind channel_kind_of(const std::string& name) {
  if (name == "oun") return QSLK_CHANNEL_OUN;
  if (name == "rtn") return QSLK_CHANNEL_RTN;
  if (name == "nmad") return QSLK_CHANNEL_NMAD;
  fail(2, "unknown channel '" + name + "' (expected oun, rtn or nmad)");
}

double channel_param(qslk_channel_kind kind, const ChannelOpts& ch) {
  return kind == QSLK_CHANNEL_RTN ? ch.c : ch.lambda;
}

qslk_method method_of(const std::string& name) {
  if (name == "rp" || name == "relative-purity") return QSLK_METHOD_RELATIVE_PURITY;
  if (name == "bures") return QSLK_METHOD_BURES;
  fail(2, "unknown method '" + name + "' (expected rp or bures)");
}

qslk_norm norm_of(const std::string& name) {
  if (name == "op") return QSLK_NORM_OP;
  if (name == "hs") return QSLK_NORM_HS;
  if (name == "tr") return QSLK_NORM_TR;
  fail(2, "unknown norm '" + name + "' (expected op, hs or tr)");
}

struct GridSpec {
  double lo = 0.05;
  double hi = 10.0;
  int points = 200;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.points, &extra) != 3)
    fail(2, "bad grid '" + s + "' (expected min:max:points)");
  if (!(g.lo > 0)) fail(2, "grid minimum must be positive (got " + s + ")");
  if (!(g.hi > g.lo)) fail(2, "grid maximum must exceed the minimum (got " + s + ")");
  if (g.points < 2) fail(2, "grid needs at least 2 points (got " + s + ")");
  return g;
}

std::vector<double> grid_times(const GridSpec& g) {
  std::vector<double> t(static_cast<std::size_t>(g.points));
  for (int i = 0; i < g.points; ++i)
    t[static_cast<std::size_t>(i)] = g.lo + (g.hi - g.lo) * i / (g.points - 1);
  return t;
}

std::filesystem::path ensure_outdir(const std::string& out) {
  std::filesystem::path dir(out.empty() ? "." : out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(2, "cannot create output directory '" + out + "': " + ec.message());
  return dir;
}

// ---- curve evaluation -------------------------------------------------

struct CurveSpec {
  std::string stem;
  std::string state;
  qslk_channel_kind kind = QSLK_CHANNEL_OUN;
  double kappa = 1.0;
  double param = 0.1;
  qslk_method method = QSLK_METHOD_BURES;
  qslk_norm norm = QSLK_NORM_OP;
  double drive = 0;  // caption driving time; <= 0 emits the raw bound
  int grid_points = 512;
  bool mixed_factor = true;
  bool exact_fidelity = false;
};

struct CurveData {
  std::vector<double> x, y, cl1, sl, mcl;
};

CurveData run_curve(const CurveSpec& spec, const std::vector<double>& x) {
  Channel ch(spec.kind, spec.kappa, spec.param);
  State st(spec.state);
  qslk_qsl_request req;
  qslk_qsl_request_init(&req);
  req.method = spec.method;
  req.norm = spec.norm;
  req.grid_points = spec.grid_points;
  req.use_mixed_factor = spec.mixed_factor ? 1 : 0;
  req.use_exact_fidelity = spec.exact_fidelity ? 1 : 0;
  std::vector<double> times(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) times[i] = x[i] / spec.kappa;
  CurveData d;
  d.x = x;
  d.y.resize(x.size());
  d.cl1.resize(x.size());
  d.sl.resize(x.size());
  d.mcl.resize(x.size());
  check(qslk_trajectory(st.p, ch.p, &req, times.data(), times.size(), d.y.data(), d.cl1.data(),
                        d.sl.data(), d.mcl.data()),
        "trajectory for " + spec.state);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double kt_bound = spec.kappa * d.y[i];  // bound in kappa*tau units
    d.y[i] = spec.drive > 0 ? spec.drive * kt_bound / x[i] : kt_bound;
  }
  return d;
}

void parallel_for(int threads, int n, const std::function<void(int)>& job) {
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mtx;
  std::string err;
  int err_code = 0;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        job(i);
      } catch (const AppError& e) {
        std::lock_guard<std::mutex> lock(mtx);
        if (err.empty()) {
          err = e.msg;
          err_code = e.code;
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mtx);
        if (err.empty()) {
          err = e.what();
          err_code = 3;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!err.empty()) fail(err_code, err);
}

// ---- CSV --------------------------------------------------------------

struct CsvFile {
  std::FILE* f = nullptr;
  explicit CsvFile(const std::filesystem::path& path) {
    f = std::fopen(path.string().c_str(), "wb");
    if (!f) fail(2, "cannot open '" + path.string() + "' for writing");
  }
  ~CsvFile() {
    if (f) std::fclose(f);
  }
  void row(const char* header) { std::fprintf(f, "%s\n", header); }
  void row(std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
      std::fprintf(f, first ? "%.12g" : ",%.12g", v);
      first = false;
    }
    std::fputc('\n', f);
  }
};

void write_sweep_csv(const std::filesystem::path& path, const CurveData& d) {
  CsvFile csv(path);
  csv.row("kappa_tau,tau_qsl,cl1,s_l,m_cl");
  for (std::size_t i = 0; i < d.x.size(); ++i)
    csv.row({d.x[i], d.y[i], d.cl1[i], d.sl[i], d.mcl[i]});
}

void write_parametric_csv(const std::filesystem::path& path, const CurveData& d) {
  CsvFile csv(path);
  csv.row("m_cl,tau_qsl,kappa_tau");
  for (std::size_t i = 0; i < d.x.size(); ++i) csv.row({d.mcl[i], d.y[i], d.x[i]});
}

// ---- figure manifest --------------------------------------------------

struct FigCurve {
  const char* stem;
  const char* state;
  qslk_channel_kind kind;
  double param;
};

struct FigDef {
  const char* id;
  qslk_method method;
  double drive;
  bool parametric;
  const char* grid;
  std::vector<FigCurve> curves;
};

const std::vector<FigDef>& figure_defs() {
  static const double quarter_pi = std::acos(0.0) / 2.0;
  static const std::vector<FigDef> defs = {
      {"fig1a", QSLK_METHOD_RELATIVE_PURITY, 1.0, false, "0.05:10:200",
       {{"fig1a_nmad", "bloch:1,0,0", QSLK_CHANNEL_NMAD, 0.1},
        {"fig1a_rtn", "bloch:1,0,0", QSLK_CHANNEL_RTN, 0.6},
        {"fig1a_oun", "bloch:1,0,0", QSLK_CHANNEL_OUN, 0.1}}},
      {"fig1b", QSLK_METHOD_BURES, 1.0, false, "0.05:10:200",
       {{"fig1b_pure", "bloch:1,0,0", QSLK_CHANNEL_NMAD, 0.1},
        {"fig1b_mixed", "bloch:0.5,0,0", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig1c", QSLK_METHOD_BURES, 1.0, false, "0.05:10:200",
       {{"fig1c_pure", "bloch:1,0,0", QSLK_CHANNEL_RTN, 0.6},
        {"fig1c_mixed", "bloch:0.5,0,0", QSLK_CHANNEL_RTN, 0.6}}},
      {"fig1d", QSLK_METHOD_BURES, 1.0, false, "0.05:10:200",
       {{"fig1d_pure", "bloch:1,0,0", QSLK_CHANNEL_OUN, 0.1},
        {"fig1d_mixed", "bloch:0.5,0,0", QSLK_CHANNEL_OUN, 0.1}}},
      {"fig2", QSLK_METHOD_RELATIVE_PURITY, 1.0, true, "0.05:25:300",
       {{"fig2_pure", "bloch:1,0,0", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig3a", QSLK_METHOD_RELATIVE_PURITY, 1.0, false, "0.05:10:200",
       {{"fig3a_phip", "bell:phi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3a_phim", "bell:phi-", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3a_psip", "bell:psi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3a_psim", "bell:psi-", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3a_mcb", "mcb:phi+", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig3b", QSLK_METHOD_RELATIVE_PURITY, 1.0, false, "0.05:10:200",
       {{"fig3b_phip", "werner:0.5,bell:phi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3b_phim", "werner:0.5,bell:phi-", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3b_psip", "werner:0.5,bell:psi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3b_psim", "werner:0.5,bell:psi-", QSLK_CHANNEL_NMAD, 0.1},
        {"fig3b_mcb", "mcbw:0.5,phi+", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig3c", QSLK_METHOD_RELATIVE_PURITY, 1.0, false, "0.05:10:200",
       {{"fig3c_bell", "bell:phi+", QSLK_CHANNEL_RTN, 0.6},
        {"fig3c_mcb", "mcb:phi+", QSLK_CHANNEL_RTN, 0.6},
        {"fig3c_bellw", "werner:0.5,bell:phi+", QSLK_CHANNEL_RTN, 0.6},
        {"fig3c_mcbw", "mcbw:0.5,phi+", QSLK_CHANNEL_RTN, 0.6}}},
      {"fig3d", QSLK_METHOD_RELATIVE_PURITY, 1.0, false, "0.05:10:200",
       {{"fig3d_bell", "bell:phi+", QSLK_CHANNEL_OUN, 0.1},
        {"fig3d_mcb", "mcb:phi+", QSLK_CHANNEL_OUN, 0.1},
        {"fig3d_bellw", "werner:0.5,bell:phi+", QSLK_CHANNEL_OUN, 0.1},
        {"fig3d_mcbw", "mcbw:0.5,phi+", QSLK_CHANNEL_OUN, 0.1}}},
      {"fig4", QSLK_METHOD_BURES, 1.0, true, "0.05:25:300",
       {{"fig4_phip", "bell:phi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig4_phim", "bell:phi-", QSLK_CHANNEL_NMAD, 0.1},
        {"fig4_psip", "bell:psi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig4_psim", "bell:psi-", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig5", QSLK_METHOD_BURES, 1.0, true, "0.05:25:300",
       {{"fig5_phip", "mcb:phi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig5_phim", "mcb:phi-", QSLK_CHANNEL_NMAD, 0.1},
        {"fig5_psip", "mcb:psi+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig5_psim", "mcb:psi-", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig6", QSLK_METHOD_BURES, quarter_pi, false, "0.05:10:200",
       {{"fig6_k1", "ghz:3,1,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig6_k2", "ghz:3,2,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig6_k3", "ghz:3,3,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig6_k4", "ghz:3,4,+", QSLK_CHANNEL_NMAD, 0.1}}},
      {"fig7", QSLK_METHOD_BURES, quarter_pi, false, "0.05:10:200",
       {{"fig7_k1", "ghz:4,1,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k2", "ghz:4,2,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k3", "ghz:4,3,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k4", "ghz:4,4,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k5", "ghz:4,5,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k6", "ghz:4,6,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k7", "ghz:4,7,+", QSLK_CHANNEL_NMAD, 0.1},
        {"fig7_k8", "ghz:4,8,+", QSLK_CHANNEL_NMAD, 0.1}}},
  };
  return defs;
}

void write_plot_script(const std::filesystem::path& dir, const FigDef& fig) {
  std::ofstream gp(dir / (std::string(fig.id) + ".gp"));
  gp << "# gnuplot script for " << fig.id << "\n";
  gp << "set datafile separator comma\n";
  if (fig.parametric) {
    gp << "set xlabel 'M_Cl'\n";
  } else {
    gp << "set xlabel 'kappa tau'\n";
  }
  gp << "set ylabel 'tau_QSL'\n";
  gp << "set key top right\n";
  gp << "plot ";
  for (std::size_t i = 0; i < fig.curves.size(); ++i) {
    std::string label(fig.curves[i].stem);
    if (label.rfind(std::string(fig.id) + "_", 0) == 0)
      label.erase(0, std::strlen(fig.id) + 1);
    if (i) gp << ", \\\n     ";
    gp << "'" << fig.curves[i].stem << ".csv' skip 1 using 1:2 with lines title '" << label
       << "'";
  }
  gp << "\n";
}

void emit_figure(const FigDef& fig, const std::filesystem::path& dir, const std::string& grid,
                 int threads) {
  GridSpec g = parse_grid(grid.empty() ? fig.grid : grid);
  std::vector<double> x = grid_times(g);
  std::vector<CurveData> data(fig.curves.size());
  parallel_for(threads, static_cast<int>(fig.curves.size()), [&](int i) {
    const FigCurve& c = fig.curves[static_cast<std::size_t>(i)];
    CurveSpec spec;
    spec.stem = c.stem;
    spec.state = c.state;
    spec.kind = c.kind;
    spec.param = c.param;
    spec.method = fig.method;
    spec.drive = fig.drive;
    data[static_cast<std::size_t>(i)] = run_curve(spec, x);
  });
  for (std::size_t i = 0; i < fig.curves.size(); ++i) {
    auto path = dir / (std::string(fig.curves[i].stem) + ".csv");
    if (fig.parametric)
      write_parametric_csv(path, data[i]);
    else
      write_sweep_csv(path, data[i]);
  }
  write_plot_script(dir, fig);
}

// ---- compute helpers --------------------------------------------------

struct BellTripleView {
  double k1 = 0, k2 = 0, k3 = 0;
};

// Extracts the XX/YY/ZZ correlation triple and verifies the state really is
// Bell diagonal (real anti-diagonal, matching diagonal pairs).
BellTripleView belldiag_view(const State& st) {
  int d = qslk_state_dim(st.p);
  if (d != 4) fail(3, "the pair closed form needs a two-qubit state");
  std::vector<double> re(16), im(16);
  check(qslk_state_entries(st.p, re.data(), im.data()), "state entries");
  BellTripleView k;
  k.k1 = 2.0 * (re[3] + re[6]);
  k.k2 = 2.0 * (re[6] - re[3]);
  k.k3 = 1.0 - 2.0 * (re[5] + re[10]);
  double dev = 0.0;
  auto expect = [&](int i, int j, double v) {
    std::size_t idx = static_cast<std::size_t>(4 * i + j);
    dev = std::max(dev, std::abs(re[idx] - v));
    dev = std::max(dev, std::abs(im[idx]));
  };
  expect(0, 0, (1.0 + k.k3) / 4.0);
  expect(1, 1, (1.0 - k.k3) / 4.0);
  expect(2, 2, (1.0 - k.k3) / 4.0);
  expect(3, 3, (1.0 + k.k3) / 4.0);
  expect(0, 3, (k.k1 - k.k2) / 4.0);
  expect(1, 2, (k.k1 + k.k2) / 4.0);
  expect(0, 1, 0.0);
  expect(0, 2, 0.0);
  expect(1, 3, 0.0);
  expect(2, 3, 0.0);
  if (dev > 1e-10) fail(3, "the pair closed form needs a Bell-diagonal state");
  return k;
}

struct QubitView {
  double cl1 = 0, eta_z = 0;
};

QubitView qubit_view(const State& st) {
  if (qslk_state_dim(st.p) != 2) fail(3, "the qubit closed form needs a single-qubit state");
  QubitView v;
  check(qslk_l1_coherence(st.p, &v.cl1), "coherence");
  double re[4], im[4];
  check(qslk_state_entries(st.p, re, im), "state entries");
  v.eta_z = 2.0 * re[0] - 1.0;
  return v;
}

qslk_qsl_result closed_form_at(const State& st, const Channel& ch, qslk_method method,
                               double t) {
  qslk_qsl_result res;
  if (qslk_state_dim(st.p) == 2) {
    QubitView v = qubit_view(st);
    check(qslk_qsl_closed_qubit(ch.p, method, v.cl1, v.eta_z, t, &res), "closed form");
  } else {
    BellTripleView k = belldiag_view(st);
    check(qslk_qsl_closed_belldiag(ch.p, method, k.k1, k.k2, k.k3, t, &res), "closed form");
  }
  return res;
}

// ---- commands ---------------------------------------------------------

struct ComputeOpts {
  ChannelOpts ch;
  std::string state = "bloch:1,0,0";
  std::string method = "bures";
  std::string norm = "op";
  double tau = 1.0;
  std::string grid;
  int grid_points = 512;
  bool no_mixed_factor = false;
  bool exact_fidelity = false;
  bool closed_form = false;
  std::string out = ".";
  int threads = 0;
};

int cmd_compute(const ComputeOpts& o) {
  qslk_channel_kind kind = channel_kind_of(o.ch.kind);
  double param = channel_param(kind, o.ch);
  qslk_method method = method_of(o.method);
  qslk_norm norm = norm_of(o.norm);
  if (!(o.ch.kappa > 0)) fail(2, "--kappa must be positive");

  if (o.grid.empty()) {
    if (!(o.tau > 0)) fail(2, "--tau must be positive");
    Channel ch(kind, o.ch.kappa, param);
    State st(o.state);
    double t = o.tau / o.ch.kappa;
    qslk_qsl_result res;
    if (o.closed_form) {
      res = closed_form_at(st, ch, method, t);
    } else {
      qslk_qsl_request req;
      qslk_qsl_request_init(&req);
      req.method = method;
      req.norm = norm;
      req.tau = t;
      req.grid_points = o.grid_points;
      req.use_mixed_factor = o.no_mixed_factor ? 0 : 1;
      req.use_exact_fidelity = o.exact_fidelity ? 1 : 0;
      check(qslk_qsl_compute(st.p, ch.p, &req, &res), "speed limit");
    }
    std::printf("tau_qsl=%.12g\n", o.ch.kappa * res.tau_qsl);
    std::printf("angle=%.12g\n", res.angle);
    std::printf("averaged_norm=%.12g\n", res.averaged_norm / o.ch.kappa);
    std::printf("numerator=%.12g\n", res.numerator);
    std::printf("denominator=%.12g\n", res.denominator / o.ch.kappa);
    std::printf("degenerate=%d\n", res.degenerate);
    return 0;
  }

  GridSpec g = parse_grid(o.grid);
  std::vector<double> x = grid_times(g);
  auto dir = ensure_outdir(o.out);
  CurveData d;
  if (o.closed_form) {
    Channel ch(kind, o.ch.kappa, param);
    State st(o.state);
    d.x = x;
    d.y.resize(x.size());
    d.cl1.resize(x.size());
    d.sl.resize(x.size());
    d.mcl.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double t = x[i] / o.ch.kappa;
      d.y[i] = o.ch.kappa * closed_form_at(st, ch, method, t).tau_qsl;
      qslk_state* ev = nullptr;
      check(qslk_evolve(st.p, ch.p, t, &ev), "evolve");
      State evolved;
      evolved.p = ev;
      check(qslk_l1_coherence(evolved.p, &d.cl1[i]), "coherence");
      check(qslk_linear_entropy(evolved.p, &d.sl[i]), "linear entropy");
      check(qslk_mcl(evolved.p, &d.mcl[i]), "mcl");
    }
  } else {
    CurveSpec spec;
    spec.stem = "compute";
    spec.state = o.state;
    spec.kind = kind;
    spec.kappa = o.ch.kappa;
    spec.param = param;
    spec.method = method;
    spec.norm = norm;
    spec.drive = 0;
    spec.grid_points = o.grid_points;
    spec.mixed_factor = !o.no_mixed_factor;
    spec.exact_fidelity = o.exact_fidelity;
    d = run_curve(spec, x);
  }
  write_sweep_csv(dir / "compute.csv", d);
  std::printf("wrote %s (%d points)\n", (dir / "compute.csv").string().c_str(), g.points);
  return 0;
}

struct FigureOpts {
  std::string id;
  std::string grid;
  std::string out = ".";
  int threads = 0;
};

int cmd_figure(const FigureOpts& o) {
  auto dir = ensure_outdir(o.out);
  const auto& defs = figure_defs();
  if (o.id == "all") {
    for (const auto& fig : defs) {
      emit_figure(fig, dir, o.grid, o.threads);
      std::printf("%s: %zu curves\n", fig.id, fig.curves.size());
    }
    return 0;
  }
  for (const auto& fig : defs) {
    if (o.id == fig.id) {
      emit_figure(fig, dir, o.grid, o.threads);
      std::printf("%s: %zu curves\n", fig.id, fig.curves.size());
      return 0;
    }
  }
  std::string known = "all";
  for (const auto& fig : defs) known += std::string(" ") + fig.id;
  fail(3, "unknown figure id '" + o.id + "' (known: " + known + ")");
}

struct WitnessOpts {
  int n = 3;
  std::string family;
  ChannelOpts ch{"nmad", 1.0, 0.1, 0.6};
  std::string method = "bures";
  std::string norm = "op";
  double drive = 0;  // 0 picks the per-n default
  std::string grid = "0.05:6:60";
  std::string out = ".";
  int threads = 0;
};

int cmd_witness(const WitnessOpts& o) {
  if (o.n < 2 || o.n > 4) fail(2, "--n must be 2, 3 or 4");
  std::string family = o.family;
  if (family.empty()) family = o.n == 2 ? "bell" : "ghz";
  std::vector<std::string> members;
  if (family == "bell" || family == "mcb") {
    if (o.n != 2) fail(2, "family '" + family + "' needs --n 2");
    const char* labels[] = {"phi+", "phi-", "psi+", "psi-"};
    for (const char* l : labels) members.push_back(family + ":" + l);
  } else if (family == "ghz") {
    if (o.n < 3) fail(2, "family 'ghz' needs --n 3 or 4");
    int count = 1 << (o.n - 1);
    for (int k = 1; k <= count; ++k)
      members.push_back("ghz:" + std::to_string(o.n) + "," + std::to_string(k) + ",+");
  } else {
    fail(2, "unknown family '" + family + "' (expected bell, mcb or ghz)");
  }

  qslk_channel_kind kind = channel_kind_of(o.ch.kind);
  double drive = o.drive > 0 ? o.drive : (o.n == 2 ? 1.0 : std::acos(0.0) / 2.0);
  GridSpec g = parse_grid(o.grid);
  std::vector<double> x = grid_times(g);
  auto dir = ensure_outdir(o.out);

  const int m = static_cast<int>(members.size());
  std::vector<CurveData> data(members.size());
  parallel_for(o.threads, m, [&](int i) {
    CurveSpec spec;
    spec.stem = "witness_" + family + std::to_string(o.n) + "_" + std::to_string(i + 1);
    spec.state = members[static_cast<std::size_t>(i)];
    spec.kind = kind;
    spec.kappa = o.ch.kappa;
    spec.param = channel_param(kind, o.ch);
    spec.method = method_of(o.method);
    spec.norm = norm_of(o.norm);
    spec.drive = drive;
    data[static_cast<std::size_t>(i)] = run_curve(spec, x);
  });
  for (int i = 0; i < m; ++i) {
    auto path =
        dir / ("witness_" + family + std::to_string(o.n) + "_" + std::to_string(i + 1) + ".csv");
    write_sweep_csv(path, data[static_cast<std::size_t>(i)]);
  }

  // Cluster curves: same group iff the curves agree pointwise.
  const double same_tol = 1e-8;
  std::vector<std::vector<double>> dev(members.size(), std::vector<double>(members.size(), 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double dmax = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k)
        dmax = std::max(dmax, std::abs(data[static_cast<std::size_t>(i)].y[k] -
                                       data[static_cast<std::size_t>(j)].y[k]));
      dev[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dmax;
      dev[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = dmax;
    }
  std::vector<int> parent(members.size());
  for (int i = 0; i < m; ++i) parent[static_cast<std::size_t>(i)] = i;
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)];
    return a;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (dev[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= same_tol)
        parent[static_cast<std::size_t>(find(j))] = find(i);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < m; ++i) {
    if (find(i) != i) continue;
    std::vector<int> members_of;
    for (int j = 0; j < m; ++j)
      if (find(j) == find(i)) members_of.push_back(j + 1);
    groups.push_back(members_of);
  }
  double max_intra = 0.0, min_inter = -1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double v = dev[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (find(i) == find(j))
        max_intra = std::max(max_intra, v);
      else if (min_inter < 0 || v < min_inter)
        min_inter = v;
    }

  std::printf("family=%s\n", family.c_str());
  std::printf("n=%d\n", o.n);
  std::printf("curves=%d\n", m);
  std::string partition;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    std::printf("group %zu:", gi + 1);
    std::string part;
    for (int mem : groups[gi]) {
      std::printf(" %d", mem);
      if (!part.empty()) part += ",";
      part += std::to_string(mem);
    }
    std::printf("\n");
    if (!partition.empty()) partition += "|";
    partition += part;
  }
  std::printf("partition=%s\n", partition.c_str());
  std::printf("max_intra_dev=%.6g\n", max_intra);
  if (min_inter < 0)
    std::printf("min_inter_gap=none\n");
  else
    std::printf("min_inter_gap=%.6g\n", min_inter);
  return 0;
}

struct NonmarkovOpts {
  ChannelOpts ch;
  double horizon = 20.0;
  std::string out = ".";
};

int cmd_nonmarkov(const NonmarkovOpts& o) {
  if (!(o.horizon > 0)) fail(2, "--horizon must be positive");
  qslk_channel_kind kind = channel_kind_of(o.ch.kind);
  double param = channel_param(kind, o.ch);
  Channel ch(kind, o.ch.kappa, param);
  double horizon = o.horizon / o.ch.kappa;

  double n_l = 0, gamma_star = 0, weight = 0;
  check(qslk_nonmarkovianity(ch.p, horizon, &n_l, &gamma_star, &weight), "nonmarkovianity");
  size_t n_neg = 0;
  check(qslk_gamma_negative_intervals(ch.p, horizon, nullptr, nullptr, 0, &n_neg),
        "negative intervals");
  std::vector<double> lo(n_neg), hi(n_neg);
  if (n_neg > 0)
    check(qslk_gamma_negative_intervals(ch.p, horizon, lo.data(), hi.data(), n_neg, &n_neg),
          "negative intervals");
  size_t n_zero = 0;
  check(qslk_p_zero_times(ch.p, horizon, nullptr, 0, &n_zero), "p zeros");
  std::vector<double> zeros(n_zero);
  if (n_zero > 0) check(qslk_p_zero_times(ch.p, horizon, zeros.data(), n_zero, &n_zero), "p zeros");

  std::printf("channel=%s\n", o.ch.kind.c_str());
  std::printf("kappa=%.12g\n", o.ch.kappa);
  if (kind == QSLK_CHANNEL_RTN)
    std::printf("c=%.12g\n", o.ch.c);
  else
    std::printf("lambda=%.12g\n", o.ch.lambda);
  std::printf("horizon=%.12g\n", o.horizon);
  std::printf("weight=%.12g\n", weight);
  std::printf("gamma_star=%.12g\n", gamma_star / o.ch.kappa);
  std::printf("n_l=%.12g\n", n_l / o.ch.kappa);
  if (lo.empty()) {
    std::printf("negative_intervals=none\n");
  } else {
    std::printf("negative_intervals=");
    for (size_t i = 0; i < lo.size(); ++i)
      std::printf("%s%.9g..%.9g", i ? ";" : "", o.ch.kappa * lo[i], o.ch.kappa * hi[i]);
    std::printf("\n");
  }
  std::printf("p_zeros=%zu\n", n_zero);

  auto dir = ensure_outdir(o.out);
  CsvFile csv(dir / "gamma.csv");
  csv.row("kappa_t,gamma");
  const int samples = 800;
  for (int i = 1; i <= samples; ++i) {
    double t = horizon * i / samples;
    bool skip = false;
    for (double z : zeros)
      if (std::abs(t - z) < 2e-6) skip = true;
    if (skip) continue;
    double gamma = 0;
    if (qslk_decoherence_rate(ch.p, t, &gamma) != QSLK_OK) continue;
    csv.row({o.ch.kappa * t, gamma / o.ch.kappa});
  }
  return 0;
}

struct ValidateOpts {
  std::string filter;
  std::string inject;
};

void validate_cb(const char* name, int passed, const char* detail, void* user) {
  auto* count = static_cast<size_t*>(user);
  ++*count;
  std::printf("%s  %-36s %s\n", passed ? "pass" : "FAIL", name, detail);
}

int cmd_validate(const ValidateOpts& o) {
  size_t total = 0, failed = 0;
  check(qslk_validate(o.filter.empty() ? nullptr : o.filter.c_str(),
                      o.inject.empty() ? nullptr : o.inject.c_str(), validate_cb, &total,
                      &failed),
        "validate");
  std::printf("%zu/%zu properties passed\n", total - failed, total);
  return failed == 0 ? 0 : 1;
}

// ---- config file ------------------------------------------------------

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(2, "cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, value;
    std::istringstream ls(line);
    ls >> key;
    if (key.empty()) continue;
    auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    }
    if (value.empty()) {
      ls >> value;
      if (value == "=") ls >> value;
      else if (!value.empty() && value.front() == '=') value.erase(0, 1);
    }
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (value == "true" || value == "on" || value == "yes") {
      tokens.push_back(key);
    } else if (value == "false" || value == "off" || value == "no") {
      continue;
    } else if (value.empty()) {
      tokens.push_back(key);
    } else {
      tokens.push_back(key);
      tokens.push_back(value);
    }
  }
  return tokens;
}

// Splices config-file tokens right after the subcommand so flags given on
// the command line override them (every option takes the last value).
std::vector<std::string> preprocess_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
  }
  if (cfg_path.empty()) return args;
  auto extra = config_tokens(cfg_path);
  std::size_t sub = 0;
  while (sub < args.size() && args[sub].rfind("-", 0) == 0) ++sub;
  if (sub < args.size()) ++sub;  // insert after the subcommand name
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum speed limit toolkit (library version " +
               std::string(qslk_version()) + ")"};
  app.require_subcommand(1);

  ComputeOpts co;
  FigureOpts fo;
  WitnessOpts wo;
  NonmarkovOpts no;
  ValidateOpts vo;
  std::string cfg_ignored;

  auto* compute = app.add_subcommand("compute", "one bound, or a sweep over driving times");
  add_channel_flags(compute, co.ch);
  compute->add_option("--state", co.state, "initial state spec")->capture_default_str();
  compute->add_option("--method", co.method, "rp or bures")->capture_default_str();
  compute->add_option("--norm", co.norm, "op, hs or tr (bures)")->capture_default_str();
  compute->add_option("--tau", co.tau, "driving time in kappa*tau units")->capture_default_str();
  compute->add_option("--grid", co.grid, "sweep kappa*tau over min:max:points");
  compute->add_option("--grid-points", co.grid_points, "quadrature seeding resolution")
      ->capture_default_str();
  compute->add_flag("--no-mixed-factor", co.no_mixed_factor,
                    "drop the mixed-state factor (bures)");
  compute->add_flag("--exact-fidelity", co.exact_fidelity,
                    "Uhlmann fidelity instead of superfidelity (bures)");
  compute->add_flag("--closed-form", co.closed_form,
                    "closed form instead of the numeric pipeline");
  compute->add_option("--out", co.out, "output directory")->capture_default_str();
  compute->add_option("--threads", co.threads, "worker threads (0 = all cores)");
  compute->add_option("--config", cfg_ignored, "key-value file with the same keys as flags");

  auto* figure = app.add_subcommand("figure", "reproduce the built-in figures as CSV");
  figure->add_option("--id", fo.id, "figure id (fig1a..fig7) or 'all'")->required();
  figure->add_option("--grid", fo.grid, "override the per-figure grid min:max:points");
  figure->add_option("--out", fo.out, "output directory")->capture_default_str();
  figure->add_option("--threads", fo.threads, "worker threads (0 = all cores)");
  figure->add_option("--config", cfg_ignored, "key-value file with the same keys as flags");

  auto* witness = app.add_subcommand("witness", "curve-degeneracy state discrimination");
  witness->add_option("--n", wo.n, "register size: 2, 3 or 4")->capture_default_str();
  witness->add_option("--family", wo.family, "bell, mcb (n=2) or ghz (n=3,4)");
  add_channel_flags(witness, wo.ch);
  witness->add_option("--method", wo.method, "rp or bures")->capture_default_str();
  witness->add_option("--norm", wo.norm, "op, hs or tr (bures)")->capture_default_str();
  witness->add_option("--drive", wo.drive, "caption driving time (default 1, pi/4 for ghz)");
  witness->add_option("--grid", wo.grid, "kappa*tau grid min:max:points")->capture_default_str();
  witness->add_option("--out", wo.out, "output directory")->capture_default_str();
  witness->add_option("--threads", wo.threads, "worker threads (0 = all cores)");
  witness->add_option("--config", cfg_ignored, "key-value file with the same keys as flags");

  auto* nonmarkov = app.add_subcommand("nonmarkov", "rate-based memory report");
  add_channel_flags(nonmarkov, no.ch);
  nonmarkov->add_option("--horizon", no.horizon, "time horizon in kappa*t units")
      ->capture_default_str();
  nonmarkov->add_option("--out", no.out, "output directory")->capture_default_str();
  nonmarkov->add_option("--config", cfg_ignored, "key-value file with the same keys as flags");

  auto* validate = app.add_subcommand("validate", "run the library self-checks");
  validate->add_option("--filter", vo.filter, "keep properties containing this substring");
  validate->add_option("--inject", vo.inject, "simulate a known defect (pt-sign)");

  for (auto* sub : {compute, figure, witness, nonmarkov, validate})
    for (auto* opt : sub->get_options())
      if (opt->get_expected_min() > 0) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  try {
    auto args = preprocess_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (compute->parsed()) return cmd_compute(co);
    if (figure->parsed()) return cmd_figure(fo);
    if (witness->parsed()) return cmd_witness(wo);
    if (nonmarkov->parsed()) return cmd_nonmarkov(no);
    if (validate->parsed()) return cmd_validate(vo);
    return 2;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const AppError& e) {
    std::fprintf(stderr, "error: %s\n", e.msg.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
