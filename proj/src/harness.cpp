#include "binsense/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "binsense/io.hpp"
#include "binsense/kernels.hpp"

namespace binsense::harness {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ProgramOutcome record(const solvers::SolverOutcome& sol, const Vec& x0_dense) {
  ProgramOutcome out;
  out.ran = true;
  out.status = sol.status;
  out.err = std::sqrt(
      kernels::diff_nrm2sq(sol.x_star.data(), x0_dense.data(), x0_dense.size()));
  out.residual_l2 = sol.residual_l2;
  out.iterations = sol.iterations;
  return out;
}

ProgramOutcome failed(const char* what) {
  ProgramOutcome out;
  out.ran = true;
  out.err = std::numeric_limits<double>::infinity();
  out.error = what;
  return out;
}

} // namespace

const PhaseCell* PhaseGrid::cell(std::size_t s, std::size_t m) const {
  for (const PhaseCell& c : cells)
    if (c.s == s && c.m == m) return &c;
  return nullptr;
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t s, std::size_t m,
                      std::size_t trial) {
  TrialResult res;
  res.s = s;
  res.m = m;
  res.trial = trial;

  const std::size_t n = config.n;
  if (s > n) throw std::invalid_argument("run_trial: s exceeds n");
  if (m == 0 || m > n) throw std::invalid_argument("run_trial: m must be in [1, n]");

  try {
    const std::size_t gen_len = config.kind == ops::Operator::Kind::circulant ? n : 2 * n - 1;
    rng::Stream gen_stream(rng::derive_key(config.base_seed, "generator", {s, m, trial}));
    rng::Stream sel_stream(rng::derive_key(config.base_seed, "selection", {s, m, trial}));
    rng::Stream sig_stream(rng::derive_key(config.base_seed, "signal", {s, m, trial}));

    Vec gen = rng::sample_generator(config.ensemble, gen_len, gen_stream);
    std::vector<std::size_t> theta = rng::sample_selection(n, m, sel_stream);
    const ops::Operator op(config.kind, n, std::move(gen), std::move(theta), config.mu,
                           config.ensemble.sigma(), config.ensemble.subgauss_norm(),
                           config.base_seed);
    const std::string man = op.manifest();
    res.op_digest = fnv1a(man.data(), man.size());

    const rng::BinarySignal x0 = rng::sample_binary_signal(n, s, sig_stream);
    const Vec x0_dense = x0.dense();
    res.signal_digest = fnv1a(x0.support.data(), x0.support.size() * sizeof(std::size_t),
                              fnv1a(&n, sizeof(n)));

    Vec y = op.apply(x0_dense);
    if (config.eta > 0.0) {
      rng::Stream noise_stream(rng::derive_key(config.base_seed, "noise", {s, m, trial}));
      const Vec w = rng::sample_noise(m, config.eta, noise_stream);
      kernels::axpy(1.0, w.data(), y.data(), m);
      // A-priori bound needs no certificate; report it for every noisy trial.
      if (config.mu > 0.0 && config.ensemble.sigma() > 0.0)
        res.noise_bound =
            certs::noise_error_bound(s, n, m, config.ensemble.sigma(), config.mu, config.eta);
    }

    if (config.run_bp) {
      try {
        res.bp = record(solvers::solve_box_bp(op, y, config.solver), x0_dense);
      } catch (const std::exception& e) {
        res.bp = failed(e.what());
      }
    }
    if (config.run_ls) {
      try {
        res.ls = record(solvers::solve_box_ls(op, y, config.solver), x0_dense);
      } catch (const std::exception& e) {
        res.ls = failed(e.what());
      }
    }
    if (config.run_bpp) {
      try {
        res.bpp = record(solvers::solve_nonneg_bp(op, y, config.solver), x0_dense);
      } catch (const std::exception& e) {
        res.bpp = failed(e.what());
      }
    }
    for (ProgramOutcome* p : {&res.bp, &res.ls, &res.bpp}) {
      if (p->ran) p->success = p->err <= config.solver.success_radius;
    }

    if (config.certify && config.mu > 0.0 && config.ensemble.sigma() > 0.0) {
      try {
        const certs::DualCertificate cert = certs::build_certificate(op, x0);
        res.cert_built = true;
        res.cert_verified = cert.verified;
        res.cert_t_actual = cert.t_actual;
        res.cert_r = cert.r;
        if (cert.verified && config.eta > 0.0)
          res.cert_radius = certs::certified_noise_radius(cert, config.eta).radius;
      } catch (const std::exception& e) {
        res.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t t = requested;
  if (t == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    t = hw == 0 ? 1 : hw;
  }
  if (const char* env = std::getenv("BINSENSE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && static_cast<std::size_t>(cap) < t) t = static_cast<std::size_t>(cap);
  }
  return t == 0 ? 1 : t;
}

PhaseGrid run_phase_grid(const ExperimentConfig& config) {
  if (config.s_values.empty() || config.m_values.empty())
    throw std::invalid_argument("run_phase_grid: empty grid");
  if (config.trials == 0) throw std::invalid_argument("run_phase_grid: trials must be >= 1");
  // Reject bad cells here: run_trial raises in worker threads otherwise.
  for (std::size_t s : config.s_values)
    if (s > config.n) throw std::invalid_argument("run_phase_grid: s exceeds n");
  for (std::size_t m : config.m_values)
    if (m == 0 || m > config.n)
      throw std::invalid_argument("run_phase_grid: m must be in [1, n]");
  PhaseGrid grid;
  grid.config = config;

  const std::size_t cells = config.s_values.size() * config.m_values.size();
  const std::size_t total = cells * config.trials;
  std::vector<TrialResult> results(total);

  auto task_of = [&](std::size_t t) {
    const std::size_t cell = t / config.trials;
    const std::size_t trial = t % config.trials;
    const std::size_t s = config.s_values[cell / config.m_values.size()];
    const std::size_t m = config.m_values[cell % config.m_values.size()];
    return std::tuple<std::size_t, std::size_t, std::size_t>{s, m, trial};
  };

  const std::size_t nthreads = std::min(resolve_threads(config.threads), total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= total) return;
      const auto [s, m, trial] = task_of(t);
      results[t] = run_trial(config, s, m, trial);
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Serial aggregation in task order keeps outputs independent of scheduling.
  grid.cells.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    PhaseCell cell;
    cell.s = config.s_values[c / config.m_values.size()];
    cell.m = config.m_values[c % config.m_values.size()];
    cell.trials = config.trials;
    double sum_bp = 0.0, sum_ls = 0.0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const TrialResult& r = results[c * config.trials + t];
      if (r.bp.ran && r.bp.success) ++cell.success_bp;
      if (r.ls.ran && r.ls.success) ++cell.success_ls;
      if (r.bpp.ran && r.bpp.success) ++cell.success_bpp;
      if (r.cert_verified) ++cell.cert_verified;
      if (r.bp.ran) sum_bp += r.bp.err;
      if (r.ls.ran) sum_ls += r.ls.err;
    }
    if (config.trials) {
      cell.mean_err_bp = config.run_bp ? sum_bp / config.trials : 0.0;
      cell.mean_err_ls = config.run_ls ? sum_ls / config.trials : 0.0;
    }
    grid.cells.push_back(cell);
  }
  return grid;
}

BruteForceResult brute_force_unique(const ops::Operator& op, const Vec& y) {
  const std::size_t n = op.n();
  const std::size_t m = op.m();
  if (n > 20) throw std::invalid_argument("brute_force_unique: n must be <= 20");
  if (y.size() != m) throw std::invalid_argument("brute_force_unique: y has wrong length");

  const Mat cols = transpose(op.to_dense());
  const double tol = 1e-8 * (1.0 + std::sqrt(kernels::nrm2sq(y.data(), m)));
  const double tol2 = tol * tol;

  Vec resid(m);
  for (std::size_t i = 0; i < m; ++i) resid[i] = -y[i];
  std::uint32_t x = 0;

  BruteForceResult out;
  auto consider = [&](std::uint32_t bits) {
    if (kernels::nrm2sq(resid.data(), m) <= tol2) {
      ++out.count;
      if (out.count == 1) {
        out.witness.n = n;
        for (std::size_t j = 0; j < n; ++j)
          if (bits & (1u << j)) out.witness.support.push_back(j);
      }
    }
  };

  consider(x);
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < limit; ++k) {
    const unsigned bit = static_cast<unsigned>(__builtin_ctzll(k));
    const bool setting = !(x & (1u << bit));
    x ^= 1u << bit;
    kernels::axpy(setting ? 1.0 : -1.0, cols.row(bit), resid.data(), m);
    consider(x);
  }

  out.verdict = out.count == 0 ? Uniqueness::none
              : out.count == 1 ? Uniqueness::unique
                               : Uniqueness::multiple;
  return out;
}

std::string csv_from_grid(const PhaseGrid& grid) {
  std::ostringstream out;
  out << "s,M,trials,success_bp,success_ls,success_bpplus,cert_rate,mean_err_bp,mean_err_ls\n";
  for (const PhaseCell& c : grid.cells) {
    out << c.s << ',' << c.m << ',' << c.trials << ',' << fmt(c.rate_bp()) << ','
        << fmt(c.rate_ls()) << ',' << fmt(c.rate_bpp()) << ',' << fmt(c.rate_cert()) << ','
        << fmt(c.mean_err_bp) << ',' << fmt(c.mean_err_ls) << '\n';
  }
  return out.str();
}

void write_csv(const PhaseGrid& grid, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << csv_from_grid(grid);
}

void write_pgm(const PhaseGrid& grid, const std::string& program, const std::string& path) {
  const auto& sv = grid.config.s_values;
  const auto& mv = grid.config.m_values;
  auto rate = [&](const PhaseCell& c) {
    if (program == "bp") return c.rate_bp();
    if (program == "ls") return c.rate_ls();
    if (program == "bpp") return c.rate_bpp();
    if (program == "cert") return c.rate_cert();
    throw std::invalid_argument("write_pgm: unknown program " + program);
  };
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P5\n" << sv.size() << ' ' << mv.size() << "\n255\n";
  // Top row is the largest m: origin lands bottom-left.
  for (std::size_t row = mv.size(); row-- > 0;) {
    for (std::size_t col = 0; col < sv.size(); ++col) {
      const PhaseCell* c = grid.cell(sv[col], mv[row]);
      const double v = c ? rate(*c) : 0.0;
      const int pix = static_cast<int>(v * 255.0 + 0.5);
      f.put(static_cast<char>(pix < 0 ? 0 : pix > 255 ? 255 : pix));
    }
  }
}

std::string manifest_from_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "n=" << config.n << '\n';
  out << "kind=" << (config.kind == ops::Operator::Kind::circulant ? "circulant" : "toeplitz")
      << '\n';
  out << "ensemble=" << config.ensemble.name() << '\n';
  out << "ensemble_param=" << fmt(config.ensemble.param) << '\n';
  out << "mu=" << fmt(config.mu) << '\n';
  out << "eta=" << fmt(config.eta) << '\n';
  out << "trials=" << config.trials << '\n';
  out << "seed=" << config.base_seed << '\n';
  out << "programs=";
  bool first = true;
  for (const char* p : {config.run_bp ? "bp" : "", config.run_ls ? "ls" : "",
                        config.run_bpp ? "bpp" : ""}) {
    if (*p) {
      if (!first) out << '+';
      out << p;
      first = false;
    }
  }
  out << '\n';
  out << "certify=" << (config.certify ? 1 : 0) << '\n';
  out << "tolerance_feas=" << fmt(config.solver.tolerance_feas) << '\n';
  out << "tolerance_opt=" << fmt(config.solver.tolerance_opt) << '\n';
  out << "max_iterations=" << config.solver.max_iterations << '\n';
  out << "success_radius=" << fmt(config.solver.success_radius) << '\n';
  auto list = [&](const char* key, const std::vector<std::size_t>& vs) {
    out << key << '=';
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i) out << ',';
      out << vs[i];
    }
    out << '\n';
  };
  list("s_values", config.s_values);
  list("m_values", config.m_values);
  return out.str();
}

void write_run_manifest(const ExperimentConfig& config, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << manifest_from_config(config);
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  double ensemble_param = 1.0;
  bool have_param = false;
  std::string ensemble_name = "gaussian";
  for (const auto& [key, value] : kv) {
    if (key == "n") {
      cfg.n = std::stoull(value);
    } else if (key == "kind") {
      if (value == "circulant") {
        cfg.kind = ops::Operator::Kind::circulant;
      } else if (value == "toeplitz") {
        cfg.kind = ops::Operator::Kind::toeplitz;
      } else {
        throw std::invalid_argument("config: unknown kind '" + value + "'");
      }
    } else if (key == "ensemble") {
      ensemble_name = value;
    } else if (key == "ensemble_param") {
      ensemble_param = std::stod(value);
      have_param = true;
    } else if (key == "mu") {
      cfg.mu = std::stod(value);
    } else if (key == "eta") {
      cfg.eta = std::stod(value);
    } else if (key == "trials") {
      cfg.trials = std::stoull(value);
    } else if (key == "seed") {
      cfg.base_seed = std::stoull(value);
    } else if (key == "threads") {
      cfg.threads = std::stoull(value);
    } else if (key == "programs") {
      cfg.run_bp = cfg.run_ls = cfg.run_bpp = false;
      std::istringstream in(value);
      std::string tok;
      while (std::getline(in, tok, '+')) {
        if (tok == "bp") {
          cfg.run_bp = true;
        } else if (tok == "ls") {
          cfg.run_ls = true;
        } else if (tok == "bpp") {
          cfg.run_bpp = true;
        } else if (!tok.empty()) {
          throw std::invalid_argument("config: unknown program '" + tok + "'");
        }
      }
    } else if (key == "certify") {
      cfg.certify = value == "1" || value == "true";
    } else if (key == "tolerance_feas") {
      cfg.solver.tolerance_feas = std::stod(value);
    } else if (key == "tolerance_opt") {
      cfg.solver.tolerance_opt = std::stod(value);
    } else if (key == "max_iterations") {
      cfg.solver.max_iterations = std::stoull(value);
    } else if (key == "success_radius") {
      cfg.solver.success_radius = std::stod(value);
    } else if (key == "s_values") {
      cfg.s_values = io::parse_size_list(value);
    } else if (key == "m_values") {
      cfg.m_values = io::parse_size_list(value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  rng::EnsembleSpec spec = rng::EnsembleSpec::parse(ensemble_name);
  if (have_param && spec.dist != rng::EnsembleSpec::Dist::bernoulli01) spec.param = ensemble_param;
  cfg.ensemble = spec;
  return cfg;
}

} // namespace binsense::harness
