// Command line front end: instance generation, single solves, certificate
// reports, phase-transition sweeps, and numerical audits of the analysis
// behind the certificate construction.
//
// Exit codes: 0 success, 2 validation or audit failure, 3 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "binsense/certificates.hpp"
#include "binsense/harness.hpp"
#include "binsense/io.hpp"
#include "binsense/kernels.hpp"
#include "binsense/operators.hpp"
#include "binsense/proofcheck.hpp"
#include "binsense/rng.hpp"
#include "binsense/solvers.hpp"

namespace {

using binsense::Mat;
using binsense::Vec;
namespace certs = binsense::certs;
namespace harness = binsense::harness;
namespace io = binsense::io;
namespace kernels = binsense::kernels;
namespace ops = binsense::ops;
namespace proofs = binsense::proofs;
namespace rng = binsense::rng;
namespace solvers = binsense::solvers;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

ops::Operator::Kind parse_kind(const std::string& name) {
  if (name == "circulant") return ops::Operator::Kind::circulant;
  if (name == "toeplitz") return ops::Operator::Kind::toeplitz;
  throw std::invalid_argument("unknown operator kind '" + name + "'");
}

rng::EnsembleSpec make_ensemble(const std::string& name, double param) {
  rng::EnsembleSpec spec = rng::EnsembleSpec::parse(name);
  if (spec.dist != rng::EnsembleSpec::Dist::bernoulli01) spec.param = param;
  return spec;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
  std::size_t n = 100;
  std::size_t m = 0;
  std::size_t s = 0;
  std::size_t trial = 0;
  std::string kind = "circulant";
  std::string ensemble = "gaussian";
  double param = 1.0;
  double mu = 1.0;
  double eta = 0.0;
  std::uint64_t seed = 1;
  std::string op_path = "op.manifest";
  std::string signal_path = "x0.txt";
  std::string y_path = "y.txt";
};

int run_gen(const GenOpts& o) {
  const ops::Operator::Kind kind = parse_kind(o.kind);
  const rng::EnsembleSpec spec = make_ensemble(o.ensemble, o.param);
  if (o.s > o.n) throw std::invalid_argument("gen: s exceeds n");
  if (o.m == 0 || o.m > o.n) throw std::invalid_argument("gen: m must be in [1, n]");

  // Mirrors one sweep trial so a generated instance replays cell (s, m),
  // trial `trial` of a phase run with the same base seed.
  const std::size_t gen_len = kind == ops::Operator::Kind::circulant ? o.n : 2 * o.n - 1;
  rng::Stream gen_stream(rng::derive_key(o.seed, "generator", {o.s, o.m, o.trial}));
  rng::Stream sel_stream(rng::derive_key(o.seed, "selection", {o.s, o.m, o.trial}));
  rng::Stream sig_stream(rng::derive_key(o.seed, "signal", {o.s, o.m, o.trial}));

  Vec gen = rng::sample_generator(spec, gen_len, gen_stream);
  std::vector<std::size_t> theta = rng::sample_selection(o.n, o.m, sel_stream);
  const ops::Operator op(kind, o.n, std::move(gen), std::move(theta), o.mu, spec.sigma(),
                         spec.subgauss_norm(), o.seed);
  const rng::BinarySignal x0 = rng::sample_binary_signal(o.n, o.s, sig_stream);

  Vec y = op.apply(x0.dense());
  if (o.eta > 0.0) {
    rng::Stream noise_stream(rng::derive_key(o.seed, "noise", {o.s, o.m, o.trial}));
    const Vec w = rng::sample_noise(o.m, o.eta, noise_stream);
    kernels::axpy(1.0, w.data(), y.data(), o.m);
  }

  io::write_text_file(o.op_path, op.manifest());
  io::write_vector_file(o.signal_path, x0.dense());
  io::write_vector_file(o.y_path, y);
  std::printf("operator: %s\n", o.op_path.c_str());
  std::printf("signal: %s (sparsity %zu)\n", o.signal_path.c_str(), x0.sparsity());
  std::printf("measurements: %s%s\n", o.y_path.c_str(), o.eta > 0.0 ? " (noisy)" : "");
  return 0;
}

// ---------------------------------------------------------------- solve

struct SolveOpts {
  std::string op_path;
  std::string y_path;
  std::string program = "bp";
  std::string out_path;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
};

int run_solve(const SolveOpts& o) {
  const ops::Operator op = ops::Operator::parse_manifest(io::read_text_file(o.op_path));
  const Vec y = io::read_vector_file(o.y_path);
  if (y.size() != op.m())
    throw std::invalid_argument("solve: y has " + std::to_string(y.size()) +
                                " entries, operator has " + std::to_string(op.m()) + " rows");

  solvers::SolverOptions opts;
  opts.tolerance_feas = o.tol;
  opts.tolerance_opt = o.tol;
  opts.max_iterations = o.max_iter;

  solvers::SolverOutcome out;
  if (o.program == "bp") {
    out = solvers::solve_box_bp(op, y, opts);
  } else if (o.program == "ls") {
    out = solvers::solve_box_ls(op, y, opts);
  } else if (o.program == "bp+" || o.program == "bpp") {
    out = solvers::solve_nonneg_bp(op, y, opts);
  } else {
    throw std::invalid_argument("solve: unknown program '" + o.program +
                                "' (expected bp, ls, or bp+)");
  }

  std::printf("status: %s\n", solvers::to_string(out.status));
  std::printf("objective: %s\n", fmt(out.objective).c_str());
  std::printf("residual_l2: %s\n", fmt(out.residual_l2).c_str());
  std::printf("duality_gap: %s\n", fmt(out.duality_gap).c_str());
  std::printf("iterations: %zu\n", out.iterations);
  std::printf("x_star:");
  for (const double v : out.x_star) std::printf(" %s", fmt(v).c_str());
  std::printf("\n");

  const solvers::RoundResult rounded = solvers::round_to_binary(out.x_star, op, y, opts);
  std::printf("rounded_support:");
  for (const std::size_t i : rounded.signal.support) std::printf(" %zu", i);
  std::printf("\n");
  std::printf("rounded_consistent: %s\n", rounded.consistent ? "yes" : "no");

  if (!o.out_path.empty()) io::write_vector_file(o.out_path, out.x_star);
  return out.status == solvers::SolveStatus::optimal ? 0 : 3;
}

// ---------------------------------------------------------------- certify

struct CertifyOpts {
  std::string op_path;
  std::string signal_path;
  std::vector<double> etas;
  bool search = false;
};

rng::BinarySignal signal_from_vec(const Vec& x) {
  rng::BinarySignal sig;
  sig.n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 1.0) {
      sig.support.push_back(i);
    } else if (x[i] != 0.0) {
      throw std::invalid_argument("signal entries must be exactly 0 or 1");
    }
  }
  return sig;
}

int run_certify(const CertifyOpts& o) {
  const ops::Operator op = ops::Operator::parse_manifest(io::read_text_file(o.op_path));
  const rng::BinarySignal x0 = signal_from_vec(io::read_vector_file(o.signal_path));
  if (x0.n != op.n())
    throw std::invalid_argument("certify: signal length does not match operator columns");

  const certs::DualCertificate cert = certs::build_certificate(op, x0);
  std::printf("n: %zu\n", op.n());
  std::printf("m: %zu\n", op.m());
  std::printf("mu: %s\n", fmt(op.mu()).c_str());
  std::printf("sigma: %s\n", fmt(op.sigma()).c_str());
  std::printf("signal_sparsity: %zu\n", x0.sparsity());
  std::printf("certificate_sparsity: %zu\n", cert.sparsity);
  std::printf("verified: %s\n", cert.verified ? "yes" : "no");
  std::printf("t_target: %s\n", fmt(cert.t_target).c_str());
  std::printf("t_actual: %s\n", fmt(cert.t_actual).c_str());
  std::printf("r: %s\n", fmt(cert.r).c_str());

  if (!o.etas.empty()) {
    std::printf("eta certified_radius apriori_bound\n");
    for (const double eta : o.etas) {
      if (eta < 0.0) throw std::invalid_argument("certify: eta must be nonnegative");
      const double apriori =
          certs::noise_error_bound(x0.sparsity(), op.n(), op.m(), op.sigma(), op.mu(), eta);
      if (cert.verified) {
        const certs::NoiseRadius nr = certs::certified_noise_radius(cert, eta);
        std::printf("%s %s %s\n", fmt(eta).c_str(), fmt(nr.radius).c_str(), fmt(apriori).c_str());
      } else {
        std::printf("%s - %s\n", fmt(eta).c_str(), fmt(apriori).c_str());
      }
    }
  }

  if (o.search) {
    const auto found = certs::search_certificate_lp(op, x0.support);
    if (found) {
      std::printf("search_t_best: %s\n", fmt(found->t_best).c_str());
    } else {
      std::printf("search_t_best: none\n");
    }
  }
  // An unverified certificate is a result, not a failure.
  return 0;
}

// ---------------------------------------------------------------- phase

struct PhaseOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string csv_path;
  std::string pgm_prefix;
  std::string manifest_path;
};

int run_phase(const PhaseOpts& o) {
  std::map<std::string, std::string> kv;
  if (!o.config_path.empty()) kv = io::read_config_file(o.config_path);
  for (const std::string& s : o.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }

  const harness::ExperimentConfig cfg = harness::config_from_map(kv);
  std::fprintf(stderr, "phase: %zu x %zu cells, %zu trials each, %zu thread(s)\n",
               cfg.s_values.size(), cfg.m_values.size(), cfg.trials,
               harness::resolve_threads(cfg.threads));
  const harness::PhaseGrid grid = harness::run_phase_grid(cfg);

  if (o.csv_path.empty()) {
    std::fputs(harness::csv_from_grid(grid).c_str(), stdout);
  } else {
    harness::write_csv(grid, o.csv_path);
    std::fprintf(stderr, "csv: %s\n", o.csv_path.c_str());
  }
  if (!o.pgm_prefix.empty()) {
    if (cfg.run_bp) harness::write_pgm(grid, "bp", o.pgm_prefix + "bp.pgm");
    if (cfg.run_ls) harness::write_pgm(grid, "ls", o.pgm_prefix + "ls.pgm");
    if (cfg.run_bpp) harness::write_pgm(grid, "bpp", o.pgm_prefix + "bpp.pgm");
    if (cfg.certify) harness::write_pgm(grid, "cert", o.pgm_prefix + "cert.pgm");
  }
  if (!o.manifest_path.empty()) harness::write_run_manifest(cfg, o.manifest_path);
  return 0;
}

// ---------------------------------------------------------------- validate-proof

struct ProofOpts {
  std::size_t n = 32;
  std::size_t m = 12;
  std::size_t s = 5;
  std::size_t trials = 2000;
  std::size_t indices = 8;
  std::size_t draws = 50;
  std::string ensemble = "gaussian";
  double param = 1.0;
  double mu = 1.0;
  std::uint64_t seed = 1;
};

struct AuditRow {
  std::string name;
  std::string formula;
  std::string empirical;
  std::string bound;
  bool pass = false;
};

double quad_form(const Mat& a, const Vec& v) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.rows; ++r)
    acc += v[r] * kernels::dot(a.row(r), v.data(), a.cols);
  return acc;
}

// Evenly spaced picks preserving order.
std::vector<std::size_t> pick_spread(const std::vector<std::size_t>& from, std::size_t want) {
  std::vector<std::size_t> out;
  if (from.empty() || want == 0) return out;
  want = std::min(want, from.size());
  for (std::size_t j = 0; j < want; ++j) out.push_back(from[j * from.size() / want]);
  return out;
}

int run_validate_proof(const ProofOpts& o) {
  const rng::EnsembleSpec spec = make_ensemble(o.ensemble, o.param);
  if (o.m == 0 || o.m > o.n) throw std::invalid_argument("validate-proof: m must be in [1, n]");
  if (o.s > o.n) throw std::invalid_argument("validate-proof: s exceeds n");
  if (o.trials < 1000) throw std::invalid_argument("validate-proof: trials must be >= 1000");
  if (o.draws == 0 || o.indices == 0)
    throw std::invalid_argument("validate-proof: draws and indices must be >= 1");
  if (!(o.mu > 0.0)) throw std::invalid_argument("validate-proof: mu must be positive");

  const std::size_t n = o.n;
  const double md = static_cast<double>(o.m);
  const double sigma = spec.sigma();

  // Fixed frame: row selection, support (symmetrized to its sparser side so
  // one support serves the whole table), audited coordinates.
  rng::Stream sel_stream(rng::derive_key(o.seed, "audit-selection"));
  std::vector<std::size_t> theta = rng::sample_selection(n, o.m, sel_stream);
  rng::Stream sig_stream(rng::derive_key(o.seed, "audit-signal"));
  const rng::BinarySignal x0 = rng::sample_binary_signal(n, o.s, sig_stream);
  const certs::SymmetrizedSignal sym = certs::symmetrize(x0);
  const std::vector<std::size_t>& support = sym.beta0.support;
  const std::size_t se = support.size();
  const double sed = static_cast<double>(se);

  std::vector<char> on(n, 0);
  for (const std::size_t i : support) on[i] = 1;
  std::vector<std::size_t> comp;
  for (std::size_t i = 0; i < n; ++i)
    if (!on[i]) comp.push_back(i);

  std::size_t want_on = std::min(std::max<std::size_t>(o.indices / 2, se ? 1 : 0), se);
  std::size_t want_off = std::min(o.indices - std::min(o.indices, want_on), comp.size());
  if (want_off == 0 && !comp.empty() && o.indices > want_on) want_off = 1;
  const std::vector<std::size_t> idx_on = pick_spread(support, want_on);
  const std::vector<std::size_t> idx_off = pick_spread(comp, want_off);
  std::vector<std::size_t> audited = idx_on;
  audited.insert(audited.end(), idx_off.begin(), idx_off.end());
  if (audited.empty()) throw std::invalid_argument("validate-proof: no coordinates to audit");

  std::printf("frame: n=%zu m=%zu s=%zu (audited support %zu%s) ensemble=%s mu=%s\n", n, o.m,
              o.s, se, sym.flipped ? ", complement side" : "", spec.name().c_str(),
              fmt6(o.mu).c_str());
  std::printf("audited coordinates: %zu on support, %zu off support; %zu draws, %zu trials\n\n",
              idx_on.size(), idx_off.size(), o.draws, o.trials);

  std::vector<AuditRow> rows;
  auto add = [&rows](std::string name, std::string formula, std::string empirical,
                     std::string bound, bool pass) {
    rows.push_back({std::move(name), std::move(formula), std::move(empirical), std::move(bound),
                    pass});
  };

  // Quadratic form exactness against directly summed terms, plus structure
  // norms of the representer matrices.
  double worst_x2_rel = 0.0, worst_x3_rel = 0.0;
  double max_op_l = 0.0, max_op_l3 = 0.0;
  double worst_gersh_gap = -std::numeric_limits<double>::infinity();
  double worst_hs_l = 0.0, worst_hs_k1 = 0.0;
  {
    rng::Stream draw_stream(rng::derive_key(o.seed, "audit-draws"));
    std::vector<Mat> l_mats, l3_mats;
    std::vector<double> hs_k1_sq;
    for (const std::size_t i : audited) {
      l_mats.push_back(proofs::representer_x2(n, theta, support, i));
      proofs::X3Representer r3 = proofs::representer_x3(n, theta, support, i);
      const proofs::NormAudit a1 = proofs::norm_audit(l_mats.back());
      const proofs::NormAudit a3 = proofs::norm_audit(r3.l3);
      max_op_l = std::max(max_op_l, a1.op_norm);
      max_op_l3 = std::max(max_op_l3, a3.op_norm);
      worst_gersh_gap = std::max({worst_gersh_gap,
                                  a1.op_norm - a1.gershgorin_bound,
                                  a3.op_norm - a3.gershgorin_bound});
      worst_hs_l = std::max(worst_hs_l, std::fabs(a1.hs_norm * a1.hs_norm - md * sed));
      const proofs::NormAudit ak1 = proofs::norm_audit(r3.k1);
      worst_hs_k1 = std::max(worst_hs_k1, std::fabs(ak1.hs_norm * ak1.hs_norm - md * md));
      l3_mats.push_back(std::move(r3.l3));
    }
    for (std::size_t d = 0; d < o.draws; ++d) {
      const Vec b = rng::sample_generator(spec, n, draw_stream);
      for (std::size_t j = 0; j < audited.size(); ++j) {
        const proofs::XTerms t = proofs::x_terms(n, theta, support, audited[j], b);
        const double q2 = quad_form(l_mats[j], b);
        const double q3 = quad_form(l3_mats[j], b);
        worst_x2_rel = std::max(worst_x2_rel, std::fabs(q2 - t.x2) / (1.0 + std::fabs(t.x2)));
        worst_x3_rel = std::max(worst_x3_rel, std::fabs(q3 - t.x3) / (1.0 + std::fabs(t.x3)));
      }
    }
  }
  add("quadform(L) = x2", "0", fmt6(worst_x2_rel), "<= 1e-10 rel", worst_x2_rel <= 1e-10);
  add("quadform(L3) = x3", "0", fmt6(worst_x3_rel), "<= 1e-10 rel", worst_x3_rel <= 1e-10);
  add("op_norm(L) <= s", fmt6(sed), fmt6(max_op_l), "<= s",
      max_op_l <= sed * (1.0 + 1e-8) + 1e-9);
  add("op_norm(L3) <= M*s", fmt6(md * sed), fmt6(max_op_l3), "<= M*s",
      max_op_l3 <= md * sed * (1.0 + 1e-8) + 1e-9);
  add("op_norm <= gershgorin", "<= 0", fmt6(worst_gersh_gap), "<= 1e-6",
      worst_gersh_gap <= 1e-6);
  add("hs_norm(L)^2 = M*s", fmt6(md * sed), fmt6(worst_hs_l) + " abs dev", "exact",
      worst_hs_l <= 1e-9);
  add("hs_norm(L) = sqrt(M*s)", fmt6(std::sqrt(md * sed)), "counted", "identity",
      worst_hs_l <= 1e-9);
  add("hs_norm(K1)^2 = M^2", fmt6(md * md), fmt6(worst_hs_k1) + " abs dev", "exact",
      worst_hs_k1 <= 1e-9);

  // Selection gram representer.
  {
    const Mat k = proofs::gram_representer(n, theta, support);
    const proofs::NormAudit ak = proofs::norm_audit(k);
    add("op_norm(K) <= s^2", fmt6(sed * sed), fmt6(ak.op_norm), "<= s^2",
        ak.op_norm <= sed * sed * (1.0 + 1e-8) + 1e-9);
    double max_col = 0.0;
    for (std::size_t q = 0; q < k.cols; ++q) {
      double col = 0.0;
      for (std::size_t p = 0; p < k.rows; ++p) col += k.at(p, q);
      max_col = std::max(max_col, col);
    }
    add("max column sum of K", fmt6(sed * sed), fmt6(max_col), "<= s^2",
        max_col <= sed * sed + 1e-9);

    // Monte-Carlo mean of <b, K b> against M*s*sigma^2.
    rng::Stream gram_stream(rng::derive_key(o.seed, "audit-gram"));
    double mean = 0.0, m2 = 0.0;
    for (std::size_t t = 0; t < o.trials; ++t) {
      const Vec b = rng::sample_generator(spec, n, gram_stream);
      const double q = quad_form(k, b);
      const double delta = q - mean;
      mean += delta / static_cast<double>(t + 1);
      m2 += delta * (q - mean);
    }
    const double formula = md * sed * sigma * sigma;
    const double sd = o.trials > 1 ? std::sqrt(m2 / static_cast<double>(o.trials - 1)) : 0.0;
    const double stderr_mean = sd / std::sqrt(static_cast<double>(o.trials));
    bool pass;
    double z = 0.0;
    if (stderr_mean > 0.0) {
      z = (mean - formula) / stderr_mean;
      pass = std::fabs(z) <= 4.0;
    } else {
      pass = std::fabs(mean - formula) <= 1e-9 * (1.0 + std::fabs(formula));
    }
    add("E[gram] = M*s*sigma^2", fmt6(formula), fmt6(mean) + " (z " + fmt6(z) + ")",
        "|z| <= 4", pass);
  }

  // Margin decomposition: the built certificate's margins match
  // -(rho*mu*M + rho*x1 + x2 - x3/M) coordinatewise.
  {
    rng::Stream op_stream(rng::derive_key(o.seed, "audit-operator"));
    Vec g = rng::sample_generator(spec, n, op_stream);
    const Vec g_copy = g;
    const ops::Operator aop(ops::Operator::Kind::circulant, n, std::move(g), theta, o.mu,
                            sigma, spec.subgauss_norm(), o.seed);
    const certs::DualCertificate cert = certs::build_certificate(aop, x0);
    double worst = 0.0;
    for (const std::size_t i : audited) {
      const proofs::XTerms t = proofs::x_terms(n, theta, support, i, g_copy);
      const double predicted = -(cert.rho * o.mu * md + cert.rho * t.x1 + t.x2 - t.x3 / md);
      worst = std::max(worst,
                       std::fabs(cert.margins[i] - predicted) / (1.0 + std::fabs(predicted)));
    }
    add("margin decomposition", "0", fmt6(worst), "<= 1e-9 rel", worst <= 1e-9);
  }

  // Expectation brackets for x3.
  if (!idx_on.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const std::size_t i : idx_on) {
      const double v = proofs::expected_x3(n, theta, support, i, sigma);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double a = md * sigma * sigma, b = sed * md * sigma * sigma;
    add("E[x3] on support", fmt6(lo) + ".." + fmt6(hi),
        "[" + fmt6(a) + ", " + fmt6(b) + "]", "bracketed", lo >= a - 1e-9 && hi <= b + 1e-9);
  }
  if (!idx_off.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const std::size_t i : idx_off) {
      const double v = proofs::expected_x3(n, theta, support, i, sigma);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double b = sed * md * sigma * sigma;
    add("E[x3] off support", fmt6(lo) + ".." + fmt6(hi), "[0, " + fmt6(b) + "]", "bracketed",
        lo >= -1e-9 && hi <= b + 1e-9);
  }

  // Concentration sweep: empirical means against the exact expectations.
  {
    proofs::SweepConfig sc;
    sc.n = n;
    sc.theta = theta;
    sc.support = support;
    sc.indices = audited;
    sc.ensemble = spec;
    sc.base_seed = rng::derive_key(o.seed, "audit-sweep");
    const std::vector<proofs::ExpectationReport> reps = proofs::concentration_sweep(sc, o.trials);

    auto within = [](const proofs::ExpectationReport& r) {
      if (r.degenerate)
        return std::fabs(r.empirical_mean - r.formula) <= 1e-8 * (1.0 + std::fabs(r.formula));
      return std::fabs(r.z_score) <= 4.0;
    };
    auto mean_row = [&](const char* label, const char* term, const std::vector<char>& klass) {
      std::size_t total = 0, ok = 0;
      const proofs::ExpectationReport* worst = nullptr;
      for (const proofs::ExpectationReport& r : reps) {
        if (r.term != term) continue;
        if (!klass.empty() && !klass[r.index]) continue;
        ++total;
        if (within(r)) ++ok;
        if (!worst || std::fabs(r.z_score) > std::fabs(worst->z_score)) worst = &r;
      }
      if (total == 0) return;
      const double frac = static_cast<double>(ok) / static_cast<double>(total);
      add(label, fmt6(worst->formula),
          fmt6(worst->empirical_mean) + " (worst z " + fmt6(worst->z_score) + ")",
          "|z| <= 4 for >= 95%", frac >= 0.95);
    };
    std::vector<char> off(n, 0);
    for (std::size_t i = 0; i < n; ++i) off[i] = !on[i];
    mean_row("E[x1] = 0", "x1", {});
    mean_row("E[x2] on support", "x2", std::vector<char>(on.begin(), on.end()));
    mean_row("E[x2] off support", "x2", off);
    mean_row("E[x3] mean, on support", "x3", std::vector<char>(on.begin(), on.end()));
    mean_row("E[x3] mean, off support", "x3", off);

    // x1 is a sum of M independent centered entries, so its variance is
    // exactly M*sigma^2.
    double worst_var_rel = 0.0;
    double worst_tail2 = 0.0, worst_tail3 = 0.0;
    for (const proofs::ExpectationReport& r : reps) {
      if (r.term != "x1" || r.degenerate) continue;
      const double var_emp =
          r.std_error * r.std_error * static_cast<double>(r.trials);
      worst_var_rel = std::max(worst_var_rel,
                               std::fabs(var_emp - md * sigma * sigma) / (md * sigma * sigma));
      worst_tail2 = std::max(worst_tail2, r.tail2_freq);
      worst_tail3 = std::max(worst_tail3, r.tail3_freq);
    }
    // Sample variance of a size-T draw has relative standard error at most
    // sqrt(2/T) here (x1's kurtosis never exceeds the gaussian 3), so gate
    // the worst relative deviation at four of those.
    const double var_gate = 4.0 * std::sqrt(2.0 / static_cast<double>(o.trials));
    add("var[x1] = M*sigma^2", fmt6(md * sigma * sigma), fmt6(worst_var_rel) + " rel dev",
        "<= " + fmt6(var_gate), worst_var_rel <= var_gate);
    add("x1 tail freq (2sd, 3sd)", "~0.05, ~0.01",
        fmt6(worst_tail2) + ", " + fmt6(worst_tail3), "<= 0.15, <= 0.05",
        worst_tail2 <= 0.15 && worst_tail3 <= 0.05);
  }

  bool all_pass = true;
  std::printf("%-28s %-22s %-30s %-20s %s\n", "quantity", "formula", "empirical", "bound",
              "result");
  for (const AuditRow& r : rows) {
    all_pass = all_pass && r.pass;
    std::printf("%-28s %-22s %-30s %-20s %s\n", r.name.c_str(), r.formula.c_str(),
                r.empirical.c_str(), r.bound.c_str(), r.pass ? "pass" : "FAIL");
  }
  std::printf("\n%s\n", all_pass ? "all audits passed" : "AUDIT FAILURES PRESENT");
  return all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary sparse recovery from biased partial circulant and Toeplitz measurements"};
  app.require_subcommand(1);

  GenOpts gen;
  CLI::App* cgen = app.add_subcommand("gen", "sample an operator, signal, and measurements");
  cgen->add_option("--n", gen.n, "ambient dimension")->capture_default_str();
  cgen->add_option("--m", gen.m, "number of measurement rows")->required();
  cgen->add_option("--s", gen.s, "signal sparsity")->required();
  cgen->add_option("--trial", gen.trial, "trial label inside the seed derivation")
      ->capture_default_str();
  cgen->add_option("--kind", gen.kind, "circulant or toeplitz")->capture_default_str();
  cgen->add_option("--ensemble", gen.ensemble, "gaussian, rademacher, or bernoulli01")
      ->capture_default_str();
  cgen->add_option("--param", gen.param, "ensemble parameter (ignored for bernoulli01)")
      ->capture_default_str();
  cgen->add_option("--mu", gen.mu, "total additive bias of the operator")->capture_default_str();
  cgen->add_option("--eta", gen.eta, "noise norm added to y")->capture_default_str();
  cgen->add_option("--seed", gen.seed, "base seed")->capture_default_str();
  cgen->add_option("--op", gen.op_path, "operator manifest output path")->capture_default_str();
  cgen->add_option("--signal", gen.signal_path, "signal output path")->capture_default_str();
  cgen->add_option("--y", gen.y_path, "measurement output path")->capture_default_str();

  SolveOpts solve;
  CLI::App* csolve = app.add_subcommand("solve", "run one recovery program on an instance");
  csolve->add_option("--op", solve.op_path, "operator manifest path")->required();
  csolve->add_option("--y", solve.y_path, "measurement vector path")->required();
  csolve->add_option("--program", solve.program, "bp, ls, or bp+")->capture_default_str();
  csolve->add_option("--tol", solve.tol, "feasibility and optimality tolerance")
      ->capture_default_str();
  csolve->add_option("--max-iter", solve.max_iter, "iteration cap")->capture_default_str();
  csolve->add_option("--out", solve.out_path, "write x_star to this path");

  CertifyOpts certify;
  CLI::App* ccert = app.add_subcommand("certify", "build and audit the dual certificate");
  ccert->add_option("--op", certify.op_path, "operator manifest path")->required();
  ccert->add_option("--signal", certify.signal_path, "binary signal path")->required();
  ccert->add_option("--eta", certify.etas, "noise levels for the radius table")
      ->delimiter(',');
  ccert->add_flag("--search", certify.search, "also search a certificate by linear program");

  PhaseOpts phase;
  CLI::App* cphase = app.add_subcommand("phase", "run a seeded phase-transition sweep");
  cphase->add_option("--config", phase.config_path, "key=value config file");
  cphase->add_option("--set", phase.sets, "override a config key (key=value, repeatable)");
  cphase->add_option("--csv", phase.csv_path, "CSV output path (default stdout)");
  cphase->add_option("--pgm-prefix", phase.pgm_prefix,
                     "write <prefix><program>.pgm heatmaps");
  cphase->add_option("--manifest-out", phase.manifest_path, "write the resolved run manifest");

  ProofOpts proof;
  CLI::App* cproof = app.add_subcommand("validate-proof",
                                        "audit representers, norms, and expectations");
  cproof->add_option("--n", proof.n, "ambient dimension")->capture_default_str();
  cproof->add_option("--m", proof.m, "number of selected rows")->capture_default_str();
  cproof->add_option("--s", proof.s, "support size")->capture_default_str();
  cproof->add_option("--ensemble", proof.ensemble, "gaussian, rademacher, or bernoulli01")
      ->capture_default_str();
  cproof->add_option("--param", proof.param, "ensemble parameter")->capture_default_str();
  cproof->add_option("--mu", proof.mu, "bias used by the margin decomposition check")
      ->capture_default_str();
  cproof->add_option("--seed", proof.seed, "base seed")->capture_default_str();
  cproof->add_option("--trials", proof.trials, "Monte-Carlo draws (>= 1000)")
      ->capture_default_str();
  cproof->add_option("--indices", proof.indices, "audited coordinate count")
      ->capture_default_str();
  cproof->add_option("--draws", proof.draws, "exactness test draws")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cgen)) return run_gen(gen);
    if (app.got_subcommand(csolve)) return run_solve(solve);
    if (app.got_subcommand(ccert)) return run_certify(certify);
    if (app.got_subcommand(cphase)) return run_phase(phase);
    if (app.got_subcommand(cproof)) return run_validate_proof(proof);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
