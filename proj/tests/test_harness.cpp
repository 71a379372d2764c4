#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "binsense/harness.hpp"
#include "binsense/io.hpp"

using binsense::Vec;
namespace harness = binsense::harness;
namespace io = binsense::io;
namespace ops = binsense::ops;
namespace rng = binsense::rng;

namespace {

harness::ExperimentConfig tiny_config() {
  harness::ExperimentConfig cfg;
  cfg.n = 20;
  cfg.s_values = {2, 4};
  cfg.m_values = {8, 14};
  cfg.trials = 3;
  cfg.mu = 1.0;
  cfg.base_seed = 5;
  cfg.run_bpp = true;
  cfg.threads = 1;
  return cfg;
}

std::string trial_digest(const harness::TrialResult& t) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%zu|%zu|%zu|%llu|%llu|%d|%.17g|%d|%.17g|%d|%.17g|%d|%.17g",
                t.s, t.m, t.trial, static_cast<unsigned long long>(t.op_digest),
                static_cast<unsigned long long>(t.signal_digest), int(t.bp.success), t.bp.err,
                int(t.ls.success), t.ls.err, int(t.bpp.success), t.bpp.err,
                int(t.cert_verified), t.cert_t_actual);
  return buf;
}

} // namespace

TEST_CASE("a trial is a pure function of its coordinates") {
  const auto cfg = tiny_config();
  const auto a = harness::run_trial(cfg, 2, 8, 1);
  const auto b = harness::run_trial(cfg, 2, 8, 1);
  CHECK(trial_digest(a) == trial_digest(b));

  const auto c = harness::run_trial(cfg, 2, 8, 2);
  CHECK(a.op_digest != c.op_digest);  // fresh operator per trial
  CHECK(a.s == 2);
  CHECK(a.m == 8);

  // Requested programs all ran.
  CHECK(a.bp.ran);
  CHECK(a.ls.ran);
  CHECK(a.bpp.ran);
  CHECK(a.error.empty());
}

TEST_CASE("trial coordinates are validated") {
  const auto cfg = tiny_config();
  CHECK_THROWS(harness::run_trial(cfg, 21, 8, 0));  // s > n
  CHECK_THROWS(harness::run_trial(cfg, 2, 0, 0));
  CHECK_THROWS(harness::run_trial(cfg, 2, 21, 0));  // m > n
}

TEST_CASE("grids are identical for any thread count") {
  auto cfg = tiny_config();
  cfg.threads = 1;
  const auto serial = harness::run_phase_grid(cfg);
  cfg.threads = 4;
  const auto parallel = harness::run_phase_grid(cfg);
  CHECK(harness::csv_from_grid(serial) == harness::csv_from_grid(parallel));
  REQUIRE(serial.cells.size() == 4);

  // Cells are s-major with m ascending.
  CHECK(serial.cells[0].s == 2);
  CHECK(serial.cells[0].m == 8);
  CHECK(serial.cells[1].s == 2);
  CHECK(serial.cells[1].m == 14);
  CHECK(serial.cells[2].s == 4);

  // Lookup helper agrees with the layout.
  REQUIRE(serial.cell(4, 14) != nullptr);
  CHECK(serial.cell(4, 14) == &serial.cells[3]);
  CHECK(serial.cell(3, 14) == nullptr);

  // A well-conditioned cell (m = 14 of n = 20) should mostly succeed.
  CHECK(serial.cell(2, 14)->success_bp == 3);
}

TEST_CASE("grid validation happens before any worker starts") {
  auto cfg = tiny_config();
  cfg.s_values = {25};
  CHECK_THROWS(harness::run_phase_grid(cfg));
  cfg = tiny_config();
  cfg.m_values = {0};
  CHECK_THROWS(harness::run_phase_grid(cfg));
  cfg = tiny_config();
  cfg.trials = 0;
  CHECK_THROWS(harness::run_phase_grid(cfg));
}

TEST_CASE("csv output is byte-stable and fully described by its header") {
  harness::PhaseGrid grid;
  grid.config = tiny_config();
  harness::PhaseCell cell;
  cell.s = 2;
  cell.m = 8;
  cell.trials = 4;
  cell.success_bp = 3;
  cell.success_ls = 2;
  cell.success_bpp = 1;
  cell.cert_verified = 2;
  cell.mean_err_bp = 0.125;
  cell.mean_err_ls = 1.0 / 3.0;
  grid.cells.push_back(cell);

  const std::string csv = harness::csv_from_grid(grid);
  const std::string expect =
      "s,M,trials,success_bp,success_ls,success_bpplus,cert_rate,mean_err_bp,mean_err_ls\n"
      "2,8,4,0.75,0.5,0.25,0.5,0.125,0.33333333333333331\n";
  CHECK(csv == expect);

  harness::PhaseGrid empty;
  empty.config = tiny_config();
  CHECK(harness::csv_from_grid(empty) ==
        "s,M,trials,success_bp,success_ls,success_bpplus,cert_rate,mean_err_bp,mean_err_ls\n");
}

TEST_CASE("pgm heatmaps put the origin bottom-left") {
  harness::PhaseGrid grid;
  grid.config = tiny_config();
  grid.config.s_values = {1, 2};
  grid.config.m_values = {5, 10};
  for (const std::size_t s : {1u, 2u})
    for (const std::size_t m : {5u, 10u}) {
      harness::PhaseCell cell;
      cell.s = s;
      cell.m = m;
      cell.trials = 2;
      // Rates: (1,5) -> 0, (1,10) -> 1, (2,5) -> 0.5, (2,10) -> 0.5.
      cell.success_bp = (s == 1) ? (m == 10 ? 2 : 0) : 1;
      grid.cells.push_back(cell);
    }

  const auto tmp = std::filesystem::temp_directory_path() / "binsense_harness.pgm";
  harness::write_pgm(grid, "bp", tmp.string());
  const std::string pgm = io::read_text_file(tmp.string());
  std::remove(tmp.string().c_str());

  // 2x2 image; top row is the largest m. Pixels: row m=10 -> (255, 128),
  // row m=5 -> (0, 128).
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 4);
  CHECK(pgm.compare(0, header.size(), header) == 0);
  const unsigned char* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  CHECK(px[0] == 255);
  CHECK(px[1] == 128);
  CHECK(px[2] == 0);
  CHECK(px[3] == 128);

  CHECK_THROWS(harness::write_pgm(grid, "nosuch", tmp.string()));
}

TEST_CASE("brute force classifies unique, multiple, and unsolvable instances") {
  // Identity-like operator: unique solution.
  Vec e0(6, 0.0);
  e0[0] = 1.0;
  std::vector<std::size_t> all(6);
  for (std::size_t i = 0; i < 6; ++i) all[i] = i;
  const ops::Operator ident = ops::make_circulant(e0, all, 0.0);
  const Vec y = {1.0, 0.0, 1.0, 1.0, 0.0, 0.0};
  const auto u = harness::brute_force_unique(ident, y);
  CHECK(u.verdict == harness::Uniqueness::unique);
  CHECK(u.count == 1);
  CHECK(u.witness.support == std::vector<std::size_t>{0, 2, 3});

  // A = [1 1]: y = 1 is hit by (1,0) and (0,1).
  const ops::Operator two = ops::make_circulant({1.0, 1.0}, {0}, 0.0);
  const auto mult = harness::brute_force_unique(two, {1.0});
  CHECK(mult.verdict == harness::Uniqueness::multiple);
  CHECK(mult.count == 2);

  // y = 0.5 is unreachable by binary vectors.
  const auto none = harness::brute_force_unique(two, {0.5});
  CHECK(none.verdict == harness::Uniqueness::none);
  CHECK(none.count == 0);
}

TEST_CASE("configs round trip through their manifest") {
  auto cfg = tiny_config();
  cfg.ensemble = rng::EnsembleSpec::rademacher(1.5);
  cfg.kind = ops::Operator::Kind::toeplitz;
  cfg.eta = 0.25;
  cfg.certify = false;
  cfg.solver.success_radius = 1e-3;
  const std::string manifest = harness::manifest_from_config(cfg);
  const auto back = harness::config_from_map(io::parse_key_values(manifest));
  CHECK(harness::manifest_from_config(back) == manifest);
  CHECK(back.n == cfg.n);
  CHECK(back.s_values == cfg.s_values);
  CHECK(back.m_values == cfg.m_values);
  CHECK(back.kind == cfg.kind);
  CHECK(back.ensemble.name() == "rademacher");
  CHECK(back.ensemble.param == 1.5);
  CHECK(back.eta == 0.25);
  CHECK(back.certify == false);
  CHECK(back.run_bpp == true);
  CHECK(back.solver.success_radius == 1e-3);
}

TEST_CASE("config parsing rejects unknown keys and bad programs") {
  std::map<std::string, std::string> kv = {
      {"n", "10"}, {"s_values", "1,2"}, {"m_values", "4"}};
  CHECK_NOTHROW(harness::config_from_map(kv));
  kv["frobnicate"] = "1";
  CHECK_THROWS(harness::config_from_map(kv));
  kv.erase("frobnicate");
  kv["programs"] = "bp+qp";
  CHECK_THROWS(harness::config_from_map(kv));
  kv["programs"] = "ls";
  const auto cfg = harness::config_from_map(kv);
  CHECK_FALSE(cfg.run_bp);
  CHECK(cfg.run_ls);
  CHECK_FALSE(cfg.run_bpp);
}

TEST_CASE("thread resolution respects the environment cap") {
  const char* old = std::getenv("BINSENSE_THREADS");
  const std::string saved = old ? old : "";

  setenv("BINSENSE_THREADS", "2", 1);
  CHECK(harness::resolve_threads(8) == 2);
  CHECK(harness::resolve_threads(1) == 1);
  // requested = 0 resolves to hardware concurrency, still under the cap.
  CHECK(harness::resolve_threads(0) >= 1);
  CHECK(harness::resolve_threads(0) <= 2);

  setenv("BINSENSE_THREADS", "0", 1);  // nonsense cap is ignored
  CHECK(harness::resolve_threads(3) == 3);

  if (old) {
    setenv("BINSENSE_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("BINSENSE_THREADS");
  }
}

TEST_CASE("noisy certified trials report a radius") {
  harness::ExperimentConfig cfg;
  cfg.n = 20;
  cfg.s_values = {1};
  cfg.m_values = {16};
  cfg.trials = 1;
  cfg.eta = 0.05;
  cfg.threads = 1;
  cfg.base_seed = 11;
  // Hunt for a trial whose analytic certificate verifies.
  for (std::size_t trial = 0; trial < 200; ++trial) {
    const auto t = harness::run_trial(cfg, 1, 16, trial);
    REQUIRE(t.noise_bound > 0.0);  // a-priori formula is always reported
    if (!t.cert_verified) continue;
    CHECK(t.cert_radius > 0.0);
    CHECK(t.cert_t_actual > 0.0);
    CHECK(t.cert_r > 0.0);
    return;
  }
  FAIL("no verified certificate in 200 trials");
}
