// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// if any criterion fails. Criteria 14-15 drive the installed CLI binary.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lrf/analytics.hpp"
#include "lrf/equilibria.hpp"
#include "test_support.hpp"

using namespace lrft;
namespace fs = std::filesystem;

#ifndef LRF_CLI_PATH
#define LRF_CLI_PATH "lrf"
#endif

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what
            << std::endl;
  if (!ok) ++failures;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LRF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<double>> read_csv(const fs::path& path,
                                          std::vector<std::string>& columns) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  std::istringstream header(line);
  std::string cell;
  columns.clear();
  while (std::getline(header, cell, ',')) columns.push_back(cell);
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

// --- criterion 1: equilibrium census for diag(3,2,1) ---
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  Vector l1(3);
  l1 << 3, 2, 1;
  const SpectralTarget t = target_from_spectrum(l1, Vector(0));
  const std::vector<EquilibriumPoint> pts = enumerate_equilibria(t);
  bool ok = pts.size() == 8;
  for (const EquilibriumPoint& pt : pts) {
    ok = ok && verify_equilibrium(pt.p_bar, t) <= 1e-10;
    if (pt.label == EquilibriumLabel::GLOBAL_MIN) continue;
    double smallest_missing = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 3; ++i) {
      if (std::find(pt.subset.begin(), pt.subset.end(), i) == pt.subset.end()) {
        smallest_missing = std::min(smallest_missing, t.lambda1[i]);
      }
    }
    const LinearizationReport lin = linearize(pt.p_bar, t);
    ok = ok && lin.max_eigenvalue >= 2.0 * smallest_missing - 1e-9;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && elapsed < 1.0;
  report(1, ok, "equilibrium census, residuals, instability lower bounds (<1 s)");
}

// --- criterion 2: isolation gap over random spectra ---
void criterion_2() {
  CounterRng rng(101);
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index rs = 1 + static_cast<Eigen::Index>(rng.next_u64() % 6);
    Vector l1(rs);
    bool distinct = false;
    while (!distinct) {
      for (Eigen::Index i = 0; i < rs; ++i) l1[i] = 0.1 + 5.0 * rng.next_uniform();
      std::sort(l1.data(), l1.data() + rs, std::greater<double>());
      distinct = true;
      for (Eigen::Index i = 0; i + 1 < rs; ++i) {
        if (l1[i] - l1[i + 1] <= 1e-3) distinct = false;
      }
    }
    const SpectralTarget t = target_from_spectrum(l1, Vector::Zero(2));
    ok = ok && equilibrium_gap(t) >= t.lambda_min_pos() - 1e-10;
  }
  report(2, ok, "optimum isolation gap >= smallest positive eigenvalue, 50 spectra");
}

// --- criterion 3: representation consistency ---
void criterion_3() {
  const SpectralTarget t = bench_target();
  CounterRng rng(7);
  const FactorState z0{0.1 * rng.normal_matrix(10, 8), 4};
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  FlowSpec zf{Representation::Z_FLOW, t, 8};
  FlowSpec pl{Representation::P_LIFTED, t};
  const Trajectory zt = integrate(zf, zf.pack_factor(z0.z), cfg);
  const Trajectory pt = integrate(pl, pl.pack_full(symmetrize(z0.z * z0.z.transpose())), cfg);
  double worst = 0.0;
  for (size_t i = 0; i < zt.times.size(); ++i) {
    const Matrix z = zf.unpack_factor(zt.states[i]);
    worst = std::max(worst, (pl.unpack_full(pt.states[i]) - z * z.transpose()).norm());
  }
  report(3, worst <= 1e-6, "factor and lifted integrations agree to 1e-6 over t <= 10");
}

// --- criteria 4 and 5: descent and the noise envelope on 20 random starts ---
void criteria_4_5() {
  const SpectralTarget t = bench_target();
  FlowSpec spec{Representation::P_BLOCKS, t};
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const double tau = 0.1;
  bool descent_ok = true;
  bool envelope_ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CounterRng rng(seed);
    const FactorState z0{0.6 * rng.normal_matrix(10, 8), 4};
    const Trajectory traj = integrate(spec, spec.pack_blocks(lift(z0)), cfg);

    double prev = std::numeric_limits<double>::infinity();
    size_t anchor = 0;
    while (anchor + 1 < traj.times.size() && traj.times[anchor] < tau) ++anchor;
    double vn_anchor = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
      const LiftedState s = spec.unpack_blocks(traj.states[i]);
      const double vf = lyapunov_vf(s.assemble(), t);
      if (vf > prev + 1e-9) descent_ok = false;
      prev = vf;
      const double vn = spectral_norm(s.p2);
      if (i == anchor) vn_anchor = vn;
      if (i >= anchor &&
          vn > 2.0 * vn_anchor / (1.0 + traj.times[i] - traj.times[anchor]) + 1e-9) {
        envelope_ok = false;
      }
    }
    // the literal envelope is the provable one only at O(1) noise anchors
    if (vn_anchor < 0.25) envelope_ok = false;
  }
  report(4, descent_ok, "energy non-increasing along 20 random PSD trajectories");
  report(5, envelope_ok, "noise norm under 2 V(tau)/(1 + t - tau) from tau = 0.1");
}

// --- criterion 6: the slow invariant slice ---
void criterion_6() {
  const SpectralTarget t = bench_target();
  InitSpec init;
  init.kind = InitKind::SHARPNESS_MANIFOLD;
  init.seed = 3;
  const FactorState z0 = make_initial(init, t, 8);
  FlowSpec spec{Representation::P_BLOCKS, t};
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = integrate(spec, spec.pack_blocks(lift(z0)), cfg);
  const Vector mu0 = sym_eig(lift(z0).p2).values;
  bool ok = true;
  std::vector<double> p2norm(traj.times.size());
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const LiftedState s = spec.unpack_blocks(traj.states[i]);
    ok = ok && (s.p1 - t.lambda1_matrix()).cwiseAbs().maxCoeff() <= 1e-8;
    ok = ok && s.p0.cwiseAbs().maxCoeff() <= 1e-8;
    const Vector mu = sym_eig(s.p2).values;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
      ok = ok && std::abs(mu[j] - mu0[j] / (1.0 + 2.0 * mu0[j] * traj.times[i])) <= 1e-6;
    }
    p2norm[i] = spectral_norm(s.p2);
  }
  const RateEstimate fit =
      estimate_rate(traj.times, p2norm, DecayModel::POWER_LAW, 5.0, 20.0);
  ok = ok && std::abs(fit.slope + 1.0) <= 0.02;
  report(6, ok, "slice invariance, per-eigenvalue closed form, -1 power law on [5,20]");
}

// --- criterion 7: transformed-coordinate suite ---
void criterion_7() {
  const SpectralTarget t = bench_target();
  CounterRng rng(4);
  const FactorState z0{0.1 * rng.normal_matrix(10, 8), 4};
  FlowSpec hc{Representation::H_CASCADE, t};
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory htraj = integrate(hc, hc.pack_cascade(to_cascade(lift(z0))), cfg);

  bool ok = true;
  // closed form vs integration over t <= 5
  std::vector<double> times;
  std::vector<Matrix> h0s, h1s;
  for (size_t i = 0; i < htraj.times.size() && htraj.times[i] <= 5.0 + 1e-12; ++i) {
    const CascadeState s = hc.unpack_cascade(htraj.states[i]);
    times.push_back(htraj.times[i]);
    h0s.push_back(s.h0);
    h1s.push_back(s.h1);
  }
  for (size_t m = 2; m < times.size(); ++m) {
    const std::vector<double> pt(times.begin(), times.begin() + m + 1);
    const std::vector<Matrix> ph(h0s.begin(), h0s.begin() + m + 1);
    const Matrix predicted = h1_variation_of_constants(t, h1s.front(), pt, ph);
    ok = ok && spectral_norm(predicted - h1s[m]) <= 1e-6;
  }

  const CascadeBounds cb = cascade_bounds(htraj, t, 1.0, 1e-7);
  for (const BoundReport& r : cb.reports) ok = ok && r.satisfied;

  std::vector<double> h1m(htraj.times.size()), h0m(htraj.times.size());
  const Matrix lam1_inv = t.lambda1.cwiseInverse().asDiagonal();
  for (size_t i = 0; i < htraj.times.size(); ++i) {
    const CascadeState s = hc.unpack_cascade(htraj.states[i]);
    h1m[i] = spectral_norm(s.h1 - lam1_inv);
    h0m[i] = spectral_norm(s.h0);
  }
  const RateEstimate r1 = estimate_rate_tail(htraj.times, h1m, DecayModel::EXPONENTIAL);
  const RateEstimate r0 = estimate_rate_tail(htraj.times, h0m, DecayModel::EXPONENTIAL);
  ok = ok && std::abs(r1.slope + 2.0) <= 0.1 && r1.r_squared >= 0.99;
  ok = ok && std::abs(r0.slope + 1.0) <= 0.05 && r0.r_squared >= 0.99;
  report(7, ok, "closed-form match, three envelopes, fitted rates -2 and -1");
}

// --- criterion 8: global block bounds and tail rates ---
void criterion_8() {
  const SpectralTarget t = bench_target();
  CounterRng rng(4);
  const FactorState z0{0.1 * rng.normal_matrix(10, 8), 4};
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = integrate_blocks(t, z0, cfg);
  const std::vector<BoundReport> reports = signal_bounds(traj, t, 1.0, 1e-7);
  bool ok = std::isfinite(reports[0].valid_from);
  for (const BoundReport& r : reports) ok = ok && r.satisfied;

  FlowSpec spec{Representation::P_BLOCKS, t};
  std::vector<double> p1m(traj.times.size()), p0m(traj.times.size());
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const LiftedState s = spec.unpack_blocks(traj.states[i]);
    p1m[i] = spectral_norm(s.p1 - t.lambda1_matrix());
    p0m[i] = spectral_norm(s.p0);
  }
  const RateEstimate r1 = estimate_rate_tail(traj.times, p1m, DecayModel::EXPONENTIAL);
  const RateEstimate r0 = estimate_rate_tail(traj.times, p0m, DecayModel::EXPONENTIAL);
  ok = ok && std::abs(r1.slope + 2.0) <= 0.1 && std::abs(r0.slope + 1.0) <= 0.05;
  report(8, ok, "signal/cross envelopes past the validity threshold, tail rates -2/-1");
}

// --- criterion 9: exact-rank closed form and the interior envelope peak ---
void criterion_9() {
  Vector l1(4);
  l1 << 4, 3, 2, 1;
  bool ok = true;
  for (int variant = 0; variant < 2; ++variant) {
    Vector l2(2);
    if (variant == 0) {
      l2 << 0.5, 0.2;
    } else {
      l2.setZero();  // Psi(t) = t I path
    }
    const SpectralTarget t = target_from_spectrum(l1, l2);
    CounterRng rng(21 + static_cast<std::uint64_t>(variant));
    const FactorState z0{0.5 * rng.normal_matrix(6, 4), 4};
    const CascadeState h0 = to_cascade(lift(z0));
    FlowSpec hc{Representation::H_CASCADE, t};
    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    const Trajectory htraj = integrate(hc, hc.pack_cascade(h0), cfg);
    for (size_t i = 0; i < htraj.times.size(); ++i) {
      const CascadeState exact = exact_full_rank_solution(htraj.times[i], t, h0.h1, h0.h0);
      const CascadeState got = hc.unpack_cascade(htraj.states[i]);
      ok = ok && spectral_norm(exact.h1 - got.h1) <= 1e-8;
      ok = ok && spectral_norm(exact.h0 - got.h0) <= 1e-8;
    }
  }
  // small deviation, large coupling: interior maximum of the envelope
  const SpectralTarget t = bench_target();
  CascadeState bump;
  bump.h1 = Matrix(t.lambda1.cwiseInverse().asDiagonal()) + 1e-6 * Matrix::Identity(4, 4);
  CounterRng rng(23);
  bump.h0 = rng.normal_matrix(4, 6);
  bump.h0 *= 5.0 / spectral_norm(bump.h0);
  bump.h2 = Matrix::Zero(6, 6);
  FlowSpec hc{Representation::H_CASCADE, t};
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  const CascadeBounds cb = cascade_bounds(integrate(hc, hc.pack_cascade(bump), cfg), t);
  ok = ok && cb.h1_bound_interior_max && cb.h1_bound_argmax > 0.0;
  report(9, ok, "exact-rank closed form to 1e-8; interior envelope peak detected");
}

// --- criterion 10: exact-rank noise decay rate ---
void criterion_10() {
  const SpectralTarget t = bench_target();
  CounterRng rng(31);
  const Matrix z0 = 0.3 * rng.normal_matrix(10, 4);
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  FlowSpec spec{Representation::Z_FLOW, t, 4};
  const Trajectory traj = integrate(spec, spec.pack_factor(z0), cfg);
  std::vector<double> p2m(traj.times.size());
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const Matrix z2 = spec.unpack_factor(traj.states[i]).bottomRows(6);
    p2m[i] = spectral_norm(z2 * z2.transpose());
  }
  const RateEstimate fit = estimate_rate_tail(traj.times, p2m, DecayModel::EXPONENTIAL);
  report(10, std::abs(fit.slope + 2.0) <= 0.1 && fit.r_squared >= 0.99,
         "noise norm decays exponentially at -2 for exact rank");
}

// --- criterion 11: recursive decomposition identities and rate table ---
void criterion_11() {
  const SpectralTarget t = bench_target();
  const DistinctGrouping g = make_grouping(t.lambda1);
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Matrix p = random_psd(10, seed) + 0.2 * Matrix::Identity(10, 10);
    const ExpandedState ex = expanded_decompose(p, g);
    double det_product = 1.0;
    for (const ExpandedLevel& lv : ex.levels) det_product *= 1.0 / lv.h1.determinant();
    const double det_p1 = p.topLeftCorner(4, 4).determinant();
    ok = ok && std::abs(det_product - det_p1) <= 1e-8 * std::abs(det_p1);
    ok = ok && (ex.h2 - schur_complement(p, 4)).cwiseAbs().maxCoeff() <= 1e-9;
  }

  // per-level exponents on an integrated trajectory (small start keeps the
  // couplings negligible inside every fit window)
  CounterRng rng(40);
  const Matrix z = 1e-10 * rng.normal_matrix(10, 8);
  FlowSpec spec{Representation::H_EXPANDED, t, 0, g};
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  cfg.record_every = 10;
  const Trajectory traj = integrate(
      spec, spec.pack_expanded(expanded_decompose(symmetrize(z * z.transpose()), g)), cfg);
  const std::vector<ExpandedRateEntry> table = expanded_rate_table(traj, g, t);
  for (const ExpandedRateEntry& e : table) {
    if (e.name == "tail_h2") continue;  // covered by the separate slow-slice run
    ok = ok && e.applicable &&
         std::abs(e.estimate.slope - e.theory_slope) <= 0.05 * std::abs(e.theory_slope);
  }
  report(11, ok, "determinant/tail identities on 100 draws; per-level exponents within 5%");
}

// --- criterion 12: inverse perturbation bound on 200 pairs ---
void criterion_12() {
  CounterRng rng(61);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix gm = rng.normal_matrix(5, 5);
    const Matrix a = symmetrize(gm * gm.transpose()) + 0.3 * Matrix::Identity(5, 5);
    const double s = min_eigenvalue(a);
    Matrix e = symmetrize(rng.normal_matrix(5, 5));
    e *= (0.1 + 0.8 * rng.next_uniform()) * s / spectral_norm(e);
    const InverseProximity prox = inverse_proximity(a, a + e);
    ok = ok && prox.actual <= prox.bound + 1e-12;
  }
  report(12, ok, "inverse-difference norm within its bound on 200 random pairs");
}

// --- criterion 13: the rank-deficient invariant manifold ---
void criterion_13() {
  const SpectralTarget t = bench_target();
  CounterRng rng(9);
  Matrix z = 0.4 * rng.normal_matrix(10, 8);
  z.row(2).setZero();
  FlowSpec spec{Representation::P_BLOCKS, t};
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  const Trajectory traj = integrate(spec, spec.pack_blocks(lift(FactorState{z, 4})), cfg);
  bool ok = check_invariant_nullspace(traj, spec, Vector::Unit(4, 2)) <= 1e-8;
  for (const Vector& state : traj.states) {
    const LiftedState s = spec.unpack_blocks(state);
    ok = ok && spectral_norm(s.p1 - t.lambda1_matrix()) >= 0.5 * t.lambda_min_pos();
  }
  report(13, ok, "null direction preserved; no recovery toward the optimum");
}

// --- criteria 14 and 15: end-to-end CLI reproduction and negative controls ---
std::string benchmark_config_json(const std::string& run_id, const std::string& init_body,
                                  double bound_scale = 1.0) {
  std::ostringstream out;
  out << "{\n  \"run_id\": \"" << run_id << "\",\n"
      << "  \"target\": {\"lambda1\": [4, 3, 2, 1], \"lambda2\": [0, 0, 0, 0, 0, 0]},\n"
      << "  \"rank\": 8,\n  \"init\": " << init_body << ",\n"
      << "  \"integrator\": {\"step\": 0.001, \"t_end\": 20.0, \"record_every\": 100},\n"
      << "  \"representations\": [\"P_BLOCKS\"],\n"
      << "  \"bound_scale\": " << bound_scale << "\n}\n";
  return out.str();
}

void criteria_14_15() {
  const fs::path dir = fs::temp_directory_path() / "lrf_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  struct Run {
    std::string id;
    std::string init;
  };
  const std::vector<Run> runs = {
      {"near_empty", R"({"kind": "near_equilibrium", "subset": [], "radius": 0.01, "seed": 1})"},
      {"near_one", R"({"kind": "near_equilibrium", "subset": [0], "radius": 0.01, "seed": 2})"},
      {"near_two", R"({"kind": "near_equilibrium", "subset": [0, 1], "radius": 0.01, "seed": 3})"},
      {"near_three",
       R"({"kind": "near_equilibrium", "subset": [0, 1, 2], "radius": 0.01, "seed": 4})"},
      {"gauss", R"({"kind": "gaussian", "scale": 0.1, "seed": 5})"},
  };

  bool ok14 = true;
  for (const Run& run : runs) {
    const fs::path cfg_path = dir / (run.id + ".json");
    std::ofstream(cfg_path) << benchmark_config_json(run.id, run.init);
    ok14 = ok14 && run_cli("simulate --config " + cfg_path.string() + " --out " +
                           dir.string()) == 0;
    std::vector<std::string> columns;
    const auto rows = read_csv(dir / (run.id + "_P_BLOCKS.csv"), columns);
    if (rows.empty() || columns.size() != 6) {
      ok14 = false;
      continue;
    }
    // log-scale monotone decay of the signal metrics once past the transient
    for (size_t col : {1u, 2u}) {
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& row : rows) {
        if (row[0] < 8.0) continue;
        if (row[col] > prev + 1e-9) ok14 = false;
        prev = row[col];
      }
      const auto at8 = std::find_if(rows.begin(), rows.end(),
                                    [](const auto& r) { return r[0] >= 8.0; });
      if (at8 != rows.end() && rows.back()[col] > 0.5 * (*at8)[col] &&
          (*at8)[col] > 1e-12) {
        ok14 = false;  // not actually decaying in log scale
      }
    }
    ok14 = ok14 && run_cli("verify --config " + cfg_path.string() + " --out " +
                           dir.string()) == 0;
  }
  // the slow panel follows a sublinear power law on the over-parameterized run
  {
    std::vector<std::string> columns;
    const auto rows = read_csv(dir / "gauss_P_BLOCKS.csv", columns);
    std::vector<double> times, p2;
    for (const auto& row : rows) {
      times.push_back(row[0]);
      p2.push_back(row[3]);
    }
    if (times.empty()) {
      ok14 = false;
    } else {
      const RateEstimate fit = estimate_rate(times, p2, DecayModel::POWER_LAW, 5.0, 20.0);
      ok14 = ok14 && fit.slope < -0.2 && fit.slope > -1.1 && fit.r_squared >= 0.9;
    }
  }
  report(14, ok14, "five-start reproduction: CSV shapes and a clean verification pass");

  // negative controls: every envelope family detects a halved constant
  bool ok15 = true;
  {
    const SpectralTarget t = bench_target();
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    // signal envelope: approach the optimum from above with a flat spectrum,
    // where the deviation stays within a factor < 2 of the bound
    Vector one(1);
    one << 1;
    const SpectralTarget t1 = target_from_spectrum(one, Vector::Zero(2));
    Matrix zover = Matrix::Zero(3, 1);
    zover(0, 0) = std::sqrt(1.5);
    const Trajectory over = integrate_blocks(t1, FactorState{zover, 1}, cfg);
    ok15 = ok15 && signal_bounds(over, t1)[0].satisfied;
    ok15 = ok15 && !signal_bounds(over, t1, 0.5)[0].satisfied;
    // noise envelope: a small-anchor slice trajectory tracks the exact
    // comparison solution
    Matrix p2 = Matrix::Zero(6, 6);
    p2(0, 0) = 0.4;
    FlowSpec pb{Representation::P_BLOCKS, t};
    const Trajectory small =
        integrate(pb, pb.pack_blocks(LiftedState{t.lambda1_matrix(), Matrix::Zero(4, 6), p2}),
                  cfg);
    ok15 = ok15 && noise_bounds(small, t, 0.1)[0].satisfied;
    ok15 = ok15 && !noise_bounds(small, t, 0.1, 0.5)[0].satisfied;
    // the transformed-coordinate envelopes inherit the same tightness
    FlowSpec hc{Representation::H_CASCADE, t1};
    const CascadeState hover = to_cascade(LiftedState{
        Matrix::Constant(1, 1, 1.5), Matrix::Zero(1, 2), Matrix::Zero(2, 2)});
    const Trajectory ht = integrate(hc, hc.pack_cascade(hover), cfg);
    ok15 = ok15 && cascade_bounds(ht, t1).reports[0].satisfied;
    const CascadeBounds cb = cascade_bounds(ht, t1, 0.5);
    bool broke = false;
    for (const BoundReport& r : cb.reports) broke = broke || !r.satisfied;
    ok15 = ok15 && broke;
  }
  const fs::path tight_path = dir / "tight.json";
  std::ofstream(tight_path) << benchmark_config_json(
      "tight", R"({"kind": "gaussian", "scale": 0.1, "seed": 5})", 0.5);
  ok15 = ok15 &&
         run_cli("verify --config " + tight_path.string() + " --out " + dir.string()) != 0;
  report(15, ok15, "halved constants are detected by every envelope family and the CLI");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  criteria_14_15();
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
