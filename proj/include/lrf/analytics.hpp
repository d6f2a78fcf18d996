#pragma once

#include <string>
#include <vector>

#include "lrf/model.hpp"
#include "lrf/trajectory.hpp"
#include "lrf/transforms.hpp"

// Closed-form solutions, convergence envelopes, and rate estimation used to
// certify trajectories against the theory.
namespace lrf {

// A named envelope check: observed[i] <= bound[i] + slack for t >= valid_from.
struct BoundReport {
  std::string name;
  std::vector<double> times;
  std::vector<double> observed;
  std::vector<double> bound;
  double valid_from = 0.0;  // +inf if the bound never becomes applicable
  bool satisfied = true;
  double max_violation = 0.0;  // max over applicable t of observed - bound
};

enum class DecayModel { EXPONENTIAL, POWER_LAW };

// Least-squares fit of log(value) against t (EXPONENTIAL) or log t
// (POWER_LAW) over [t_lo, t_hi].
struct RateEstimate {
  DecayModel model = DecayModel::EXPONENTIAL;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  Eigen::Index samples = 0;
};

// l(t) = (||P1^{-1}(0) - Lambda1^{-1}||_2 + 2t ||P1^{-1}(0) P0(0)||_2^2) e^{-2 lmin t}
double l_of_t(double t, const SpectralTarget& target, const Matrix& p1_0,
              const Matrix& p0_0);

// Envelopes for ||P1(t) - Lambda1||_2 and ||P0(t)||_2 along a P_BLOCKS
// trajectory; applicable from the first recorded t with l(t) <= 1/(2 lmax).
// bound_scale multiplies the envelopes (set < 1 for negative controls).
std::vector<BoundReport> signal_bounds(const Trajectory& traj, const SpectralTarget& target,
                                       double bound_scale = 1.0, double slack = 1e-7);

// V_N(t) = ||P2(t)||_2 <= 2 V_N(tau) / (1 + t - tau) for t >= tau, plus
// monotone non-increase of V_N itself.
std::vector<BoundReport> noise_bounds(const Trajectory& traj, const SpectralTarget& target,
                                      double tau, double bound_scale = 1.0,
                                      double slack = 1e-9);

// Variation-of-constants solution
//   H1(t) = Lambda1^{-1} + e^{-L1 t}(H1(0) - Lambda1^{-1})e^{-L1 t} + 2 Phi(t)
// with Phi integrated by composite Simpson over the recorded H0 samples
// (grid must be uniform and cover [0, t]; needs >= 3 samples).
Matrix h1_variation_of_constants(const SpectralTarget& target, const Matrix& h1_0,
                                 const std::vector<double>& times,
                                 const std::vector<Matrix>& h0_samples);

// Envelopes along an H_CASCADE trajectory:
//   ||H1(t) - Lambda1^{-1}||_2 <= (||H1(0) - Lambda1^{-1}||_2 + 2t||H0(0)||_2^2) e^{-2 lmin t}
//   ||H0(t)||_2 <= ||H0(0)||_2 e^{-lmin t}
//   ||H2(t)||_2 <= 2 ||H2(0)||_2 / (1 + t)
// Also flags whether the first envelope attains its max at an interior time.
struct CascadeBounds {
  std::vector<BoundReport> reports;
  bool h1_bound_interior_max = false;
  double h1_bound_argmax = 0.0;
};
CascadeBounds cascade_bounds(const Trajectory& traj, const SpectralTarget& target,
                             double bound_scale = 1.0, double slack = 1e-7);

// Exact solution for r = r*: H0(t) = e^{-L1 t} H0(0) e^{-L2 t} and
//   H1(t) - L1^{-1} = e^{-L1 t}(H1(0) - L1^{-1} + 2 H0(0) Psi(t) H0(0)') e^{-L1 t},
// Psi(t) = diag((1 - e^{-2 nu t}) / (2 nu)), entry t when nu = 0. H2 == 0.
CascadeState exact_full_rank_solution(double t, const SpectralTarget& target,
                                      const Matrix& h1_0, const Matrix& h0_0);

struct InverseProximity {
  double bound;
  double actual;
};

// ||A^{-1} - B^{-1}||_2 <= ||A - B||_2 / (s (s - ||A - B||_2)), s = min eig A;
// requires A symmetric PD and ||A - B||_2 < s.
InverseProximity inverse_proximity(const Matrix& a, const Matrix& b);

// Fit log(values) ~ slope * x + intercept with x = t or log t over the window;
// samples with values < floor are excluded. Throws if < 3 usable samples.
RateEstimate estimate_rate(const std::vector<double>& times,
                           const std::vector<double>& values, DecayModel model,
                           double t_lo, double t_hi, double floor = 1e-13);

// Convenience: fit over the last half of the series.
RateEstimate estimate_rate_tail(const std::vector<double>& times,
                                const std::vector<double>& values, DecayModel model,
                                double floor = 1e-13);

// Per-level decay rates along an H_EXPANDED trajectory. For level i (0-based,
// distinct value l_i, next value l_{i+1} or 0 past the end):
//   ||H_{i,1}(t) - l_i^{-1} I||_2 decays at -2 l_i
//   ||H_{i,0}(t)||_2 decays at -(l_i - l_{i+1})
// and the tail ||H2(t)||_2 follows a -1 power law once it dominates. Fit
// windows are chosen automatically; entries whose window is too short are
// reported with applicable = false.
struct ExpandedRateEntry {
  std::string name;
  double theory_slope = 0.0;
  bool applicable = false;
  RateEstimate estimate;
};
std::vector<ExpandedRateEntry> expanded_rate_table(const Trajectory& traj,
                                                   const DistinctGrouping& grouping,
                                                   const SpectralTarget& target);

// Constants for the factor-space picture: with Z1* = Z1(t_end) taken as the
// limit, c1 = sup ||Z1(t) - Z1*||_2 e^{lmin t} and c2 = sup ||Z2(t)||_2 sqrt(t)
// over the fit window; for r = r* the noise factor decays exponentially and
// c2_exponential = sup ||Z2(t)||_2 e^{lmin t} is reported instead.
struct FactorCertificate {
  double c1 = 0.0;
  double c2 = 0.0;
  bool exponential_noise = false;  // r == r*
  double c2_exponential = 0.0;
  BoundReport z1_envelope;
  BoundReport z2_envelope;
};
FactorCertificate factor_certificate(const Trajectory& traj, const SpectralTarget& target,
                                     Eigen::Index r, double slack = 1e-9);

}  // namespace lrf
