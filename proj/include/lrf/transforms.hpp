#pragma once

#include <vector>

#include "lrf/model.hpp"
#include "lrf/trajectory.hpp"

// The nonlinear change of variables H = (P1^{-1}, P1^{-1}P0, P/P1), its
// inverse, and the expanded recursive Schur decomposition over the distinct
// eigenvalues of Lambda1.
namespace lrf {

struct CascadeState {
  Matrix h1;  // r* x r*, = P1^{-1}
  Matrix h0;  // r* x (n - r*), = P1^{-1} P0
  Matrix h2;  // (n - r*) x (n - r*), = P2 - P0' P1^{-1} P0
};

// Distinct eigenvalues of Lambda1 with multiplicities; values strictly
// decreasing, multiplicities summing to r*.
struct DistinctGrouping {
  Vector values;
  std::vector<Eigen::Index> multiplicities;

  Eigen::Index k() const { return values.size(); }
};

struct ExpandedLevel {
  Matrix h1;  // n_i x n_i
  Matrix h0;  // n_i x m_i
};

struct ExpandedState {
  std::vector<ExpandedLevel> levels;
  Matrix h2;  // m_k x m_k tail, = U_{k+1}
};

// Cluster eigenvalues within group_tol of each other.
DistinctGrouping make_grouping(const Vector& lambda1, double group_rel_tol = 1e-8);

CascadeState to_cascade(const LiftedState& p);
LiftedState from_cascade(const CascadeState& h);

struct AlignmentResult {
  Matrix h0;
  double residual;  // ||Z2 - H0' Z1||_F
};

// argmin_E ||Z2 - E' Z1||_F^2; requires Z1 full row rank.
AlignmentResult best_alignment(const FactorState& z);

// Recursive Schur iterates U_{i+1} = U_i / P_hat_{i,1} starting from the
// assembled P; returns the per-level (H_hat_{i,1}, H_hat_{i,0}) and the tail.
ExpandedState expanded_decompose(const Matrix& p, const DistinctGrouping& grouping);

// Inverse: reassemble U_{i} from levels i..k and the tail; level = 0 gives
// back the full matrix P.
Matrix expanded_reconstruct(const ExpandedState& state, const DistinctGrouping& grouping,
                            Eigen::Index level = 0);

// diag(values[i+1] I, ..., values[k-1] I, -Lambda2): the lower diagonal block
// of Lambda seen by level i (0-based).
Vector lower_lambda_diag(const DistinctGrouping& grouping, const Vector& lambda2,
                         Eigen::Index level);

// Max Frobenius residual of the cascade equations against finite-differenced
// H(t) = to_cascade(P(t)) along a P_BLOCKS trajectory, relative to
// max(1, ||H(t)||_F) at each grid point.
double cascade_residual(const Trajectory& traj, const SpectralTarget& target);

struct LtiReduction {
  std::vector<double> times;
  std::vector<Matrix> w_closed_form;  // e^{-L1 t} W(0) e^{-L1 t}
  std::vector<Matrix> w_observed;     // H0(t) H0(t)'
  double max_error;
};

// Remark: for r = r* and Lambda2 = 0, W = H0 H0' obeys a stable LTI system.
LtiReduction lti_reduction(const CascadeState& h0_state, const SpectralTarget& target,
                           const Trajectory& h_traj);

}  // namespace lrf
