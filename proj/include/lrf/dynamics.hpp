#pragma once

#include <optional>

#include "lrf/model.hpp"
#include "lrf/trajectory.hpp"
#include "lrf/transforms.hpp"

// Right-hand sides for every coordinate representation of the flow, plus a
// fixed-step RK4 integrator and trajectory recorder.
namespace lrf {

struct BlowUpError : std::runtime_error {
  double last_valid_time;
  explicit BlowUpError(double t)
      : std::runtime_error("non-finite state entries at t > " + std::to_string(t)),
        last_valid_time(t) {}
};

// dX/dt = (M - XX')X
Matrix rhs_x(const Matrix& x, const Matrix& m);

// dZ/dt = (Lambda - ZZ')Z
Matrix rhs_z(const Matrix& z, const Vector& lambda_diag);

// dP/dt = (Lambda - P)P + P(Lambda - P), symmetrized
Matrix rhs_p(const Matrix& p, const Vector& lambda_diag);

LiftedState rhs_p_blocks(const LiftedState& s, const SpectralTarget& target);

CascadeState rhs_h(const CascadeState& s, const SpectralTarget& target);

ExpandedState rhs_h_expanded(const ExpandedState& s, const DistinctGrouping& grouping,
                             const SpectralTarget& target);

// A representation bound to a target (and fitted rank / eigenvalue grouping
// where the state shape needs them), with flat packing for the integrator.
struct FlowSpec {
  Representation rep;
  SpectralTarget target;
  Eigen::Index r = 0;                        // X_FLOW / Z_FLOW column count
  std::optional<DistinctGrouping> grouping;  // H_EXPANDED only

  Eigen::Index dim() const;
  Vector rhs(const Vector& state) const;
  void resymmetrize(Vector& state) const;

  Vector pack_factor(const Matrix& x) const;
  Matrix unpack_factor(const Vector& state) const;
  Vector pack_full(const Matrix& p) const;
  Matrix unpack_full(const Vector& state) const;
  Vector pack_blocks(const LiftedState& s) const;
  LiftedState unpack_blocks(const Vector& state) const;
  Vector pack_cascade(const CascadeState& s) const;
  CascadeState unpack_cascade(const Vector& state) const;
  Vector pack_expanded(const ExpandedState& s) const;
  ExpandedState unpack_expanded(const Vector& state) const;
};

// Classical RK4 with fixed step; records every record_every steps (always
// including t = 0); throws BlowUpError on non-finite entries.
Trajectory integrate(const FlowSpec& spec, const Vector& initial,
                     const IntegratorConfig& config);

// Max over recorded t of |v' P1(t) v| for a vector v with v' P1(0) v = 0.
double check_invariant_nullspace(const Trajectory& traj, const FlowSpec& spec,
                                 const Vector& v, double precondition_tol = 1e-10);

}  // namespace lrf
