#pragma once

#include <cstdint>
#include <optional>

#include "lrf/matrixkit.hpp"

// Problem construction and coordinate bookkeeping: the spectral target, the
// Z = V'X change of coordinates, objective/gradient, and the signal/noise
// block decomposition of the lifted state.
namespace lrf {

// Target M = V diag(Lambda1, -Lambda2) V' with Lambda1 > 0 descending and
// Lambda2 >= 0 (so the trailing eigenvalues of M are -lambda2 <= 0).
struct SpectralTarget {
  Eigen::Index n = 0;
  Eigen::Index r_star = 0;
  Matrix v;        // orthogonal n x n
  Vector lambda1;  // length r_star, strictly positive, descending
  Vector lambda2;  // length n - r_star, nonnegative

  Vector lambda_diag() const;  // (lambda1, -lambda2)
  Matrix lambda_matrix() const { return lambda_diag().asDiagonal(); }
  Matrix reconstruct() const { return symmetrize(v * lambda_matrix() * v.transpose()); }
  Matrix lambda1_matrix() const { return lambda1.asDiagonal(); }
  Matrix lambda2_matrix() const { return lambda2.asDiagonal(); }
  // diag(Lambda1, 0), the optimum of the lifted flow
  Matrix optimum() const;
  double lambda_max() const { return r_star > 0 ? lambda1[0] : 0.0; }
  double lambda_min_pos() const { return r_star > 0 ? lambda1[r_star - 1] : 0.0; }
};

// Z in R^{n x r}, split at row r_star into signal Z1 and noise Z2.
struct FactorState {
  Matrix z;
  Eigen::Index r_star = 0;

  Eigen::Index r() const { return z.cols(); }
  Matrix z1() const { return z.topRows(r_star); }
  Matrix z2() const { return z.bottomRows(z.rows() - r_star); }
};

// Block-partitioned PSD state P = [[P1, P0], [P0', P2]].
struct LiftedState {
  Matrix p1;  // r* x r*, symmetric
  Matrix p0;  // r* x (n - r*)
  Matrix p2;  // (n - r*) x (n - r*), symmetric

  Matrix assemble() const { return assemble_blocks(p1, p0, p2); }
  static LiftedState from_full(const Matrix& p, Eigen::Index r_star);
};

// seeded QR-orthogonalized Gaussian draw, deterministic sign convention
Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed);

SpectralTarget target_from_spectrum(const Vector& lambda1, const Vector& lambda2,
                                    const std::optional<Matrix>& v = std::nullopt);

// Eigenvalues > rank_tol go to Lambda1, the rest to -Lambda2.
SpectralTarget target_from_matrix(const Matrix& m);

FactorState to_z(const Matrix& x, const SpectralTarget& target);

LiftedState lift(const FactorState& z);

// (1/4) ||ZZ' - Lambda||_F^2, equal to f(X) by orthogonal invariance
double objective(const FactorState& z, const SpectralTarget& target);
double objective_x(const Matrix& x, const Matrix& m);

// grad f = -(M - XX')X
Matrix gradient_x(const Matrix& x, const Matrix& m);

}  // namespace lrf
