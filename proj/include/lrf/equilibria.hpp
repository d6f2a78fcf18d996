#pragma once

#include <vector>

#include "lrf/model.hpp"

// Enumeration and classification of the equilibrium set of the lifted flow:
// block matrices diag(P1_bar, 0) with P1_bar Lambda1 = P1_bar^2.
namespace lrf {

enum class EquilibriumLabel { GLOBAL_MIN, ORIGIN, SADDLE_UNSTABLE };

std::string to_string(EquilibriumLabel label);

struct EquilibriumPoint {
  std::vector<Eigen::Index> subset;  // indices into lambda1 retained in P1_bar
  Matrix p_bar;                      // full n x n, diag(P1_bar, 0)
  EquilibriumLabel label;
};

struct LinearizationReport {
  Vector eigenvalues;  // of the map E -> AE + EA on symmetric perturbations
  double max_eigenvalue;
  Matrix unstable_direction;  // symmetric, unit Frobenius norm, achieving the max
};

struct RepeatedSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exactly 2^{r*} points for pairwise-distinct lambda1; throws
// RepeatedSpectrumError otherwise (the set is then a continuum).
std::vector<EquilibriumPoint> enumerate_equilibria(const SpectralTarget& target);

// ||rhs_p(P_bar, Lambda)||_F
double verify_equilibrium(const Matrix& p_bar, const SpectralTarget& target);

LinearizationReport linearize(const Matrix& p_bar, const SpectralTarget& target);

// min over P_bar != diag(Lambda1, 0) of ||P_bar - diag(Lambda1, 0)||_2
double equilibrium_gap(const SpectralTarget& target);

// V_F = (1/4) ||P - Lambda||_F^2 and its derivative along the lifted flow,
// -||(P - Lambda) P^{1/2}||_F^2 (needs P PSD).
double lyapunov_vf(const Matrix& p, const SpectralTarget& target);
double lyapunov_vf_rate(const Matrix& p, const SpectralTarget& target);

}  // namespace lrf
