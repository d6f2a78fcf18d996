#include "lrf/equilibria.hpp"

#include <cmath>
#include <limits>

#include "lrf/dynamics.hpp"

namespace lrf {

std::string to_string(EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::GLOBAL_MIN: return "GLOBAL_MIN";
    case EquilibriumLabel::ORIGIN: return "ORIGIN";
    case EquilibriumLabel::SADDLE_UNSTABLE: return "SADDLE_UNSTABLE";
  }
  throw std::invalid_argument("bad label");
}

std::vector<EquilibriumPoint> enumerate_equilibria(const SpectralTarget& target) {
  const Eigen::Index rs = target.r_star;
  const double distinct_tol = rs > 0 ? 1e-8 * target.lambda1[0] : 0.0;
  for (Eigen::Index i = 0; i + 1 < rs; ++i) {
    if (target.lambda1[i] - target.lambda1[i + 1] <= distinct_tol) {
      throw RepeatedSpectrumError(
          "repeated eigenvalues in Lambda1: continuum of equilibria; enumeration undefined");
    }
  }
  std::vector<EquilibriumPoint> points;
  const Eigen::Index count = Eigen::Index(1) << rs;
  for (Eigen::Index mask = 0; mask < count; ++mask) {
    EquilibriumPoint pt;
    pt.p_bar = Matrix::Zero(target.n, target.n);
    for (Eigen::Index i = 0; i < rs; ++i) {
      if (mask & (Eigen::Index(1) << i)) {
        pt.subset.push_back(i);
        pt.p_bar(i, i) = target.lambda1[i];
      }
    }
    if (pt.subset.empty()) {
      pt.label = EquilibriumLabel::ORIGIN;
    } else if (static_cast<Eigen::Index>(pt.subset.size()) == rs) {
      pt.label = EquilibriumLabel::GLOBAL_MIN;
    } else {
      pt.label = EquilibriumLabel::SADDLE_UNSTABLE;
    }
    points.push_back(std::move(pt));
  }
  return points;
}

double verify_equilibrium(const Matrix& p_bar, const SpectralTarget& target) {
  return rhs_p(symmetrize(p_bar), target.lambda_diag()).norm();
}

LinearizationReport linearize(const Matrix& p_bar, const SpectralTarget& target) {
  const Matrix a = Matrix(target.lambda_diag().asDiagonal()) - 2.0 * symmetrize(p_bar);
  const EigenDecomposition eig = sym_eig(a);
  const Eigen::Index n = a.rows();

  LinearizationReport report;
  report.eigenvalues.resize(n * (n + 1) / 2);
  report.max_eigenvalue = -std::numeric_limits<double>::infinity();
  Eigen::Index best_i = 0, best_j = 0, at = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double mu = eig.values[i] + eig.values[j];
      report.eigenvalues[at++] = mu;
      if (mu > report.max_eigenvalue) {
        report.max_eigenvalue = mu;
        best_i = i;
        best_j = j;
      }
    }
  }
  const Vector vi = eig.vectors.col(best_i);
  const Vector vj = eig.vectors.col(best_j);
  Matrix dir = 0.5 * (vi * vj.transpose() + vj * vi.transpose());
  report.unstable_direction = dir / dir.norm();
  return report;
}

double equilibrium_gap(const SpectralTarget& target) {
  const std::vector<EquilibriumPoint> points = enumerate_equilibria(target);
  const Matrix optimum = target.optimum();
  double gap = std::numeric_limits<double>::infinity();
  for (const EquilibriumPoint& pt : points) {
    if (pt.label == EquilibriumLabel::GLOBAL_MIN) continue;
    gap = std::min(gap, spectral_norm(pt.p_bar - optimum));
  }
  return gap;
}

double lyapunov_vf(const Matrix& p, const SpectralTarget& target) {
  return 0.25 * (p - target.lambda_matrix()).squaredNorm();
}

double lyapunov_vf_rate(const Matrix& p, const SpectralTarget& target) {
  const Matrix root = sqrt_psd(symmetrize(p), 1e-7);
  return -((p - target.lambda_matrix()) * root).squaredNorm();
}

}  // namespace lrf
