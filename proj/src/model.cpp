#include "lrf/model.hpp"

#include <stdexcept>

#include "lrf/rng.hpp"

namespace lrf {

Vector SpectralTarget::lambda_diag() const {
  Vector d(n);
  d.head(r_star) = lambda1;
  d.tail(n - r_star) = -lambda2;
  return d;
}

Matrix SpectralTarget::optimum() const {
  Matrix p = Matrix::Zero(n, n);
  p.topLeftCorner(r_star, r_star) = lambda1_matrix();
  return p;
}

LiftedState LiftedState::from_full(const Matrix& p, Eigen::Index r_star) {
  const BlockSplit b = split_blocks(p, r_star);
  return LiftedState{symmetrize(b.a11), b.a10, symmetrize(b.a22)};
}

Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  CounterRng rng(seed);
  const Matrix g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // fix signs so the factorization is unique (positive R diagonal)
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

SpectralTarget target_from_spectrum(const Vector& lambda1, const Vector& lambda2,
                                    const std::optional<Matrix>& v) {
  for (Eigen::Index i = 0; i < lambda1.size(); ++i) {
    if (!(lambda1[i] > 0.0)) throw std::invalid_argument("lambda1 entries must be positive");
  }
  for (Eigen::Index i = 0; i + 1 < lambda1.size(); ++i) {
    if (lambda1[i] < lambda1[i + 1]) {
      throw std::invalid_argument("lambda1 must be sorted descending");
    }
  }
  for (Eigen::Index i = 0; i < lambda2.size(); ++i) {
    if (lambda2[i] < 0.0) throw std::invalid_argument("lambda2 entries must be nonnegative");
  }
  SpectralTarget t;
  t.r_star = lambda1.size();
  t.n = lambda1.size() + lambda2.size();
  t.lambda1 = lambda1;
  t.lambda2 = lambda2;
  if (v) {
    if (v->rows() != t.n || v->cols() != t.n) throw std::invalid_argument("V has wrong shape");
    if ((v->transpose() * (*v) - Matrix::Identity(t.n, t.n)).cwiseAbs().maxCoeff() > tol::orth) {
      throw std::invalid_argument("V is not orthogonal");
    }
    t.v = *v;
  } else {
    t.v = Matrix::Identity(t.n, t.n);
  }
  return t;
}

SpectralTarget target_from_matrix(const Matrix& m) {
  require_symmetric(m, 1e-6);
  const EigenDecomposition eig = sym_eig(symmetrize(m));
  const double top = eig.values.size() > 0 ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  const double rank_tol = 1e-9 * top;
  Eigen::Index r_star = 0;
  while (r_star < eig.values.size() && eig.values[r_star] > rank_tol) ++r_star;

  SpectralTarget t;
  t.n = m.rows();
  t.r_star = r_star;
  t.v = eig.vectors;
  t.lambda1 = eig.values.head(r_star);
  // the remaining eigenvalues are <= rank_tol; store as Lambda2 >= 0 with
  // roundoff-positive values clamped
  t.lambda2 = (-eig.values.tail(t.n - r_star)).cwiseMax(0.0);
  return t;
}

FactorState to_z(const Matrix& x, const SpectralTarget& target) {
  if (x.rows() != target.n) throw std::invalid_argument("X has wrong row count");
  return FactorState{target.v.transpose() * x, target.r_star};
}

LiftedState lift(const FactorState& z) {
  const Matrix z1 = z.z1();
  const Matrix z2 = z.z2();
  return LiftedState{symmetrize(z1 * z1.transpose()), z1 * z2.transpose(),
                     symmetrize(z2 * z2.transpose())};
}

double objective(const FactorState& z, const SpectralTarget& target) {
  const Matrix p = z.z * z.z.transpose();
  return 0.25 * (p - target.lambda_matrix()).squaredNorm();
}

double objective_x(const Matrix& x, const Matrix& m) {
  return 0.25 * (x * x.transpose() - m).squaredNorm();
}

Matrix gradient_x(const Matrix& x, const Matrix& m) {
  return -(m - x * x.transpose()) * x;
}

}  // namespace lrf
