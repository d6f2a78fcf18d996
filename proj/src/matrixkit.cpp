#include "lrf/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lrf {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double max_asymmetry(const Matrix& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& a, double tolerance) {
  return a.rows() == a.cols() && max_asymmetry(a) <= tolerance;
}

void require_symmetric(const Matrix& a, double tolerance) {
  if (!is_symmetric(a, tolerance)) {
    throw std::invalid_argument("matrix is not symmetric within tolerance");
  }
}

namespace {

double offdiag_frobenius(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      s += 2.0 * a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eig(const Matrix& a) {
  require_symmetric(a);
  const Eigen::Index n = a.rows();
  Matrix d = symmetrize(a);
  Matrix v = Matrix::Identity(n, n);
  const double target = tol::jacobi_off * std::max(1.0, d.norm());

  int sweep = 0;
  for (; sweep < tol::jacobi_max_sweeps; ++sweep) {
    if (offdiag_frobenius(d) <= target) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = d(p, q);
        if (std::abs(apq) == 0.0) continue;
        const double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::JacobiRotation<double> rot(c, s);
        d.applyOnTheLeft(p, q, rot.adjoint());
        d.applyOnTheRight(p, q, rot);
        v.applyOnTheRight(p, q, rot);
        d(p, q) = d(q, p) = 0.0;
      }
    }
  }
  const double off = offdiag_frobenius(d);
  if (off > target) throw EigError(off);

  // sort descending, stable for reproducibility
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return d(i, i) > d(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = d(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<size_t>(k)]);
    Eigen::Index imax;
    out.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, k) < 0.0) out.vectors.col(k) = -out.vectors.col(k);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && is_symmetric(a)) {
    return sym_eig(a).values.cwiseAbs().maxCoeff();
  }
  // largest singular value via the smaller Gram matrix
  const Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose())
                                           : Matrix(a.transpose() * a);
  const double top = sym_eig(symmetrize(gram)).values.maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

double min_eigenvalue(const Matrix& a) { return sym_eig(a).values.minCoeff(); }

bool is_psd(const Matrix& a, double tolerance) {
  require_symmetric(a, 1e-6);
  return min_eigenvalue(symmetrize(a)) >= -tolerance;
}

Matrix invert_sym(const Matrix& a, double rel_tol) {
  const EigenDecomposition eig = sym_eig(a);
  const double top = eig.values.cwiseAbs().maxCoeff();
  const double floor = rel_tol * top;  // relative: tiny well-conditioned blocks invert fine
  const double min_abs = eig.values.cwiseAbs().minCoeff();
  if (top == 0.0 || min_abs <= floor) {
    throw SingularBlockError(min_abs, "singular symmetric block; min |eigenvalue| " +
                                          std::to_string(min_abs));
  }
  return eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();
}

Matrix sqrt_psd(const Matrix& a, double tolerance) {
  EigenDecomposition eig = sym_eig(a);
  if (eig.values.minCoeff() < -tolerance) {
    throw std::domain_error("matrix is not positive semidefinite");
  }
  Vector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
}

BlockSplit split_blocks(const Matrix& a, Eigen::Index top_dim) {
  const Eigen::Index n = a.rows();
  if (top_dim < 0 || top_dim > n) throw std::invalid_argument("bad top_dim");
  BlockSplit out;
  out.top_dim = top_dim;
  out.a11 = a.topLeftCorner(top_dim, top_dim);
  out.a10 = a.topRightCorner(top_dim, n - top_dim);
  out.a22 = a.bottomRightCorner(n - top_dim, n - top_dim);
  return out;
}

Matrix assemble_blocks(const Matrix& a11, const Matrix& a10, const Matrix& a22) {
  const Eigen::Index k = a11.rows();
  const Eigen::Index m = a22.rows();
  Matrix out(k + m, k + m);
  out.topLeftCorner(k, k) = a11;
  out.topRightCorner(k, m) = a10;
  out.bottomLeftCorner(m, k) = a10.transpose();
  out.bottomRightCorner(m, m) = a22;
  return out;
}

Matrix schur_complement(const Matrix& a, Eigen::Index top_dim) {
  require_symmetric(a, 1e-6);
  const BlockSplit b = split_blocks(a, top_dim);
  const Matrix inv11 = invert_sym(symmetrize(b.a11));
  return symmetrize(b.a22 - b.a10.transpose() * inv11 * b.a10);
}

BlockLU block_lu(const Matrix& a, Eigen::Index top_dim) {
  require_symmetric(a, 1e-6);
  const Eigen::Index n = a.rows();
  const BlockSplit b = split_blocks(a, top_dim);
  const Matrix inv11 = invert_sym(symmetrize(b.a11));

  BlockLU out;
  out.l = Matrix::Identity(n, n);
  out.u = Matrix::Identity(n, n);
  out.d = Matrix::Zero(n, n);
  out.l.bottomLeftCorner(n - top_dim, top_dim) = b.a10.transpose() * inv11;
  out.u.topRightCorner(top_dim, n - top_dim) = inv11 * b.a10;
  out.d.topLeftCorner(top_dim, top_dim) = b.a11;
  out.d.bottomRightCorner(n - top_dim, n - top_dim) =
      symmetrize(b.a22 - b.a10.transpose() * inv11 * b.a10);
  return out;
}

}  // namespace lrf
