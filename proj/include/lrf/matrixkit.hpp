#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

// Dense symmetric linear-algebra kernel: Jacobi eigensolver, norms, PSD
// tests, block partitioning, Schur complements and block LU.
namespace lrf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Default tolerances used across the kernel.
namespace tol {
inline constexpr double sym = 1e-9;     // absolute, max asymmetry
inline constexpr double orth = 1e-9;    // ||V'V - I||
inline constexpr double recon = 1e-10;  // relative reconstruction residual
inline constexpr double inv = 1e-10;    // relative invertibility threshold
inline constexpr double jacobi_off = 1e-12;  // relative off-diagonal target
inline constexpr int jacobi_max_sweeps = 100;
}  // namespace tol

struct EigError : std::runtime_error {
  double offdiag_norm;
  explicit EigError(double off)
      : std::runtime_error("Jacobi eigensolver did not converge; off-diagonal norm " +
                           std::to_string(off)),
        offdiag_norm(off) {}
};

struct SingularBlockError : std::runtime_error {
  double min_abs_eigenvalue;
  explicit SingularBlockError(double mineig, const std::string& what)
      : std::runtime_error(what), min_abs_eigenvalue(mineig) {}
};

struct EigenDecomposition {
  Vector values;   // sorted descending
  Matrix vectors;  // orthogonal, column k pairs with values[k]
};

struct BlockSplit {
  Eigen::Index top_dim;
  Matrix a11;  // symmetric
  Matrix a10;  // top_dim x (n - top_dim)
  Matrix a22;  // symmetric
};

struct BlockLU {
  Matrix l;  // unit lower-triangular block factor
  Matrix d;  // block diagonal: diag(A11, A/A11)
  Matrix u;  // unit upper-triangular block factor
};

// (A + A') / 2
Matrix symmetrize(const Matrix& a);
double max_asymmetry(const Matrix& a);
bool is_symmetric(const Matrix& a, double tolerance = tol::sym);
void require_symmetric(const Matrix& a, double tolerance = tol::sym);

// Cyclic Jacobi with fixed sweep order and fixed sign convention
// (largest-magnitude entry of each eigenvector made positive).
EigenDecomposition sym_eig(const Matrix& a);

// Largest singular value; max |eigenvalue| for symmetric input.
double spectral_norm(const Matrix& a);

// min eigenvalue of a symmetric matrix
double min_eigenvalue(const Matrix& a);

bool is_psd(const Matrix& a, double tolerance);

// Spectral inversion of a symmetric matrix; throws SingularBlockError when
// min |eigenvalue| <= rel_tol * spectral norm.
Matrix invert_sym(const Matrix& a, double rel_tol = tol::inv);

// Symmetric PSD square root via sym_eig; negative eigenvalues below -tol are
// rejected, tiny negatives are clamped to zero.
Matrix sqrt_psd(const Matrix& a, double tolerance = 1e-9);

BlockSplit split_blocks(const Matrix& a, Eigen::Index top_dim);
Matrix assemble_blocks(const Matrix& a11, const Matrix& a10, const Matrix& a22);

// A22 - A10' A11^{-1} A10
Matrix schur_complement(const Matrix& a, Eigen::Index top_dim);

// A = L D U with D = diag(A11, A/A11), L21 = A10' A11^{-1}, U12 = A11^{-1} A10.
BlockLU block_lu(const Matrix& a, Eigen::Index top_dim);

}  // namespace lrf
