#pragma once

#include <cmath>
#include <cstdint>

#include "lrf/dynamics.hpp"
#include "lrf/harness.hpp"
#include "lrf/rng.hpp"

namespace lrft {

using namespace lrf;

// n = 10, r* = 4, Lambda1 = diag(4,3,2,1), Lambda2 = 0: the standard benchmark
// configuration used throughout the suites.
inline SpectralTarget bench_target() {
  Vector l1(4);
  l1 << 4, 3, 2, 1;
  return target_from_spectrum(l1, Vector::Zero(6));
}

inline Matrix random_psd(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(seed);
  const Matrix g = scale * rng.normal_matrix(n, n);
  return symmetrize(g * g.transpose());
}

inline Matrix random_symmetric(Eigen::Index n, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(seed);
  return symmetrize(scale * rng.normal_matrix(n, n));
}

// Independent largest-singular-value oracle: power iteration on A'A.
inline double power_norm(const Matrix& a, int iters = 2000) {
  if (a.size() == 0) return 0.0;
  const Matrix g = a.transpose() * a;
  if (g.norm() == 0.0) return 0.0;
  Vector v = Vector::Ones(g.rows());
  v.normalize();
  for (int i = 0; i < iters; ++i) {
    Vector w = g * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
  }
  return std::sqrt(v.dot(g * v));
}

// Determinant oracle via the product of Jacobi eigenvalues.
inline double det_by_eig(const Matrix& a) {
  const Vector vals = sym_eig(symmetrize(a)).values;
  double d = 1.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) d *= vals[i];
  return d;
}

inline Trajectory integrate_blocks(const SpectralTarget& target, const FactorState& z0,
                                   const IntegratorConfig& cfg) {
  FlowSpec spec{Representation::P_BLOCKS, target};
  return integrate(spec, spec.pack_blocks(lift(z0)), cfg);
}

}  // namespace lrft
