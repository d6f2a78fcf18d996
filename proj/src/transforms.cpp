#include "lrf/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "lrf/dynamics.hpp"

namespace lrf {

DistinctGrouping make_grouping(const Vector& lambda1, double group_rel_tol) {
  if (lambda1.size() == 0) throw std::invalid_argument("empty lambda1");
  const double tolerance = group_rel_tol * lambda1[0];
  DistinctGrouping g;
  std::vector<double> values;
  values.push_back(lambda1[0]);
  g.multiplicities.push_back(1);
  for (Eigen::Index i = 1; i < lambda1.size(); ++i) {
    if (values.back() - lambda1[i] <= tolerance) {
      ++g.multiplicities.back();
    } else {
      values.push_back(lambda1[i]);
      g.multiplicities.push_back(1);
    }
  }
  g.values = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return g;
}

CascadeState to_cascade(const LiftedState& p) {
  const Matrix h1 = invert_sym(p.p1);
  return CascadeState{h1, h1 * p.p0, symmetrize(p.p2 - p.p0.transpose() * h1 * p.p0)};
}

LiftedState from_cascade(const CascadeState& h) {
  const Matrix p1 = invert_sym(h.h1);
  const Matrix p0 = p1 * h.h0;
  return LiftedState{symmetrize(p1), p0,
                     symmetrize(h.h2 + h.h0.transpose() * p1 * h.h0)};
}

AlignmentResult best_alignment(const FactorState& z) {
  const Matrix z1 = z.z1();
  const Matrix z2 = z.z2();
  const Matrix gram = symmetrize(z1 * z1.transpose());
  Matrix h0;
  try {
    h0 = invert_sym(gram) * z1 * z2.transpose();
  } catch (const SingularBlockError&) {
    throw std::invalid_argument("Z1 is rank deficient; alignment undefined");
  }
  const Matrix resid = z2 - h0.transpose() * z1;
  // first-order optimality of the least-squares problem
  const double stat = (z1 * resid.transpose()).cwiseAbs().maxCoeff();
  if (stat > 1e-9 * std::max(1.0, z1.cwiseAbs().maxCoeff())) {
    throw std::runtime_error("alignment optimality residual too large");
  }
  return AlignmentResult{h0, resid.norm()};
}

ExpandedState expanded_decompose(const Matrix& p, const DistinctGrouping& grouping) {
  require_symmetric(p, 1e-6);
  ExpandedState out;
  Matrix u = symmetrize(p);
  for (Eigen::Index i = 0; i < grouping.k(); ++i) {
    const Eigen::Index ni = grouping.multiplicities[static_cast<size_t>(i)];
    const BlockSplit b = split_blocks(u, ni);
    Matrix h1;
    try {
      h1 = invert_sym(symmetrize(b.a11));
    } catch (const SingularBlockError& e) {
      throw SingularBlockError(e.min_abs_eigenvalue,
                               "singular level-" + std::to_string(i + 1) +
                                   " block in expanded decomposition");
    }
    out.levels.push_back(ExpandedLevel{h1, h1 * b.a10});
    u = symmetrize(b.a22 - b.a10.transpose() * h1 * b.a10);
  }
  out.h2 = u;
  return out;
}

Matrix expanded_reconstruct(const ExpandedState& state, const DistinctGrouping& grouping,
                            Eigen::Index level) {
  Matrix u = state.h2;
  for (Eigen::Index j = grouping.k() - 1; j >= level; --j) {
    const ExpandedLevel& lv = state.levels[static_cast<size_t>(j)];
    const Matrix p1 = invert_sym(lv.h1);
    const Matrix p0 = p1 * lv.h0;
    const Matrix p2 = symmetrize(u + lv.h0.transpose() * p1 * lv.h0);
    u = assemble_blocks(symmetrize(p1), p0, p2);
  }
  return u;
}

Vector lower_lambda_diag(const DistinctGrouping& grouping, const Vector& lambda2,
                         Eigen::Index level) {
  Eigen::Index m = lambda2.size();
  for (Eigen::Index j = level + 1; j < grouping.k(); ++j) {
    m += grouping.multiplicities[static_cast<size_t>(j)];
  }
  Vector d(m);
  Eigen::Index at = 0;
  for (Eigen::Index j = level + 1; j < grouping.k(); ++j) {
    const Eigen::Index nj = grouping.multiplicities[static_cast<size_t>(j)];
    d.segment(at, nj).setConstant(grouping.values[j]);
    at += nj;
  }
  d.tail(lambda2.size()) = -lambda2;
  return d;
}

double cascade_residual(const Trajectory& traj, const SpectralTarget& target) {
  if (traj.rep != Representation::P_BLOCKS) {
    throw std::invalid_argument("cascade_residual expects a P_BLOCKS trajectory");
  }
  const Eigen::Index n = traj.times.size();
  if (n < 5) throw std::invalid_argument("too few samples for finite differencing");
  const double dt = traj.times[1] - traj.times[0];

  FlowSpec spec{Representation::P_BLOCKS, target};
  std::vector<CascadeState> h(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    h[static_cast<size_t>(i)] = to_cascade(spec.unpack_blocks(traj.states[static_cast<size_t>(i)]));
  }

  auto flat = [&](const CascadeState& s) {
    Vector v(s.h1.size() + s.h0.size() + s.h2.size());
    v << Eigen::Map<const Vector>(s.h1.data(), s.h1.size()),
        Eigen::Map<const Vector>(s.h0.data(), s.h0.size()),
        Eigen::Map<const Vector>(s.h2.data(), s.h2.size());
    return v;
  };

  double worst = 0.0;
  // 4th-order central differences on the interior of the recorded grid
  for (Eigen::Index i = 2; i + 2 < n; ++i) {
    const Vector dh = (-flat(h[static_cast<size_t>(i + 2)]) + 8.0 * flat(h[static_cast<size_t>(i + 1)]) -
                       8.0 * flat(h[static_cast<size_t>(i - 1)]) + flat(h[static_cast<size_t>(i - 2)])) /
                      (12.0 * dt);
    const Vector rhs = flat(rhs_h(h[static_cast<size_t>(i)], target));
    // relative: near-singular P1(0) inflates H by orders of magnitude without
    // making the finite-difference agreement any less meaningful
    const double scale = std::max(1.0, flat(h[static_cast<size_t>(i)]).norm());
    worst = std::max(worst, (dh - rhs).norm() / scale);
  }
  return worst;
}

LtiReduction lti_reduction(const CascadeState& h0_state, const SpectralTarget& target,
                           const Trajectory& h_traj) {
  if (target.lambda2.size() > 0 && target.lambda2.maxCoeff() > 0.0) {
    throw std::invalid_argument("LTI reduction requires Lambda2 = 0");
  }
  if (spectral_norm(h0_state.h2) > 1e-8) {
    throw std::invalid_argument("LTI reduction requires H2(0) = 0 (r = r*)");
  }
  FlowSpec spec{Representation::H_CASCADE, target};
  const Matrix w0 = h0_state.h0 * h0_state.h0.transpose();

  LtiReduction out;
  out.max_error = 0.0;
  for (size_t i = 0; i < h_traj.times.size(); ++i) {
    const double t = h_traj.times[i];
    const Vector decay = (-target.lambda1 * t).array().exp();
    const Matrix w_closed = decay.asDiagonal() * w0 * decay.asDiagonal();
    const CascadeState h = spec.unpack_cascade(h_traj.states[i]);
    const Matrix w_obs = h.h0 * h.h0.transpose();
    out.times.push_back(t);
    out.w_closed_form.push_back(w_closed);
    out.w_observed.push_back(w_obs);
    out.max_error = std::max(out.max_error, (w_closed - w_obs).cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace lrf
