#include "lrf/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace lrf {

std::string to_string(Representation rep) {
  switch (rep) {
    case Representation::X_FLOW: return "X_FLOW";
    case Representation::Z_FLOW: return "Z_FLOW";
    case Representation::P_LIFTED: return "P_LIFTED";
    case Representation::P_BLOCKS: return "P_BLOCKS";
    case Representation::H_CASCADE: return "H_CASCADE";
    case Representation::H_EXPANDED: return "H_EXPANDED";
  }
  throw std::invalid_argument("bad representation tag");
}

Representation representation_from_string(const std::string& name) {
  if (name == "X_FLOW") return Representation::X_FLOW;
  if (name == "Z_FLOW") return Representation::Z_FLOW;
  if (name == "P_LIFTED") return Representation::P_LIFTED;
  if (name == "P_BLOCKS") return Representation::P_BLOCKS;
  if (name == "H_CASCADE") return Representation::H_CASCADE;
  if (name == "H_EXPANDED") return Representation::H_EXPANDED;
  throw std::invalid_argument("unknown representation: " + name);
}

Matrix rhs_x(const Matrix& x, const Matrix& m) { return (m - x * x.transpose()) * x; }

Matrix rhs_z(const Matrix& z, const Vector& lambda_diag) {
  return lambda_diag.asDiagonal() * z - z * (z.transpose() * z);
}

Matrix rhs_p(const Matrix& p, const Vector& lambda_diag) {
  const Matrix a = Matrix(lambda_diag.asDiagonal()) - p;
  return symmetrize(a * p + p * a);
}

LiftedState rhs_p_blocks(const LiftedState& s, const SpectralTarget& target) {
  const Matrix l1 = target.lambda1_matrix();
  const Matrix l2 = target.lambda2_matrix();
  LiftedState d;
  d.p1 = symmetrize(s.p1 * l1 + l1 * s.p1 - 2.0 * (s.p1 * s.p1 + s.p0 * s.p0.transpose()));
  d.p0 = l1 * s.p0 - s.p0 * l2 - 2.0 * (s.p1 * s.p0 + s.p0 * s.p2);
  d.p2 = symmetrize(-s.p2 * l2 - l2 * s.p2 - 2.0 * (s.p0.transpose() * s.p0 + s.p2 * s.p2));
  return d;
}

CascadeState rhs_h(const CascadeState& s, const SpectralTarget& target) {
  const Matrix l1 = target.lambda1_matrix();
  const Matrix l2 = target.lambda2_matrix();
  const Eigen::Index rs = target.r_star;
  CascadeState d;
  d.h1 = symmetrize(-l1 * s.h1 - s.h1 * l1 +
                    2.0 * (Matrix::Identity(rs, rs) + s.h0 * s.h0.transpose()));
  d.h0 = -l1 * s.h0 - s.h0 * (l2 + 2.0 * s.h2);
  d.h2 = symmetrize(-l2 * s.h2 - s.h2 * l2 - 2.0 * s.h2 * s.h2);
  return d;
}

ExpandedState rhs_h_expanded(const ExpandedState& s, const DistinctGrouping& grouping,
                             const SpectralTarget& target) {
  ExpandedState d;
  for (Eigen::Index i = 0; i < grouping.k(); ++i) {
    const ExpandedLevel& lv = s.levels[static_cast<size_t>(i)];
    const double li = grouping.values[i];
    const Eigen::Index ni = lv.h1.rows();
    const Matrix u_next = expanded_reconstruct(s, grouping, i + 1);
    const Vector lower = lower_lambda_diag(grouping, target.lambda2, i);
    ExpandedLevel dl;
    dl.h1 = symmetrize(-2.0 * li * lv.h1 +
                       2.0 * (Matrix::Identity(ni, ni) + lv.h0 * lv.h0.transpose()));
    dl.h0 = -li * lv.h0 + lv.h0 * lower.asDiagonal() - 2.0 * lv.h0 * u_next;
    d.levels.push_back(std::move(dl));
  }
  const Matrix l2 = target.lambda2_matrix();
  d.h2 = symmetrize(-l2 * s.h2 - s.h2 * l2 - 2.0 * s.h2 * s.h2);
  return d;
}

namespace {

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unflatten(const Vector& v, Eigen::Index at, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data() + at, rows, cols);
}

}  // namespace

Eigen::Index FlowSpec::dim() const {
  const Eigen::Index n = target.n;
  const Eigen::Index rs = target.r_star;
  const Eigen::Index m = n - rs;
  switch (rep) {
    case Representation::X_FLOW:
    case Representation::Z_FLOW:
      return n * r;
    case Representation::P_LIFTED:
      return n * n;
    case Representation::P_BLOCKS:
    case Representation::H_CASCADE:
      return rs * rs + rs * m + m * m;
    case Representation::H_EXPANDED: {
      if (!grouping) throw std::invalid_argument("H_EXPANDED needs a grouping");
      Eigen::Index total = 0;
      Eigen::Index mi = n;
      for (Eigen::Index i = 0; i < grouping->k(); ++i) {
        const Eigen::Index ni = grouping->multiplicities[static_cast<size_t>(i)];
        mi -= ni;
        total += ni * ni + ni * mi;
      }
      return total + mi * mi;
    }
  }
  throw std::invalid_argument("bad representation tag");
}

Vector FlowSpec::pack_factor(const Matrix& x) const { return flatten(x); }

Matrix FlowSpec::unpack_factor(const Vector& state) const {
  return unflatten(state, 0, target.n, r);
}

Vector FlowSpec::pack_full(const Matrix& p) const { return flatten(p); }

Matrix FlowSpec::unpack_full(const Vector& state) const {
  return unflatten(state, 0, target.n, target.n);
}

Vector FlowSpec::pack_blocks(const LiftedState& s) const {
  Vector v(dim());
  v << flatten(s.p1), flatten(s.p0), flatten(s.p2);
  return v;
}

LiftedState FlowSpec::unpack_blocks(const Vector& state) const {
  const Eigen::Index rs = target.r_star;
  const Eigen::Index m = target.n - rs;
  return LiftedState{unflatten(state, 0, rs, rs), unflatten(state, rs * rs, rs, m),
                     unflatten(state, rs * rs + rs * m, m, m)};
}

Vector FlowSpec::pack_cascade(const CascadeState& s) const {
  Vector v(dim());
  v << flatten(s.h1), flatten(s.h0), flatten(s.h2);
  return v;
}

CascadeState FlowSpec::unpack_cascade(const Vector& state) const {
  const Eigen::Index rs = target.r_star;
  const Eigen::Index m = target.n - rs;
  return CascadeState{unflatten(state, 0, rs, rs), unflatten(state, rs * rs, rs, m),
                      unflatten(state, rs * rs + rs * m, m, m)};
}

Vector FlowSpec::pack_expanded(const ExpandedState& s) const {
  Vector v(dim());
  Eigen::Index at = 0;
  for (const ExpandedLevel& lv : s.levels) {
    v.segment(at, lv.h1.size()) = flatten(lv.h1);
    at += lv.h1.size();
    v.segment(at, lv.h0.size()) = flatten(lv.h0);
    at += lv.h0.size();
  }
  v.segment(at, s.h2.size()) = flatten(s.h2);
  return v;
}

ExpandedState FlowSpec::unpack_expanded(const Vector& state) const {
  if (!grouping) throw std::invalid_argument("H_EXPANDED needs a grouping");
  ExpandedState s;
  Eigen::Index at = 0;
  Eigen::Index mi = target.n;
  for (Eigen::Index i = 0; i < grouping->k(); ++i) {
    const Eigen::Index ni = grouping->multiplicities[static_cast<size_t>(i)];
    mi -= ni;
    ExpandedLevel lv;
    lv.h1 = unflatten(state, at, ni, ni);
    at += ni * ni;
    lv.h0 = unflatten(state, at, ni, mi);
    at += ni * mi;
    s.levels.push_back(std::move(lv));
  }
  s.h2 = unflatten(state, at, mi, mi);
  return s;
}

Vector FlowSpec::rhs(const Vector& state) const {
  switch (rep) {
    case Representation::X_FLOW:
      return flatten(rhs_x(unpack_factor(state), target.reconstruct()));
    case Representation::Z_FLOW:
      return flatten(rhs_z(unpack_factor(state), target.lambda_diag()));
    case Representation::P_LIFTED:
      return flatten(rhs_p(unpack_full(state), target.lambda_diag()));
    case Representation::P_BLOCKS:
      return pack_blocks(rhs_p_blocks(unpack_blocks(state), target));
    case Representation::H_CASCADE:
      return pack_cascade(rhs_h(unpack_cascade(state), target));
    case Representation::H_EXPANDED:
      return pack_expanded(rhs_h_expanded(unpack_expanded(state), *grouping, target));
  }
  throw std::invalid_argument("bad representation tag");
}

void FlowSpec::resymmetrize(Vector& state) const {
  switch (rep) {
    case Representation::X_FLOW:
    case Representation::Z_FLOW:
      return;
    case Representation::P_LIFTED: {
      state = flatten(symmetrize(unpack_full(state)));
      return;
    }
    case Representation::P_BLOCKS: {
      LiftedState s = unpack_blocks(state);
      s.p1 = symmetrize(s.p1);
      s.p2 = symmetrize(s.p2);
      state = pack_blocks(s);
      return;
    }
    case Representation::H_CASCADE: {
      CascadeState s = unpack_cascade(state);
      s.h1 = symmetrize(s.h1);
      s.h2 = symmetrize(s.h2);
      state = pack_cascade(s);
      return;
    }
    case Representation::H_EXPANDED: {
      ExpandedState s = unpack_expanded(state);
      for (ExpandedLevel& lv : s.levels) lv.h1 = symmetrize(lv.h1);
      s.h2 = symmetrize(s.h2);
      state = pack_expanded(s);
      return;
    }
  }
}

Trajectory integrate(const FlowSpec& spec, const Vector& initial,
                     const IntegratorConfig& config) {
  if (initial.size() != spec.dim()) throw std::invalid_argument("initial state has wrong size");
  if (!(config.step > 0.0) || !(config.t_end > 0.0) || config.record_every < 1 ||
      config.step * config.record_every > config.t_end) {
    throw std::invalid_argument("invalid integrator config");
  }

  Trajectory traj;
  traj.rep = spec.rep;
  Vector y = initial;
  const long steps = static_cast<long>(std::llround(config.t_end / config.step));
  traj.times.push_back(0.0);
  traj.states.push_back(y);

  const double h = config.step;
  for (long k = 0; k < steps; ++k) {
    const double t_now = static_cast<double>(k) * h;
    const Vector k1 = spec.rhs(y);
    const Vector k2 = spec.rhs(y + 0.5 * h * k1);
    const Vector k3 = spec.rhs(y + 0.5 * h * k2);
    const Vector k4 = spec.rhs(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (config.symmetrize) spec.resymmetrize(y);
    if (!y.allFinite()) throw BlowUpError(t_now);
    if ((k + 1) % config.record_every == 0) {
      traj.times.push_back(static_cast<double>(k + 1) * h);
      traj.states.push_back(y);
    }
  }
  return traj;
}

double check_invariant_nullspace(const Trajectory& traj, const FlowSpec& spec,
                                 const Vector& v, double precondition_tol) {
  if (traj.rep != Representation::P_BLOCKS) {
    throw std::invalid_argument("null-space check expects a P_BLOCKS trajectory");
  }
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const LiftedState s0 = spec.unpack_blocks(traj.states.front());
  const double q0 = std::abs(v.dot(s0.p1 * v));
  if (q0 > precondition_tol * std::max(1.0, spectral_norm(s0.p1))) {
    throw std::invalid_argument("v is not in the null space of P1(0)");
  }
  double worst = 0.0;
  for (const Vector& state : traj.states) {
    const LiftedState s = spec.unpack_blocks(state);
    worst = std::max(worst, std::abs(v.dot(s.p1 * v)));
  }
  return worst;
}

}  // namespace lrf
