#include "ionlight/modes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ionlight/constants.hpp"

namespace ionlight::modes {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dimensionless equilibrium positions (units of the Coulomb length scale):
// solves u_i = sum_{j != i} sgn(u_i - u_j) / (u_i - u_j)^2 by damped Newton.
VectorXd equilibrium_positions(int n) {
  VectorXd u(n);
  // Quasi-uniform seed; the empirical minimal spacing of a harmonic chain.
  const double spacing = 2.018 / std::pow(n, 0.559);
  for (int i = 0; i < n; ++i) u(i) = spacing * (i - 0.5 * (n - 1));
  if (n == 1) {
    u(0) = 0.0;
    return u;
  }

  auto residual = [n](const VectorXd& x) {
    VectorXd f = x;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = x(i) - x(j);
        f(i) -= (d > 0 ? 1.0 : -1.0) / (d * d);
      }
    }
    return f;
  };

  VectorXd f = residual(u);
  for (int iter = 0; iter < 200; ++iter) {
    MatrixXd jac = MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = std::abs(u(i) - u(j));
        const double w = 2.0 / (d * d * d);
        jac(i, i) += w;
        jac(i, j) -= w;
      }
    }
    const VectorXd step = jac.ldlt().solve(-f);
    double t = 1.0;
    VectorXd u_next, f_next;
    for (int halvings = 0; halvings < 40; ++halvings) {
      u_next = u + t * step;
      f_next = residual(u_next);
      if (f_next.norm() < f.norm() || f.norm() == 0.0) break;
      t *= 0.5;
    }
    const double rel_move = (t * step).lpNorm<Eigen::Infinity>() /
                            std::max(1.0, u.lpNorm<Eigen::Infinity>());
    u = u_next;
    f = f_next;
    if (rel_move < 1e-12) return u;
  }
  throw std::runtime_error("ion chain equilibrium solve did not converge");
}

// Deterministic eigenvector sign: make the component sum positive, falling
// back to the first significant entry.
void fix_sign(Eigen::Ref<VectorXd> v) {
  const double s = v.sum();
  if (s < -1e-12) {
    v = -v;
    return;
  }
  if (std::abs(s) <= 1e-12) {
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > 1e-9) {
        if (v(i) < 0) v = -v;
        return;
      }
    }
  }
}

}  // namespace

double zero_point_spread(double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0))
    throw std::invalid_argument("zero_point_spread needs positive mass and frequency");
  return std::sqrt(constants::hbar / (2.0 * mass * omega));
}

double doppler_nbar(double linewidth, double omega) {
  return linewidth / (2.0 * omega);
}

ChainModes chain_normal_modes(int ion_count, double ion_mass, double axial_com,
                              double horizontal, double vertical) {
  if (ion_count < 1) throw std::invalid_argument("ion_count must be >= 1");
  if (!(axial_com > 0.0) || !(horizontal > 0.0) || !(vertical > 0.0))
    throw std::invalid_argument("trap frequencies must be positive");
  if (ion_count > 1 && (horizontal <= axial_com || vertical <= axial_com))
    throw std::invalid_argument(
        "transverse frequencies must exceed the axial COM frequency");

  const int n = ion_count;
  const VectorXd u = equilibrium_positions(n);

  // Coulomb length scale for the axial well.
  const double ell =
      std::cbrt(constants::elementary_charge * constants::elementary_charge /
                (4.0 * constants::pi * constants::vacuum_permittivity *
                 ion_mass * axial_com * axial_com));

  // Dimensionless interaction matrix: row sums vanish.
  MatrixXd coulomb = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::abs(u(i) - u(j));
      const double w = 1.0 / (d * d * d);
      coulomb(i, j) = -w;
      coulomb(i, i) += w;
    }
  }

  ChainModes out;
  out.ion_count = n;
  out.ion_mass = ion_mass;
  out.frequencies.reserve(3 * n);
  out.direction.reserve(3 * n);
  out.mode_matrix = MatrixXd::Zero(3 * n, 3 * n);
  out.equilibrium.resize(n);
  for (int i = 0; i < n; ++i) out.equilibrium[i] = ell * u(i);

  int col = 0;
  auto add_block = [&](const MatrixXd& hessian, int axis_row,
                       ModeDirection dir, const char* what) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(hessian);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("mode eigen-decomposition failed");
    for (int p = 0; p < n; ++p) {
      const double lam = es.eigenvalues()(p);  // ascending
      if (lam <= 0.0)
        throw std::invalid_argument(std::string(what) +
                                    ": non-positive squared mode frequency "
                                    "(zipper instability)");
      VectorXd v = es.eigenvectors().col(p);
      fix_sign(v);
      out.frequencies.push_back(axial_com * std::sqrt(lam));
      out.direction.push_back(dir);
      out.mode_matrix.block(axis_row * n, col, n, 1) = v;
      ++col;
    }
  };

  // Axial (chain axis = beam x): Hessian 1 + 2 * coulomb.
  add_block(MatrixXd::Identity(n, n) + 2.0 * coulomb, kAxisX,
            ModeDirection::axial, "axial");
  // Transverse blocks soften with the Coulomb term.
  const double rh = horizontal / axial_com;
  add_block(rh * rh * MatrixXd::Identity(n, n) - coulomb, kAxisY,
            ModeDirection::horizontal, "horizontal");
  const double rv = vertical / axial_com;
  add_block(rv * rv * MatrixXd::Identity(n, n) - coulomb, kAxisZ,
            ModeDirection::vertical, "vertical");

  return out;
}

bool check_alignment(const ChainModes& chain, double epsilon) {
  const double bound = epsilon / std::sqrt(chain.ion_count);
  for (int p = 0; p < chain.mode_count(); ++p) {
    const int dominant = chain.direction[p] == ModeDirection::axial ? kAxisX
                         : chain.direction[p] == ModeDirection::horizontal
                             ? kAxisY
                             : kAxisZ;
    for (int axis = 0; axis < 3; ++axis) {
      if (axis == dominant) continue;
      for (int ion = 0; ion < chain.ion_count; ++ion) {
        if (std::abs(chain.projection(p, static_cast<Axis>(axis), ion)) >=
            bound)
          return false;
      }
    }
  }
  return true;
}

ChainModes rotate_modes(const ChainModes& chain, Axis axis_a, Axis axis_b,
                        double angle) {
  ChainModes out = chain;
  const double c = std::cos(angle), s = std::sin(angle);
  const int n = chain.ion_count;
  for (int p = 0; p < chain.mode_count(); ++p) {
    for (int ion = 0; ion < n; ++ion) {
      const double va = chain.mode_matrix(axis_a * n + ion, p);
      const double vb = chain.mode_matrix(axis_b * n + ion, p);
      out.mode_matrix(axis_a * n + ion, p) = c * va - s * vb;
      out.mode_matrix(axis_b * n + ion, p) = s * va + c * vb;
    }
  }
  return out;
}

namespace {

BeamCoupling build_coupling(const beam::BeamGeometry& b,
                            const beam::BeamFramePoint& eq,
                            const ChainModes& chain, int ion,
                            std::vector<std::string>& warnings,
                            const char* tag) {
  BeamCoupling out;
  const double yRx = b.rayleigh_range(beam::Axis::x);
  const double yRz = b.rayleigh_range(beam::Axis::z);
  out.gamma0_x = eq.x / b.waist_x;
  out.gamma0_z = eq.z / b.waist_z;
  out.lambda0_x = (eq.y - b.focal_y_x) / yRx;
  out.lambda0_z = (eq.y - b.focal_y_z) / yRz;

  for (double lam : {out.lambda0_x, out.lambda0_z}) {
    if (std::abs(lam) >= 0.5)
      throw std::invalid_argument(
          std::string(tag) +
          ": equilibrium defocus of 0.5 Rayleigh ranges or more is outside "
          "the supported regime");
    if (std::abs(lam) > 0.1)
      warnings.push_back(std::string(tag) +
                         ": defocus exceeds 0.1 Rayleigh ranges");
  }

  const double k = b.wavevector();
  const double sign = b.propagation_sign;
  const int m = chain.mode_count();
  out.c_beta.resize(m);
  out.c_gamma_x.resize(m);
  out.c_gamma_z.resize(m);
  out.c_lambda_x.resize(m);
  out.c_lambda_z.resize(m);
  for (int p = 0; p < m; ++p) {
    const double zeta =
        zero_point_spread(chain.ion_mass, chain.frequencies[p]);
    const double nu_x = chain.projection(p, kAxisX, ion);
    const double nu_y = chain.projection(p, kAxisY, ion);
    const double nu_z = chain.projection(p, kAxisZ, ion);
    out.c_beta[p] = sign * k * zeta * nu_y;
    out.c_gamma_x[p] = zeta * nu_x / b.waist_x;
    out.c_gamma_z[p] = zeta * nu_z / b.waist_z;
    out.c_lambda_x[p] = sign * zeta * nu_y / yRx;
    out.c_lambda_z[p] = sign * zeta * nu_y / yRz;
  }
  return out;
}

}  // namespace

CouplingParams coupling_params(const beam::BeamGeometry& beam1,
                               const beam::BeamGeometry& beam2,
                               const beam::BeamFramePoint& eq1,
                               const beam::BeamFramePoint& eq2,
                               const ChainModes& chain, int ion) {
  beam1.validate();
  beam2.validate();
  if (ion < 0 || ion >= chain.ion_count)
    throw std::invalid_argument("addressed ion index out of range");

  CouplingParams out;
  out.propagation_sign1 = beam1.propagation_sign;
  out.propagation_sign2 = beam2.propagation_sign;
  out.beam1 = build_coupling(beam1, eq1, chain, ion, out.warnings, "beam1");
  out.beam2 = build_coupling(beam2, eq2, chain, ion, out.warnings, "beam2");
  return out;
}

}  // namespace ionlight::modes
