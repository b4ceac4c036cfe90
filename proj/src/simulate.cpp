#include "shm/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace shm {
namespace {

constexpr double kBeta = 0.25;
constexpr double kGamma = 0.5;

void check_system(const MdofSystem& sys) {
  const Eigen::Index n = sys.dofs();
  if (n < 1 || sys.mass.cols() != n || sys.stiffness.rows() != n || sys.stiffness.cols() != n ||
      sys.damping.rows() != n || sys.damping.cols() != n)
    throw Error(Errc::InvalidConfig, "mass, stiffness and damping must be square and of equal size");
  if (!sys.mass.isApprox(sys.mass.transpose()))
    throw Error(Errc::NonPositiveDefiniteMass, "mass matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sys.mass);
  if (llt.info() != Eigen::Success) throw Error(Errc::NonPositiveDefiniteMass, "mass matrix is not positive definite");
}

}  // namespace

MdofSystem chain_system(const Eigen::VectorXd& masses, const Eigen::VectorXd& springs) {
  const Eigen::Index n = masses.size();
  if (springs.size() != n) throw Error(Errc::InvalidConfig, "one spring per mass required");
  MdofSystem sys;
  sys.mass = masses.asDiagonal();
  sys.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.stiffness(i, i) += springs[i];
    if (i > 0) {
      sys.stiffness(i - 1, i - 1) += springs[i];
      sys.stiffness(i - 1, i) -= springs[i];
      sys.stiffness(i, i - 1) -= springs[i];
    }
  }
  sys.damping = Eigen::MatrixXd::Zero(n, n);
  return sys;
}

void set_modal_damping(MdofSystem& sys, double zeta) {
  check_system(sys);
  // Mass-normalized modes: ΦᵀMΦ = I, so C = M Φ diag(2ζω) Φᵀ M.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sys.stiffness, sys.mass);
  const Eigen::VectorXd omega = ges.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& phi = ges.eigenvectors();
  const Eigen::MatrixXd mphi = sys.mass * phi;
  sys.damping = mphi * (2.0 * zeta * omega).asDiagonal() * mphi.transpose();
}

Eigen::Index sample_count(double duration, double dt) {
  return static_cast<Eigen::Index>(std::floor(duration / dt + 1e-9)) + 1;
}

MdofResponse simulate_mdof_response(const MdofSystem& sys, const Eigen::MatrixXd& excitation, double dt,
                                    double duration, const InitialConditions& ic, int substeps) {
  check_system(sys);
  if (substeps < 1) throw Error(Errc::InvalidConfig, "substeps must be at least 1");
  if (!(dt > 0.0) || !(duration >= 0.0)) throw Error(Errc::InvalidConfig, "dt must be positive, duration non-negative");
  const Eigen::Index n = sys.dofs();
  const Eigen::Index steps = sample_count(duration, dt);
  const bool loaded = excitation.size() != 0;
  if (loaded && (excitation.rows() != n || excitation.cols() < steps))
    throw Error(Errc::InvalidConfig, "excitation must provide one row per dof and a column per sample");
  auto load = [&](Eigen::Index k) -> Eigen::VectorXd {
    return loaded ? Eigen::VectorXd(excitation.col(k)) : Eigen::VectorXd::Zero(n);
  };

  Eigen::VectorXd u = ic.displacement.size() ? ic.displacement : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = ic.velocity.size() ? ic.velocity : Eigen::VectorXd::Zero(n);
  if (u.size() != n || v.size() != n) throw Error(Errc::InvalidConfig, "initial conditions must have one entry per dof");

  const Eigen::LLT<Eigen::MatrixXd> mass_llt(sys.mass);
  Eigen::VectorXd a = mass_llt.solve(load(0) - sys.damping * v - sys.stiffness * u);

  const double h = dt / substeps;
  const double a0 = 1.0 / (kBeta * h * h);
  const double a1 = kGamma / (kBeta * h);
  const double a2 = 1.0 / (kBeta * h);
  const double a3 = 1.0 / (2.0 * kBeta) - 1.0;
  const double a4 = kGamma / kBeta - 1.0;
  const double a5 = h * (kGamma / (2.0 * kBeta) - 1.0);
  const Eigen::PartialPivLU<Eigen::MatrixXd> effective(sys.stiffness + a1 * sys.damping + a0 * sys.mass);

  MdofResponse out;
  out.acceleration.dt = dt;
  out.acceleration.data.resize(n, steps);
  out.displacement.resize(n, steps);
  out.velocity.resize(n, steps);
  for (Eigen::Index i = 0; i < n; ++i) out.acceleration.channel_labels.push_back("dof" + std::to_string(i + 1));

  out.acceleration.data.col(0) = a;
  out.displacement.col(0) = u;
  out.velocity.col(0) = v;
  for (Eigen::Index k = 1; k < steps; ++k) {
    const Eigen::VectorXd f_prev = load(k - 1);
    const Eigen::VectorXd f_next = load(k);
    for (int j = 1; j <= substeps; ++j) {
      const double w = static_cast<double>(j) / substeps;
      const Eigen::VectorXd f = j == substeps ? f_next : Eigen::VectorXd((1.0 - w) * f_prev + w * f_next);
      const Eigen::VectorXd rhs =
          f + sys.mass * (a0 * u + a2 * v + a3 * a) + sys.damping * (a1 * u + a4 * v + a5 * a);
      const Eigen::VectorXd u_next = effective.solve(rhs);
      const Eigen::VectorXd a_next = a0 * (u_next - u) - a2 * v - a3 * a;
      v += h * ((1.0 - kGamma) * a + kGamma * a_next);
      u = u_next;
      a = a_next;
    }
    out.acceleration.data.col(k) = a;
    out.displacement.col(k) = u;
    out.velocity.col(k) = v;
  }
  return out;
}

Eigen::MatrixXd white_noise(Eigen::Index dofs, Eigen::Index samples, double stddev, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  Eigen::MatrixXd out(dofs, samples);
  for (Eigen::Index k = 0; k < samples; ++k)
    for (Eigen::Index i = 0; i < dofs; ++i) out(i, k) = dist(rng);
  return out;
}

ModalSet system_modes(const MdofSystem& sys) {
  check_system(sys);
  const Eigen::Index n = sys.dofs();
  const Eigen::LLT<Eigen::MatrixXd> mass_llt(sys.mass);
  Eigen::MatrixXd state = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  state.topRightCorner(n, n).setIdentity();
  state.bottomLeftCorner(n, n) = -mass_llt.solve(sys.stiffness);
  state.bottomRightCorner(n, n) = -mass_llt.solve(sys.damping);

  Eigen::EigenSolver<Eigen::MatrixXd> eig(state);
  ModalSet set;
  set.source = ModalSource::Fea;
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    const std::complex<double> mu = eig.eigenvalues()[k];
    if (!(mu.imag() > 0.0)) continue;
    const double magnitude = std::abs(mu);
    set.modes.push_back({magnitude / (2.0 * std::numbers::pi), -mu.real() / magnitude,
                         normalize_shape(eig.eigenvectors().col(k).head(n))});
  }
  sort_and_merge(set);
  return set;
}

}  // namespace shm
