#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "shm/modal.hpp"
#include "shm/ssi.hpp"

namespace shm {

/// Linear multi-degree-of-freedom system M ü + C u̇ + K u = f.
struct MdofSystem {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd damping;

  Eigen::Index dofs() const noexcept { return mass.rows(); }
};

// Lumped-mass chain: spring i connects dof i-1 to dof i (dof -1 is ground).
MdofSystem chain_system(const Eigen::VectorXd& masses, const Eigen::VectorXd& springs);

// Adds classical modal damping with ratio `zeta` in every undamped mode.
void set_modal_damping(MdofSystem& sys, double zeta);

struct InitialConditions {
  Eigen::VectorXd displacement;  // empty means zero
  Eigen::VectorXd velocity;
};

struct MdofResponse {
  VibrationRecord acceleration;
  Eigen::MatrixXd displacement;  // dofs x samples
  Eigen::MatrixXd velocity;
};

/// Newmark average-acceleration integration (beta = 1/4, gamma = 1/2).
///
/// Produces floor(duration / dt) + 1 samples starting at t = 0. `excitation`
/// holds the load per dof per sample; an empty matrix means no load. With
/// `substeps` > 1 each output interval is integrated in that many equal steps
/// with the load interpolated linearly, which shrinks the scheme's period
/// elongation by substeps².
MdofResponse simulate_mdof_response(const MdofSystem& sys, const Eigen::MatrixXd& excitation, double dt,
                                    double duration, const InitialConditions& ic = {}, int substeps = 1);

inline VibrationRecord simulate_mdof(const MdofSystem& sys, const Eigen::MatrixXd& excitation, double dt,
                                     double duration, const InitialConditions& ic = {}, int substeps = 1) {
  return simulate_mdof_response(sys, excitation, dt, duration, ic, substeps).acceleration;
}

Eigen::Index sample_count(double duration, double dt);

// Independent zero-mean Gaussian load per dof, reproducible from `seed`.
Eigen::MatrixXd white_noise(Eigen::Index dofs, Eigen::Index samples, double stddev, std::uint64_t seed);

/// Continuous-time modes of the system (shapes are displacement shapes),
/// tagged as FEA-side reference modes.
ModalSet system_modes(const MdofSystem& sys);

}  // namespace shm
