#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shm/modal.hpp"

namespace shm {

/// Multi-channel acceleration record: one row per channel, one column per
/// sample, uniform interval `dt` seconds.
struct VibrationRecord {
  double dt = 0.0;
  Eigen::MatrixXd data;
  std::vector<std::string> channel_labels;

  Eigen::Index channels() const noexcept { return data.rows(); }
  Eigen::Index samples() const noexcept { return data.cols(); }
  double nyquist() const noexcept { return 0.5 / dt; }
};

void validate(const VibrationRecord& rec);

struct SsiConfig {
  Eigen::Index block_rows = 0;   // p; p * dt should exceed the period of the lowest mode
  Eigen::Index model_order = 0;  // n
  double max_damping = 0.20;
  double rank_tolerance = 1e-10;  // relative to the largest singular value
};

struct StateSpaceRealization {
  Eigen::MatrixXd A;  // n x n, discrete time
  Eigen::MatrixXd C;  // l x n

  Eigen::Index order() const noexcept { return A.rows(); }
};

struct SsiResult {
  StateSpaceRealization realization;
  ModalSet modes;
  Eigen::VectorXd singular_values;  // of the correlation Toeplitz matrix
};

/// Block Toeplitz matrix of output correlations, lp x lp.
///
/// R_i = 1/(N-i) * sum_k y_{k+i} y_kᵀ for lags 1..2p-1, and block (r, c)
/// holds R_{p+r-c}.
Eigen::MatrixXd correlation_toeplitz(const VibrationRecord& rec, Eigen::Index block_rows);

/// Covariance-driven stochastic subspace identification.
SsiResult ssi_cov(const VibrationRecord& rec, const SsiConfig& cfg);

// Converts the eigenstructure of a discrete realization to cleaned modes.
ModalSet modes_from_realization(const StateSpaceRealization& ss, double dt, double max_damping);

struct StabilizationTolerances {
  double freq_rel = 0.01;
  double damping_rel = 0.05;
  double mac_min = 0.98;
};

struct StabilizationPole {
  Mode mode;
  bool stable = false;
};

struct StabilizationOrder {
  Eigen::Index order = 0;
  std::vector<StabilizationPole> poles;
  std::optional<Errc> error;
  std::string message;
};

struct StabilizationDiagram {
  Eigen::Index block_rows = 0;
  StabilizationTolerances tolerances;
  std::vector<StabilizationOrder> orders;  // ascending order
};

/// Runs the identification at every order and flags poles that reappear at
/// the next-lower swept order within tolerance. Per-order failures are
/// recorded in the diagram instead of thrown.
StabilizationDiagram stabilization_sweep(const VibrationRecord& rec, std::vector<Eigen::Index> orders,
                                         Eigen::Index block_rows, const StabilizationTolerances& tol = {},
                                         double max_damping = 0.20);

}  // namespace shm
