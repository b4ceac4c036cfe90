#include "shm/ssi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shm {
namespace {

struct ToeplitzSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::Index rank = 0;
};

void check_excitation(const VibrationRecord& rec) {
  const bool constant = ((rec.data.rowwise().maxCoeff() - rec.data.rowwise().minCoeff()).array() == 0.0).all();
  if (constant) throw Error(Errc::InsufficientExcitation, "record is constant on every channel");
}

ToeplitzSvd factor_toeplitz(const VibrationRecord& rec, Eigen::Index block_rows, double rank_tolerance) {
  const Eigen::MatrixXd T = correlation_toeplitz(rec, block_rows);
  check_excitation(rec);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeFullU);
  ToeplitzSvd out{svd.matrixU(), svd.singularValues(), 0};
  if (out.s.size() == 0 || out.s[0] == 0.0)
    throw Error(Errc::InsufficientExcitation, "correlation matrix is identically zero");
  out.rank = (out.s.array() > rank_tolerance * out.s[0]).count();
  return out;
}

StateSpaceRealization realize(const ToeplitzSvd& f, Eigen::Index channels, Eigen::Index block_rows,
                              Eigen::Index order, double rank_tolerance) {
  const Eigen::MatrixXd O = f.U.leftCols(order) * f.s.head(order).cwiseSqrt().asDiagonal();
  const Eigen::Index shifted = channels * (block_rows - 1);

  StateSpaceRealization ss;
  ss.C = O.topRows(channels);
  Eigen::BDCSVD<Eigen::MatrixXd> pinv(O.topRows(shifted), Eigen::ComputeThinU | Eigen::ComputeThinV);
  pinv.setThreshold(rank_tolerance);
  ss.A = pinv.solve(O.bottomRows(shifted));
  return ss;
}

void check_config(const VibrationRecord& rec, const SsiConfig& cfg) {
  if (cfg.block_rows < 2)
    throw Error(Errc::InvalidConfig, "block_rows must be at least 2 for the shift-invariance step");
  if (cfg.model_order < 1 || cfg.model_order > rec.channels() * cfg.block_rows)
    throw Error(Errc::InvalidConfig, "model_order must lie in [1, channels * block_rows]");
  if (!(cfg.max_damping > 0.0) || !(cfg.rank_tolerance > 0.0))
    throw Error(Errc::InvalidConfig, "max_damping and rank_tolerance must be positive");
}

SsiResult identify(const ToeplitzSvd& f, const VibrationRecord& rec, const SsiConfig& cfg) {
  if (cfg.model_order > f.rank)
    throw Error(Errc::RankDeficient, "model order " + std::to_string(cfg.model_order) +
                                         " exceeds numerical rank " + std::to_string(f.rank));
  SsiResult result;
  result.realization = realize(f, rec.channels(), cfg.block_rows, cfg.model_order, cfg.rank_tolerance);
  result.modes = modes_from_realization(result.realization, rec.dt, cfg.max_damping);
  result.singular_values = f.s;
  return result;
}

double relative_gap(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

}  // namespace

void validate(const VibrationRecord& rec) {
  if (!(rec.dt > 0.0) || !std::isfinite(rec.dt)) throw Error(Errc::MalformedRecord, "dt must be positive");
  if (rec.channels() < 1) throw Error(Errc::MalformedRecord, "record has no channels");
  if (rec.samples() < 2) throw Error(Errc::MalformedRecord, "record needs at least two samples");
  if (!rec.data.allFinite()) throw Error(Errc::MalformedRecord, "non-finite sample");
  if (!rec.channel_labels.empty() && static_cast<Eigen::Index>(rec.channel_labels.size()) != rec.channels())
    throw Error(Errc::MalformedRecord, "one label per channel required");
}

Eigen::MatrixXd correlation_toeplitz(const VibrationRecord& rec, Eigen::Index block_rows) {
  validate(rec);
  const Eigen::Index l = rec.channels();
  const Eigen::Index n = rec.samples();
  const Eigen::Index p = block_rows;
  if (p < 1) throw Error(Errc::InvalidConfig, "block_rows must be positive");
  if (n <= 2 * p) throw Error(Errc::RecordTooShort, "record needs more than 2 * block_rows samples");

  // lags[i - 1] = R_i
  std::vector<Eigen::MatrixXd> lags;
  lags.reserve(static_cast<std::size_t>(2 * p - 1));
  for (Eigen::Index i = 1; i <= 2 * p - 1; ++i) {
    const Eigen::Index m = n - i;
    lags.emplace_back(rec.data.rightCols(m) * rec.data.leftCols(m).transpose() / static_cast<double>(m));
  }

  Eigen::MatrixXd T(l * p, l * p);
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index c = 0; c < p; ++c) T.block(r * l, c * l, l, l) = lags[static_cast<std::size_t>(p + r - c - 1)];
  return T;
}

ModalSet modes_from_realization(const StateSpaceRealization& ss, double dt, double max_damping) {
  ModalSet set;
  set.source = ModalSource::Oma;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(ss.A);
  if (eig.info() != Eigen::Success) throw Error(Errc::RankDeficient, "eigen-decomposition of A did not converge");
  const Eigen::VectorXcd lambda = eig.eigenvalues();
  const Eigen::MatrixXcd psi = eig.eigenvectors();
  const Eigen::MatrixXcd C = ss.C.cast<std::complex<double>>();
  const double nyquist = 0.5 / dt;

  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (!(lambda[k].imag() > 0.0)) continue;
    const std::complex<double> mu = std::log(lambda[k]) / dt;
    const double magnitude = std::abs(mu);
    const double frequency = magnitude / (2.0 * std::numbers::pi);
    const double damping = -mu.real() / magnitude;
    if (!(damping > 0.0 && damping < max_damping)) continue;
    if (!(frequency > 0.0 && frequency < nyquist)) continue;
    const Eigen::VectorXcd shape = C * psi.col(k);
    if (shape.norm() == 0.0) continue;
    set.modes.push_back({frequency, damping, normalize_shape(shape)});
  }
  sort_and_merge(set);
  return set;
}

SsiResult ssi_cov(const VibrationRecord& rec, const SsiConfig& cfg) {
  validate(rec);
  check_config(rec, cfg);
  const ToeplitzSvd f = factor_toeplitz(rec, cfg.block_rows, cfg.rank_tolerance);
  return identify(f, rec, cfg);
}

StabilizationDiagram stabilization_sweep(const VibrationRecord& rec, std::vector<Eigen::Index> orders,
                                         Eigen::Index block_rows, const StabilizationTolerances& tol,
                                         double max_damping) {
  if (orders.empty()) throw Error(Errc::InvalidConfig, "no model orders to sweep");
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());

  StabilizationDiagram diagram;
  diagram.block_rows = block_rows;
  diagram.tolerances = tol;
  diagram.orders.reserve(orders.size());  // `previous` points into this vector

  std::optional<ToeplitzSvd> factor;
  std::optional<Error> shared_error;
  try {
    validate(rec);
    check_config(rec, {block_rows, 1, max_damping, 1e-10});
    factor = factor_toeplitz(rec, block_rows, 1e-10);
  } catch (const Error& e) {
    shared_error = e;
  }

  const StabilizationOrder* previous = nullptr;
  for (Eigen::Index order : orders) {
    StabilizationOrder entry;
    entry.order = order;
    try {
      if (shared_error) throw *shared_error;
      const SsiConfig cfg{block_rows, order, max_damping, 1e-10};
      check_config(rec, cfg);
      for (auto& m : identify(*factor, rec, cfg).modes.modes) entry.poles.push_back({std::move(m), false});
    } catch (const Error& e) {
      entry.error = e.code();
      entry.message = e.what();
    }
    if (previous) {
      for (auto& pole : entry.poles) {
        for (const auto& prior : previous->poles) {
          if (relative_gap(pole.mode.frequency, prior.mode.frequency) <= tol.freq_rel &&
              relative_gap(pole.mode.damping, prior.mode.damping) <= tol.damping_rel &&
              mac(pole.mode.shape, prior.mode.shape) >= tol.mac_min) {
            pole.stable = true;
            break;
          }
        }
      }
    }
    diagram.orders.push_back(std::move(entry));
    previous = &diagram.orders.back();
  }
  return diagram;
}

}  // namespace shm
