#include "support/fixtures.hpp"

#include <cmath>

namespace fixture {

shm::MdofSystem three_dof_system() {
  shm::MdofSystem sys = shm::chain_system(Eigen::Vector3d(1.0, 1.0, 1.0), Eigen::Vector3d(16000.0, 12000.0, 8000.0));
  shm::set_modal_damping(sys, ThreeDof::kDamping);
  return sys;
}

ThreeDof three_dof(std::uint64_t seed) {
  ThreeDof f;
  f.system = three_dof_system();
  const Eigen::Index n = shm::sample_count(ThreeDof::kDuration, ThreeDof::kDt);
  const Eigen::MatrixXd load = shm::white_noise(3, n, 1.0, seed);
  f.record = shm::simulate_mdof(f.system, load, ThreeDof::kDt, ThreeDof::kDuration, {}, ThreeDof::kSubsteps);
  return f;
}

shm::MdofSystem sdof_system(double freq_hz, double zeta) {
  const double wn = 2.0 * M_PI * freq_hz;
  shm::MdofSystem sys;
  sys.mass = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.stiffness = Eigen::MatrixXd::Constant(1, 1, wn * wn);
  sys.damping = Eigen::MatrixXd::Constant(1, 1, 2.0 * zeta * wn);
  return sys;
}

Serviceability serviceability(bool amplify) {
  Serviceability f;
  const int count = 11;
  const double span_m = Serviceability::kSpanIn * shm::kMetersPerInch;
  f.model.span_length_in = Serviceability::kSpanIn;
  f.model.vertical_axis = shm::Axis::Z;
  f.model.midspan_nodes = {5, 6, 7};
  for (int i = 0; i < count; ++i)
    f.model.nodes.push_back({i + 1, Eigen::Vector3d(span_m * i / (count - 1), 0.0, 0.0)});
  if (amplify) f.amplified = {5, 6, 7};

  f.history.dt = 0.05;
  f.history.duration = 10.0;
  const Eigen::Index steps = 201;
  for (int i = 0; i < count; ++i) {
    const int id = i + 1;
    const bool boosted = amplify && id >= 5 && id <= 7;
    const double peak_in = boosted ? 0.130 : 0.100 * std::sin(M_PI * i / (count - 1));
    Eigen::Matrix3Xd series = Eigen::Matrix3Xd::Zero(3, steps);
    for (Eigen::Index k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * f.history.dt;
      const double w = std::sin(M_PI * t);  // 0.5 Hz, crest at t = 0.5 + 2j
      series(2, k) = -peak_in * shm::kMetersPerInch * w;
      series(0, k) = 0.2 * peak_in * shm::kMetersPerInch * w;  // small longitudinal sway
    }
    f.history.samples.emplace(id, std::move(series));
  }
  return f;
}

shm::DisplacementHistory zero_history(const shm::FeaModel& model, double dt, double duration) {
  shm::DisplacementHistory h;
  h.dt = dt;
  h.duration = duration;
  const auto steps = static_cast<Eigen::Index>(std::floor(duration / dt + 1e-9)) + 1;
  for (const auto& n : model.nodes) h.samples.emplace(n.id, Eigen::Matrix3Xd::Zero(3, steps));
  return h;
}

shm::PointCloud random_cloud(std::mt19937_64& rng, Eigen::Index n, bool colors, shm::CoordinatePrecision precision) {
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-6, 6);
  std::uniform_int_distribution<int> byte(0, 255);
  shm::PointCloud pc;
  pc.precision = precision;
  pc.points.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d) {
      double v = mantissa(rng) * std::pow(10.0, exponent(rng));
      if (precision == shm::CoordinatePrecision::Float32) v = static_cast<double>(static_cast<float>(v));
      pc.points(d, i) = v;
    }
  }
  if (colors) {
    shm::Colors3u8 c(3, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int d = 0; d < 3; ++d) c(d, i) = static_cast<std::uint8_t>(byte(rng));
    pc.colors = std::move(c);
  }
  return pc;
}

shm::PointCloud box_cloud(std::uint64_t seed, Eigen::Index n, const Eigen::Vector3d& size, bool colors) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> byte(0, 255);
  shm::PointCloud pc;
  pc.points.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) pc.points(d, i) = u(rng) * size[d];
  if (colors) {
    shm::Colors3u8 c(3, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int d = 0; d < 3; ++d) c(d, i) = static_cast<std::uint8_t>(byte(rng));
    pc.colors = std::move(c);
  }
  return pc;
}

}  // namespace fixture
