#include <doctest.h>

#include <cmath>

#include "shm/simulate.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using shm::Errc;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const shm::Error& e) {
    return e.code();
  }
  FAIL("expected shm::Error");
  return Errc::Io;
}

// Times where x crosses zero going downward, linearly interpolated.
std::vector<double> down_crossings(const Eigen::RowVectorXd& x, double dt) {
  std::vector<double> out;
  for (Eigen::Index k = 1; k < x.size(); ++k)
    if (x[k - 1] > 0.0 && x[k] <= 0.0) out.push_back(dt * (static_cast<double>(k - 1) + x[k - 1] / (x[k - 1] - x[k])));
  return out;
}

// Local maxima refined with a parabola through the three samples.
std::vector<double> peaks(const Eigen::RowVectorXd& x) {
  std::vector<double> out;
  for (Eigen::Index k = 1; k + 1 < x.size(); ++k) {
    if (x[k] > x[k - 1] && x[k] >= x[k + 1] && x[k] > 0.0) {
      const double a = x[k - 1], b = x[k], c = x[k + 1];
      const double denom = a - 2.0 * b + c;
      const double off = denom == 0.0 ? 0.0 : 0.5 * (a - c) / denom;
      out.push_back(b - 0.25 * (a - c) * off);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("chain system matrices") {
  const shm::MdofSystem sys = shm::chain_system(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(10, 20, 30));
  Eigen::Matrix3d K;
  K << 30, -20, 0, -20, 50, -30, 0, -30, 30;
  CHECK(sys.stiffness == K);
  CHECK(sys.mass == Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix());
  CHECK(sys.damping.isZero(0.0));
}

TEST_CASE("zero load and zero initial state give silence") {
  const auto sys = fixture::three_dof_system();
  const shm::VibrationRecord rec = shm::simulate_mdof(sys, Eigen::MatrixXd(), 0.01, 2.0);
  CHECK(rec.samples() == 201);
  CHECK(rec.channels() == 3);
  CHECK(rec.data.isZero(0.0));
  CHECK(rec.channel_labels == std::vector<std::string>{"dof1", "dof2", "dof3"});
}

TEST_CASE("free decay matches the closed form") {
  const double zeta = 0.02, fn = 1.5;
  const oracle::Sdof exact{2.0 * M_PI * fn, zeta, 0.01, 0.0};
  const double period = exact.damped_period();
  const double dt = period / 100.0;
  const double duration = 10.0 * period;
  shm::InitialConditions ic;
  ic.displacement = Eigen::VectorXd::Constant(1, exact.x0);
  ic.velocity = Eigen::VectorXd::Zero(1);
  const auto response = shm::simulate_mdof_response(fixture::sdof_system(fn, zeta), Eigen::MatrixXd(), dt, duration, ic);
  const Eigen::RowVectorXd x = response.displacement.row(0);

  // Period from zero crossings.
  const auto zc = down_crossings(x, dt);
  REQUIRE(zc.size() >= 9);
  const double measured_period = (zc.back() - zc.front()) / static_cast<double>(zc.size() - 1);
  CHECK(std::abs(measured_period - period) / period < 1e-3);

  // Amplitude decay per cycle.
  const auto pk = peaks(x);
  REQUIRE(pk.size() >= 9);
  const double measured_decrement = std::log(pk.front() / pk.back()) / static_cast<double>(pk.size() - 1);
  const double exact_decrement = zeta * exact.wn * period;
  CHECK(std::abs(measured_decrement - exact_decrement) / exact_decrement < 1e-3);

  // Initial acceleration is the closed-form one.
  CHECK(response.acceleration.data(0, 0) == doctest::Approx(exact.acceleration(0.0)).epsilon(1e-12));
  // Pointwise drift stays small over the first period.
  for (Eigen::Index k = 0; k <= 100; ++k)
    CHECK(std::abs(x[k] - exact.displacement(dt * static_cast<double>(k))) <= 1e-3 * exact.x0 + 0.025 * exact.x0 * k / 100.0);
}

TEST_CASE("substeps shrink the period error") {
  const double fn = 30.0;  // coarse: 3.3 samples per period at dt = 0.01
  const oracle::Sdof exact{2.0 * M_PI * fn, 0.0, 1.0, 0.0};
  shm::InitialConditions ic;
  ic.displacement = Eigen::VectorXd::Ones(1);
  auto period_error = [&](int substeps) {
    const auto r = shm::simulate_mdof_response(fixture::sdof_system(fn, 0.0), Eigen::MatrixXd(), 0.001, 2.0, ic, substeps);
    const auto zc = down_crossings(r.displacement.row(0), 0.001);
    return std::abs((zc.back() - zc.front()) / static_cast<double>(zc.size() - 1) - exact.damped_period()) /
           exact.damped_period();
  };
  const double one = period_error(1);
  const double ten = period_error(10);
  CHECK(one > 1e-3);
  CHECK(ten < one / 50.0);
}

TEST_CASE("damped free vibration never gains energy") {
  const auto sys = fixture::three_dof_system();
  shm::InitialConditions ic;
  ic.displacement = Eigen::Vector3d(0.01, -0.02, 0.03);
  ic.velocity = Eigen::Vector3d(0.1, 0.0, -0.1);
  for (int substeps : {1, 4}) {
    const auto r = shm::simulate_mdof_response(sys, Eigen::MatrixXd(), 0.005, 3.0, ic, substeps);
    double previous = INFINITY;
    for (Eigen::Index k = 0; k < r.displacement.cols(); ++k) {
      const Eigen::VectorXd u = r.displacement.col(k), v = r.velocity.col(k);
      const double energy = 0.5 * v.dot(sys.mass * v) + 0.5 * u.dot(sys.stiffness * u);
      CHECK(energy <= previous * (1.0 + 1e-12));
      previous = energy;
    }
  }
}

TEST_CASE("system modes match the normal-mode oracle") {
  const auto sys = fixture::three_dof_system();
  const shm::ModalSet modes = shm::system_modes(sys);
  const auto truth = oracle::normal_modes(sys.mass, sys.stiffness);
  REQUIRE(modes.modes.size() == 3);
  CHECK(modes.source == shm::ModalSource::Fea);
  for (int k = 0; k < 3; ++k) {
    const auto& m = modes.modes[static_cast<std::size_t>(k)];
    CHECK(m.frequency == doctest::Approx(truth.frequency_hz[k]).epsilon(1e-9));
    CHECK(m.damping == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(shm::mac(m.shape, truth.shapes.col(k)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(truth.frequency_hz[0] == doctest::Approx(8.0596).epsilon(1e-4));
  CHECK(truth.frequency_hz[1] == doctest::Approx(20.1317).epsilon(1e-4));
  CHECK(truth.frequency_hz[2] == doctest::Approx(30.7937).epsilon(1e-4));
}

TEST_CASE("white noise is reproducible") {
  const Eigen::MatrixXd a = shm::white_noise(3, 1000, 2.0, 42);
  CHECK(a == shm::white_noise(3, 1000, 2.0, 42));
  CHECK(a != shm::white_noise(3, 1000, 2.0, 43));
  const double sd = std::sqrt((a.array() - a.mean()).square().mean());
  CHECK(sd == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sample count") {
  CHECK(shm::sample_count(112.0, 0.01) == 11201);
  CHECK(shm::sample_count(0.0, 0.01) == 1);
  CHECK(shm::sample_count(0.3, 0.1) == 4);
}

TEST_CASE("simulation input errors") {
  auto sys = fixture::three_dof_system();
  sys.mass(0, 0) = -1.0;
  CHECK(code_of([&] { shm::simulate_mdof(sys, Eigen::MatrixXd(), 0.01, 1.0); }) == Errc::NonPositiveDefiniteMass);
  sys = fixture::three_dof_system();
  sys.mass(0, 1) = 0.5;
  CHECK(code_of([&] { shm::simulate_mdof(sys, Eigen::MatrixXd(), 0.01, 1.0); }) == Errc::NonPositiveDefiniteMass);
  sys = fixture::three_dof_system();
  CHECK(code_of([&] { shm::simulate_mdof(sys, Eigen::MatrixXd::Zero(2, 101), 0.01, 1.0); }) == Errc::InvalidConfig);
  CHECK(code_of([&] { shm::simulate_mdof(sys, Eigen::MatrixXd(), 0.0, 1.0); }) == Errc::InvalidConfig);
  CHECK(code_of([&] { shm::simulate_mdof(sys, Eigen::MatrixXd(), 0.01, 1.0, {}, 0); }) == Errc::InvalidConfig);
}
