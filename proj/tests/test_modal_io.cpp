#include <doctest.h>

#include "shm/io.hpp"
#include "shm/modal_io.hpp"
#include "support/fixtures.hpp"

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

}  // namespace

TEST_CASE("record csv round trip") {
  shm::VibrationRecord rec;
  rec.dt = 0.01;
  rec.data = Eigen::MatrixXd::Random(3, 50);
  rec.channel_labels = {"a1", "a2", "a3"};
  const shm::VibrationRecord back = shm::parse_record_csv(shm::record_to_csv(rec));
  CHECK(back.data == rec.data);
  CHECK(back.channel_labels == rec.channel_labels);
  CHECK(back.dt == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("record csv tolerates blanks, CR and a leading plus") {
  const auto rec = shm::parse_record_csv("time, x\r\n0, +1.5\r\n\r\n0.5, -2\r\n1.0,3e-1\r\n");
  CHECK(rec.samples() == 3);
  CHECK(rec.dt == 0.5);
  CHECK(rec.data(0, 0) == 1.5);
  CHECK(rec.channel_labels[0] == "x");
}

TEST_CASE("record csv errors") {
  CHECK(code_of([] { shm::parse_record_csv(""); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("t,x\n0,1\n1,2\n"); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("time,x\n0,1\n"); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("time,x\n0,1\n1,2\n2.5,3\n"); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("time,x\n0,1\n1,2\n1,3\n"); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("time,x\n0,1\n1,abc\n"); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("time,x\n0,1\n1,2,3\n"); }) == Errc::MalformedRecord);
  CHECK(code_of([] { shm::parse_record_csv("time,x\n0,1\n1,nan\n"); }) == Errc::MalformedRecord);
  // Spacing jitter below 1e-6 relative is accepted.
  CHECK_NOTHROW(shm::parse_record_csv("time,x\n0,1\n1.0000000001,2\n2,3\n"));
}

TEST_CASE("modal set json") {
  const shm::ModalSet set = shm::system_modes(fixture::three_dof_system());
  const std::string text = shm::dump_modal_set(set);
  CHECK(text == shm::dump_modal_set(set));
  CHECK(text.find("\"source\": \"fea\"") != std::string::npos);
  CHECK(text.find("\"source\"") < text.find("\"modes\""));
  const shm::ModalSet back = shm::parse_modal_set(text);
  REQUIRE(back.modes.size() == 3);
  CHECK(back.source == shm::ModalSource::Fea);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.modes[k].frequency == doctest::Approx(set.modes[k].frequency).epsilon(1e-8));
    CHECK(shm::mac(back.modes[k].shape, set.modes[k].shape) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Dumping the parsed set again is a fixed point.
  CHECK(shm::dump_modal_set(back) == text);
}

TEST_CASE("modal set json errors") {
  CHECK(code_of([] { shm::parse_modal_set("{"); }) == Errc::MalformedModalSet);
  CHECK(code_of([] { shm::parse_modal_set(R"({"source":"x","modes":[]})"); }) == Errc::MalformedModalSet);
  CHECK(code_of([] { shm::parse_modal_set(R"({"source":"oma"})"); }) == Errc::MalformedModalSet);
  CHECK(code_of([] {
          shm::parse_modal_set(R"({"source":"oma","modes":[{"frequency_hz":1,"damping_ratio":0,"shape_re":[1],"shape_im":[]}]})");
        }) == Errc::MalformedModalSet);
  CHECK(code_of([] {
          shm::parse_modal_set(R"({"source":"oma","modes":[{"frequency_hz":1,"damping_ratio":0,"shape_re":[0],"shape_im":[0]}]})");
        }) == Errc::MalformedModalSet);
}

TEST_CASE("report numbers carry nine significant digits") {
  CHECK(shm::round_significant(8.0564371123456) == 8.05643711);
  CHECK(shm::round_significant(-0.000392173412345) == -0.000392173412);
  CHECK(shm::round_significant(0.0) == 0.0);
  CHECK(shm::round_significant(123456789012.0) == 123456789000.0);
}

TEST_CASE("stabilization and match reports") {
  const auto f = fixture::three_dof(1);
  const auto diagram = shm::stabilization_sweep(f.record, {2, 4, 60}, 15);
  const auto j = shm::stabilization_to_json(diagram);
  CHECK(j["block_rows"] == 15);
  REQUIRE(j["orders"].size() == 3);
  CHECK(j["orders"][0]["error"].is_null());
  CHECK(j["orders"][2]["error"] == "InvalidConfig");
  CHECK(j["orders"][1]["poles"][0].contains("stable"));

  const shm::ModalSet fea = shm::system_modes(f.system);
  const auto report = shm::match_modes(fea, fea, 0.9);
  const auto m = shm::match_report_to_json(report);
  REQUIRE(m["pairs"].size() == 3);
  CHECK(m["pairs"][0]["mac"] == 1.0);
  CHECK(m["pairs"][0]["freq_diff_rel"] == 0.0);
  CHECK(m["unmatched_oma"].empty());
}
