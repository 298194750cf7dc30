#include <doctest.h>

#include <fstream>

#include "qoc/spin_system.hpp"
#include "test_util.hpp"

using qoc::ConfigError;
using qoc::Mat;

namespace {

qoc::SpinSystem sys_from_json(const std::string& text) {
  return qoc::load_system(nlohmann::json::parse(text));
}

}  // namespace

TEST_CASE("term drift sums coefficient-weighted pauli strings") {
  const qoc::SpinSystem sys = qoc::make_term_system(
      2, {{std::numbers::pi / 2, qoc::parse_label("ZZ", 2)}});
  const Mat h = qoc::build_drift(sys);
  const Mat want = std::numbers::pi / 2 * qoc::to_matrix(qoc::parse_label("ZZ", 2));
  CHECK(tutil::max_abs(h - want) <= 1e-14);
  CHECK(h(0, 0).real() == doctest::Approx(std::numbers::pi / 2));
  CHECK(h(1, 1).real() == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("nmr drift: offsets in Hz become angular z terms") {
  // One spin at offset nu: H = 2*pi*nu * sigma_z / 2.
  const double nu = 7.5;
  const qoc::SpinSystem sys = qoc::make_nmr_system(1, {nu}, {{0.0}});
  const Mat h = qoc::build_drift(sys);
  const Mat want =
      std::numbers::pi * nu * qoc::to_matrix(qoc::parse_label("Z", 1));
  CHECK(tutil::max_abs(h - want) <= 1e-12);
}

TEST_CASE("nmr drift: J couplings become pi*J/2 zz terms") {
  const double j01 = 3.0, nu0 = 1.0, nu1 = -2.0;
  const qoc::SpinSystem sys =
      qoc::make_nmr_system(2, {nu0, nu1}, {{0.0, j01}, {j01, 0.0}});
  const Mat h = qoc::build_drift(sys);
  const Mat want =
      std::numbers::pi * nu0 * qoc::to_matrix(qoc::parse_label("ZI", 2)) +
      std::numbers::pi * nu1 * qoc::to_matrix(qoc::parse_label("IZ", 2)) +
      std::numbers::pi * j01 / 2 * qoc::to_matrix(qoc::parse_label("ZZ", 2));
  CHECK(tutil::max_abs(h - want) <= 1e-12);
}

TEST_CASE("system validation diagnoses the offending field") {
  CHECK_THROWS_AS(qoc::make_term_system(0, {}), ConfigError);
  CHECK_THROWS_AS(qoc::make_term_system(13, {{1.0, qoc::parse_label(std::string(13, 'Z'), 13)}}),
                  ConfigError);
  CHECK_THROWS_AS(qoc::make_term_system(2, {}), ConfigError);  // no terms, no nmr
  CHECK_THROWS_AS(
      qoc::make_term_system(3, {{1.0, qoc::parse_label("XYZ", 3)}}),  // weight 3
      ConfigError);
  CHECK_NOTHROW(
      qoc::make_term_system(3, {{1.0, qoc::parse_label("XYZ", 3)}}, 3));

  try {
    qoc::make_nmr_system(2, {1.0, 2.0}, {{0.0, 1.0}, {2.0, 0.0}});  // asymmetric
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("couplings_hz[0][1]") != std::string::npos);
  }
  CHECK_THROWS_AS(qoc::make_nmr_system(2, {1.0}, {{0.0, 0.0}, {0.0, 0.0}}),
                  ConfigError);  // offsets length
  CHECK_THROWS_AS(qoc::make_nmr_system(2, {1.0, 2.0}, {{0.5, 0.0}, {0.0, 0.0}}),
                  ConfigError);  // nonzero diagonal
}

TEST_CASE("system JSON forms") {
  const qoc::SpinSystem terms = sys_from_json(
      R"({"n":2,"terms":[{"coeff":1.5,"pauli":"ZZ"},{"coeff":-0.5,"pauli":"XI"}]})");
  CHECK(terms.n == 2);
  REQUIRE(terms.terms.size() == 2);
  CHECK(terms.terms[1].coeff == -0.5);

  const qoc::SpinSystem nmr = sys_from_json(
      R"({"n":2,"nmr":{"offsets_hz":[10,-20],"couplings_hz":[[0,7],[7,0]]}})");
  REQUIRE(nmr.nmr.has_value());
  CHECK(nmr.nmr->couplings_hz[1][0] == 7.0);

  CHECK_THROWS_AS(sys_from_json(R"({"terms":[]})"), ConfigError);       // no n
  CHECK_THROWS_AS(sys_from_json(R"({"n":2})"), ConfigError);            // neither
  CHECK_THROWS_AS(
      sys_from_json(
          R"({"n":1,"terms":[{"coeff":1,"pauli":"Z"}],"nmr":{"offsets_hz":[0],"couplings_hz":[[0]]}})"),
      ConfigError);  // both
  CHECK_THROWS_AS(sys_from_json(R"({"n":2,"terms":[]})"), ConfigError);
  CHECK_THROWS_AS(sys_from_json(R"({"n":2,"terms":[{"coeff":"a","pauli":"ZZ"}]})"),
                  ConfigError);
}

TEST_CASE("missing system file error names the path") {
  try {
    qoc::load_system_file("/nonexistent/sys.json");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/sys.json") != std::string::npos);
  }
}

TEST_CASE("collective controls: spectrum and commutator") {
  const qoc::ControlGenerators g = qoc::build_controls(3);
  Eigen::SelfAdjointEigenSolver<Mat> es(g.gx);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double want[] = {-3, -1, -1, -1, 1, 1, 1, 3};
  for (int i = 0; i < 8; ++i) CHECK(ev[i] == doctest::Approx(want[i]).epsilon(1e-12));

  // [Gx, Gy] = 2i sum_k sigma_z^k for collective fields.
  Mat zsum = Mat::Zero(8, 8);
  for (int k = 0; k < 3; ++k) zsum += qoc::embed_site(3, k, qoc::kAxisZ);
  CHECK(tutil::max_abs(g.gx * g.gy - g.gy * g.gx -
                       qoc::Complex(0, 2) * zsum) <= 1e-12);
}
