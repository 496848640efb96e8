#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "copspec/error.hpp"
#include "copspec/io.hpp"

using namespace copspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "copspec_test_io";
  fs::create_directories(dir);
  return dir / name;
}

BootstrapEnsemble small_ensemble(std::size_t R, unsigned seed) {
  const QuantileGrid taus({0.25, 0.5, 0.75});
  const FrequencyGrid omegas({0.0, 0.7, 3.0});
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z;
  std::vector<SpectralMatrix> reps;
  for (std::size_t r = 0; r < R; ++r) {
    std::vector<Complex> v(27);
    for (auto& c : v) c = Complex(z(g), z(g));
    reps.emplace_back(taus, omegas, std::move(v));
  }
  return BootstrapEnsemble{FitResult{Garch11Spec{0.011, 0.37, 0.51}, -1234.5678901234, true, 77},
                           EstimatorConfig{taus, omegas, KernelSpec(0.3)}, seed, 512, std::move(reps)};
}

bool equal(const BootstrapEnsemble& a, const BootstrapEnsemble& b) {
  return a.fitted.spec == b.fitted.spec && a.fitted.objective_value == b.fitted.objective_value &&
         a.fitted.converged == b.fitted.converged && a.fitted.iterations == b.fitted.iterations &&
         a.config == b.config && a.seed == b.seed && a.series_length == b.series_length &&
         a.replicates == b.replicates;
}

}  // namespace

TEST_CASE("csv ingestion") {
  const double e = std::exp(1.0);
  const std::string prices = "1\n" + std::to_string(e) + "\n";
  std::string text;
  for (int i = 0; i < 10; ++i) text += std::to_string(std::exp(double(i))) + "\n";
  const auto lr = parse_csv_text(text, true);
  CHECK(lr.size() == 9);
  for (double v : lr.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));

  const auto s = parse_csv_text("value\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n", false);
  CHECK(s.size() == 10);
  CHECK(s[9] == 10.0);

  try {
    parse_csv_text("p\n1\n2\n0\n4\n5\n6\n7\n8\n9\n10\n", true);
    FAIL("expected an error");
  } catch (const FormatError& err) {
    CHECK(std::string(err.what()).find("line 4") != std::string::npos);
  }
  try {
    parse_csv_text("1\n2\nabc\n4\n5\n6\n7\n8\n9\n", false);
    FAIL("expected an error");
  } catch (const FormatError& err) {
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv_text("1,2\n3,4\n", false), FormatError);
  CHECK_THROWS_AS(parse_csv_text("1\n2\n", false), FormatError);
  CHECK_THROWS_AS(ingest_csv(scratch("missing.csv"), false), FormatError);

  const auto path = scratch("in.csv");
  write_file_atomic(path, "value\n1\n2\n3\n4\n5\n6\n7\n8\n");
  CHECK(ingest_csv(path, false).size() == 8);
}

TEST_CASE("estimate csv round trip") {
  std::mt19937_64 g(1);
  std::normal_distribution<double> z;
  const QuantileGrid taus({0.1, 0.5, 0.9});
  const FrequencyGrid omegas({0.0, 0.1, 1.0 / 3.0});
  std::vector<Complex> v(27);
  for (auto& c : v) c = Complex(z(g) * 1e-3, z(g));
  const SpectralMatrix m(taus, omegas, v);
  const auto csv = estimate_to_csv(m);
  CHECK(csv.rfind("tau1,tau2,omega,re,im\n", 0) == 0);
  CHECK(estimate_from_csv(csv) == m);
}

TEST_CASE("config parsing") {
  const auto c = parse_config_text("# comment\nmodel = garch11(omega=0.01,alpha=0.4,beta=0.5)\n\n  n=512 # trailing\nn = 1024\n");
  CHECK(c.at("model") == "garch11(omega=0.01,alpha=0.4,beta=0.5)");
  CHECK(c.at("n") == "1024");
  CHECK_THROWS_AS(parse_config_text("novalue\n"), FormatError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), FormatError);
}

TEST_CASE("ensemble persistence") {
  const auto e = small_ensemble(5, 3);
  const auto path = scratch("ens.bin");
  persist_ensemble(e, path);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
  CHECK(equal(load_ensemble(path), e));

  const auto bytes = serialize_ensemble(e);
  try {
    deserialize_ensemble(std::string_view(bytes).substr(0, bytes.size() - 100));
    FAIL("expected an error");
  } catch (const FormatError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("truncated") != std::string::npos);
    CHECK(msg.find("expected 2160") != std::string::npos);
    CHECK(msg.find("found 2060") != std::string::npos);
  }
  auto wrong = bytes;
  wrong[8] = 2;
  try {
    deserialize_ensemble(wrong);
    FAIL("expected an error");
  } catch (const FormatError& err) {
    CHECK(std::string(err.what()).find("version") != std::string::npos);
  }
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_ensemble(bad_magic), FormatError);
  CHECK_THROWS_AS(deserialize_ensemble(std::string_view(bytes).substr(0, 20)), FormatError);
}

TEST_CASE("ensemble persistence on randomized fixtures") {
  for (unsigned s = 0; s < 20; ++s) {
    const auto e = small_ensemble(1 + s % 4, s);
    CHECK(equal(deserialize_ensemble(serialize_ensemble(e)), e));
  }
}
