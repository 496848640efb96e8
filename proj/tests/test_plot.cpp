#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "copspec/error.hpp"
#include "copspec/plot.hpp"
#include "copspec/reference.hpp"
#include "xml_check.hpp"

using namespace copspec;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

std::size_t data_rows(const std::string& csv) { return std::count(csv.begin(), csv.end(), '\n') - 1; }

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    out.push_back(f);
  }
  return out;
}

PValueField field_with(std::size_t T, std::size_t K, std::size_t R) {
  const auto taus = QuantileGrid::equally_spaced(T);
  std::vector<double> w;
  for (std::size_t k = 0; k < K; ++k) w.push_back(k * std::numbers::pi / 32);
  const std::size_t cells = T * T * K;
  return PValueField{taus, FrequencyGrid(w), R, std::vector<double>(cells, 1.0), std::vector<double>(cells, 1.0),
                     std::vector<std::int8_t>(cells, 1), std::vector<std::int8_t>(cells, 1),
                     std::vector<double>(K, 1.0), {}};
}

}  // namespace

TEST_CASE("grid plot of white noise") {
  const auto omegas = FrequencyGrid::fourier_subgrid(64);
  const auto f = gaussian_copula_spectrum(ArSpec{{0.0}}, QuantileGrid::panel_levels(), omegas);
  const auto doc = emit_grid_plot(f, nullptr);
  CHECK(well_formed_xml(doc.svg));
  CHECK(doc.point_count == 9 * 33);
  CHECK(data_rows(doc.csv) == doc.point_count);
  for (const auto& r : rows(doc.csv)) {
    const double t1 = std::stod(r[2]), t2 = std::stod(r[3]), v = std::stod(r[6]);
    if (r[4] == "im") CHECK(std::abs(v) < 1e-15);
    else CHECK(v == doctest::Approx((std::min(t1, t2) - t1 * t2) / (2 * std::numbers::pi)).epsilon(1e-12));
  }
}

TEST_CASE("panel layout matches the golden file") {
  // Tag every value with its (tau1, tau2) so placement is visible.
  const auto taus = QuantileGrid::panel_levels();
  const FrequencyGrid omegas({0.5});
  std::vector<Complex> v(9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) v[i * 3 + j] = Complex(10 * i + j, i == j ? 0.0 : 100 + 10 * i + j);
  const auto doc = emit_grid_plot(SpectralMatrix(taus, omegas, v), nullptr);
  std::string layout = "panel_row,panel_col,tau1,tau2,part\n";
  for (const auto& r : rows(doc.csv)) {
    layout += r[0] + ',' + r[1] + ',' + r[2] + ',' + r[3] + ',' + r[4] + '\n';
    const int i = int(std::round(std::stod(r[2]) * 10)) / 4, j = int(std::round(std::stod(r[3]) * 10)) / 4;
    const double expected = r[4] == "re" ? 10 * i + j : 100 + 10 * i + j;
    CHECK(std::stod(r[6]) == expected);
  }
  std::ifstream golden(COPSPEC_GOLDEN_DIR "/panel_layout.csv");
  std::stringstream ss;
  ss << golden.rdbuf();
  CHECK(layout == ss.str());
  // (0.9, 0.1) shows up top right as Im.
  CHECK(doc.svg.find("data-row=\"0\" data-col=\"2\" data-tau1=\"0.9\" data-tau2=\"0.1\" data-part=\"im\"") != std::string::npos);
  CHECK_THROWS_AS(emit_grid_plot(SpectralMatrix(QuantileGrid({0.2, 0.5, 0.9}), omegas, v), nullptr), InvalidInput);
}

TEST_CASE("grid plot with regions") {
  const auto taus = QuantileGrid::panel_levels();
  const FrequencyGrid omegas({0.5, 1.0});
  std::vector<Complex> v(18, Complex(0.1, 0.0));
  std::vector<RegionBounds> b(18, RegionBounds{0.0, 0.2, -0.1, 0.1});
  const TypicalRegions regions{0.05, taus, omegas, b};
  const auto doc = emit_grid_plot(SpectralMatrix(taus, omegas, v), &regions);
  CHECK(well_formed_xml(doc.svg));
  CHECK(count(doc.svg, "<polygon") == 9);
  for (const auto& r : rows(doc.csv)) {
    CHECK(std::stod(r[7]) <= std::stod(r[6]));
    CHECK(std::stod(r[6]) <= std::stod(r[8]));
  }
}

TEST_CASE("summary plot") {
  auto f = field_with(3, 5, 200);
  auto doc = emit_summary_plot(f);
  CHECK(well_formed_xml(doc.svg));
  CHECK(count(doc.svg, "class=\"zero\"") == 0);
  CHECK(doc.point_count == 5);
  CHECK(data_rows(doc.csv) == 5);
  f.p_min[2] = 0.0;
  f.p_min[3] = 1.0 / 200;
  doc = emit_summary_plot(f);
  CHECK(count(doc.svg, "class=\"zero\"") == 1);
  CHECK(count(doc.svg, "stroke=\"red\"") == 1);
  // p = 1/R sits on the left axis at x = 60, p = 1 on the right at x = 390.
  CHECK(doc.svg.find("<circle cx=\"60.00\"") != std::string::npos);
  CHECK(count(doc.svg, "<circle cx=\"390.00\"") == 3);
  // 0.001 lies below 1/R = 0.005 and is left out.
  CHECK(count(doc.svg, "stroke-dasharray") == 2);
  CHECK(count(emit_summary_plot(field_with(3, 5, 1000)).svg, "stroke-dasharray") == 3);
}

TEST_CASE("detail plot") {
  auto f = field_with(4, 2, 1000);
  auto doc = emit_detail_plot(f, 0.0);
  CHECK(well_formed_xml(doc.svg));
  CHECK(count(doc.svg, "tri-") == 0);
  CHECK(doc.point_count == 16);
  f.p_re[f.index(2, 0, 0)] = 0.004;
  doc = emit_detail_plot(f, 0.0);
  CHECK(count(doc.svg, "class=\"tri-up\" fill=\"red\"") == 2);
  const auto r = rows(doc.csv);
  CHECK(r[2 * 4 + 0][0] == "2");
  CHECK(r[2 * 4 + 0][1] == "0");
  CHECK(r[2 * 4 + 0][7] == "2");
  f.p_im[f.index(0, 3, 1)] = 0.0005;
  f.sign_im[f.index(0, 3, 1)] = -1;
  doc = emit_detail_plot(f, std::numbers::pi / 32);
  CHECK(count(doc.svg, "class=\"tri-down\" fill=\"blue\"") == 3);
  // Im values below the diagonal are not shown.
  f.p_im[f.index(3, 0, 1)] = 0.0;
  CHECK(count(emit_detail_plot(f, std::numbers::pi / 32).svg, "tri-") == 3);
  CHECK_THROWS_AS(emit_detail_plot(f, 0.05), InvalidInput);
  CHECK(triangle_count(0.05) == 0);
  CHECK(triangle_count(0.049) == 1);
  CHECK(triangle_count(0.001) == 2);
  CHECK(triangle_count(0.0) == 3);
}
