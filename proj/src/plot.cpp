#include "copspec/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "copspec/error.hpp"
#include "copspec/models.hpp"

namespace copspec {

namespace {

std::string num(double v) {
  // Fixed two-decimal coordinates keep the SVG small and byte-stable.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 0.005 ? 0.0 : v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Svg {
 public:
  Svg(double w, double h) {
    body_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
            num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + ' ' + num(h) +
            "\" font-family=\"sans-serif\">\n";
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
  }
  void raw(const std::string& s) { body_ += s; }
  void rect(double x, double y, double w, double h, std::string_view style) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
             num(h) + "\" " + std::string(style) + "/>\n";
  }
  void line(double x1, double y1, double x2, double y2, std::string_view style) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" " + std::string(style) + "/>\n";
  }
  void circle(double x, double y, double r, std::string_view style) {
    body_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" " +
             std::string(style) + "/>\n";
  }
  void text(double x, double y, std::string_view s, std::string_view style = {}) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"11\"";
    if (!style.empty()) body_ += ' ' + std::string(style);
    body_ += '>' + escape(s) + "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view style,
                bool closed = false) {
    body_ += closed ? "<polygon points=\"" : "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += num(pts[i].first) + ',' + num(pts[i].second);
    }
    body_ += "\" " + std::string(style) + "/>\n";
  }
  std::string finish() { return body_ + "</svg>\n"; }

 private:
  std::string body_;
};

struct Range {
  double lo = 0.0, hi = 0.0;
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Range padded() const {
    double span = hi - lo;
    if (span <= 0.0) span = std::max(std::abs(hi), 1e-3);
    return {lo - 0.05 * span, hi + 0.05 * span};
  }
};

std::size_t require_tau(const QuantileGrid& grid, double tau) {
  const auto i = grid.find(tau, 1e-10);
  if (!i) throw InvalidInput("quantile level " + format_double(tau) + " is not in the estimate grid");
  return *i;
}

// Which part of f_(tau_c, tau_r) is drawn in panel (r, c).
enum class Part { Real, Imag };
Part panel_part(std::size_t r, std::size_t c) { return r >= c ? Part::Real : Part::Imag; }

}  // namespace

int triangle_count(double p) {
  if (p < 0.001) return 3;
  if (p < 0.01) return 2;
  if (p < 0.05) return 1;
  return 0;
}

PlotDocument emit_grid_plot(const SpectralMatrix& estimate, const TypicalRegions* regions,
                            const GridPlotOptions& options) {
  const auto levels = options.taus.levels();
  const std::size_t P = levels.size();
  std::vector<std::size_t> idx(P);
  for (std::size_t p = 0; p < P; ++p) idx[p] = require_tau(estimate.tau_grid(), levels[p]);
  if (regions && (!(regions->taus == estimate.tau_grid()) || !(regions->omegas == estimate.freq_grid()))) {
    throw InvalidInput("typical regions and estimate use different grids");
  }
  const auto omegas = estimate.freq_grid().omegas();
  const std::size_t K = omegas.size();

  auto value = [&](std::size_t r, std::size_t c, std::size_t k) {
    const auto v = estimate.at(idx[c], idx[r], k);
    return panel_part(r, c) == Part::Real ? v.real() : v.imag();
  };
  auto band = [&](std::size_t r, std::size_t c, std::size_t k) -> std::pair<double, double> {
    const auto& b = regions->at(idx[c], idx[r], k);
    return panel_part(r, c) == Part::Real ? std::pair{b.lo_re, b.hi_re} : std::pair{b.lo_im, b.hi_im};
  };

  std::vector<Range> ranges(P * P);
  for (std::size_t r = 0; r < P; ++r)
    for (std::size_t c = 0; c < P; ++c) {
      auto& rg = ranges[r * P + c];
      rg = {value(r, c, 0), value(r, c, 0)};
      for (std::size_t k = 0; k < K; ++k) {
        rg.include(value(r, c, k));
        if (regions) {
          const auto [lo, hi] = band(r, c, k);
          rg.include(lo);
          rg.include(hi);
        }
      }
    }
  if (options.shared_range) {
    Range all = ranges[0];
    for (const auto& rg : ranges) {
      all.include(rg.lo);
      all.include(rg.hi);
    }
    std::fill(ranges.begin(), ranges.end(), all);
  }

  const double panel_w = 240, panel_h = 170, margin_l = 60, margin_t = 30, gap = 30;
  const double width = margin_l + P * (panel_w + gap);
  const double height = margin_t + P * (panel_h + gap) + 20;
  Svg svg(width, height);
  if (!options.title.empty()) svg.text(margin_l, 18, options.title, "font-size=\"14\"");

  PlotDocument doc;
  doc.csv = regions ? "panel_row,panel_col,tau1,tau2,part,omega,value,lo,hi\n"
                    : "panel_row,panel_col,tau1,tau2,part,omega,value\n";

  for (std::size_t r = 0; r < P; ++r)
    for (std::size_t c = 0; c < P; ++c) {
      const double x0 = margin_l + c * (panel_w + gap);
      const double y0 = margin_t + r * (panel_h + gap);
      const auto rg = ranges[r * P + c].padded();
      auto sx = [&](double w) { return x0 + panel_w * w / std::numbers::pi; };
      auto sy = [&](double v) { return y0 + panel_h * (rg.hi - v) / (rg.hi - rg.lo); };
      const bool diag = r == c;
      const auto part = panel_part(r, c);
      const std::string label = std::string(diag ? "f" : part == Part::Real ? "Re f" : "Im f") + "(" +
                                format_double(levels[c]) + "," + format_double(levels[r]) + ")";

      svg.raw("<g class=\"panel\" data-row=\"" + std::to_string(r) + "\" data-col=\"" +
              std::to_string(c) + "\" data-tau1=\"" + format_double(levels[c]) + "\" data-tau2=\"" +
              format_double(levels[r]) + "\" data-part=\"" +
              (diag ? "f" : part == Part::Real ? "re" : "im") + "\">\n");
      svg.rect(x0, y0, panel_w, panel_h, "fill=\"none\" stroke=\"black\"");
      svg.text(x0 + 4, y0 + 13, label);
      if (rg.lo < 0.0 && rg.hi > 0.0) svg.line(x0, sy(0.0), x0 + panel_w, sy(0.0), "stroke=\"#bbbbbb\"");
      svg.text(x0 - 56, y0 + 10, format_double(std::round(rg.hi * 1e4) / 1e4));
      svg.text(x0 - 56, y0 + panel_h, format_double(std::round(rg.lo * 1e4) / 1e4));
      if (r + 1 == P) {
        svg.text(x0, y0 + panel_h + 14, "0");
        svg.text(x0 + panel_w - 10, y0 + panel_h + 14, "pi");
      }

      if (regions && K > 0) {
        std::vector<std::pair<double, double>> poly;
        for (std::size_t k = 0; k < K; ++k) poly.emplace_back(sx(omegas[k]), sy(band(r, c, k).second));
        for (std::size_t k = K; k-- > 0;) poly.emplace_back(sx(omegas[k]), sy(band(r, c, k).first));
        svg.polyline(poly, "fill=\"#c6dbef\" stroke=\"none\"", true);
      }
      std::vector<std::pair<double, double>> curve;
      for (std::size_t k = 0; k < K; ++k) {
        curve.emplace_back(sx(omegas[k]), sy(value(r, c, k)));
        doc.csv += std::to_string(r) + ',' + std::to_string(c) + ',' + format_double(levels[c]) + ',' +
                   format_double(levels[r]) + ',' + (part == Part::Real ? "re" : "im") + ',' +
                   format_double(omegas[k]) + ',' + format_double(value(r, c, k));
        if (regions) {
          const auto [lo, hi] = band(r, c, k);
          doc.csv += ',' + format_double(lo) + ',' + format_double(hi);
        }
        doc.csv += '\n';
        ++doc.point_count;
      }
      svg.polyline(curve, "fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"");
      svg.raw("</g>\n");
    }
  svg.text(margin_l + P * (panel_w + gap) / 2 - 20, height - 6, "omega");
  doc.svg = svg.finish();
  return doc;
}

PlotDocument emit_summary_plot(const PValueField& field) {
  if (field.replicates == 0) throw InvalidInput("p-value field has no replicates");
  const auto omegas = field.omegas.omegas();
  const std::size_t K = omegas.size();
  const double lo = 1.0 / static_cast<double>(field.replicates);
  const double log_lo = std::log10(lo);

  const double w = 420, h = 360, ml = 60, mt = 20, pw = 330, ph = 300;
  Svg svg(w, h);
  auto sx = [&](double p) {
    if (log_lo == 0.0) return ml + pw;
    const double t = (std::log10(std::clamp(p, lo, 1.0)) - log_lo) / -log_lo;
    return ml + pw * t;
  };
  auto sy = [&](double omega) { return mt + ph * (1.0 - omega / std::numbers::pi); };

  svg.rect(ml, mt, pw, ph, "fill=\"none\" stroke=\"black\"");
  for (double ref : {0.05, 0.01, 0.001}) {
    if (ref < lo) continue;
    svg.line(sx(ref), mt, sx(ref), mt + ph, "stroke=\"#888888\" stroke-dasharray=\"4,3\"");
    svg.text(sx(ref) - 12, mt + ph + 14, format_double(ref));
  }
  svg.text(ml - 4, mt + ph + 28, format_double(lo));
  svg.text(ml + pw - 6, mt + ph + 28, "1");
  svg.text(ml + pw / 2 - 30, h - 4, "p_min (log scale)");
  svg.text(4, mt + ph / 2, "omega");
  svg.text(ml - 14, mt + ph, "0");
  svg.text(ml - 20, mt + 8, "pi");

  PlotDocument doc;
  doc.csv = "omega,p_min,zero\n";
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < K; ++k) {
    const double p = field.p_min[k];
    const bool zero = p == 0.0;
    if (zero) {
      svg.circle(ml, sy(omegas[k]), 4, "class=\"zero\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"");
    } else {
      svg.circle(sx(p), sy(omegas[k]), 2.5, "class=\"pmin\" fill=\"black\"");
      pts.emplace_back(sx(p), sy(omegas[k]));
    }
    doc.csv += format_double(omegas[k]) + ',' + format_double(p) + ',' + (zero ? '1' : '0') + '\n';
    ++doc.point_count;
  }
  if (pts.size() > 1) svg.polyline(pts, "fill=\"none\" stroke=\"black\" stroke-width=\"0.6\"");
  doc.svg = svg.finish();
  return doc;
}

PlotDocument emit_detail_plot(const PValueField& field, double omega) {
  const auto k = field.omegas.find(omega, 1e-10);
  if (!k) throw InvalidInput("frequency " + format_double(omega) + " is not in the p-value grid");
  const auto levels = field.taus.levels();
  const std::size_t T = levels.size();

  const double cell = 24, ml = 50, mt = 40;
  const double side = ml + T * cell + 20;
  Svg svg(side, mt + T * cell + 40);
  svg.text(ml, 16, "omega = " + format_double(omega));
  svg.rect(ml, mt, T * cell, T * cell, "fill=\"none\" stroke=\"black\"");
  for (std::size_t i = 0; i < T; ++i) {
    svg.text(4, mt + i * cell + cell * 0.7, format_double(levels[i]), "font-size=\"8\"");
  }

  PlotDocument doc;
  doc.csv = "row,col,tau1,tau2,part,p,sign,triangles\n";
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j) {
      const auto c = field.index(i, j, *k);
      const bool real = i >= j;
      const double p = real ? field.p_re[c] : field.p_im[c];
      const int sign = real ? field.sign_re[c] : field.sign_im[c];
      const int n = triangle_count(p);
      const double x0 = ml + j * cell, y0 = mt + i * cell;
      svg.rect(x0, y0, cell, cell, "fill=\"none\" stroke=\"#dddddd\" stroke-width=\"0.5\"");
      for (int t = 0; t < n; ++t) {
        const double cx = x0 + cell * (t + 1) / (n + 1);
        const double cy = y0 + cell / 2, s = cell / 4;
        std::vector<std::pair<double, double>> tri;
        if (sign > 0) {
          tri = {{cx - s / 2, cy + s / 2}, {cx + s / 2, cy + s / 2}, {cx, cy - s / 2}};
          svg.polyline(tri, "class=\"tri-up\" fill=\"red\"", true);
        } else {
          tri = {{cx - s / 2, cy - s / 2}, {cx + s / 2, cy - s / 2}, {cx, cy + s / 2}};
          svg.polyline(tri, "class=\"tri-down\" fill=\"blue\"", true);
        }
      }
      doc.csv += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(levels[i]) + ',' +
                 format_double(levels[j]) + ',' + (real ? "re" : "im") + ',' + format_double(p) + ',' +
                 std::to_string(sign) + ',' + std::to_string(n) + '\n';
      ++doc.point_count;
    }
  doc.svg = svg.finish();
  return doc;
}

}  // namespace copspec
