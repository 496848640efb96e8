#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "copspec/bootstrap.hpp"
#include "copspec/spectra.hpp"

namespace copspec {

struct PlotDocument {
  std::string svg;
  std::string csv;
  std::size_t point_count = 0;  // data rows in csv
};

struct GridPlotOptions {
  QuantileGrid taus = QuantileGrid::panel_levels();
  // One y-range for all panels instead of per-panel auto-scaling.
  bool shared_range = false;
  std::string title;
};

// Three-by-three style panel grid for the requested levels. Panel (row r,
// col c) shows f_(tau_c, tau_r): the real value on the diagonal, Re below it
// and Im above it, plotted against omega in [0, pi].
PlotDocument emit_grid_plot(const SpectralMatrix& estimate, const TypicalRegions* regions,
                            const GridPlotOptions& options = {});

// p_min(omega) on a log p axis over [1/R, 1]; p_min = 0 is a red circle on the axis.
PlotDocument emit_summary_plot(const PValueField& field);

// T x T cells at one frequency. Cell (row i, col j) holds the Re p-value of
// (tau_i, tau_j) for i >= j and the Im p-value for i < j, drawn as 1/2/3
// triangles for p < 0.05/0.01/0.001, red up for a positive deviation and
// blue down for a negative one.
PlotDocument emit_detail_plot(const PValueField& field, double omega);

int triangle_count(double p);

}  // namespace copspec
