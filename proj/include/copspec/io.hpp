#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "copspec/bootstrap.hpp"
#include "copspec/spectra.hpp"
#include "copspec/types.hpp"

namespace copspec {

// One numeric column, optional single header line. Under log_returns the
// series is ln(p_t / p_{t-1}) and has one fewer entry than the file.
TimeSeries parse_csv_text(std::string_view text, bool log_returns, std::string label = {});
TimeSeries ingest_csv(const std::filesystem::path& path, bool log_returns);

// Writes via a sibling temp file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

std::string series_to_csv(const TimeSeries& series);
// Columns tau1, tau2, omega, re, im; one row per grid point, (i, j, k) order.
std::string estimate_to_csv(const SpectralMatrix& m);
SpectralMatrix estimate_from_csv(std::string_view text);

std::string regions_to_csv(const TypicalRegions& regions, const SpectralMatrix* estimate);
std::string pvalues_to_csv(const PValueField& field);

// Flat `key = value` lines; `#` starts a comment. Duplicate keys: last wins.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config_text(std::string_view text);
ConfigMap load_config(const std::filesystem::path& path);

inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

std::string serialize_ensemble(const BootstrapEnsemble& ensemble);
BootstrapEnsemble deserialize_ensemble(std::string_view bytes);
void persist_ensemble(const BootstrapEnsemble& ensemble, const std::filesystem::path& path);
BootstrapEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace copspec
