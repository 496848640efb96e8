#include "copspec/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "copspec/error.hpp"
#include "copspec/models.hpp"

namespace copspec {

namespace {

constexpr char kMagic[8] = {'C', 'S', 'P', 'E', 'C', 'E', 'N', 'S'};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto c = line.find(',', start);
    out.push_back(trim(line.substr(start, c == std::string_view::npos ? c : c - start)));
    if (c == std::string_view::npos) break;
    start = c + 1;
  }
  return out;
}

// Little-endian encoding independent of the host byte order.
class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) u8(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) u8(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void text(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  void need(std::size_t n, const char* what) const {
    if (data_.size() - pos_ < n) {
      throw FormatError(std::string("truncated ensemble ") + what + ": expected " +
                        std::to_string(n) + " more bytes, found " +
                        std::to_string(data_.size() - pos_));
    }
  }
  std::string_view bytes(std::size_t n, const char* what) {
    need(n, what);
    const auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(bytes(1, what)[0]); }
  std::uint32_t u32(const char* what) {
    const auto s = bytes(4, what);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t(static_cast<std::uint8_t>(s[b])) << (8 * b);
    return v;
  }
  std::uint64_t u64(const char* what) {
    const auto s = bytes(8, what);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t(static_cast<std::uint8_t>(s[b])) << (8 * b);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string text(const char* what) {
    const auto n = u32(what);
    return std::string(bytes(n, what));
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

TimeSeries parse_csv_text(std::string_view text, bool log_returns, std::string label) {
  std::vector<double> values;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = trim(lines[ln]);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    const auto v = fields.size() == 1 ? parse_number(fields[0]) : std::nullopt;
    if (!v) {
      if (values.empty() && ln == 0 && fields.size() == 1) continue;  // header
      throw FormatError("line " + std::to_string(ln + 1) + ": expected one numeric column, got '" +
                        std::string(line) + "'");
    }
    if (!std::isfinite(*v)) {
      throw FormatError("line " + std::to_string(ln + 1) + ": non-finite value");
    }
    if (log_returns && !(*v > 0.0)) {
      throw FormatError("line " + std::to_string(ln + 1) +
                        ": non-positive price under log returns");
    }
    values.push_back(*v);
  }
  if (log_returns) {
    if (values.size() < 2) throw FormatError("log returns need at least two prices");
    std::vector<double> r(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) r[t - 1] = std::log(values[t] / values[t - 1]);
    values = std::move(r);
  }
  if (values.size() < TimeSeries::kMinLength) {
    throw FormatError("series has " + std::to_string(values.size()) +
                      " observations, at least " + std::to_string(TimeSeries::kMinLength) +
                      " required");
  }
  return TimeSeries(std::move(values), std::move(label));
}

TimeSeries ingest_csv(const std::filesystem::path& path, bool log_returns) {
  return parse_csv_text(read_file(path), log_returns, path.filename().string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string series_to_csv(const TimeSeries& series) {
  std::string out = "value\n";
  for (double v : series.values()) out += format_double(v) + '\n';
  return out;
}

std::string estimate_to_csv(const SpectralMatrix& m) {
  const auto& taus = m.tau_grid().levels();
  const auto& omegas = m.freq_grid().omegas();
  std::string out = "tau1,tau2,omega,re,im\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j)
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        const auto v = m.at(i, j, k);
        out += format_double(taus[i]) + ',' + format_double(taus[j]) + ',' +
               format_double(omegas[k]) + ',' + format_double(v.real()) + ',' +
               format_double(v.imag()) + '\n';
      }
  return out;
}

SpectralMatrix estimate_from_csv(std::string_view text) {
  struct Row {
    double t1, t2, w;
    Complex v;
  };
  std::vector<Row> rows;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = trim(lines[ln]);
    if (line.empty() || ln == 0) continue;
    const auto f = split_fields(line);
    std::optional<double> x[5];
    if (f.size() == 5)
      for (int c = 0; c < 5; ++c) x[c] = parse_number(f[c]);
    if (f.size() != 5 || !x[0] || !x[1] || !x[2] || !x[3] || !x[4]) {
      throw FormatError("line " + std::to_string(ln + 1) + ": expected tau1,tau2,omega,re,im");
    }
    rows.push_back({*x[0], *x[1], *x[2], {*x[3], *x[4]}});
  }
  if (rows.empty()) throw FormatError("estimate CSV has no rows");
  std::size_t K = 0;
  while (K < rows.size() && rows[K].t1 == rows[0].t1 && rows[K].t2 == rows[0].t2) ++K;
  const auto T = static_cast<std::size_t>(std::llround(std::sqrt(double(rows.size() / K))));
  if (T * T * K != rows.size()) throw FormatError("estimate CSV is not a full (tau, tau, omega) grid");
  std::vector<double> taus(T), omegas(K);
  for (std::size_t i = 0; i < T; ++i) taus[i] = rows[i * T * K].t1;
  for (std::size_t k = 0; k < K; ++k) omegas[k] = rows[k].w;
  std::vector<Complex> values(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = r / (T * K), j = (r / K) % T, k = r % K;
    if (rows[r].t1 != taus[i] || rows[r].t2 != taus[j] || rows[r].w != omegas[k]) {
      throw FormatError("estimate CSV row " + std::to_string(r + 2) + " is out of grid order");
    }
    values[r] = rows[r].v;
  }
  return SpectralMatrix(QuantileGrid(std::move(taus)), FrequencyGrid(std::move(omegas)),
                        std::move(values));
}

std::string regions_to_csv(const TypicalRegions& regions, const SpectralMatrix* estimate) {
  const auto& taus = regions.taus.levels();
  const auto& omegas = regions.omegas.omegas();
  std::string out = "tau1,tau2,omega,lo_re,hi_re,lo_im,hi_im";
  out += estimate ? ",re,im,inside_re,inside_im\n" : "\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j)
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        const auto& b = regions.at(i, j, k);
        out += format_double(taus[i]) + ',' + format_double(taus[j]) + ',' +
               format_double(omegas[k]) + ',' + format_double(b.lo_re) + ',' +
               format_double(b.hi_re) + ',' + format_double(b.lo_im) + ',' +
               format_double(b.hi_im);
        if (estimate) {
          const auto v = estimate->at(i, j, k);
          out += ',' + format_double(v.real()) + ',' + format_double(v.imag()) + ',' +
                 (b.lo_re <= v.real() && v.real() <= b.hi_re ? '1' : '0') + ',' +
                 (b.lo_im <= v.imag() && v.imag() <= b.hi_im ? '1' : '0');
        }
        out += '\n';
      }
  return out;
}

std::string pvalues_to_csv(const PValueField& field) {
  const auto& taus = field.taus.levels();
  const auto& omegas = field.omegas.omegas();
  std::string out = "tau1,tau2,omega,p_re,p_im,sign_re,sign_im\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j)
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        const auto c = field.index(i, j, k);
        out += format_double(taus[i]) + ',' + format_double(taus[j]) + ',' +
               format_double(omegas[k]) + ',' + format_double(field.p_re[c]) + ',' +
               format_double(field.p_im[c]) + ',' + std::to_string(field.sign_re[c]) + ',' +
               std::to_string(field.sign_im[c]) + '\n';
      }
  return out;
}

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    auto line = lines[ln];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(ln + 1) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw FormatError("config line " + std::to_string(ln + 1) + ": empty key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

std::string serialize_ensemble(const BootstrapEnsemble& e) {
  const auto& taus = e.config.taus.levels();
  const auto& omegas = e.config.omegas.omegas();
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kEnsembleFormatVersion);
  w.text(to_string(e.fitted.spec));
  w.f64(e.fitted.objective_value);
  w.u8(e.fitted.converged ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(e.fitted.iterations));
  w.u64(e.replicates.size());
  w.u64(taus.size());
  w.u64(omegas.size());
  w.f64(e.config.kernel.bandwidth());
  for (double t : taus) w.f64(t);
  for (double o : omegas) w.f64(o);
  w.u64(e.seed);
  w.u64(e.series_length);
  for (const auto& m : e.replicates) {
    if (!(m.tau_grid() == e.config.taus) || !(m.freq_grid() == e.config.omegas)) {
      throw InvalidInput("replicate grids differ from the ensemble configuration");
    }
    for (const auto& v : m.values()) {
      w.f64(v.real());
      w.f64(v.imag());
    }
  }
  return w.take();
}

BootstrapEnsemble deserialize_ensemble(std::string_view bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof kMagic, "header") != std::string_view(kMagic, sizeof kMagic)) {
    throw FormatError("not an ensemble file (bad magic)");
  }
  const auto version = r.u32("header");
  if (version != kEnsembleFormatVersion) {
    throw FormatError("incompatible ensemble format version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kEnsembleFormatVersion) + ")");
  }
  std::optional<ModelSpec> spec;
  try {
    spec = parse_model_spec(r.text("header"));
  } catch (const std::invalid_argument& ex) {
    throw FormatError(std::string("corrupt ensemble header: ") + ex.what());
  }
  FitResult fitted{*spec, 0.0, false, 0};
  fitted.objective_value = r.f64("header");
  fitted.converged = r.u8("header") != 0;
  fitted.iterations = static_cast<int>(r.u32("header"));
  const auto R = r.u64("header");
  const auto T = r.u64("header");
  const auto K = r.u64("header");
  const double bandwidth = r.f64("header");
  if (T == 0 || K == 0 || T > (1u << 16) || K > (1u << 24)) {
    throw FormatError("corrupt ensemble header: grid sizes out of range");
  }
  r.need((T + K) * 8 + 16, "header");
  std::vector<double> taus(T), omegas(K);
  for (auto& t : taus) t = r.f64("header");
  for (auto& o : omegas) o = r.f64("header");
  const auto seed = r.u64("header");
  const auto series_length = r.u64("header");
  std::optional<EstimatorConfig> config;
  try {
    config = EstimatorConfig{QuantileGrid(std::move(taus)), FrequencyGrid(std::move(omegas)),
                             KernelSpec(bandwidth)};
  } catch (const std::invalid_argument& ex) {
    throw FormatError(std::string("corrupt ensemble header: ") + ex.what());
  }
  BootstrapEnsemble e{std::move(fitted), std::move(*config), seed, series_length, {}};

  const std::size_t cells = T * T * K;
  const auto payload = static_cast<long double>(R) * cells * 16;
  if (payload != static_cast<long double>(r.remaining())) {
    if (payload > static_cast<long double>(r.remaining())) {
      throw FormatError("truncated ensemble payload: expected " +
                        std::to_string(static_cast<unsigned long long>(payload)) +
                        " bytes, found " + std::to_string(r.remaining()));
    }
    throw FormatError("ensemble payload has " + std::to_string(r.remaining()) +
                      " bytes, expected " +
                      std::to_string(static_cast<unsigned long long>(payload)));
  }
  e.replicates.reserve(R);
  for (std::uint64_t rep = 0; rep < R; ++rep) {
    std::vector<Complex> values(cells);
    for (auto& v : values) {
      const double re = r.f64("payload");
      v = Complex(re, r.f64("payload"));
    }
    e.replicates.emplace_back(e.config.taus, e.config.omegas, std::move(values));
  }
  return e;
}

void persist_ensemble(const BootstrapEnsemble& ensemble, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_ensemble(ensemble));
}

BootstrapEnsemble load_ensemble(const std::filesystem::path& path) {
  return deserialize_ensemble(read_file(path));
}

}  // namespace copspec
