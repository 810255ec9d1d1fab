#include "kolmo/io.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo {

namespace {

bool ends_with_gz(const std::string& path) { return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0; }

double parse_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings produced by some writers.
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw Error(Errc::kIoError, "not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class CsvWriter::Sink {
 public:
  explicit Sink(const std::string& path) : path_(path), gz_(ends_with_gz(path)) {
    if (gz_) {
      gzf_ = gzopen(path.c_str(), "wb");
      if (gzf_ == nullptr) throw Error(Errc::kIoError, "cannot open " + path);
    } else {
      f_ = std::fopen(path.c_str(), "wb");
      if (f_ == nullptr) throw Error(Errc::kIoError, "cannot open " + path);
    }
  }
  ~Sink() {
    try {
      close();
    } catch (...) {
    }
  }

  void write(const std::string& s) {
    if (gz_) {
      if (gzwrite(gzf_, s.data(), static_cast<unsigned>(s.size())) != static_cast<int>(s.size())) {
        throw Error(Errc::kIoError, "write failed: " + path_);
      }
    } else if (std::fwrite(s.data(), 1, s.size(), f_) != s.size()) {
      throw Error(Errc::kIoError, "write failed: " + path_);
    }
  }

  void close() {
    if (gzf_ != nullptr) {
      const int rc = gzclose(gzf_);
      gzf_ = nullptr;
      if (rc != Z_OK) throw Error(Errc::kIoError, "close failed: " + path_);
    }
    if (f_ != nullptr) {
      const int rc = std::fclose(f_);
      f_ = nullptr;
      if (rc != 0) throw Error(Errc::kIoError, "close failed: " + path_);
    }
  }

 private:
  std::string path_;
  bool gz_;
  gzFile gzf_ = nullptr;
  std::FILE* f_ = nullptr;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : sink_(std::make_unique<Sink>(path)), columns_(header.size()) {
  row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(std::span<const std::string> fields) {
  if (fields.size() != columns_) throw Error(Errc::kIoError, "row width does not match header");
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  line += '\n';
  sink_->write(line);
}

void CsvWriter::row(std::initializer_list<std::string> fields) {
  row(std::span<const std::string>(fields.begin(), fields.size()));
}

void CsvWriter::close() { sink_->close(); }

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(Errc::kIoError, "missing column " + std::string(name));
}

CsvTable read_csv(const std::string& path) {
  // gzread passes plain files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw Error(Errc::kIoError, "cannot open " + path);
  std::string text;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) text.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw Error(Errc::kIoError, "read failed: " + path);

  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size()) throw Error(Errc::kIoError, "ragged row in " + path);
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error(Errc::kIoError, "empty file " + path);
  return t;
}

void write_path_csv(const std::string& path, const PathRecord& rec) {
  CsvWriter w(path, {"t", "X", "L", "omega"});
  for (std::size_t i = 0; i < rec.grid.size(); ++i) {
    const GridPoint& g = rec.grid[i];
    w.row({format_double(g.t), format_double(g.x), format_double(g.l), format_double(rec.omega[i])});
  }
  w.close();
}

void write_hits_csv(const std::string& path, const PathRecord& rec) {
  CsvWriter w(path, {"n", "time", "speed"});
  for (const HitRecord& h : rec.hits) w.row({std::to_string(h.n), format_double(h.time), format_double(h.speed)});
  w.close();
}

void write_returns_csv(const std::string& path, std::span<const ReturnSample> samples) {
  CsvWriter w(path, {"sign", "tau", "ell", "censored"});
  for (const ReturnSample& s : samples) {
    w.row({std::to_string(s.start_sign), format_double(s.tau), s.ell ? format_double(*s.ell) : std::string(),
           s.censored ? "1" : "0"});
  }
  w.close();
}

std::vector<ReturnSample> read_returns_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_sign = t.column("sign");
  const std::size_t c_tau = t.column("tau");
  const std::size_t c_ell = t.column("ell");
  const std::size_t c_cens = t.column("censored");
  std::vector<ReturnSample> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    ReturnSample s;
    s.start_sign = static_cast<int>(parse_double(r[c_sign]));
    s.tau = parse_double(r[c_tau]);
    if (!r[c_ell].empty()) s.ell = parse_double(r[c_ell]);
    s.censored = r[c_cens] == "1";
    out.push_back(s);
  }
  return out;
}

void write_cascades_csv(const std::string& path, std::span<const std::vector<CascadeState>> cascades) {
  CsvWriter w(path, {"cascade_id", "n", "logT", "logL"});
  for (std::size_t id = 0; id < cascades.size(); ++id) {
    for (const CascadeState& s : cascades[id]) {
      w.row({std::to_string(id), std::to_string(s.n), format_double(s.log_t), format_double(s.log_l)});
    }
  }
  w.close();
}

void write_predictions_csv(const std::string& path, std::span<const PredictionRow> rows) {
  CsvWriter w(path, {"alpha", "rho", "region", "n", "exponent", "logpow"});
  for (const PredictionRow& r : rows) {
    w.row({format_double(r.law.alpha), format_double(r.law.rho), std::string(to_string(r.region)),
           std::to_string(r.n), format_double(r.tail.exponent), std::to_string(r.tail.logpow)});
  }
  w.close();
}

void write_curve_csv(const std::string& path, const SurvivalCurve& curve) {
  CsvWriter w(path, {"z", "survival"});
  for (const SurvivalPoint& p : curve.points) w.row({format_double(p.z), format_double(p.p)});
  w.close();
}

void write_fits_csv(const std::string& path, std::span<const NamedFit> fits) {
  CsvWriter w(path, {"name", "method", "exponent_hat", "std_error", "logpow_hat", "logpow_std_error", "z_lo", "z_hi",
                     "points"});
  for (const NamedFit& f : fits) {
    const TailFit& t = f.fit;
    w.row({f.name, std::string(to_string(t.method)), format_double(t.exponent_hat), format_double(t.std_error),
           t.logpow_hat ? format_double(*t.logpow_hat) : std::string(),
           t.logpow_std_error ? format_double(*t.logpow_std_error) : std::string(), format_double(t.window.lo),
           format_double(t.window.hi), std::to_string(t.points)});
  }
  w.close();
}

}  // namespace kolmo
