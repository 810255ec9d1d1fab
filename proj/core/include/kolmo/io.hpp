#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kolmo/cascade.hpp"
#include "kolmo/path_sim.hpp"
#include "kolmo/stats.hpp"
#include "kolmo/theory.hpp"

namespace kolmo {

// Shortest representation that round-trips through strtod.
std::string format_double(double v);

// Comma-separated output; the file is gzip-compressed when the path ends
// in ".gz". Throws Error{kIoError}.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::span<const std::string> fields);
  void row(std::initializer_list<std::string> fields);
  void close();

 private:
  class Sink;
  std::unique_ptr<Sink> sink_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws Error{kIoError} if absent.
  std::size_t column(std::string_view name) const;
};

// Reads a file written by CsvWriter (plain or gzip). Fields may not contain
// commas or quotes.
CsvTable read_csv(const std::string& path);

// t, X, L, omega
void write_path_csv(const std::string& path, const PathRecord& rec);
// n, time, speed
void write_hits_csv(const std::string& path, const PathRecord& rec);
// sign, tau, ell, censored (ell empty when censored)
void write_returns_csv(const std::string& path, std::span<const ReturnSample> samples);
std::vector<ReturnSample> read_returns_csv(const std::string& path);
// cascade_id, n, logT, logL
void write_cascades_csv(const std::string& path, std::span<const std::vector<CascadeState>> cascades);

struct PredictionRow {
  StableLaw law;
  Region region = Region::kMinus;
  int n = 1;
  TailClass tail;
};
// alpha, rho, region, n, exponent, logpow
void write_predictions_csv(const std::string& path, std::span<const PredictionRow> rows);

// z, survival
void write_curve_csv(const std::string& path, const SurvivalCurve& curve);

struct NamedFit {
  std::string name;
  TailFit fit;
};
// name, method, exponent_hat, std_error, logpow_hat, logpow_std_error, z_lo, z_hi, points
void write_fits_csv(const std::string& path, std::span<const NamedFit> fits);

}  // namespace kolmo
