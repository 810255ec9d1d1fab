#include "kolmo/lab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kolmo/error.hpp"
#include "kolmo/version.hpp"

namespace kolmo::lab {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::kIoError, "write failed for '" + path.string() + "'");
}

}  // namespace

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Report::Report(std::string command, Config config, std::filesystem::path out_dir)
    : command_(std::move(command)), config_(std::move(config)), dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create output directory '" + dir_.string() + "': " + ec.message());
}

std::string Report::file(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return (dir_ / name).string();
}

void Report::check(Assertion a) { assertions_.push_back(std::move(a)); }

bool Report::check_near(const std::string& name, double value, double target, double tolerance, std::string detail) {
  const bool pass = std::isfinite(value) && std::abs(value - target) <= tolerance;
  check({name, pass, value, target, tolerance, std::move(detail)});
  return pass;
}

bool Report::all_pass() const {
  for (const auto& a : assertions_)
    if (!a.pass) return false;
  return true;
}

Json Report::summary() const {
  Json j;
  j["command"] = command_;
  j["version"] = std::string(kVersion);
  j["revision"] = std::string(kRevision);
  Json cfg = Json::object();
  for (const auto& [k, v] : config_.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["results"] = results_;
  Json asserts = Json::array();
  for (const auto& a : assertions_) {
    Json row;
    row["name"] = a.name;
    row["pass"] = a.pass;
    row["value"] = number(a.value);
    row["target"] = number(a.target);
    row["tolerance"] = number(a.tolerance);
    if (!a.detail.empty()) row["detail"] = a.detail;
    asserts.push_back(row);
  }
  j["assertions"] = asserts;
  j["pass"] = all_pass();
  j["files"] = files_;
  return j;
}

void Report::write() const {
  write_text(dir_ / "config.txt", config_.serialize());
  if (!plots_.empty()) {
    Json manifest;
    manifest["command"] = command_;
    manifest["plots"] = plots_;
    write_text(dir_ / "plots.json", manifest.dump(2) + "\n");
  }
  write_text(dir_ / "summary.json", summary().dump(2) + "\n");
}

}  // namespace kolmo::lab
