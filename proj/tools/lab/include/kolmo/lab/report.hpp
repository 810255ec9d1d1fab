#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "kolmo/lab/config.hpp"

namespace kolmo::lab {

using Json = nlohmann::ordered_json;

struct Assertion {
  std::string name;
  bool pass = false;
  double value = 0;
  double target = 0;
  double tolerance = 0;
  std::string detail;
};

// Collects one command's results and writes them under `out_dir`:
// summary.json (command, version, resolved config, results, assertions),
// config.txt (the resolved config, loadable with --config) and, when plots
// were added, plots.json. Nothing time-dependent is recorded, so reruns
// with the same config are byte-identical.
class Report {
 public:
  Report(std::string command, Config config, std::filesystem::path out_dir);

  Json& results() { return results_; }
  const Config& config() const { return config_; }

  // Path of a data file inside the output directory; the name is listed
  // in the summary.
  std::string file(const std::string& name);

  void check(Assertion a);
  // Passes when |value - target| <= tolerance.
  bool check_near(const std::string& name, double value, double target, double tolerance, std::string detail = {});

  // Plot description: {"name", "file", "x", "y", "log_x", "log_y", "overlays"}.
  void add_plot(Json plot) { plots_.push_back(std::move(plot)); }

  bool all_pass() const;
  const std::vector<Assertion>& assertions() const { return assertions_; }

  Json summary() const;
  void write() const;

 private:
  std::string command_;
  Config config_;
  std::filesystem::path dir_;
  Json results_ = Json::object();
  std::vector<Assertion> assertions_;
  std::vector<std::string> files_;
  std::vector<Json> plots_;
};

// Non-finite doubles become strings ("inf", "-inf", "nan") so the JSON stays valid.
Json number(double v);

}  // namespace kolmo::lab
