#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curvglue/collar.hpp"
#include "curvglue/expression.hpp"

namespace curvglue {

// Raised when a parsed config describes an invalid collar.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct ScenarioMetadata {
  std::map<std::string, double> kappa;  // per functional kind
  std::vector<double> L_spectrum;       // eigenvalues of L on the boundary, ascending
  bool smooth = false;                  // metric smooth across the interface
  std::string description;
};

struct Scenario {
  std::string name;
  int n = 0;
  std::shared_ptr<const CollarData> collar;
  ScenarioMetadata meta;
  std::string origin;  // "builtin" or the config path

  std::optional<double> kappa(const std::string& kind) const;
};

std::vector<std::string> builtin_names();
Scenario builtin(const std::string& name);

// Eigenvalues of L = L0 + L1 against the boundary metric at every sample,
// ascending, one row per sample.
std::vector<Vec> L_spectra(const CollarData& c);
// Largest deviation of the recomputed spectrum from the declared one.
double spectrum_mismatch(const Scenario& s);

Scenario from_config(const std::string& text, const std::string& origin = "<config>");
Scenario load_config_file(const std::string& path);
// Scenarios from every *.cfg file of a directory, sorted by file name.
std::vector<Scenario> load_config_dir(const std::string& dir);

// Radially warped product dt^2 + a(t)^2 ghat(u) over a circle arc (n = 2) or
// a patch of the round unit sphere in (theta, phi) (n = 3).
struct Warp {
  std::function<double(double)> a, da, dda;
};
MetricField warped_metric(int n, std::vector<std::pair<double, double>> box, Warp w);

}  // namespace curvglue
