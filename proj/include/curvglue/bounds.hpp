#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curvglue/frames.hpp"
#include "curvglue/scenarios.hpp"
#include "curvglue/smoothing.hpp"

namespace curvglue {

enum class FunctionalKind { operator_, ricci, scalar, bi, isotropic, isotropic1, isotropic2, flag };

std::string to_string(FunctionalKind k);
FunctionalKind parse_functional(const std::string& s);
std::vector<FunctionalKind> all_functionals();

struct Functional {
  FunctionalKind kind = FunctionalKind::operator_;
  double kappa = 0.0;
};

// Raised when a scenario does not meet the hypothesis of the requested functional.
class HypothesisError : public DomainError {
 public:
  using DomainError::DomainError;
};

void check_dimension(FunctionalKind k, int n);
double evaluate_functional(FunctionalKind k, const MetricJet& J, const FrameSearchConfig& cfg = {});
double evaluate_functional(FunctionalKind k, const MetricField& g, const Vec& x, const FrameSearchConfig& cfg = {});

struct SweepOptions {
  std::vector<double> deltas{0.4, 0.2, 0.1};
  std::vector<double> hs;  // empty: h = delta / 8 per rung
  std::optional<double> C_fixed;
  std::uint64_t seed = 42;
  int threads = 0;  // 0: GLUING_THREADS or hardware concurrency
  bool timing = false;
  bool auto_perturb = true;  // scalar kind with tr L close to 0
};

struct SweepRow {
  double delta = 0.0, h = 0.0, C = 0.0;
  double eps_observed = 0.0;  // kappa - worst value on the smoothed metric
  double eps_glued = 0.0;     // kappa - worst one-sided value of g_(delta)
  double m1_deficit = 0.0;    // kappa - worst value of g1 on the M1 side
  double sup_dist = 0.0;      // max |g^h - g| over the samples
  double decomp_residual = 0.0;
  double wall_ms = 0.0;
};

struct SweepResult {
  std::string scenario;
  FunctionalKind kind = FunctionalKind::operator_;
  double kappa = 0.0;
  std::vector<SweepRow> rows;
  bool pass = false;
  bool perturbed = false;
  std::vector<std::string> notes;
};

// Consecutive values strictly decrease, or are already at or below the floor.
bool trend_pass(const std::vector<double>& values, double floor);
constexpr double kEpsFloor = 1e-6;
constexpr double kDistFloor = 1e-10;

std::vector<double> normal_samples(double width, double delta, double h);
std::vector<Vec> tangential_samples(const CollarData& c);

// Caller-ordered parallel evaluation; results land in index order.
std::vector<double> parallel_map(int count, const std::function<double(int)>& fn, int threads);
int resolve_threads(int requested);

// Refuses (HypothesisError) when the scenario cannot satisfy the hypothesis.
CollarData prepare_collar(const Scenario& s, FunctionalKind kind, bool auto_perturb, std::vector<std::string>* notes,
                          bool* perturbed);

SweepResult certify(const Scenario& s, const Functional& fnl, const SweepOptions& opt);

}  // namespace curvglue
