#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "curvglue/run.hpp"

using namespace curvglue;

int main(int argc, char** argv) {
  CLI::App app{"Glue Riemannian collars, mollify, and certify curvature lower bounds"};
  app.require_subcommand(1);

  std::vector<std::string> config_dirs;
  auto* list = app.add_subcommand("list", "List builtin and config scenarios");
  list->add_option("--config-dir", config_dirs, "Directory of *.cfg scenarios")->check(CLI::ExistingDirectory);

  RunRequest req;
  std::string functional = "operator", deltas = "0.4,0.2,0.1", hs = "auto", c_mode = "auto";
  double kappa = 0.0;
  auto* cert = app.add_subcommand("certify", "Run a gluing sweep and report CSV");
  cert->add_option("--scenario", req.scenario, "Builtin or config scenario name");
  cert->add_option("--config", req.config_path, "Scenario config file");
  cert->add_option("--config-dir", req.config_dirs, "Directory of *.cfg scenarios")->check(CLI::ExistingDirectory);
  cert->add_option("--functional", functional, "operator|ricci|scalar|bi|isotropic|isotropic1|isotropic2|flag");
  auto* kappa_opt = cert->add_option("--kappa", kappa, "Lower bound (default: scenario metadata)");
  cert->add_option("--deltas", deltas, "Strictly decreasing delta ladder");
  cert->add_option("--hs", hs, "'auto' (delta/8) or a strictly decreasing h ladder");
  cert->add_option("--c", c_mode, "'auto' or a fixed nonnegative C");
  cert->add_option("--out", req.out, "CSV output path (default: stdout)");
  cert->add_option("--seed", req.seed, "Frame search seed");
  cert->add_flag("--timing", req.timing, "Fill the wall_ms column");

  double delta = 0.2;
  int samples = 400;
  std::string profile_out;
  auto* prof = app.add_subcommand("profile", "Dump the bump profile as CSV");
  prof->add_option("--delta", delta, "Profile width")->required();
  prof->add_option("--out", profile_out, "CSV output path (default: stdout)");
  prof->add_option("--samples", samples, "Number of intervals on [0, 1.25 delta]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*list) return cmd_list(config_dirs, std::cout, std::cerr);
  if (*prof) return cmd_profile(delta, profile_out, samples, std::cout, std::cerr);

  if (req.scenario.empty() && req.config_path.empty()) {
    std::cerr << "error: certify needs --scenario or --config\n";
    return kExitUsage;
  }
  try {
    req.kind = parse_functional(functional);
    req.deltas = parse_ladder(deltas);
    if (hs != "auto") req.hs = parse_ladder(hs);
    if (c_mode != "auto") {
      const auto c = parse_ladder(c_mode);
      if (c.size() != 1) throw DomainError("--c takes a single value");
      req.C = c[0];
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (kappa_opt->count() > 0) req.kappa = kappa;
  return cmd_certify(req, std::cout, std::cerr);
}
