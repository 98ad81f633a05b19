#include "curvglue/run.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace curvglue {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

// Writes to the file when a path is given, else to the stream, in one piece.
bool emit(const std::string& text, const std::string& path, std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << text << std::flush;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

std::vector<double> parse_ladder(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw DomainError("empty entry in list '" + text + "'");
    item = item.substr(b, e - b + 1);
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw DomainError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

std::vector<Scenario> list_scenarios(const std::vector<std::string>& config_dirs) {
  std::vector<Scenario> out;
  for (const auto& name : builtin_names()) out.push_back(builtin(name));
  for (const auto& dir : config_dirs)
    for (auto& s : load_config_dir(dir)) out.push_back(std::move(s));
  return out;
}

int cmd_list(const std::vector<std::string>& config_dirs, std::ostream& out, std::ostream& err) {
  std::vector<Scenario> all;
  try {
    all = list_scenarios(config_dirs);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
  std::ostringstream os;
  os << std::left << std::setw(26) << "name" << std::setw(4) << "n" << std::setw(8) << "smooth" << std::setw(18)
     << "L_spectrum" << std::setw(40) << "origin" << " kappa\n";
  for (const Scenario& s : all) {
    std::string kap;
    for (const auto& [k, v] : s.meta.kappa) kap += (kap.empty() ? "" : " ") + k + "=" + num(v);
    os << std::left << std::setw(26) << s.name << std::setw(4) << s.n << std::setw(8)
       << (s.meta.smooth ? "yes" : "no") << std::setw(18) << join(s.meta.L_spectrum) << std::setw(40)
       << s.origin << " " << (kap.empty() ? "-" : kap) << "\n";
  }
  out << os.str() << std::flush;
  return kExitPass;
}

std::string csv_header() {
  return "scenario,functional,kappa,delta,h,C,eps_observed,sup_dist,decomp_residual,wall_ms\n";
}

std::string csv_rows(const SweepResult& r) {
  std::string s;
  for (const SweepRow& w : r.rows) {
    s += csv_field(r.scenario) + "," + to_string(r.kind) + "," + num(r.kappa) + "," + num(w.delta) + "," +
         num(w.h) + "," + num(w.C) + "," + num(w.eps_observed) + "," + num(w.sup_dist) + "," +
         num(w.decomp_residual) + "," + num(w.wall_ms) + "\n";
  }
  return s;
}

int cmd_certify(const RunRequest& req, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    if (!req.config_path.empty()) {
      s = load_config_file(req.config_path);
    } else {
      const auto names = builtin_names();
      if (std::find(names.begin(), names.end(), req.scenario) != names.end()) {
        s = builtin(req.scenario);
      } else {
        bool found = false;
        for (const auto& dir : req.config_dirs)
          for (auto& c : load_config_dir(dir))
            if (!found && c.name == req.scenario) {
              s = std::move(c);
              found = true;
            }
        if (!found) {
          err << "error: unknown scenario '" << req.scenario << "'\n";
          return kExitUnknownScenario;
        }
      }
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  const std::string kind = to_string(req.kind);
  const std::optional<double> kappa = req.kappa ? req.kappa : s.kappa(kind);
  if (!kappa) {
    err << "refused: scenario '" << s.name << "' declares no bound for functional '" << kind
        << "'; pass --kappa\n";
    return kExitRefused;
  }
  SweepOptions opt;
  opt.deltas = req.deltas;
  opt.hs = req.hs;
  opt.C_fixed = req.C;
  opt.seed = req.seed;
  opt.threads = req.threads;
  opt.timing = req.timing;
  for (double h : req.hs)
    for (double d : req.deltas)
      if (!(h < d / 4.0)) {
        err << "error: h = " << h << " must be below delta/4 for every delta (delta = " << d << ")\n";
        return kExitUsage;
      }
  SweepResult r;
  try {
    r = certify(s, Functional{req.kind, *kappa}, opt);
  } catch (const HypothesisError& e) {
    err << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!emit(csv_header() + csv_rows(r), req.out, out, err)) return kExitUsage;
  for (const auto& n : r.notes) err << "note: " << n << "\n";
  err << (r.pass ? "PASS" : "FAIL") << " " << s.name << " " << kind << "\n";
  return r.pass ? kExitPass : kExitFail;
}

int cmd_profile(double delta, const std::string& out_path, int samples, std::ostream& out, std::ostream& err) {
  if (samples < 2) {
    err << "error: need at least 2 samples\n";
    return kExitUsage;
  }
  BumpProfile p;
  try {
    p = build_bump(delta);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::string s = "x,f,F,FF\n";
  const double x_max = 1.25 * delta;
  for (int i = 0; i <= samples; ++i) {
    const double x = x_max * i / samples;
    s += num(x) + "," + num(p.f(x)) + "," + num(p.F(x)) + "," + num(p.FF(x)) + "\n";
  }
  const ProfileReport rep = certify(p);
  for (const auto& line : rep.lines()) s += "# " + line + "\n";
  return emit(s, out_path, out, err) ? kExitPass : kExitUsage;
}

}  // namespace curvglue
