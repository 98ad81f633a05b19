#include "curvglue/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <numbers>
#include <sstream>

namespace curvglue {

std::optional<double> Scenario::kappa(const std::string& kind) const {
  auto it = meta.kappa.find(kind);
  if (it == meta.kappa.end()) return std::nullopt;
  return it->second;
}

MetricField warped_metric(int n, std::vector<std::pair<double, double>> box, Warp w) {
  if (n != 2 && n != 3) throw DomainError("warped_metric: only n = 2 and n = 3 are supported");
  const int k = n - 1;
  // ghat and its theta derivatives (only theta enters for the sphere).
  auto base = [n](const Vec& x, int order) {
    Mat h = Mat::Zero(n - 1, n - 1);
    if (n == 2) {
      if (order == 0) h(0, 0) = 1.0;
      return h;
    }
    const double th = x(0);
    if (order == 0) {
      h(0, 0) = 1.0;
      h(1, 1) = std::sin(th) * std::sin(th);
    } else if (order == 1) {
      h(1, 1) = std::sin(2 * th);
    } else {
      h(1, 1) = 2 * std::cos(2 * th);
    }
    return h;
  };
  auto embed = [n](const Mat& t, double nn) {
    Mat m = Mat::Zero(n, n);
    m.topLeftCorner(n - 1, n - 1) = t;
    m(n - 1, n - 1) = nn;
    return m;
  };
  auto coeff = [w, base, embed, k](const Vec& x) {
    const double a = w.a(x(k));
    return embed(a * a * base(x, 0), 1.0);
  };
  auto jet = [w, base, embed, n, k](const Vec& x) {
    const double t = x(k), a = w.a(t), da = w.da(t), dda = w.dda(t);
    const Mat h0 = base(x, 0), h1 = base(x, 1), h2 = base(x, 2);
    MetricJet J(n);
    J.g = embed(a * a * h0, 1.0);
    J.dg[k] = embed(2 * a * da * h0, 0.0);
    J.dd(k, k) = embed(2 * (da * da + a * dda) * h0, 0.0);
    if (n == 3) {
      J.dg[0] = embed(a * a * h1, 0.0);
      J.dd(0, 0) = embed(a * a * h2, 0.0);
      J.dd(0, k) = J.dd(k, 0) = embed(2 * a * da * h1, 0.0);
    }
    return J;
  };
  auto normal = [w, base, embed](const Vec& x) {
    const int k = static_cast<int>(x.size()) - 1;
    const double t = x(k), a = w.a(t), da = w.da(t), dda = w.dda(t);
    const Mat h0 = base(x, 0);
    return NormalJet{embed(a * a * h0, 1.0), embed(2 * a * da * h0, 0.0), embed(2 * (da * da + a * dda) * h0, 0.0)};
  };
  return MetricField::analytic(ChartDomain(n, std::move(box)), coeff, jet, true, normal);
}

namespace {

Warp linear(double c, double s) {
  return {[c, s](double t) { return c + s * t; }, [s](double) { return s; }, [](double) { return 0.0; }};
}

Warp sine(double theta0, double sign) {
  return {[=](double t) { return std::sin(theta0 + sign * t); },
          [=](double t) { return sign * std::cos(theta0 + sign * t); },
          [=](double t) { return -std::sin(theta0 + sign * t); }};
}

Warp cosine() {
  return {[](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); },
          [](double t) { return -std::cos(t); }};
}

std::vector<std::pair<double, double>> builtin_box(int n) {
  const double half = std::numbers::pi / 2;
  if (n == 2) return {{-1.0, 1.0}, {-0.6, 0.6}};
  return {{half - 0.5, half + 0.5}, {-0.5, 0.5}, {-0.6, 0.6}};
}

constexpr double kWidth = 0.5;

Scenario make_builtin(const std::string& name, int n, Warp w0, Warp w1, ScenarioMetadata meta) {
  Scenario s;
  s.name = name;
  s.n = n;
  s.origin = "builtin";
  s.meta = std::move(meta);
  s.collar = std::make_shared<const CollarData>(
      make_collar(warped_metric(n, builtin_box(n), std::move(w0)), warped_metric(n, builtin_box(n), std::move(w1)),
                  kWidth, n == 2 ? 5 : 3));
  if (spectrum_mismatch(s) > 1e-8) throw DomainError("builtin '" + name + "': declared L spectrum is wrong");
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"doubled-disk-2d",       "doubled-ball-3d",    "doubled-hemisphere-2d",
          "doubled-hemisphere-3d", "cap-on-cylinder-2d", "cap-on-disk-2d"};
}

Scenario builtin(const std::string& name) {
  const double theta0 = std::numbers::pi / 3;
  if (name == "doubled-disk-2d")
    return make_builtin(name, 2, linear(1, -1), linear(1, 1),
                        {{{"operator", 0}, {"ricci", 0}, {"scalar", 0}, {"isotropic2", 0}},
                         {2.0},
                         false,
                         "two flat unit disks glued along their boundary circles"});
  if (name == "doubled-ball-3d")
    return make_builtin(name, 3, linear(1, -1), linear(1, 1),
                        {{{"operator", 0}, {"ricci", 0}, {"scalar", 0}, {"bi", 0}, {"flag", 0}, {"isotropic1", 0}},
                         {2.0, 2.0},
                         false,
                         "two flat unit 3-balls glued along their boundary spheres"});
  if (name == "doubled-hemisphere-2d")
    return make_builtin(name, 2, cosine(), cosine(),
                        {{{"operator", 1}, {"ricci", 1}, {"scalar", 2}, {"isotropic2", 0}},
                         {0.0},
                         true,
                         "two round hemispheres glued along the equator (the round 2-sphere)"});
  if (name == "doubled-hemisphere-3d")
    return make_builtin(
        name, 3, cosine(), cosine(),
        {{{"operator", 1}, {"ricci", 2}, {"scalar", 6}, {"bi", 2}, {"flag", 2}},
         {0.0, 0.0},
         true,
         "two round 3-hemispheres glued along the equator (the round 3-sphere)"});
  if (name == "cap-on-cylinder-2d")
    return make_builtin(name, 2, linear(1, 0), cosine(),
                        {{{"operator", 0}, {"ricci", 0}, {"scalar", 0}, {"isotropic2", 0}},
                         {0.0},
                         false,
                         "flat unit cylinder glued to a round hemisphere along the equator"});
  if (name == "cap-on-disk-2d")
    return make_builtin(
        name, 2, linear(std::sin(theta0), -1), sine(theta0, 1),
        {{{"operator", 0}, {"ricci", 0}, {"scalar", 0}, {"isotropic2", 0}},
         {(1 + std::cos(theta0)) / std::sin(theta0)},
         false,
         "flat disk of radius sin(pi/3) glued to the unit-sphere cap of polar radius pi/3"});
  throw DomainError("unknown scenario '" + name + "'");
}

std::vector<Vec> L_spectra(const CollarData& c) {
  std::vector<Vec> out;
  const int k = c.n() - 1;
  for (const Vec& u : c.boundary_samples) {
    const Mat g = c.g0.value(c.point(u, 0.0)).topLeftCorner(k, k);
    out.push_back(generalized_eigenvalues(combined_L(c, u), g));
  }
  return out;
}

double spectrum_mismatch(const Scenario& s) {
  if (s.meta.L_spectrum.empty()) return 0.0;
  const int k = s.n - 1;
  if (static_cast<int>(s.meta.L_spectrum.size()) != k) return std::numeric_limits<double>::infinity();
  std::vector<double> decl = s.meta.L_spectrum;
  std::sort(decl.begin(), decl.end());
  double worst = 0.0;
  for (const Vec& ev : L_spectra(*s.collar))
    for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(ev(i) - decl[i]));
  return worst;
}

namespace {

std::string trim(const std::string& s, size_t* lead = nullptr) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return "";
  }
  const size_t e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string section, key, value;
  int line = 0, value_column = 0, key_column = 0;
};

std::vector<Entry> tokenize_config(const std::string& text) {
  std::vector<Entry> out;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    size_t lead = 0;
    const std::string s = trim(raw, &lead);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line, static_cast<int>(lead) + 1);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "scenario" && section != "metadata" && section != "metric")
        throw ParseError("unknown section '" + section + "'", line, static_cast<int>(lead) + 2);
      continue;
    }
    const size_t eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, static_cast<int>(lead) + 1);
    if (section.empty()) throw ParseError("entry outside of a section", line, static_cast<int>(lead) + 1);
    Entry e;
    e.section = section;
    e.key = trim(raw.substr(0, eq));
    e.key_column = static_cast<int>(lead) + 1;
    size_t vlead = 0;
    e.value = trim(raw.substr(eq + 1), &vlead);
    e.value_column = static_cast<int>(eq + 1 + vlead) + 1;
    e.line = line;
    if (e.key.empty()) throw ParseError("missing key", line, static_cast<int>(lead) + 1);
    if (e.value.empty()) throw ParseError("missing value for '" + e.key + "'", line, static_cast<int>(eq) + 2);
    out.push_back(std::move(e));
  }
  return out;
}

double constant(const Entry& e, const std::string& text, int column, int n) {
  const Expression ex = parse_expression(text, std::max(n, 1), e.line, column);
  if (ex.max_variable() > 0) throw ParseError("expected a constant expression", e.line, column);
  return ex(Vec::Zero(std::max(n, 1)));
}

// Splits at top-level commas, keeping the column of every piece.
std::vector<std::pair<std::string, int>> split_list(const std::string& s, int column) {
  std::vector<std::pair<std::string, int>> out;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] == '(') ++depth;
    if (i < s.size() && s[i] == ')') --depth;
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      size_t lead = 0;
      std::string piece = trim(s.substr(start, i - start), &lead);
      out.emplace_back(piece, column + static_cast<int>(start + lead));
      start = i + 1;
    }
  }
  return out;
}

// Parses "<prefix>[i]" or "<prefix>[i][j]" and returns the 1-based indices.
bool indexed_key(const std::string& key, const std::string& prefix, std::vector<int>& idx) {
  if (key.rfind(prefix + "[", 0) != 0) return false;
  idx.clear();
  size_t p = prefix.size();
  while (p < key.size()) {
    if (key[p] != '[') return false;
    const size_t q = key.find(']', p);
    if (q == std::string::npos) return false;
    const std::string num = key.substr(p + 1, q - p - 1);
    if (num.empty() || !std::all_of(num.begin(), num.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return false;
    idx.push_back(std::stoi(num));
    p = q + 1;
  }
  return true;
}

}  // namespace

Scenario from_config(const std::string& text, const std::string& origin) {
  const std::vector<Entry> entries = tokenize_config(text);
  Scenario s;
  s.origin = origin;
  double width = -1.0;
  // Dimension first: expressions need it.
  for (const Entry& e : entries)
    if (e.section == "scenario" && e.key == "n") {
      const double v = constant(e, e.value, e.value_column, 1);
      if (v != std::floor(v) || v < 2 || v > 10) throw ParseError("n must be an integer in [2, 10]", e.line, e.value_column);
      s.n = static_cast<int>(v);
    }
  if (s.n == 0) throw ParseError("missing 'n' in [scenario]", 1, 1);
  const int n = s.n;
  std::vector<std::pair<double, double>> box;
  std::vector<std::optional<std::pair<double, double>>> box_set(n);
  std::vector<std::vector<std::optional<Expression>>> tab[2];
  for (auto& t : tab) t.assign(n, std::vector<std::optional<Expression>>(n));
  std::vector<int> idx;
  for (const Entry& e : entries) {
    if (e.section == "scenario") {
      if (e.key == "n") continue;
      if (e.key == "name") {
        s.name = e.value;
      } else if (e.key == "width") {
        width = constant(e, e.value, e.value_column, n);
        if (!(width > 0)) throw ParseError("width must be positive", e.line, e.value_column);
      } else if (indexed_key(e.key, "box", idx) && idx.size() == 1) {
        if (idx[0] < 1 || idx[0] > n) throw ParseError("box index out of range", e.line, e.key_column);
        const auto parts = split_list(e.value, e.value_column);
        if (parts.size() != 2) throw ParseError("box entries need 'lo, hi'", e.line, e.value_column);
        const double lo = constant(e, parts[0].first, parts[0].second, n);
        const double hi = constant(e, parts[1].first, parts[1].second, n);
        if (!(lo < hi)) throw ParseError("box interval is empty", e.line, e.value_column);
        box_set[idx[0] - 1] = std::make_pair(lo, hi);
      } else {
        throw ParseError("unknown key '" + e.key + "' in [scenario]", e.line, e.key_column);
      }
    } else if (e.section == "metadata") {
      if (e.key.rfind("kappa.", 0) == 0) {
        static const std::vector<std::string> kinds = {"operator", "ricci",      "scalar",     "bi",
                                                       "isotropic", "isotropic1", "isotropic2", "flag"};
        const std::string kind = e.key.substr(6);
        if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
          throw ParseError("unknown functional '" + kind + "'", e.line, e.key_column + 6);
        s.meta.kappa[kind] = constant(e, e.value, e.value_column, n);
      } else if (e.key == "L_spectrum") {
        for (auto& [piece, col] : split_list(e.value, e.value_column))
          s.meta.L_spectrum.push_back(constant(e, piece, col, n));
        std::sort(s.meta.L_spectrum.begin(), s.meta.L_spectrum.end());
      } else if (e.key == "smooth") {
        if (e.value != "true" && e.value != "false")
          throw ParseError("smooth must be 'true' or 'false'", e.line, e.value_column);
        s.meta.smooth = e.value == "true";
      } else if (e.key == "description") {
        s.meta.description = e.value;
      } else {
        throw ParseError("unknown key '" + e.key + "' in [metadata]", e.line, e.key_column);
      }
    } else {
      const bool is0 = indexed_key(e.key, "g0", idx), is1 = !is0 && indexed_key(e.key, "g1", idx);
      if (!(is0 || is1) || idx.size() != 2) throw ParseError("unknown key '" + e.key + "' in [metric]", e.line, e.key_column);
      const int i = idx[0] - 1, j = idx[1] - 1;
      if (i < 0 || j < 0 || i >= n || j >= n) throw ParseError("metric index out of range", e.line, e.key_column);
      auto& t = tab[is0 ? 0 : 1];
      if (t[i][j] || t[j][i]) throw ParseError("duplicate metric entry '" + e.key + "'", e.line, e.key_column);
      t[i][j] = parse_expression(e.value, n, e.line, e.value_column);
    }
  }
  if (s.name.empty()) throw ParseError("missing 'name' in [scenario]", 1, 1);
  if (width < 0) throw ParseError("missing 'width' in [scenario]", 1, 1);
  for (int i = 0; i < n; ++i) {
    if (box_set[i]) {
      box.push_back(*box_set[i]);
    } else if (i < n - 1) {
      box.emplace_back(-1.0, 1.0);
    } else {
      box.emplace_back(-(width + 0.1), width + 0.1);
    }
  }
  auto make_field = [n, &box](const std::vector<std::vector<std::optional<Expression>>>& t) {
    auto tbl = std::make_shared<std::vector<std::vector<std::optional<Expression>>>>(t);
    auto coeff = [tbl, n](const Vec& x) {
      Mat g = Mat::Identity(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const auto& e = (*tbl)[i][j];
          if (!e) continue;
          g(i, j) = (*e)(x);
          g(j, i) = g(i, j);
        }
      return g;
    };
    return MetricField::finite_difference(ChartDomain(n, box), coeff, FdConfig{1e-4, false}, true);
  };
  MetricField g0 = make_field(tab[0]), g1 = make_field(tab[1]);
  // Positive definiteness on a coarse grid of each side.
  for (int side = 0; side < 2; ++side) {
    const MetricField& g = side == 0 ? g0 : g1;
    for (int corner = 0; corner < (1 << n); ++corner)
      for (double frac : {0.25, 0.75}) {
        Vec x(n);
        for (int a = 0; a < n - 1; ++a) {
          const auto [lo, hi] = box[a];
          x(a) = (corner >> a) & 1 ? lo + frac * (hi - lo) : hi - frac * (hi - lo);
        }
        x(n - 1) = (side == 0 ? 1.0 : -1.0) * width * ((corner >> (n - 1)) & 1 ? frac : 1.0 - frac);
        Eigen::SelfAdjointEigenSolver<Mat> es(g.value(x));
        if (!(es.eigenvalues()(0) > 0)) {
          std::ostringstream os;
          os << "g" << side << " is not positive definite at x = (" << x.transpose() << ")";
          throw ConfigError(os.str());
        }
      }
  }
  try {
    s.collar = std::make_shared<const CollarData>(make_collar(std::move(g0), std::move(g1), width, n == 2 ? 5 : 3));
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const double mismatch = spectrum_mismatch(s);
  if (mismatch > 1e-8) {
    std::ostringstream os;
    os << "declared L_spectrum disagrees with the recomputed second fundamental form by " << mismatch;
    throw ConfigError(os.str());
  }
  return s;
}

Scenario load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_config(ss.str(), path);
}

std::vector<Scenario> load_config_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DomainError("not a directory: '" + dir + "'");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_config_file(f));
  return out;
}

}  // namespace curvglue
