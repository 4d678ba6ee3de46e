#include "dk/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "dk/noise.hpp"
#include "dk/snapshot.hpp"

namespace dk {

namespace pt = boost::property_tree;

namespace {

std::string key_name(const std::string& section, const std::string& key) { return "[" + section + "]." + key; }

double to_double(const std::string& section, const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key_name(section, key) + ": expected a number, got '" + text + "'");
  return v;
}

long long to_int(const std::string& section, const std::string& key, const std::string& text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key_name(section, key) + ": expected an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& section, const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key_name(section, key) + ": expected an unsigned integer, got '" + text + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

void check_keys(const pt::ptree& sec, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, child] : sec) {
    if (!child.empty()) throw ConfigError(key_name(name, key) + ": nested keys are not supported");
    if (!allowed.count(key)) throw ConfigError(key_name(name, key) + ": unknown key");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (grid.d < 1 || grid.d > 3) throw ConfigError("[grid].d must be 1, 2 or 3");
  if (grid.n < 8 || grid.n % 2 != 0) throw ConfigError("[grid].n must be even and >= 8");
  if (kernel.kind != "zero" && kernel.kind != "smooth" && kernel.kind != "power") {
    throw ConfigError("[kernel].kind must be zero, smooth or power");
  }
  if (kernel.kind == "power") {
    if (grid.d != 2) throw ConfigError("[kernel].kind = power requires [grid].d = 2");
    if (!(kernel.alpha > 0.0 && kernel.alpha < 1.0)) throw ConfigError("[kernel].alpha must lie in (0, 1)");
    if (!(kernel.gamma > 0.0)) throw ConfigError("[kernel].gamma must be > 0 for power-law kernels");
  }
  if (kernel.sign != 1 && kernel.sign != -1) throw ConfigError("[kernel].sign must be 1 or -1");
  if (!(kernel.gamma >= 0.0 && kernel.gamma < 1.0)) throw ConfigError("[kernel].gamma must lie in [0, 1)");
  if (kernel.kind == "smooth" && kernel.modes.empty()) throw ConfigError("[kernel].modes required for kind = smooth");
  if (!(std::fabs(initial.amplitude) < 1.0)) throw ConfigError("[initial].amplitude must satisfy |a| < 1");
  if (initial.mode < 0 || initial.mode >= grid.n / 2) throw ConfigError("[initial].mode must lie in [0, n/2)");
  if (!(solver.dt > 0.0)) throw ConfigError("[solver].dt must be positive");
  if (!(solver.T > 0.0)) throw ConfigError("[solver].T must be positive");
  if (!(solver.eta > 0.0 && solver.eta < 1.0)) throw ConfigError("[solver].eta must lie in (0, 1)");
  if (!(solver.eps >= 0.0 && solver.eps < 1.0)) throw ConfigError("[solver].eps must lie in [0, 1)");
  if (solver.snapshot_stride < 1) throw ConfigError("[solver].snapshot_stride must be >= 1");
  if (solver.positivity != "observe" && solver.positivity != "clamp") {
    throw ConfigError("[solver].positivity must be observe or clamp");
  }
  if (noise) {
    if (noise->K && *noise->K < 0) throw ConfigError("[noise].K must be >= 0");
    if (noise->K && noise->beta) throw ConfigError("[noise].K and [noise].beta are mutually exclusive");
    if (noise->beta && !(*noise->beta > 0.0 && *noise->beta < 1.0 / (grid.d + 2))) {
      throw ConfigError("[noise].beta must lie in (0, 1/(d+2))");
    }
  }
  static const std::set<std::string> modes{"none", "constant", "shear", "drift-gradient", "file"};
  if (!modes.count(control.mode)) throw ConfigError("[control].mode must be none, constant, shear, drift-gradient or file");
  if (control.mode == "drift-gradient" && control.phi_modes.empty()) {
    throw ConfigError("[control].phi_modes required for mode = drift-gradient");
  }
  if (control.mode == "file" && control.g_file.empty()) throw ConfigError("[control].g_file required for mode = file");
  if (mc.trials == 0) throw ConfigError("[mc].trials must be positive");
  for (double e : mc.eps_list) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("[mc].eps_list entries must lie in (0, 1)");
  }
  if (mc.event != "tube-exit") throw ConfigError("[mc].event must be tube-exit");
  if (!(mc.radius > 0.0)) throw ConfigError("[mc].radius must be positive");
  if (!(mc.beta > 0.0 && mc.beta < 1.0 / (grid.d + 2))) throw ConfigError("[mc].beta must lie in (0, 1/(d+2))");
  if (output.directory.empty()) throw ConfigError("[output].directory must not be empty");
}

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  static const std::map<std::string, std::set<std::string>> allowed{
      {"grid", {"d", "n"}},
      {"kernel", {"kind", "alpha", "sign", "gamma", "modes"}},
      {"initial", {"amplitude", "mode"}},
      {"solver", {"T", "dt", "eta", "eps", "snapshot_stride", "positivity"}},
      {"noise", {"K", "beta", "seed"}},
      {"control", {"mode", "amplitude", "phi_modes", "g_file"}},
      {"mc", {"trials", "eps_list", "event", "radius", "beta"}},
      {"output", {"directory"}},
  };
  ExperimentConfig c;
  for (const auto& [name, sec] : tree) {
    auto it = allowed.find(name);
    if (it == allowed.end()) {
      if (sec.empty()) throw ConfigError("key '" + name + "' outside any section");
      throw ConfigError("[" + name + "]: unknown section");
    }
    check_keys(sec, name, it->second);
  }
  auto get = [&](const char* section, const char* key) -> std::optional<std::string> {
    auto sec = tree.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(key);
    return v ? std::optional<std::string>(*v) : std::nullopt;
  };
  auto num = [&](const char* s, const char* k, double& out) {
    if (auto v = get(s, k)) out = to_double(s, k, *v);
  };
  auto integer = [&](const char* s, const char* k, int& out) {
    if (auto v = get(s, k)) out = static_cast<int>(to_int(s, k, *v));
  };
  auto text = [&](const char* s, const char* k, std::string& out) {
    if (auto v = get(s, k)) out = *v;
  };

  integer("grid", "d", c.grid.d);
  integer("grid", "n", c.grid.n);
  text("kernel", "kind", c.kernel.kind);
  num("kernel", "alpha", c.kernel.alpha);
  integer("kernel", "sign", c.kernel.sign);
  num("kernel", "gamma", c.kernel.gamma);
  text("kernel", "modes", c.kernel.modes);
  num("initial", "amplitude", c.initial.amplitude);
  integer("initial", "mode", c.initial.mode);
  num("solver", "T", c.solver.T);
  num("solver", "dt", c.solver.dt);
  num("solver", "eta", c.solver.eta);
  num("solver", "eps", c.solver.eps);
  integer("solver", "snapshot_stride", c.solver.snapshot_stride);
  text("solver", "positivity", c.solver.positivity);
  if (tree.get_child_optional("noise")) {
    ExperimentConfig::Noise nz;
    if (auto v = get("noise", "K")) nz.K = static_cast<int>(to_int("noise", "K", *v));
    if (auto v = get("noise", "beta")) nz.beta = to_double("noise", "beta", *v);
    if (auto v = get("noise", "seed")) nz.seed = to_u64("noise", "seed", *v);
    c.noise = nz;
  }
  text("control", "mode", c.control.mode);
  num("control", "amplitude", c.control.amplitude);
  text("control", "phi_modes", c.control.phi_modes);
  text("control", "g_file", c.control.g_file);
  if (auto v = get("mc", "trials")) c.mc.trials = static_cast<std::size_t>(to_u64("mc", "trials", *v));
  if (auto v = get("mc", "eps_list")) {
    c.mc.eps_list.clear();
    for (const auto& part : split(*v, ',')) c.mc.eps_list.push_back(to_double("mc", "eps_list", part));
  }
  text("mc", "event", c.mc.event);
  num("mc", "radius", c.mc.radius);
  num("mc", "beta", c.mc.beta);
  text("output", "directory", c.output.directory);
  c.validate();
  return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[grid]\nd=" << c.grid.d << "\nn=" << c.grid.n << "\n\n";
  os << "[kernel]\nkind=" << c.kernel.kind << "\nalpha=" << fmt(c.kernel.alpha) << "\nsign=" << c.kernel.sign
     << "\ngamma=" << fmt(c.kernel.gamma) << "\n";
  if (!c.kernel.modes.empty()) os << "modes=" << c.kernel.modes << "\n";
  os << "\n[initial]\namplitude=" << fmt(c.initial.amplitude) << "\nmode=" << c.initial.mode << "\n\n";
  os << "[solver]\nT=" << fmt(c.solver.T) << "\ndt=" << fmt(c.solver.dt) << "\neta=" << fmt(c.solver.eta)
     << "\neps=" << fmt(c.solver.eps) << "\nsnapshot_stride=" << c.solver.snapshot_stride
     << "\npositivity=" << c.solver.positivity << "\n\n";
  if (c.noise) {
    os << "[noise]\n";
    if (c.noise->K) os << "K=" << *c.noise->K << "\n";
    if (c.noise->beta) os << "beta=" << fmt(*c.noise->beta) << "\n";
    os << "seed=" << c.noise->seed << "\n\n";
  }
  os << "[control]\nmode=" << c.control.mode << "\namplitude=" << fmt(c.control.amplitude) << "\n";
  if (!c.control.phi_modes.empty()) os << "phi_modes=" << c.control.phi_modes << "\n";
  if (!c.control.g_file.empty()) os << "g_file=" << c.control.g_file << "\n";
  os << "\n[mc]\ntrials=" << c.mc.trials << "\neps_list=";
  for (std::size_t i = 0; i < c.mc.eps_list.size(); ++i) os << (i ? "," : "") << fmt(c.mc.eps_list[i]);
  os << "\nevent=" << c.mc.event << "\nradius=" << fmt(c.mc.radius) << "\nbeta=" << fmt(c.mc.beta) << "\n\n";
  os << "[output]\ndirectory=" << c.output.directory << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

std::vector<FourierTerm> parse_vector_modes(const std::string& text, int d) {
  std::vector<FourierTerm> terms;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 4) throw ConfigError("[kernel].modes: term '" + item + "' must be k:component:cos:sin");
    FourierTerm t;
    for (const auto& k : split(parts[0], ',')) t.k.push_back(static_cast<int>(to_int("kernel", "modes", k)));
    if (static_cast<int>(t.k.size()) != d) throw ConfigError("[kernel].modes: wavevector '" + parts[0] + "' needs d entries");
    t.component = static_cast<int>(to_int("kernel", "modes", parts[1]));
    if (t.component < 0 || t.component >= d) throw ConfigError("[kernel].modes: component out of range");
    t.cos_coeff = to_double("kernel", "modes", parts[2]);
    t.sin_coeff = to_double("kernel", "modes", parts[3]);
    terms.push_back(std::move(t));
  }
  return terms;
}

ScalarField parse_scalar_modes(const std::string& text, GridPtr grid) {
  ScalarField phi(grid);
  const int d = grid->dim();
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError("[control].phi_modes: term '" + item + "' must be k:cos:sin");
    std::vector<int> k;
    for (const auto& v : split(parts[0], ',')) k.push_back(static_cast<int>(to_int("control", "phi_modes", v)));
    if (static_cast<int>(k.size()) != d) throw ConfigError("[control].phi_modes: wavevector needs d entries");
    for (int v : k) {
      if (std::abs(v) >= grid->n() / 2) throw ConfigError("[control].phi_modes: mode not resolved by the grid");
    }
    const double a = to_double("control", "phi_modes", parts[1]);
    const double b = to_double("control", "phi_modes", parts[2]);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      double phase = 0.0;
      for (int ax = 0; ax < d; ++ax) phase += k[static_cast<std::size_t>(ax)] * grid->coordinate(i, ax);
      phase *= 2.0 * std::numbers::pi;
      phi[i] += a * std::cos(phase) + b * std::sin(phase);
    }
  }
  return phi;
}

GridPtr make_grid(const ExperimentConfig& cfg) { return TorusGrid::make(cfg.grid.d, cfg.grid.n); }

KernelSpec make_kernel_spec(const ExperimentConfig& cfg) {
  KernelSpec s;
  if (cfg.kernel.kind == "smooth") {
    s.kind = KernelKind::smooth;
    s.terms = parse_vector_modes(cfg.kernel.modes, cfg.grid.d);
  } else if (cfg.kernel.kind == "power") {
    s.kind = KernelKind::power;
  }
  s.alpha = cfg.kernel.alpha;
  s.sign = cfg.kernel.sign;
  s.gamma = cfg.kernel.gamma;
  return s;
}

Kernel make_kernel(const ExperimentConfig& cfg, GridPtr grid) { return build_kernel(make_kernel_spec(cfg), std::move(grid)); }

ScalarField make_initial(const ExperimentConfig& cfg, GridPtr grid) {
  ScalarField rho(grid);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = 1.0 + cfg.initial.amplitude * std::cos(2.0 * std::numbers::pi * cfg.initial.mode * grid->coordinate(i, 0));
  }
  return rho;
}

int resolve_K(const ExperimentConfig& cfg) {
  if (!cfg.noise) throw ConfigError("[noise] section required");
  if (cfg.noise->K) return *cfg.noise->K;
  if (cfg.noise->beta) {
    if (!(cfg.solver.eps > 0.0)) throw ConfigError("[noise].beta needs [solver].eps > 0");
    return scaling_K(cfg.solver.eps, *cfg.noise->beta, cfg.grid.d).K;
  }
  throw ConfigError("[noise] needs K or beta");
}

SolverConfig make_solver_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  SolverConfig s;
  s.T = cfg.solver.T;
  s.dt = cfg.solver.dt;
  s.eta = cfg.solver.eta;
  s.eps = cfg.solver.eps;
  s.snapshot_stride = cfg.solver.snapshot_stride;
  s.positivity = cfg.solver.positivity == "clamp" ? Positivity::clamp_report : Positivity::observe_only;
  if (cfg.noise) s.noise = NoiseSpec{build_modes(cfg.grid.d, resolve_K(cfg)), seed, 0};
  return s;
}

Control make_control(const ExperimentConfig& cfg, GridPtr grid) {
  const std::string& mode = cfg.control.mode;
  if (mode == "none") return std::monostate{};
  const double A = cfg.control.amplitude;
  if (mode == "drift-gradient") {
    ScalarField phi = parse_scalar_modes(cfg.control.phi_modes, grid);
    simd::scale(A, phi.values());
    return DriftGradient{std::move(phi)};
  }
  ExperimentConfig plain = cfg;
  plain.noise.reset();
  const SolverConfig s = make_solver_config(plain, 0);
  const std::size_t steps = s.steps();
  if (mode == "file") {
    const Snapshot snap = read_snapshot(cfg.control.g_file);
    if (snap.d != static_cast<std::uint32_t>(grid->dim()) || snap.n != static_cast<std::uint32_t>(grid->n()) ||
        snap.components != static_cast<std::uint32_t>(grid->dim())) {
      throw ConfigError("[control].g_file: snapshot shape does not match [grid]");
    }
    VectorField g(grid);
    std::copy(snap.values.begin(), snap.values.end(), g.data().begin());
    simd::scale(A, g.data());
    ControlPath p;
    p.g.assign(steps, g);
    return p;
  }
  const GridPtr gp = grid;
  return ControlPath::from_function(grid, steps, s.dt, [&](double, VectorField& out) {
    const int d = gp->dim();
    for (std::size_t i = 0; i < gp->size(); ++i) {
      if (mode == "constant") {
        out.component(0)[i] = A;
      } else {
        // divergence-free shear along the first axis
        const int ax = d >= 2 ? 1 : 0;
        out.component(0)[i] = A * std::sin(2.0 * std::numbers::pi * gp->coordinate(i, ax));
      }
    }
  });
}

}  // namespace dk
