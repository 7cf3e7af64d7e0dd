#include "vefs/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vefs {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
}

bool parse_bool(const std::string &v, const std::string &ctx) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(ctx + ": expected boolean, got '" + v + "'");
}

double parse_double(const std::string &v, const std::string &ctx) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError(ctx + ": expected number, got '" + v + "'");
  }
}

int parse_int(const std::string &v, const std::string &ctx) {
  try {
    size_t pos = 0;
    int d = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError(ctx + ": expected integer, got '" + v + "'");
  }
}

std::vector<double> parse_list(const std::string &v, const std::string &ctx) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, ctx));
  }
  if (out.empty()) throw ConfigError(ctx + ": expected comma-separated numbers");
  return out;
}

LawKind parse_law(const std::string &v, const std::string &ctx) {
  if (v == "johnson_segalman" || v == "oldroyd_b") return LawKind::JohnsonSegalman;
  if (v == "giesekus") return LawKind::Giesekus;
  if (v == "ptt_exponential") return LawKind::PTTExponential;
  if (v == "ptt_linear") return LawKind::PTTLinear;
  throw ConfigError(ctx + ": unknown law '" + v + "'");
}

struct KV {
  std::string section, key, value;
  int line;
};

void assign(RunConfig &cfg, const KV &kv) {
  const std::string ctx = "line " + std::to_string(kv.line) + " [" + kv.section + "] " + kv.key;
  const std::string &sec = kv.section, &key = kv.key, &v = kv.value;

  auto ensure_dimless = [&]() -> DimensionlessParams & {
    if (!cfg.dimensionless) cfg.dimensionless = DimensionlessParams{};
    return *cfg.dimensionless;
  };
  auto ensure_phys = [&]() -> PhysicalParams & {
    if (!cfg.physical) cfg.physical = PhysicalParams{};
    return *cfg.physical;
  };

  if (sec == "run" || sec.empty()) {
    if (key == "scenario") { cfg.scenario = v; return; }
  }
  if (sec == "domain") {
    if (key == "Lx") { cfg.Lx = parse_double(v, ctx); return; }
    if (key == "amplitude") { cfg.amplitude = parse_double(v, ctx); return; }
    if (key == "wavelength") { cfg.wavelength = parse_double(v, ctx); return; }
    if (key == "depth") { cfg.depth = parse_double(v, ctx); return; }
    if (key == "nx") { cfg.nx = parse_int(v, ctx); return; }
    if (key == "nz") { cfg.nz = parse_int(v, ctx); return; }
  }
  if (sec == "params") {
    auto &p = ensure_dimless();
    if (key == "Re") { p.Re = parse_double(v, ctx); return; }
    if (key == "We") { p.We = parse_double(v, ctx); return; }
    if (key == "eps") { p.eps = parse_double(v, ctx); return; }
    if (key == "alpha") { p.alpha = parse_double(v, ctx); return; }
    if (key == "g0") { p.g0 = parse_double(v, ctx); return; }
    if (key == "a") { p.a = parse_double(v, ctx); return; }
  }
  if (sec == "physical") {
    auto &p = ensure_phys();
    if (key == "rho") { p.rho = parse_double(v, ctx); return; }
    if (key == "mu_sol") { p.mu_sol = parse_double(v, ctx); return; }
    if (key == "mu_pol") { p.mu_pol = parse_double(v, ctx); return; }
    if (key == "lambda") { p.lambda = parse_double(v, ctx); return; }
    if (key == "g_tilde") { p.g_tilde = parse_double(v, ctx); return; }
    if (key == "alpha_tilde") { p.alpha_tilde = parse_double(v, ctx); return; }
    if (key == "P_atm") { p.P_atm = parse_double(v, ctx); return; }
    if (key == "L") { p.L = parse_double(v, ctx); return; }
    if (key == "U0") { p.U0 = parse_double(v, ctx); return; }
    if (key == "a") {
      // slip parameter rides along the physical block
      if (!cfg.dimensionless) cfg.dimensionless = DimensionlessParams{};
      cfg.dimensionless->a = parse_double(v, ctx);
      return;
    }
  }
  if (sec == "law") {
    if (key == "kind") { cfg.law.kind = parse_law(v, ctx); return; }
    if (key == "a") { cfg.law.a = parse_double(v, ctx); return; }
    if (key == "c_giesekus") { cfg.law.c_giesekus = parse_double(v, ctx); return; }
    if (key == "eps_ptt") { cfg.law.eps_ptt = parse_double(v, ctx); return; }
    if (key == "ptt_we_factor") { cfg.law.ptt_we_factor = parse_bool(v, ctx); return; }
  }
  if (sec == "time") {
    if (key == "T") { cfg.T = parse_double(v, ctx); return; }
    if (key == "n_steps") { cfg.n_steps = parse_int(v, ctx); return; }
    if (key == "n_windows") { cfg.n_windows = parse_int(v, ctx); return; }
  }
  if (sec == "tolerances") {
    if (key == "tol") { cfg.tol = parse_double(v, ctx); return; }
    if (key == "lin_tol") { cfg.lin_tol = parse_double(v, ctx); return; }
    if (key == "compat_tol") { cfg.compat_tol = parse_double(v, ctx); return; }
  }
  if (sec == "ladder") {
    if (key == "T_ladder") { cfg.T_ladder = parse_list(v, ctx); return; }
    if (key == "r_index") { cfg.r_index = parse_double(v, ctx); return; }
    if (key == "eps_prime") { cfg.eps_prime = parse_double(v, ctx); return; }
  }
  if (sec == "output") {
    if (key == "out_dir") { cfg.out_dir = v; return; }
    if (key == "write_snapshots") { cfg.write_snapshots = parse_bool(v, ctx); return; }
    if (key == "emit_plot_script") { cfg.emit_plot_script = parse_bool(v, ctx); return; }
  }
  if (sec == "flags") {
    if (key == "auto_halve") { cfg.auto_halve = parse_bool(v, ctx); return; }
    if (key == "spectral_derivatives") { cfg.spectral_derivatives = parse_bool(v, ctx); return; }
    if (key == "run_lemma_checks") { cfg.run_lemma_checks = parse_bool(v, ctx); return; }
    if (key == "stub_sigma") { cfg.stub_sigma = parse_bool(v, ctx); return; }
    if (key == "seed") { cfg.seed = static_cast<unsigned long>(parse_int(v, ctx)); return; }
  }
  throw ConfigError(ctx + ": unknown key");
}

} // namespace

RunConfig parse_config_text(const std::string &text, const std::string &origin) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    assign(cfg, {section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(RunConfig &cfg, const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  std::string lhs = trim(assignment.substr(0, eq));
  std::string val = trim(assignment.substr(eq + 1));
  const auto dot = lhs.find('.');
  std::string section = (dot == std::string::npos) ? "" : lhs.substr(0, dot);
  std::string key = (dot == std::string::npos) ? lhs : lhs.substr(dot + 1);
  if (section.empty()) {
    // try every section until one accepts the key
    for (const char *sec :
         {"run", "domain", "params", "physical", "law", "time", "tolerances",
          "ladder", "output", "flags"}) {
      try {
        assign(cfg, {sec, key, val, 0});
        cfg.validate();
        return;
      } catch (const ConfigError &) {
      }
    }
    throw ConfigError("override '" + assignment + "': unknown key");
  }
  assign(cfg, {section, key, val, 0});
  cfg.validate();
}

DimensionlessParams RunConfig::params() const {
  if (physical) {
    DimensionlessParams d = nondimensionalize(*physical);
    if (dimensionless) d.a = dimensionless->a;
    return d;
  }
  if (dimensionless) {
    dimensionless->validate();
    return *dimensionless;
  }
  DimensionlessParams d;
  return d;
}

void RunConfig::validate() const {
  if (physical && dimensionless) {
    // allow the slip parameter alongside a physical block, nothing else
    DimensionlessParams def;
    const auto &d = *dimensionless;
    const bool only_a = d.Re == def.Re && d.We == def.We && d.eps == def.eps &&
                        d.alpha == def.alpha && d.g0 == def.g0;
    if (!only_a)
      throw ConfigError("exactly one of [params] and [physical] may be given");
  }
  if (!(tol > 0.0 && lin_tol > 0.0 && compat_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (nx < 4 || nz < 3) throw ConfigError("grid too coarse (nx >= 4, nz >= 3)");
  if (n_steps < 1 || n_windows < 1) throw ConfigError("time discretization invalid");
  law.validate();
}

std::string resolved_config_text(const RunConfig &cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[run]\nscenario = " << cfg.scenario << "\n\n";
  os << "[domain]\nLx = " << cfg.Lx << "\namplitude = " << cfg.amplitude
     << "\nwavelength = " << cfg.wavelength << "\ndepth = " << cfg.depth
     << "\nnx = " << cfg.nx << "\nnz = " << cfg.nz << "\n\n";
  if (cfg.physical) {
    const auto &p = *cfg.physical;
    os << "[physical]\nrho = " << p.rho << "\nmu_sol = " << p.mu_sol
       << "\nmu_pol = " << p.mu_pol << "\nlambda = " << p.lambda
       << "\ng_tilde = " << p.g_tilde << "\nalpha_tilde = " << p.alpha_tilde
       << "\nP_atm = " << p.P_atm << "\nL = " << p.L << "\nU0 = " << p.U0 << "\n\n";
  } else {
    const DimensionlessParams d = cfg.params();
    os << "[params]\nRe = " << d.Re << "\nWe = " << d.We << "\neps = " << d.eps
       << "\nalpha = " << d.alpha << "\ng0 = " << d.g0 << "\na = " << d.a << "\n\n";
  }
  os << "[law]\nkind = ";
  switch (cfg.law.kind) {
  case LawKind::JohnsonSegalman: os << "johnson_segalman"; break;
  case LawKind::Giesekus: os << "giesekus"; break;
  case LawKind::PTTExponential: os << "ptt_exponential"; break;
  case LawKind::PTTLinear: os << "ptt_linear"; break;
  }
  os << "\na = " << cfg.law.a << "\nc_giesekus = " << cfg.law.c_giesekus
     << "\neps_ptt = " << cfg.law.eps_ptt
     << "\nptt_we_factor = " << (cfg.law.ptt_we_factor ? "true" : "false") << "\n\n";
  os << "[time]\nT = " << cfg.T << "\nn_steps = " << cfg.n_steps
     << "\nn_windows = " << cfg.n_windows << "\n\n";
  os << "[tolerances]\ntol = " << cfg.tol << "\nlin_tol = " << cfg.lin_tol
     << "\ncompat_tol = " << cfg.compat_tol << "\n\n";
  os << "[ladder]\nT_ladder = ";
  for (size_t i = 0; i < cfg.T_ladder.size(); ++i)
    os << (i ? ", " : "") << cfg.T_ladder[i];
  os << "\nr_index = " << cfg.r_index << "\neps_prime = " << cfg.eps_prime << "\n\n";
  os << "[output]\nout_dir = " << cfg.out_dir
     << "\nwrite_snapshots = " << (cfg.write_snapshots ? "true" : "false")
     << "\nemit_plot_script = " << (cfg.emit_plot_script ? "true" : "false") << "\n\n";
  os << "[flags]\nauto_halve = " << (cfg.auto_halve ? "true" : "false")
     << "\nspectral_derivatives = " << (cfg.spectral_derivatives ? "true" : "false")
     << "\nrun_lemma_checks = " << (cfg.run_lemma_checks ? "true" : "false")
     << "\nstub_sigma = " << (cfg.stub_sigma ? "true" : "false")
     << "\nseed = " << cfg.seed << "\n";
  return os.str();
}

} // namespace vefs
