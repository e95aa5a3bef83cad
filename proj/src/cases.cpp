#include "stokesmg/cases.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace stokesmg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  for (double v : parse_double_list(value)) out.push_back(static_cast<int>(v));
  return out;
}

const std::vector<std::string> kCaseNames = {
    "periodic",          "dirichlet", "stress", "variable-viscosity",
    "multiphase-square", "timedep-single", "timedep-multiphase-square"};

}  // namespace

CaseConfig parse_config_text(const std::string& text) {
  CaseConfig cfg;
  cfg.text = text;
  std::string section = "case";
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "case" && section != "sweep" && section != "convergence" && section != "spectrum")
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (section == "case") {
        if (key == "name") cfg.name = value;
        else if (key == "dim") cfg.dim = std::stoi(value);
        else if (key == "n") cfg.n = std::stoi(value);
        else if (key == "degree") cfg.degree = std::stoi(value);
        else if (key == "gamma") cfg.gamma = std::stoi(value);
        else if (key == "tau") cfg.tau = std::stod(value);
        else if (key == "tau0") cfg.tau0 = std::stod(value);
        else if (key == "mu1") cfg.mu1 = std::stod(value);
        else if (key == "mu2") cfg.mu2 = std::stod(value);
        else if (key == "rho1") cfg.rho1 = std::stod(value);
        else if (key == "rho2") cfg.rho2 = std::stod(value);
        else if (key == "delta_factor") cfg.delta_factor = std::stod(value);
        else if (key == "nu1") cfg.nu1 = std::stoi(value);
        else if (key == "nu2") cfg.nu2 = std::stoi(value);
        else if (key == "tol") cfg.tol = std::stod(value);
        else if (key == "max_iter") cfg.max_iter = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else throw ConfigError("config: unknown key '" + key + "' in [case]");
      } else if (section == "sweep") {
        if (key == "taus") cfg.sweep_taus = parse_double_list(value);
        else if (key == "epsilon") cfg.sweep_epsilon = std::stod(value);
        else throw ConfigError("config: unknown key '" + key + "' in [sweep]");
      } else if (section == "convergence") {
        if (key == "grids") cfg.grids = parse_int_list(value);
        else if (key == "projected_exact") cfg.projected_exact = (value == "true" || value == "1");
        else throw ConfigError("config: unknown key '" + key + "' in [convergence]");
      } else if (section == "spectrum") {
        if (key == "krylov_dim") cfg.krylov_dim = std::stoi(value);
        else throw ConfigError("config: unknown key '" + key + "' in [spectrum]");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

CaseConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

CaseSetup build_case(const CaseConfig& config) {
  if (std::find(kCaseNames.begin(), kCaseNames.end(), config.name) == kCaseNames.end())
    throw ConfigError("unknown case name '" + config.name + "'");
  if (config.dim != 2 && config.dim != 3) throw ConfigError("dim must be 2 or 3");
  if (config.degree < 1 || config.degree > 5) throw ConfigError("degree must be 1..5");
  if (config.n < 2 || (config.n & (config.n - 1)) != 0) throw ConfigError("n must be a power of two >= 2");

  const bool multiphase =
      config.name == "multiphase-square" || config.name == "timedep-multiphase-square";
  const bool timedep = config.name == "timedep-single" || config.name == "timedep-multiphase-square";
  if (multiphase && config.n < 4) throw ConfigError("multiphase cases need n >= 4");

  CaseSetup setup;
  setup.config = config;

  // Per-case defaults.
  int gamma = 0;
  BcSpec bc = BcSpec::all_periodic();
  double mu1 = 1.0, mu2 = 1.0, rho1 = 1.0, rho2 = 1.0;
  if (config.name == "periodic") {
    gamma = 0;
  } else if (config.name == "dirichlet") {
    gamma = 0;
    bc = BcSpec::all_dirichlet();
  } else if (config.name == "stress") {
    gamma = 1;
    bc = BcSpec::all_stress();
  } else if (config.name == "variable-viscosity") {
    gamma = 1;
    bc = BcSpec::all_stress();
  } else if (config.name == "multiphase-square") {
    gamma = 1;
    mu1 = 1e3;
    setup.use_scaling = true;
  } else if (config.name == "timedep-single") {
    gamma = 0;
    mu1 = 1e-2;
    bc = BcSpec::all_stress();
  } else if (config.name == "timedep-multiphase-square") {
    gamma = 1;
    bc = BcSpec::all_dirichlet();
    mu1 = 1.0;      // inner phase: water
    mu2 = 0.0002;   // outer phase: gas
    rho1 = 1.0;
    rho2 = 0.001;
    setup.use_scaling = true;
  }
  if (config.gamma >= 0) gamma = config.gamma;
  if (config.mu1 > 0.0) mu1 = config.mu1;
  if (config.mu2 > 0.0) mu2 = config.mu2;
  if (config.rho1 > 0.0) rho1 = config.rho1;
  if (config.rho2 > 0.0) rho2 = config.rho2;
  setup.resolved_gamma = gamma;

  const int d = config.dim;
  auto phase_fn = [&](const std::array<int, 3>& idx) -> int {
    if (!multiphase) return 1;
    for (int k = 0; k < d; ++k) {
      const double c = (idx[k] + 0.5) / config.n;
      if (c < 0.25 || c > 0.75) return 2;
    }
    return 1;
  };
  try {
    setup.mesh = build_mesh(d, config.n, phase_fn, bc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  setup.basis = Basis(d, config.degree, setup.mesh.element_size());

  ProblemSpec& prob = setup.problem;
  prob.gamma = gamma;
  if (config.name == "variable-viscosity") {
    if (d == 2) {
      prob.mu_fn = [](const Vec3& x) {
        return 1.0 + 0.5 * std::sin(4.0 * M_PI * x[0]) * std::sin(4.0 * M_PI * x[1]);
      };
      prob.mu_grad_fn = [](const Vec3& x) {
        const double c = 2.0 * M_PI;
        return Vec3(c * std::cos(4.0 * M_PI * x[0]) * std::sin(4.0 * M_PI * x[1]),
                    c * std::sin(4.0 * M_PI * x[0]) * std::cos(4.0 * M_PI * x[1]), 0.0);
      };
    } else {
      prob.mu_fn = [](const Vec3& x) {
        return 1.0 + 0.5 * std::sin(4.0 * M_PI * x[0]) * std::sin(4.0 * M_PI * x[1]) *
                         std::sin(4.0 * M_PI * x[2]);
      };
      prob.mu_grad_fn = [](const Vec3& x) {
        const double c = 2.0 * M_PI;
        const double sx = std::sin(4.0 * M_PI * x[0]), cx = std::cos(4.0 * M_PI * x[0]);
        const double sy = std::sin(4.0 * M_PI * x[1]), cy = std::cos(4.0 * M_PI * x[1]);
        const double sz = std::sin(4.0 * M_PI * x[2]), cz = std::cos(4.0 * M_PI * x[2]);
        return Vec3(c * cx * sy * sz, c * sx * cy * sz, c * sx * sy * cz);
      };
    }
    prob.mu_phase = {1.0};
  } else {
    prob.mu_phase = multiphase ? std::vector<double>{mu1, mu2} : std::vector<double>{mu1};
  }
  if (timedep) {
    prob.rho_phase = multiphase ? std::vector<double>{rho1, rho2} : std::vector<double>{rho1};
    prob.delta = config.delta_factor * setup.mesh.element_size();
  }

  setup.solution.dim = d;
  setup.solution.mu_phase = (config.name == "variable-viscosity") ? std::vector<double>{1.0}
                                                                  : prob.mu_phase;
  attach_manufactured_data(prob, setup.solution);

  if (setup.mesh.has_interface()) apply_viscosity_upwinding(setup.mesh, prob);

  try {
    setup.penalties = make_penalty_config(d, config.degree, gamma);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (config.tau > 0.0) setup.penalties.tau = config.tau;
  else if (config.tau >= 0.0) throw ConfigError("tau must be positive");
  if (config.tau0 > 0.0) setup.penalties.tau0 = config.tau0;
  setup.resolved_tau = setup.penalties.tau;
  return setup;
}

StokesSystem assemble_case(const CaseSetup& setup) {
  StokesSystem sys = assemble_stokes(setup.mesh, setup.basis, setup.problem, setup.penalties);
  if (setup.use_scaling) diagonal_scaling(sys, setup.mesh, setup.problem);
  return sys;
}

MgHierarchy make_hierarchy(const CaseSetup& setup, StokesSystem sys) {
  const HierarchyMap map = build_hierarchy(setup.mesh);
  MgOptions opts;
  opts.nu1 = setup.config.nu1;
  opts.nu2 = setup.config.nu2;
  return build_mg_hierarchy(std::move(sys), setup.basis, map, opts);
}

ApplyFn make_apply_a(const MgHierarchy& mg) {
  const StokesSystem* sys = &mg.levels[0].sys;
  return [sys](const Eigen::VectorXd& x, Eigen::VectorXd& y) { sys->apply(x, y); };
}

ApplyFn make_apply_v(const MgHierarchy& mg) {
  const MgHierarchy* m = &mg;
  return [m](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    z = Eigen::VectorXd::Zero(r.size());
    vcycle(*m, z, r);
  };
}

std::pair<Eigen::VectorXd, SolveReport> solve_case(const MgHierarchy& mg, double tol, int max_iter) {
  const Eigen::VectorXd& b = mg.levels[0].sys.b;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(b.size());
  return gmres(make_apply_a(mg), make_apply_v(mg), b, x0, tol, max_iter);
}

SolveReport rho_case(const MgHierarchy& mg, std::uint64_t seed, double tol, int max_iter) {
  return convergence_rate(make_apply_a(mg), make_apply_v(mg), mg.levels[0].sys.size(), seed, tol,
                          max_iter);
}

Eigen::VectorXd project_exact(const CaseSetup& setup, const StokesSystem& sys) {
  const CartesianMesh& mesh = setup.mesh;
  const Basis& basis = setup.basis;
  const ManufacturedSolution& sol = setup.solution;
  const int d = mesh.dim();
  const int nb = basis.size();
  const VolumeTables vt = make_volume_tables(basis, basis.degree() + 3);
  Eigen::VectorXd x(sys.size());
  Eigen::VectorXd fw(vt.weights.size());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec3 lo = mesh.element_low_corner(e);
    const int chi = mesh.phase(e);
    for (int c = 0; c <= d; ++c) {
      for (long q = 0; q < vt.weights.size(); ++q) {
        const Vec3 p = lo + vt.points[q];
        fw[q] = ((c < d) ? sol.velocity(p, c, chi) : sol.pressure(p, chi)) * vt.weights[q];
      }
      x.segment(sys.offset(e, c), nb) = vt.values.transpose() * fw;
    }
  }
  if (sys.scaled()) {
    for (int e = 0; e < mesh.num_elements(); ++e) {
      for (int i = 0; i < d; ++i) x.segment(sys.offset(e, i), nb) /= sys.alpha[e];
      x.segment(sys.offset(e, d), nb) /= sys.beta[e];
    }
  }
  return x;
}

}  // namespace stokesmg
