#include "fracheat/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracheat/errors.hpp"

namespace fracheat {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["s"] = c.s;
  j["N"] = c.N;
  j["M"] = c.M;
  j["penalty_n"] = c.penalty_n;
  j["window_lo"] = c.window_lo;
  j["window_hi"] = c.window_hi;
  j["case"] = c.case_id;
  j["T"] = c.T;
  j["eps_rel"] = c.eps_rel;
  j["max_iter"] = c.max_iter;
  j["K"] = c.K;
  j["ensemble"] = c.ensemble;
  j["seed"] = c.seed;
  j["t_lo"] = c.t_lo;
  j["t_hi"] = c.t_hi;
  j["bisect_tol"] = c.bisect_tol;
  j["diag_ts"] = c.diag_ts;
  j["control_csv"] = c.control_csv;
  j["out_dir"] = c.out_dir;
  return j;
}

struct Workspace {
  FracParams params;
  Mesh1D mesh;
  NonlocalAssembly assembly;
};

Workspace make_workspace(const ExperimentConfig& c) {
  FracParams params(c.s, c.window_lo, c.window_hi);
  Mesh1D mesh = build_mesh(c.N, params);
  NonlocalAssembly assembly = assemble(mesh, params);
  return Workspace{std::move(params), std::move(mesh), std::move(assembly)};
}

void check_csv_header(const fs::path& path, const std::string& header) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line) || line != header) {
    throw numerical_error("emitted file failed validation: " + path.string());
  }
}

ExperimentReport finalize(const ExperimentConfig& c, json j,
                          std::vector<std::pair<std::string, std::string>> files) {
  fs::create_directories(c.out_dir);
  json manifest = json::array();
  for (const auto& [name, header] : files) {
    const fs::path p = fs::path(c.out_dir) / name;
    check_csv_header(p, header);
    manifest.push_back(name);
  }
  j["files"] = manifest;
  j["config"] = config_json(c);

  ExperimentReport report;
  report.json_text = j.dump(2) + "\n";
  const fs::path rp = fs::path(c.out_dir) / "report.json";
  std::ofstream out(rp, std::ios::binary);
  out << report.json_text;
  out.close();
  if (!fs::exists(rp)) throw numerical_error("failed to write " + rp.string());
  for (const auto& [name, header] : files) report.files.push_back(name);
  report.files.push_back("report.json");
  return report;
}

ControlProblem make_case_problem(const Workspace& w, const ExperimentConfig& c,
                                 double T) {
  ControlProblem p;
  p.assembly = &w.assembly;
  p.mesh = &w.mesh;
  p.params = &w.params;
  p.grid = TimeGrid(T, c.M);
  p.penalty_n = c.penalty_n;
  p.u0_int = case_initial(w.mesh, c.case_id);
  p.target_int = case_target(w.mesh, c.s, T);
  p.g_hat = ControlGrid::zero(w.mesh, p.grid);
  p.bound = 0.0;
  Eigen::VectorXd target_full = Eigen::VectorXd::Zero(w.mesh.num_nodes());
  for (std::size_t r = 0; r < w.mesh.interior_ids.size(); ++r) {
    target_full(w.mesh.interior_ids[r]) = p.target_int(static_cast<Eigen::Index>(r));
  }
  p.eps = c.eps_rel * interior_l2_norm(w.assembly, w.mesh, target_full);
  p.max_iter = c.max_iter;
  return p;
}

}  // namespace

Eigen::VectorXd case_initial(const Mesh1D& mesh, int case_id) {
  if (case_id != 1 && case_id != 2) {
    throw config_error("case must be 1 or 2");
  }
  const double amp = case_id == 1 ? 0.5 : 1.8;
  Eigen::VectorXd u0(static_cast<Eigen::Index>(mesh.interior_ids.size()));
  for (std::size_t r = 0; r < mesh.interior_ids.size(); ++r) {
    const double x = mesh.nodes[static_cast<std::size_t>(mesh.interior_ids[r])];
    u0(static_cast<Eigen::Index>(r)) = amp * std::cos(M_PI * x / 2.0);
  }
  return u0;
}

Eigen::VectorXd case_target(const Mesh1D& mesh, double s, double T) {
  Eigen::VectorXd target(static_cast<Eigen::Index>(mesh.interior_ids.size()));
  for (std::size_t r = 0; r < mesh.interior_ids.size(); ++r) {
    const double x = mesh.nodes[static_cast<std::size_t>(mesh.interior_ids[r])];
    target(static_cast<Eigen::Index>(r)) = exact_solution(x, T, s);
  }
  return target;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  ExperimentConfig c;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line is not `key = value`: " + line);
    }
    c.set_key(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

void ExperimentConfig::set_key(const std::string& key, const std::string& value) {
  try {
    if (key == "s") s = std::stod(value);
    else if (key == "N") N = std::stoi(value);
    else if (key == "M") M = std::stoi(value);
    else if (key == "penalty_n") penalty_n = std::stod(value);
    else if (key == "window_lo") window_lo = std::stod(value);
    else if (key == "window_hi") window_hi = std::stod(value);
    else if (key == "case") case_id = std::stoi(value);
    else if (key == "T") T = std::stod(value);
    else if (key == "eps_rel") eps_rel = std::stod(value);
    else if (key == "max_iter") max_iter = std::stoi(value);
    else if (key == "K") K = std::stoi(value);
    else if (key == "ensemble") ensemble = std::stoi(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "t_lo") t_lo = std::stod(value);
    else if (key == "t_hi") t_hi = std::stod(value);
    else if (key == "bisect_tol") bisect_tol = std::stod(value);
    else if (key == "diag_ts") diag_ts = parse_list(value);
    else if (key == "control_csv") control_csv = value;
    else if (key == "out_dir") out_dir = value;
    else throw config_error("unknown config key: " + key);
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("bad value for config key " + key + ": " + value);
  }
}

ExperimentReport run_eig(const ExperimentConfig& c) {
  Workspace w = make_workspace(c);
  const int K = c.K > 0 ? c.K : default_mode_count(w.mesh);
  const EigenBasis basis = compute_eigenbasis(w.assembly, w.mesh, w.params, K);

  fs::create_directories(c.out_dir);
  const fs::path table = fs::path(c.out_dir) / "eig_table.csv";
  std::FILE* f = std::fopen(table.c_str(), "w");
  if (!f) throw numerical_error("cannot open " + table.string());
  std::fprintf(f, "k,lambda_k,asymptotic_k,relative_gap,l1_normal_trace_k\n");
  double max_gap10 = 0.0;
  for (int k = 0; k < basis.K; ++k) {
    const double asym = eigenvalue_asymptotic(k + 1, c.s);
    const double gap = std::abs(basis.lambdas(k) - asym) / asym;
    if (k < 10) max_gap10 = std::max(max_gap10, gap);
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", k + 1, basis.lambdas(k), asym, gap,
                 basis.window_l1(basis.normal_traces.col(k)));
  }
  std::fclose(f);

  json j;
  j["command"] = "eig";
  j["controllable_order"] = w.params.controllable_order();
  j["K"] = basis.K;
  j["lambda_1"] = basis.lambdas(0);
  j["max_residual"] = basis.max_residual;
  j["max_relative_gap_k10"] = max_gap10;
  return finalize(c, std::move(j),
                  {{"eig_table.csv", "k,lambda_k,asymptotic_k,relative_gap,l1_normal_trace_k"}});
}

ExperimentReport run_solve(const ExperimentConfig& c) {
  Workspace w = make_workspace(c);
  const TimeGrid grid(c.T, c.M);
  ControlGrid g = c.control_csv.empty() ? ControlGrid::zero(w.mesh, grid)
                                        : read_control_csv(w.mesh, grid, c.control_csv);
  const Eigen::VectorXd u0 = case_initial(w.mesh, c.case_id);
  const Trajectory traj =
      robin_forward(w.assembly, w.mesh, w.params, grid, c.penalty_n, u0, g);

  fs::create_directories(c.out_dir);
  dump_trajectory_csv(traj, w.mesh, grid, (fs::path(c.out_dir) / "snapshots.csv").string());

  const Eigen::VectorXd target = case_target(w.mesh, c.s, c.T);
  Eigen::VectorXd diff = traj.snapshots.back();
  for (std::size_t r = 0; r < w.mesh.interior_ids.size(); ++r) {
    diff(w.mesh.interior_ids[r]) -= target(static_cast<Eigen::Index>(r));
  }
  const double misfit = interior_l2_norm(w.assembly, w.mesh, diff);
  Eigen::VectorXd target_full = Eigen::VectorXd::Zero(w.mesh.num_nodes());
  for (std::size_t r = 0; r < w.mesh.interior_ids.size(); ++r) {
    target_full(w.mesh.interior_ids[r]) = target(static_cast<Eigen::Index>(r));
  }
  const double eps = c.eps_rel * interior_l2_norm(w.assembly, w.mesh, target_full);

  json j;
  j["command"] = "solve";
  j["case"] = c.case_id;
  j["s"] = c.s;
  j["T"] = c.T;
  j["terminal_misfit"] = misfit;
  j["eps"] = eps;
  j["feasible"] = misfit <= eps;
  j["replayed_control"] = !c.control_csv.empty();
  return finalize(c, std::move(j), {{"snapshots.csv", "t,x,u"}});
}

ExperimentReport run_control(const ExperimentConfig& c) {
  Workspace w = make_workspace(c);
  ControlProblem p = make_case_problem(w, c, c.T);
  const SolveResult r = projected_gradient_solve(p);

  fs::create_directories(c.out_dir);
  dump_control_csv(r.g, w.mesh, p.grid, (fs::path(c.out_dir) / "control.csv").string());

  json j;
  j["command"] = "control";
  j["case"] = c.case_id;
  j["s"] = c.s;
  j["T"] = c.T;
  j["misfit"] = r.misfit;
  j["eps"] = p.eps;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["projected_grad"] = r.projected_grad;
  j["control_min"] = r.g.values.minCoeff();
  j["control_max"] = r.g.values.maxCoeff();
  // The reference-trajectory datum of the headline cases vanishes on the
  // window, which sits outside the positivity hypotheses of the continuous
  // theory; reports carry the flag.
  j["target_datum_positive"] = false;
  return finalize(c, std::move(j), {{"control.csv", "t,x,g"}});
}

ExperimentReport run_mintime(const ExperimentConfig& c) {
  Workspace w = make_workspace(c);
  const ProblemFactory factory = [&](double T) { return make_case_problem(w, c, T); };
  const MinTimeResult r = minimal_time_search(factory, c.t_lo, c.t_hi, c.bisect_tol);

  fs::create_directories(c.out_dir);
  const TimeGrid grid(r.t_min, c.M);
  dump_control_csv(r.best.g, w.mesh, grid, (fs::path(c.out_dir) / "control.csv").string());

  json j;
  j["command"] = "mintime";
  j["case"] = c.case_id;
  j["s"] = c.s;
  j["t_min_estimate"] = r.t_min;
  j["bracket"] = {r.t_lo, r.t_hi};
  j["misfit"] = r.best.misfit;
  j["iterations"] = r.best.iterations;
  json trace = json::array();
  for (const auto& probe : r.trace) {
    trace.push_back({{"T", probe.T}, {"misfit", probe.misfit}, {"feasible", probe.feasible}});
  }
  j["trace"] = trace;
  j["target_datum_positive"] = false;
  return finalize(c, std::move(j), {{"control.csv", "t,x,g"}});
}

ExperimentReport run_diagnose(const ExperimentConfig& c) {
  Workspace w = make_workspace(c);
  const int n_int = static_cast<int>(w.mesh.interior_ids.size());
  const int K = c.K > 0 ? c.K : std::min(20, n_int);
  const EigenBasis basis = compute_eigenbasis(w.assembly, w.mesh, w.params, K);

  json ratios = json::array();
  double eta = 0.0, min_gap = 0.0;
  for (double T : c.diag_ts) {
    const Diagnostics d = observability_diagnostics(basis, T, c.ensemble, c.seed);
    eta = d.eta;
    min_gap = d.min_gap;
    ratios.push_back({{"T", T}, {"ingham_ratio", d.ingham_ratio}, {"obs_ratio", d.obs_ratio}});
  }

  json j;
  j["command"] = "diagnose";
  j["s"] = c.s;
  j["controllable_order"] = w.params.controllable_order();
  j["K"] = K;
  j["eta"] = eta;
  j["min_gap"] = min_gap;
  j["ratios"] = ratios;
  return finalize(c, std::move(j), {});
}

}  // namespace fracheat
