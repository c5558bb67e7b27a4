#include "pshlab/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace pshlab::scenario {

using nlohmann::json;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::Config, msg, "config"); }

json mat_json(const Eigen::Matrix2d& m) { return json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}); }
json mat_json(const Eigen::Matrix2i& m) { return json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}); }

template <class M>
M mat_from(const json& j, const std::string& key) {
  M m;
  if (!j.is_array() || j.size() != 2) config_error(key + " must be a 2x2 array");
  for (int r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 2) config_error(key + " must be a 2x2 array");
    for (int c = 0; c < 2; ++c) {
      const json& x = j[r][c];
      if constexpr (std::is_same_v<M, Eigen::Matrix2i>) {
        if (!x.is_number_integer()) config_error(key + " entries must be integers");
        m(r, c) = x.get<int>();
      } else {
        if (!x.is_number()) config_error(key + " entries must be numbers");
        m(r, c) = x.get<double>();
      }
    }
  }
  return m;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
  return a.type() == b.type();
}

// Overlays `user` onto `defaults`, rejecting unknown keys and type changes.
void overlay(json& defaults, const json& user, const std::string& path) {
  if (!user.is_object()) config_error(path + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!defaults.contains(it.key())) config_error("unknown config key " + key);
    json& d = defaults[it.key()];
    if (d.is_object()) {
      overlay(d, it.value(), key);
    } else if (d.is_array()) {
      if (!it.value().is_array()) config_error(key + " must be an array");
      d = it.value();
    } else {
      if (!same_kind(d, it.value())) config_error("wrong type for " + key);
      d = it.value();
    }
  }
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_file_spec(const std::string& mu) {
  return mu.rfind("random:", 0) != 0 && mu.rfind("const:", 0) != 0 && mu.rfind("bump:", 0) != 0 && mu != "zero";
}

}  // namespace

json to_json(const ScenarioConfig& c) {
  return {
      {"name", c.name},
      {"seed", c.seed},
      {"mesh", {{"builder", c.mesh_builder}, {"level", c.mesh_level}, {"file", c.mesh_file}}},
      {"target",
       {{"kind", c.target}, {"lattice", mat_json(c.lattice)}, {"representation_file", c.representation_file}}},
      {"class", {{"degree", mat_json(c.degree)}, {"torus_factor_degree", mat_json(c.torus_factor_degree)}}},
      {"beltrami", {{"mu", c.mu}, {"disk_radius", c.disk_radius}}},
      {"stencil", {{"h", c.h}}},
      {"solver", {{"method", c.solver.method}, {"tol", c.solver.tol}, {"max_iters", c.solver.max_iters}}},
      {"initial", {{"perturbation", c.initial_perturbation}}},
      {"output", {{"dir", c.out_dir}}},
      {"threads", c.threads},
  };
}

ScenarioConfig config_from_json(const json& user) {
  json j = to_json(ScenarioConfig{});
  overlay(j, user, "");
  ScenarioConfig c;
  c.name = j["name"];
  c.seed = j["seed"];
  c.mesh_builder = j["mesh"]["builder"];
  c.mesh_level = j["mesh"]["level"];
  c.mesh_file = j["mesh"]["file"];
  c.target = j["target"]["kind"];
  c.lattice = mat_from<Eigen::Matrix2d>(j["target"]["lattice"], "target.lattice");
  c.representation_file = j["target"]["representation_file"];
  c.degree = mat_from<Eigen::Matrix2i>(j["class"]["degree"], "class.degree");
  c.torus_factor_degree = mat_from<Eigen::Matrix2i>(j["class"]["torus_factor_degree"], "class.torus_factor_degree");
  c.mu = j["beltrami"]["mu"];
  c.disk_radius = j["beltrami"]["disk_radius"];
  c.h = j["stencil"]["h"];
  c.solver.method = j["solver"]["method"];
  c.solver.tol = j["solver"]["tol"];
  c.solver.max_iters = j["solver"]["max_iters"];
  c.initial_perturbation = j["initial"]["perturbation"];
  c.out_dir = j["output"]["dir"];
  c.threads = j["threads"];
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config " + path, "config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    config_error("cannot parse " + path + ": " + e.what());
  }
  ScenarioConfig c = config_from_json(j);
  const fs::path dir = fs::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (dir / p).lexically_normal().string();
  };
  resolve(c.mesh_file);
  resolve(c.representation_file);
  if (is_file_spec(c.mu)) resolve(c.mu);
  return c;
}

void validate_config(const ScenarioConfig& c) {
  if (c.mesh_builder != "torus" && c.mesh_builder != "genus2" && c.mesh_builder != "file")
    config_error("mesh.builder must be torus, genus2 or file");
  if (c.mesh_builder == "torus" && c.mesh_level < 2) config_error("torus mesh.level must be at least 2");
  if (c.mesh_builder == "genus2" && (c.mesh_level < 0 || c.mesh_level > 4))
    config_error("genus2 mesh.level must be in 0..4");
  if (c.mesh_builder == "file" && !fs::exists(c.mesh_file)) config_error("mesh file not found: " + c.mesh_file);
  if (c.target != "auto" && c.target != "flat_torus" && c.target != "octagon" && c.target != "product")
    config_error("target.kind must be auto, flat_torus, octagon or product");
  if (!c.representation_file.empty() && !fs::exists(c.representation_file))
    config_error("representation file not found: " + c.representation_file);
  if (is_file_spec(c.mu) && !fs::exists(c.mu)) config_error("Beltrami file not found: " + c.mu);
  if (!(c.disk_radius > 0.0 && c.disk_radius < 1.0)) config_error("beltrami.disk_radius must be in (0, 1)");
  if (c.h < 0.0 || !std::isfinite(c.h)) config_error("stencil.h must be >= 0");
  if (c.solver.method != "cg" && c.solver.method != "gd") config_error("solver.method must be cg or gd");
  if (!(c.solver.tol > 0.0) || c.solver.max_iters < 1) config_error("solver.tol and solver.max_iters must be positive");
  if (c.initial_perturbation < 0.0) config_error("initial.perturbation must be >= 0");
  if (c.threads < 1) config_error("threads must be >= 1");
}

std::string config_hash(const ScenarioConfig& c) {
  json j = to_json(c);
  j.erase("output");
  j.erase("threads");
  return fnv1a(j.dump());
}

// --- setup -----------------------------------------------------------------------------------

namespace {

harmonic::EquivariantMap interleave(const harmonic::EquivariantMap& f, const harmonic::EquivariantMap& g) {
  harmonic::EquivariantMap out{f.num_factors + g.num_factors, {}};
  for (int v = 0; v < f.num_vertices(); ++v) {
    for (int k = 0; k < f.num_factors; ++k) out.z.push_back(f.at(v, k));
    for (int k = 0; k < g.num_factors; ++k) out.z.push_back(g.at(v, k));
  }
  return out;
}

// Flat factor letters of a genus-two domain: a, c -> row 0 and b, d -> row 1.
std::map<char, std::array<int, 2>> genus2_letters(const Eigen::Matrix2i& d) {
  const std::array<int, 2> r0{d(0, 0), d(0, 1)}, r1{d(1, 0), d(1, 1)};
  return {{'a', r0}, {'b', r1}, {'c', r0}, {'d', r1}};
}

harmonic::EquivariantMap torus_factor_map(const surface::Surface& s, const Eigen::Matrix2d& lattice,
                                          const Eigen::Matrix2i& degree) {
  if (s.mesh.genus() == 1) return harmonic::affine_torus_map(s, lattice * degree.transpose().cast<double>());
  return {1, std::vector<cplx>(s.mesh.num_vertices(), 0.0)};
}

}  // namespace

Setup build(const ScenarioConfig& c) {
  validate_config(c);
  Setup st;
  if (c.mesh_builder == "torus") st.surface = surface::build_torus(c.mesh_level);
  else if (c.mesh_builder == "genus2") st.surface = surface::build_genus2_octagon(c.mesh_level);
  else st.surface = surface::load_surface(c.mesh_file);
  st.surface.mesh.validate_or_throw();
  const int genus = st.surface.mesh.genus();
  if (genus != 1 && genus != 2) throw Error(ErrorCode::Config, "only genus one and two domains are supported", "build");

  std::string kind = c.target;
  if (kind == "auto") kind = genus == 1 ? "flat_torus" : "octagon";
  if ((kind == "flat_torus") != (genus == 1) && kind != "product")
    throw Error(ErrorCode::Config, "target " + kind + " does not match a genus " + std::to_string(genus) + " domain",
                "build");

  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  if (kind == "flat_torus") {
    st.target = target::flat_torus_target(c.lattice, c.degree);
    st.initial = torus_factor_map(st.surface, c.lattice, c.degree);
  } else if (kind == "octagon") {
    st.target = target::octagon_generators();
    st.initial = harmonic::map_from_development(st.surface, st.target);
  } else if (genus == 1) {
    st.target = target::product_target(target::flat_torus_target(c.lattice, c.degree),
                                       target::flat_torus_target(id, c.torus_factor_degree));
    st.initial = interleave(torus_factor_map(st.surface, c.lattice, c.degree),
                            torus_factor_map(st.surface, id, c.torus_factor_degree));
  } else {
    const target::Target hyp = target::octagon_generators();
    st.target = target::product_target(hyp, target::flat_torus_target(id, genus2_letters(c.torus_factor_degree)));
    st.initial = interleave(harmonic::map_from_development(st.surface, hyp),
                            torus_factor_map(st.surface, id, c.torus_factor_degree));
  }
  if (!c.representation_file.empty()) st.target = target::with_representation_file(st.target, c.representation_file);
  if (st.target.face_word_defect(st.surface.mesh) > 1e-9)
    throw Error(ErrorCode::Config, "representation does not satisfy the surface relations", "build");

  st.base = conformal::structure_from_surface(st.surface);
  if (c.initial_perturbation > 0.0) {
    const harmonic::EnergyProblem p(st.surface.mesh, st.base, st.target);
    st.initial = harmonic::perturb(p, st.initial, c.initial_perturbation, c.seed);
  }
  return st;
}

conformal::BeltramiField beltrami(const ScenarioConfig& c, const surface::Surface& s) {
  if (c.mu == "zero") return conformal::BeltramiField::zero(s.mesh.num_faces());
  return conformal::BeltramiField::parse(c.mu, s);
}

// --- records ---------------------------------------------------------------------------------

namespace {

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json grid_json(const std::vector<GridRow>& g) {
  json a = json::array();
  for (const auto& n : g)
    a.push_back({{"i", n.i}, {"j", n.j}, {"u", {n.u_re, n.u_im}}, {"energy", n.energy},
                 {"iterations", n.iterations}, {"gradient_norm", n.gradient_norm}});
  return a;
}

json report_json(const harmonic::SolverReport& r) {
  return {{"iterations", r.iterations}, {"gradient_norm", r.gradient_norm}, {"converged", r.converged},
          {"method", r.method}, {"final_energy", r.energy_trace.empty() ? 0.0 : r.energy_trace.back()}};
}

}  // namespace

bool ResultRecord::passed() const {
  return !error && certificate && certificate->verdict == variation::Verdict::Pass;
}

json to_json(const variation::PshCertificate& c) {
  json conv = json::object();
  for (const auto& [k, l] : c.by_convention)
    conv[variation::to_string(k)] = {{"alpha", l.alpha}, {"rho", l.rho}, {"mm_residual", l.mm_residual},
                                     {"pairing", l.pairing}, {"pairing_residual", l.pairing_residual}};
  const auto& fv = c.first_variation;
  return {
      {"verdict", variation::to_string(c.verdict)},
      {"failures", c.failures},
      {"delta_E", c.delta_E},
      {"delta_E_2h", c.delta_E_2h},
      {"delta_E_extrapolated", c.delta_E_extrapolated},
      {"extrapolation_error", c.extrapolation_error},
      {"a", c.a},
      {"alpha", c.alpha},
      {"b", c.b},
      {"rho", c.rho},
      {"r1", c.r1},
      {"r2", c.r2},
      {"r3", c.r3},
      {"r4", c.r4},
      {"epsilon", c.epsilon},
      {"convention", variation::to_string(c.convention)},
      {"by_convention", conv},
      {"tangency_defect", c.tangency_defect},
      {"parallel_residual", c.parallel_residual},
      {"excluded_faces", c.excluded_faces},
      {"calibration_s", cjson(c.calibration_s)},
      {"hopf_norm", c.hopf_norm},
      {"first_variation",
       {{"dE_ds", fv.dEs},
        {"dE_dt", fv.dEt},
        {"pairing", cjson(fv.pairing)},
        {"c", fv.c ? json(*fv.c) : json(nullptr)},
        {"residual", fv.residual}}},
      {"second_variation_residual", c.second_variation_residual},
  };
}

namespace {

// Everything certified, without timings.
json certified_json(const ResultRecord& r) {
  json j = {{"name", r.name},
            {"config_hash", r.config_hash},
            {"version", r.version},
            {"config", r.config},
            {"stages", r.stages},
            {"centre_energy", r.centre_energy},
            {"centre_report", report_json(r.centre_report)},
            {"h", r.h},
            {"grid", grid_json(r.grid)},
            {"certificate", r.certificate ? to_json(*r.certificate) : json(nullptr)},
            {"diagnostics", nullptr},
            {"error", nullptr}};
  // Output paths and thread counts do not change any number.
  j["config"].erase("output");
  j["config"].erase("threads");
  if (r.diagnostics)
    j["diagnostics"] = {{"face_word_defect", r.diagnostics->face_word_defect},
                        {"cr_residual", r.diagnostics->cr_residual}};
  if (r.error) j["error"] = {{"message", *r.error}, {"stage", r.error_stage.value_or("")},
                             {"code", r.error_code.value_or("")}};
  return j;
}

}  // namespace

json to_json(const ResultRecord& r) {
  json j = certified_json(r);
  j["config"] = r.config;
  j["timings"] = r.timings;
  j["result_hash"] = result_hash(r);
  j["passed"] = r.passed();
  return j;
}

std::string result_hash(const ResultRecord& r) { return fnv1a(certified_json(r).dump()); }

void write_grid_csv(const std::vector<GridRow>& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path, "write");
  out << "i,j,u_re,u_im,energy,iterations,gradient_norm\n";
  char buf[256];
  for (const auto& n : grid) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%d,%.6g\n", n.i, n.j, n.u_re, n.u_im, n.energy,
                  n.iterations, n.gradient_norm);
    out << buf;
  }
}

void write_refinement_csv(const std::vector<RefinementRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path, "write");
  out << "level,h,centre_energy,delta_E,a,b,alpha,rho,r1,r2,hopf_norm,epsilon,verdict\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6g,%.6g,%.6g,%.6g,%s\n", r.level,
                  r.h, r.centre_energy, r.delta_E, r.a, r.b, r.alpha, r.rho, r.r1, r.r2, r.hopf_norm, r.epsilon,
                  r.verdict.c_str());
    out << buf;
  }
}

void write_sweep_csv(const std::vector<ResultRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path, "write");
  out << "direction,delta_E,epsilon,verdict\n";
  char buf[512];
  for (const auto& r : records) {
    const double de = r.certificate ? r.certificate->delta_E : std::nan("");
    const double ep = r.certificate ? r.certificate->epsilon : std::nan("");
    const char* v = r.error ? "ERROR" : r.passed() ? "PASS" : "FAIL";
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.6g,%s\n", r.name.c_str(), de, ep, v);
    out << buf;
  }
}

// --- pipeline --------------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<GridRow> grid_rows(const variation::StencilGrid& g) {
  std::vector<GridRow> rows;
  for (const auto& n : g.nodes)
    rows.push_back({n.i, n.j, n.i * g.h, n.j * g.h, n.energy, n.report.iterations, n.report.gradient_norm});
  return rows;
}

void record_error(ResultRecord& r, const Error& e, const std::string& stage) {
  r.error = e.what();
  r.error_stage = stage;
  r.error_code = to_string(e.code());
}

void write_record(const ResultRecord& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message(), "write");
  const std::string path = (fs::path(dir) / "record.json").string();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path, "write");
  out << to_json(r).dump(2) << "\n";
  write_grid_csv(r.grid, (fs::path(dir) / "egrid.csv").string());
}

struct Centre {
  Setup setup;
  harmonic::EquivariantMap map;
};

// Build and centre solve; fills the record's first two stages.
Centre build_and_solve(const ScenarioConfig& cfg, ResultRecord& r, std::string& stage) {
  stage = "build";
  auto t0 = Clock::now();
  Setup st = build(cfg);
  r.timings["build"] = seconds_since(t0);
  r.stages.push_back("build");

  stage = "solve";
  t0 = Clock::now();
  const harmonic::EnergyProblem p(st.surface.mesh, st.base, st.target);
  harmonic::SolveResult res;
  try {
    res = harmonic::solve_harmonic(p, st.initial, cfg.solver);
  } catch (const harmonic::NonConvergenceError& e) {
    r.centre_report = e.report();
    throw;
  }
  r.centre_report = res.report;
  r.centre_energy = p.energy(res.map);
  r.timings["solve"] = seconds_since(t0);
  r.stages.push_back("solve");
  return {std::move(st), std::move(res.map)};
}

// Stencil, ledger and diagnostics for one direction, starting from a solved centre.
void certify_direction(const ScenarioConfig& cfg, const Centre& c, const conformal::BeltramiField& mu, Depth depth,
                       ResultRecord& r, std::string& stage) {
  stage = "stencil";
  auto t0 = Clock::now();
  const conformal::DiskFamily fam(c.setup.base, mu, cfg.disk_radius);
  variation::StencilOptions opt;
  opt.h = cfg.h > 0.0 ? cfg.h : mu.max_abs() > 0.0 ? variation::default_step(mu) : 1e-2;
  opt.solver = cfg.solver;
  opt.threads = cfg.threads;
  r.h = opt.h;
  variation::StencilGrid grid;
  try {
    grid = variation::energy_stencil(fam, c.setup.surface.mesh, c.setup.target, c.map, opt);
  } catch (const variation::StencilError& e) {
    r.grid = grid_rows(e.partial());
    throw;
  }
  r.grid = grid_rows(grid);
  r.timings["stencil"] = seconds_since(t0);
  r.stages.push_back("stencil");
  if (depth == Depth::Stencil) return;

  stage = "ledger";
  t0 = Clock::now();
  r.certificate = variation::ledger({fam, c.setup.surface.mesh, c.setup.target, grid, cfg.solver.tol});
  r.timings["ledger"] = seconds_since(t0);
  r.stages.push_back("ledger");

  stage = "diagnostics";
  t0 = Clock::now();
  Diagnostics d;
  d.face_word_defect = c.setup.target.face_word_defect(c.setup.surface.mesh);
  d.cr_residual = conformal::verify_cr(fam, 0.0, opt.h);
  r.diagnostics = d;
  r.timings["diagnostics"] = seconds_since(t0);
  r.stages.push_back("diagnostics");
}

ResultRecord fresh_record(const ScenarioConfig& cfg) {
  ResultRecord r;
  r.name = cfg.name;
  r.config = to_json(cfg);
  r.config_hash = config_hash(cfg);
  return r;
}

// Writes the partial record (best effort) and rethrows with the stage attached.
[[noreturn]] void fail(ResultRecord& r, const Error& e, const std::string& stage, const std::string& dir) {
  record_error(r, e, stage);
  if (!dir.empty()) {
    try {
      write_record(r, dir);
    } catch (const Error&) {
    }
  }
  throw ScenarioError(e, stage, r);
}

}  // namespace

ResultRecord run_scenario(const ScenarioConfig& cfg, Depth depth) {
  ResultRecord r = fresh_record(cfg);
  std::string stage = "config";
  try {
    const Centre c = build_and_solve(cfg, r, stage);
    if (depth != Depth::Solve) {
      stage = "build";
      const conformal::BeltramiField mu = beltrami(cfg, c.setup.surface);
      certify_direction(cfg, c, mu, depth, r, stage);
    }
    if (!cfg.out_dir.empty()) {
      stage = "write";
      write_record(r, cfg.out_dir);
    }
  } catch (const Error& e) {
    fail(r, e, stage, stage == "write" ? std::string() : cfg.out_dir);
  }
  return r;
}

std::vector<Direction> parse_directions(const std::vector<std::string>& specs, const surface::Surface& s) {
  std::vector<Direction> out;
  for (const auto& spec : specs) {
    if (spec == "zero") out.push_back({spec, conformal::BeltramiField::zero(s.mesh.num_faces())});
    else out.push_back({spec, conformal::BeltramiField::parse(spec, s)});
  }
  return out;
}

std::vector<ResultRecord> sweep(const ScenarioConfig& cfg, const std::vector<Direction>& directions, int jobs) {
  ResultRecord base = fresh_record(cfg);
  std::string stage = "config";
  std::optional<Centre> centre;
  try {
    centre = build_and_solve(cfg, base, stage);
  } catch (const Error& e) {
    fail(base, e, stage, cfg.out_dir);
  }

  std::vector<ResultRecord> records(directions.size(), base);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < directions.size(); k = next++) {
      ResultRecord& r = records[k];
      r.name = directions[k].label;
      r.config["beltrami"]["mu"] = directions[k].label;
      std::string st;
      try {
        certify_direction(cfg, *centre, directions[k].mu, Depth::Certify, r, st);
      } catch (const Error& e) {
        record_error(r, e, st);
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(directions.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!cfg.out_dir.empty()) {
    for (size_t k = 0; k < records.size(); ++k) {
      char dir[32];
      std::snprintf(dir, sizeof dir, "dir%02zu", k);
      write_record(records[k], (fs::path(cfg.out_dir) / dir).string());
    }
    write_sweep_csv(records, (fs::path(cfg.out_dir) / "sweep.csv").string());
  }
  return records;
}

std::vector<RefinementRow> refinement_study(const ScenarioConfig& cfg, int levels) {
  std::vector<RefinementRow> rows;
  ScenarioConfig c = cfg;
  if (c.h == 0.0) {
    const Setup st = build(c);
    c.h = variation::default_step(beltrami(c, st.surface));
  }
  const std::string root = c.out_dir;
  for (int l = 0; l < levels; ++l) {
    if (!root.empty()) c.out_dir = (fs::path(root) / ("level" + std::to_string(c.mesh_level))).string();
    const ResultRecord r = run_scenario(c);
    const auto& cert = *r.certificate;
    rows.push_back({c.mesh_level, c.h, r.centre_energy, cert.delta_E, cert.a, cert.b, cert.alpha, cert.rho, cert.r1,
                    cert.r2, cert.hopf_norm, cert.epsilon, variation::to_string(cert.verdict)});
    c.mesh_level = c.mesh_builder == "torus" ? 2 * c.mesh_level : c.mesh_level + 1;
    c.h *= 0.5;
  }
  if (!root.empty()) write_refinement_csv(rows, (fs::path(root) / "refinement.csv").string());
  return rows;
}

}  // namespace pshlab::scenario
