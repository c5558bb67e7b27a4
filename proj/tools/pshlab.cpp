// pshlab: scenario-driven front end for the energy certificates.

#include "pshlab/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

using namespace pshlab;
using namespace pshlab::scenario;
using nlohmann::json;

namespace {

constexpr int kPass = 0, kCertificateFailure = 2, kSolverFailure = 3, kConfigError = 4;

struct Flags {
  std::string config, mu, out;
  std::optional<int> level;
  std::optional<double> h;
  int jobs = 1;
  bool json = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->set_help_flag("--help", "Print this help message and exit");  // --h is the stencil spacing
  sub->add_option("--config", f.config, "Scenario config (JSON)");
  sub->add_option("--mu", f.mu, "Beltrami field: file, random:seed:amp, const:re:im or bump:x:y:r:re:im");
  sub->add_option("--level", f.level, "Mesh level (torus grid size or genus-two subdivision level)");
  sub->add_option("--h", f.h, "Stencil spacing (0 selects 1e-2 / max|mu|)");
  sub->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "Output directory for records and CSV tables");
  sub->add_flag("--json", f.json, "Print the full record as JSON");
}

// PSHLAB_THREADS caps the worker count.
int worker_cap(int jobs) {
  if (const char* env = std::getenv("PSHLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) return std::min<int>(jobs, static_cast<int>(cap));
    throw Error(ErrorCode::Config, "PSHLAB_THREADS must be a positive integer", "config");
  }
  return jobs;
}

ScenarioConfig resolve(const Flags& f) {
  ScenarioConfig c = f.config.empty() ? ScenarioConfig{} : load_config(f.config);
  if (!f.mu.empty()) c.mu = f.mu;
  if (f.level) c.mesh_level = *f.level;
  if (f.h) c.h = *f.h;
  if (!f.out.empty()) c.out_dir = f.out;
  c.threads = worker_cap(f.jobs);
  validate_config(c);
  return c;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NonConvergence:
    case ErrorCode::NotHarmonic:
    case ErrorCode::DegenerateShape: return kSolverFailure;
    default: return kConfigError;
  }
}

void status_line(const std::string& status, const std::vector<std::string>& failures) {
  std::cout << json{{"status", status}, {"failures", failures}}.dump() << "\n";
}

void print_certificate(const variation::PshCertificate& c) {
  std::printf("  delta_E   %.10g  (2h %.10g, extrapolated %.10g)\n", c.delta_E, c.delta_E_2h, c.delta_E_extrapolated);
  std::printf("  a %.6g  alpha %.6g  b %.6g  rho %.6g\n", c.a, c.alpha, c.b, c.rho);
  std::printf("  r1 %.3g  r2 %.3g  r3 %.3g  r4 %.3g  epsilon %.3g\n", c.r1, c.r2, c.r3, c.r4, c.epsilon);
  std::printf("  W convention %s  tangency %.3g  parallel %.3g  hopf %.3g\n", variation::to_string(c.convention),
              c.tangency_defect, c.parallel_residual, c.hopf_norm);
  std::printf("  verdict %s\n", variation::to_string(c.verdict));
}

int finish_record(const ResultRecord& r, const Flags& f, bool certify) {
  if (f.json) std::cout << to_json(r).dump(2) << "\n";
  if (!certify) {
    status_line("PASS", {});
    return kPass;
  }
  const auto& c = *r.certificate;
  status_line(variation::to_string(c.verdict), c.failures);
  return c.verdict == variation::Verdict::Pass ? kPass : kCertificateFailure;
}

int cmd_run(const Flags& f, Depth depth, int refine) {
  const ScenarioConfig c = resolve(f);
  if (refine > 0) {
    const auto rows = refinement_study(c, refine);
    std::printf("%5s %8s %14s %14s %10s %10s %10s %8s\n", "level", "h", "E(0)", "delta_E", "r1", "r2", "hopf", "verdict");
    std::vector<std::string> failures;
    for (const auto& r : rows) {
      std::printf("%5d %8.4g %14.10g %14.8g %10.3g %10.3g %10.3g %8s\n", r.level, r.h, r.centre_energy, r.delta_E,
                  r.r1, r.r2, r.hopf_norm, r.verdict.c_str());
      if (r.verdict != "PASS") failures.push_back("level " + std::to_string(r.level));
    }
    status_line(failures.empty() ? "PASS" : "FAIL", failures);
    return failures.empty() ? kPass : kCertificateFailure;
  }
  const ResultRecord r = run_scenario(c, depth);
  std::printf("%s  config %s  result %s\n", r.name.c_str(), r.config_hash.c_str(), result_hash(r).c_str());
  std::printf("  E(0) %.12g  (%d iterations, gradient %.3g)\n", r.centre_energy, r.centre_report.iterations,
              r.centre_report.gradient_norm);
  if (depth == Depth::Stencil)
    for (const auto& n : r.grid)
      std::printf("  node (%+d, %+d)  E %.15g  iterations %d\n", n.i, n.j, n.energy, n.iterations);
  if (depth == Depth::Certify) print_certificate(*r.certificate);
  return finish_record(r, f, depth == Depth::Certify);
}

int cmd_sweep(const Flags& f, std::vector<std::string> dirs, int count, double amplitude) {
  ScenarioConfig c = resolve(f);
  const int jobs = c.threads;
  c.threads = 1;
  for (int k = 1; k <= count; ++k) dirs.push_back("random:" + std::to_string(k) + ":" + std::to_string(amplitude));
  const auto directions = parse_directions(dirs, build(c).surface);
  const auto records = sweep(c, directions, jobs);
  std::printf("%-28s %16s %12s %8s\n", "direction", "delta_E", "epsilon", "verdict");
  std::vector<std::string> failures;
  bool solver_failure = false;
  for (const auto& r : records) {
    if (r.error) {
      std::printf("%-28s %16s %12s %8s  %s\n", r.name.c_str(), "-", "-", "ERROR", r.error->c_str());
      failures.push_back(r.name + ": " + *r.error);
      solver_failure = true;
      continue;
    }
    const auto& cert = *r.certificate;
    std::printf("%-28s %16.10g %12.3g %8s\n", r.name.c_str(), cert.delta_E, cert.epsilon,
                variation::to_string(cert.verdict));
    for (const auto& x : cert.failures) failures.push_back(r.name + ": " + x);
  }
  if (f.json) {
    json a = json::array();
    for (const auto& r : records) a.push_back(to_json(r));
    std::cout << a.dump(2) << "\n";
  }
  status_line(failures.empty() ? "PASS" : solver_failure ? "ERROR" : "FAIL", failures);
  if (solver_failure) return kSolverFailure;
  return failures.empty() ? kPass : kCertificateFailure;
}

int cmd_validate_mesh(const Flags& f, const std::string& mesh_file) {
  ScenarioConfig c = resolve(f);
  if (!mesh_file.empty()) {
    c.mesh_builder = "file";
    c.mesh_file = mesh_file;
  }
  validate_config(c);
  surface::Surface s;
  if (c.mesh_builder == "torus") s = surface::build_torus(c.mesh_level);
  else if (c.mesh_builder == "genus2") s = surface::build_genus2_octagon(c.mesh_level);
  else s = surface::load_surface(c.mesh_file);
  const auto report = s.mesh.validate();
  std::printf("vertices %d  faces %d  genus %d\n", s.mesh.num_vertices(), s.mesh.num_faces(), s.mesh.genus());
  for (const auto& p : report.problems) std::printf("  problem: %s\n", p.c_str());
  status_line(report.ok() ? "PASS" : "FAIL", report.problems);
  return report.ok() ? kPass : kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pshlab: harmonic-map energy certificates over Teichmueller disks"};
  app.require_subcommand(1);
  Flags f;
  int refine = 0, count = 5;
  double amplitude = 0.3;
  std::vector<std::string> dirs;
  std::string mesh_file;

  auto* solve = app.add_subcommand("solve", "Solve the harmonic map at the base structure");
  auto* stencil = app.add_subcommand("stencil", "Solve the 13-node energy stencil");
  auto* certify = app.add_subcommand("certify", "Run the full pipeline and print the certificate");
  auto* sweep_cmd = app.add_subcommand("sweep", "Certify several Beltrami directions sharing one centre solve");
  auto* validate = app.add_subcommand("validate-mesh", "Check mesh combinatorics and labels");
  auto* print = app.add_subcommand("print-config", "Print the effective config with every default");
  for (auto* s : {solve, stencil, certify, sweep_cmd, validate, print}) add_common(s, f);
  certify->add_option("--refine", refine, "Run a refinement study over this many levels");
  sweep_cmd->add_option("--dir", dirs, "Direction spec (repeatable); 'zero' is allowed");
  sweep_cmd->add_option("--count", count, "Random directions added to the --dir list");
  sweep_cmd->add_option("--amplitude", amplitude, "Amplitude of the random directions");
  validate->add_option("--mesh", mesh_file, "Mesh file (JSON)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*print) {
      std::cout << to_json(resolve(f)).dump(2) << "\n";
      return kPass;
    }
    if (*solve) return cmd_run(f, Depth::Solve, 0);
    if (*stencil) return cmd_run(f, Depth::Stencil, 0);
    if (*certify) return cmd_run(f, Depth::Certify, refine);
    if (*sweep_cmd) return cmd_sweep(f, dirs, count, amplitude);
    return cmd_validate_mesh(f, mesh_file);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s] in stage %s: %s\n", to_string(e.code()), e.stage().c_str(), e.what());
    status_line("ERROR", {std::string(to_string(e.code())) + ": " + e.what()});
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    status_line("ERROR", {e.what()});
    return kConfigError;
  }
}
