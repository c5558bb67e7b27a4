#include "pshlab/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace pshlab;
using namespace pshlab::scenario;
namespace fs = std::filesystem;
using cplx = std::complex<double>;

namespace {

const std::string kConfigs = std::string(PSHLAB_SOURCE_DIR) + "/configs/";

std::string temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pshlab_test_" + name);
  fs::remove_all(p);
  return p.string();
}

ScenarioConfig small_torus() {
  ScenarioConfig c;
  c.name = "small_torus";
  c.mesh_level = 6;
  c.h = 0.05;
  return c;
}

}  // namespace

TEST_CASE("config round trip and strict parsing") {
  ScenarioConfig c = small_torus();
  c.degree << 2, 0, 1, 1;
  c.lattice << 1.0, 0.3, 0.0, 0.9;
  const ScenarioConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));

  ScenarioConfig moved = c;
  moved.out_dir = "/somewhere";
  moved.threads = 8;
  CHECK(config_hash(moved) == config_hash(c));
  moved.h = 0.04;
  CHECK(config_hash(moved) != config_hash(c));

  CHECK(to_json(config_from_json(nlohmann::json::object())) == to_json(ScenarioConfig{}));
  CHECK_THROWS_AS(config_from_json({{"bogus", 1}}), Error);
  CHECK_THROWS_AS(config_from_json({{"mesh", {{"level", "eight"}}}}), Error);
  CHECK_THROWS_AS(config_from_json({{"mesh", {{"level", 8.5}}}}), Error);  // real where an integer is expected
  CHECK(config_from_json({{"stencil", {{"h", 1}}}}).h == 1.0);
  CHECK_THROWS_AS(config_from_json({{"class", {{"degree", {{1, 0}}}}}}), Error);
  try {
    config_from_json({{"solver", {{"tolerance", 1e-9}}}});
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("solver.tolerance") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  ScenarioConfig c = small_torus();
  CHECK_NOTHROW(validate_config(c));
  c.disk_radius = 1.0;
  CHECK_THROWS_AS(validate_config(c), Error);
  c = small_torus();
  c.mesh_builder = "file";
  c.mesh_file = "/nonexistent/mesh.json";
  CHECK_THROWS_AS(validate_config(c), Error);
  c = small_torus();
  c.mu = "/nonexistent/mu.txt";
  CHECK_THROWS_AS(validate_config(c), Error);
  c = small_torus();
  c.target = "octagon";
  CHECK_THROWS_AS(build(c), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("load_config resolves paths against the config directory") {
  const std::string dir = temp_dir("paths");
  fs::create_directories(dir);
  const surface::Surface s = surface::build_torus(4);
  conformal::BeltramiField::constant(s, {0.1, 0.0}).save(dir + "/mu.txt");
  std::ofstream(dir + "/cfg.json") << R"({"mesh": {"level": 4}, "beltrami": {"mu": "mu.txt"}, "stencil": {"h": 0.05}})";
  const ScenarioConfig c = load_config(dir + "/cfg.json");
  CHECK(fs::path(c.mu).is_absolute());
  CHECK_NOTHROW(validate_config(c));
  CHECK(beltrami(c, s).mu.size() == static_cast<size_t>(s.mesh.num_faces()));
}

TEST_CASE("bundled torus_identity config") {
  const ScenarioConfig c = load_config(kConfigs + "torus_identity.json");
  const ResultRecord r = run_scenario(c);
  REQUIRE(r.certificate);
  CHECK(r.certificate->rho == 0.0);
  CHECK(r.certificate->delta_E >= -r.certificate->epsilon);
  CHECK(r.passed());
  CHECK(r.stages == std::vector<std::string>{"build", "solve", "stencil", "ledger", "diagnostics"});
  CHECK(r.grid.size() == 13);
  CHECK(r.centre_energy == doctest::Approx(1.0).epsilon(1e-12));

  ScenarioConfig threaded = c;
  threaded.threads = 3;
  const ResultRecord again = run_scenario(threaded);
  CHECK(result_hash(again) == result_hash(r));
  CHECK(to_json(*again.certificate) == to_json(*r.certificate));
}

TEST_CASE("bundled genus2_identity config: Gauss-Bonnet at the centre") {
  const ScenarioConfig c = load_config(kConfigs + "genus2_identity.json");
  CHECK(c.mesh_level == 2);
  const ResultRecord r = run_scenario(c, Depth::Solve);
  // Identity map of a hyperbolic surface: E = area = 2 pi |chi| = 4 pi.
  CHECK(std::abs(r.centre_energy / (4.0 * std::numbers::pi) - 1.0) < 0.01);
  CHECK_FALSE(r.certificate);
  CHECK(r.stages == std::vector<std::string>{"build", "solve"});
}

TEST_CASE("product targets add the factor energies") {
  ScenarioConfig c = small_torus();
  c.target = "product";
  c.torus_factor_degree << 2, 0, 0, 1;
  const Setup st = build(c);
  CHECK(st.target.num_factors() == 2);
  const ResultRecord r = run_scenario(c, Depth::Solve);
  Eigen::Matrix2i d;
  d << 2, 0, 0, 1;
  const double oracle = target::torus_harmonic_oracle(cplx(0.0, 1.0), Eigen::Matrix2d::Identity(), Eigen::Matrix2i::Identity()).energy +
                        target::torus_harmonic_oracle(cplx(0.0, 1.0), Eigen::Matrix2d::Identity(), d).energy;
  CHECK(r.centre_energy == doctest::Approx(oracle).epsilon(1e-10));

  ScenarioConfig g;
  g.mesh_builder = "genus2";
  g.mesh_level = 0;
  g.target = "product";
  const Setup gs = build(g);
  CHECK(gs.target.num_factors() == 2);
  CHECK(gs.target.face_word_defect(gs.surface.mesh) < 1e-12);
}

TEST_CASE("sweep shares the centre and reports every direction") {
  ScenarioConfig c = small_torus();
  c.out_dir = temp_dir("sweep");
  const Setup st = build(c);
  std::vector<std::string> specs{"zero"};
  for (int k = 1; k <= 5; ++k) specs.push_back("random:" + std::to_string(k) + ":0.3");
  const auto dirs = parse_directions(specs, st.surface);
  const auto records = sweep(c, dirs, 3);
  REQUIRE(records.size() == specs.size());
  for (const auto& r : records) {
    CHECK_FALSE(r.error);
    CHECK(r.passed());
  }
  CHECK(records[0].certificate->delta_E == 0.0);
  CHECK(records[0].name == "zero");

  std::ifstream csv(c.out_dir + "/sweep.csv");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 1 + static_cast<int>(specs.size()));

  // Concurrency does not change any number.
  c.out_dir.clear();
  const auto serial = sweep(c, dirs, 1);
  for (size_t k = 0; k < records.size(); ++k) CHECK(result_hash(serial[k]) == result_hash(records[k]));
}

TEST_CASE("stage errors carry the stage and the partial record") {
  ScenarioConfig c = small_torus();
  c.initial_perturbation = 0.05;
  c.solver.max_iters = 1;
  c.out_dir = temp_dir("solve_failure");
  try {
    run_scenario(c);
    FAIL("expected a solve failure");
  } catch (const ScenarioError& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(e.stage() == "solve");
    CHECK(e.partial().stages == std::vector<std::string>{"build"});
    CHECK(e.partial().centre_report.iterations == 1);
  }
  std::ifstream rec(c.out_dir + "/record.json");
  REQUIRE(rec);
  const auto j = nlohmann::json::parse(rec);
  CHECK(j["error"]["stage"] == "solve");
  CHECK(j["passed"] == false);

  // The exact affine centre needs no iterations, so only the stencil nodes fail.
  c.initial_perturbation = 0.0;
  c.out_dir = temp_dir("stencil_failure");
  try {
    run_scenario(c);
    FAIL("expected a stencil failure");
  } catch (const ScenarioError& e) {
    CHECK(e.stage() == "stencil");
    CHECK(e.partial().grid.size() == 1);
  }
  CHECK(fs::exists(c.out_dir + "/egrid.csv"));

  ScenarioConfig far = small_torus();
  far.h = 0.5;
  try {
    run_scenario(far);
    FAIL("expected a family error");
  } catch (const ScenarioError& e) {
    CHECK(e.code() == ErrorCode::OutsideFamily);
    CHECK(e.stage() == "stencil");
  }
}

TEST_CASE("refinement study halves h and refines the mesh") {
  ScenarioConfig c = small_torus();
  c.mesh_level = 4;
  c.mu = "const:0.1:0.05";
  c.out_dir = temp_dir("refine");
  const auto rows = refinement_study(c, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].level == 4);
  CHECK(rows[1].level == 8);
  CHECK(rows[1].h == doctest::Approx(0.5 * rows[0].h));
  // Constant mu on the identity class: Delta E = 8 |mu|^2 at every level.
  for (const auto& r : rows) CHECK(r.delta_E == doctest::Approx(8.0 * 0.0125).epsilon(1e-4));
  CHECK(fs::exists(c.out_dir + "/refinement.csv"));
}
