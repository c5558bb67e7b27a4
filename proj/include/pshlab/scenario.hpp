#pragma once

// Scenario plumbing: configuration, the build -> solve -> stencil -> ledger ->
// diagnostics pipeline, result records and flat-file output.

#include "pshlab/variation.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pshlab::scenario {

inline constexpr const char* kVersion = "0.1.0";

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;  // seeds the initial perturbation

  std::string mesh_builder = "torus";  // torus | genus2 | file
  int mesh_level = 8;                  // torus: grid size; genus2: subdivision level
  std::string mesh_file;

  std::string target = "auto";  // auto | flat_torus | octagon | product
  Eigen::Matrix2d lattice = Eigen::Matrix2d::Identity();
  std::string representation_file;

  Eigen::Matrix2i degree = Eigen::Matrix2i::Identity();               // flat torus class (rows: a, b)
  Eigen::Matrix2i torus_factor_degree = Eigen::Matrix2i::Identity();  // flat factor of a product

  std::string mu = "random:1:0.3";
  double disk_radius = 0.9;

  double h = 0.0;  // 0 selects 1e-2 / max |mu|

  harmonic::SolverOptions solver;
  double initial_perturbation = 0.0;

  std::string out_dir;  // empty: nothing is written
  int threads = 1;
};

nlohmann::json to_json(const ScenarioConfig& c);
/// Strict: unknown keys and wrong types are Config errors; missing keys keep defaults.
ScenarioConfig config_from_json(const nlohmann::json& j);
/// Relative file paths are resolved against the config file's directory.
ScenarioConfig load_config(const std::string& path);
/// Referenced files exist, radius in (0, 1), solver settings sane.
void validate_config(const ScenarioConfig& c);
/// FNV-1a of the canonical config, ignoring output paths and thread count.
std::string config_hash(const ScenarioConfig& c);

/// Mesh, target, base structure and initial map built from a config.
struct Setup {
  surface::Surface surface;
  target::Target target;
  conformal::ConformalStructure base;
  harmonic::EquivariantMap initial;
};
Setup build(const ScenarioConfig& c);
conformal::BeltramiField beltrami(const ScenarioConfig& c, const surface::Surface& s);

struct GridRow {
  int i = 0, j = 0;
  double u_re = 0.0, u_im = 0.0;
  double energy = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct Diagnostics {
  double face_word_defect = 0.0;
  double cr_residual = 0.0;  // verify_cr at the base point with spacing h
};

enum class Depth { Solve, Stencil, Certify };

struct ResultRecord {
  std::string name, config_hash, version = kVersion;
  nlohmann::json config;
  std::vector<std::string> stages;  // completed stages, in order
  std::map<std::string, double> timings;  // seconds per stage
  double centre_energy = 0.0;
  harmonic::SolverReport centre_report;
  double h = 0.0;
  std::vector<GridRow> grid;
  std::optional<variation::PshCertificate> certificate;
  std::optional<Diagnostics> diagnostics;
  std::optional<std::string> error, error_stage, error_code;

  bool passed() const;
};

nlohmann::json to_json(const variation::PshCertificate& c);
/// Full record; timings are included.
nlohmann::json to_json(const ResultRecord& r);
/// FNV-1a of every certified number (config hash, grid, certificate); no timings.
std::string result_hash(const ResultRecord& r);

/// Carries the stage name and the partial record.
class ScenarioError : public Error {
public:
  ScenarioError(const Error& e, std::string stage, ResultRecord partial)
      : Error(e.code(), e.what(), std::move(stage)), partial_(std::move(partial)) {}
  const ResultRecord& partial() const { return partial_; }

private:
  ResultRecord partial_;
};

/// Runs the pipeline to `depth`; writes record.json and egrid.csv when out_dir is set
/// (also on failure, with the stages completed so far).
ResultRecord run_scenario(const ScenarioConfig& cfg, Depth depth = Depth::Certify);

struct Direction {
  std::string label;
  conformal::BeltramiField mu;
};

/// One certificate per direction, sharing the setup and the centre solve; up to
/// `jobs` directions run at once. Failed directions carry an error instead of
/// a certificate. Writes sweep.csv and one record per direction when out_dir is set.
std::vector<ResultRecord> sweep(const ScenarioConfig& cfg, const std::vector<Direction>& directions, int jobs = 1);

/// Directions from "random:<seed>:<amp>" specs and the like; "zero" gives mu = 0.
std::vector<Direction> parse_directions(const std::vector<std::string>& specs, const surface::Surface& s);

struct RefinementRow {
  int level = 0;
  double h = 0.0;
  double centre_energy = 0.0, delta_E = 0.0, a = 0.0, b = 0.0, alpha = 0.0, rho = 0.0;
  double r1 = 0.0, r2 = 0.0, hopf_norm = 0.0, epsilon = 0.0;
  std::string verdict;
};

/// `levels` runs starting at cfg.mesh_level, refining the mesh and halving h each step.
std::vector<RefinementRow> refinement_study(const ScenarioConfig& cfg, int levels);

void write_grid_csv(const std::vector<GridRow>& grid, const std::string& path);
void write_refinement_csv(const std::vector<RefinementRow>& rows, const std::string& path);
void write_sweep_csv(const std::vector<ResultRecord>& records, const std::string& path);

}  // namespace pshlab::scenario
