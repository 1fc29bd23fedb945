#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mosm/em_core.hpp"
#include "mosm/forward_solver.hpp"
#include "mosm/indicator_field.hpp"
#include "mosm/material.hpp"

namespace mosm {

enum class RunMode { Synthesize, Invert, Fresnel, Validate };

struct DirectionSpec {
  enum class Kind { Fibonacci, GreatCircle };
  Kind kind = Kind::Fibonacci;
  int n = 30;
  Vec3 axis = Vec3::UnitZ();
  std::shared_ptr<const UnitDirectionSet> build() const;
};

struct SliceSpec {
  int axis = 1;
  double offset = 0.0;
};

struct MaterialSpec {
  VolumeGrid grid;
  std::vector<ShapeRegion> regions;
  MaterialModel build() const { return MaterialModel::from_shapes(grid, regions); }
  /// True when y lies in any region with non-vacuum material.
  bool contains(const Vec3& y) const;
};

struct FresnelSpec {
  std::filesystem::path column_map;  // JSON sidecar
  double frequency_ghz = 4.0;
};

/// Fresnel-geometry fixture generated by `synthesize` when present.
struct FixtureSpec {
  int sources = 81;
  int receivers = 36;
};

struct ExpectedPoint {
  Vec3 point = Vec3::Zero();
  double tolerance = 0.0;
};

struct ValidateSpec {
  std::vector<std::string> checks;  // empty: all
  double born_tau = 0.01;
  double born_radius = 0.5;
  double born_k = 3.0;
  int born_grid = 32;
  int reciprocity_pairs = 4;
  std::vector<double> deltas{0.3, 0.5};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

/// Parsed experiment configuration (JSON). See README for the schema.
struct ExperimentConfig {
  RunMode mode = RunMode::Invert;
  std::optional<double> k;
  std::optional<double> frequency_ghz;
  std::optional<MaterialSpec> material;
  DirectionSpec incidence;
  DirectionSpec observation;
  ForwardOptions solver;
  double noise_delta = 0.0;
  std::uint64_t seed = 1;
  WaveContext probe;
  std::optional<SamplingGrid> sampling;
  double isovalue = 0.5;
  std::vector<SliceSpec> slices;
  std::optional<FresnelSpec> fresnel;
  std::optional<FixtureSpec> fixture;
  std::optional<ExpectedPoint> expected_argmax;
  std::filesystem::path reference_indicator;  // optional CSV of a previous run
  ValidateSpec validate;

  /// Wavenumber in computational units: k, or derived from frequency_ghz.
  double wavenumber() const;
};

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

/// Parses and checks mutual consistency; relative paths resolve against `base_dir`.
/// Throws std::invalid_argument with the offending key.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace mosm
