#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "mosm/config.hpp"

namespace mosm {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;  // overrides noise.seed
};

/// Outcome of a pipeline. `summary` is also written to <out>/summary.json next to
/// <out>/resolved_config.json. Artifacts are written only when the run
/// completes; errors propagate as exceptions before anything is written.
struct RunResult {
  bool passed = false;
  nlohmann::json summary;
};

RunResult run_synthesize(const ExperimentConfig& config, const nlohmann::json& raw, const RunOptions& options);
RunResult run_invert(const ExperimentConfig& config, const nlohmann::json& raw,
                     const std::filesystem::path& data_path, const RunOptions& options);
RunResult run_fresnel(const ExperimentConfig& config, const nlohmann::json& raw,
                      const std::filesystem::path& dataset_path, const RunOptions& options);
RunResult run_validate(const ExperimentConfig& config, const nlohmann::json& raw, const RunOptions& options);

}  // namespace mosm
