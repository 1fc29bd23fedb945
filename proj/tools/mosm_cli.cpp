// Command-line front end: synthesize | invert | fresnel | validate.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mosm/config.hpp"
#include "mosm/errors.hpp"
#include "mosm/parallel.hpp"
#include "mosm/pipelines.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Sampling-method imaging of bianisotropic scatterers from far-field data"};
  app.require_subcommand(1);
  app.fallthrough();
  mosm::RunOptions opt;
  std::uint64_t seed = 0;
  std::string out = "out";
  app.add_option("--workers", opt.workers, "Worker threads (0 = logical cores)");
  auto* seed_opt = app.add_option("--seed", seed, "Noise seed (overrides noise.seed)");
  app.add_option("--out", out, "Output directory");

  std::string config_path, data_path, dataset_path;
  auto* syn = app.add_subcommand("synthesize", "Generate synthetic far-field data (or a Fresnel-geometry fixture)");
  syn->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* inv = app.add_subcommand("invert", "Image a far-field data file");
  inv->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  inv->add_option("--data", data_path, "Far-field data file")->required()->check(CLI::ExistingFile);
  auto* fre = app.add_subcommand("fresnel", "Ingest and image a measurement table");
  fre->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  fre->add_option("--dataset", dataset_path, "Measurement table")->required()->check(CLI::ExistingFile);
  auto* val = app.add_subcommand("validate", "Run the property checks");
  val->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) opt.seed = seed;
  opt.out_dir = out;
  if (opt.workers > 0) mosm::set_default_workers(opt.workers);

  try {
    const nlohmann::json raw = mosm::load_json_file(config_path);
    const mosm::ExperimentConfig config = mosm::parse_config(raw, fs::path(config_path).parent_path());
    const char* expected = syn->parsed() ? "synthesize" : inv->parsed() ? "invert" : fre->parsed() ? "fresnel" : "validate";
    if (mosm::to_string(config.mode) != expected)
      throw std::invalid_argument(std::string("config mode '") + mosm::to_string(config.mode) +
                                  "' does not match subcommand '" + expected + "'");
    mosm::RunResult result;
    if (syn->parsed()) result = mosm::run_synthesize(config, raw, opt);
    else if (inv->parsed()) result = mosm::run_invert(config, raw, data_path, opt);
    else if (fre->parsed()) result = mosm::run_fresnel(config, raw, dataset_path, opt);
    else result = mosm::run_validate(config, raw, opt);
    std::cout << result.summary.dump(2) << '\n';
    std::cout << (result.passed ? "all checks passed" : "some checks FAILED") << '\n';
    return result.passed ? 0 : 1;
  } catch (const mosm::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
  } catch (const mosm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const mosm::StructuralError& e) {
    std::cerr << "structural error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
