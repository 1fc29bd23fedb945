#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mosm/config.hpp"
#include "mosm/errors.hpp"
#include "mosm/far_field_data.hpp"
#include "mosm/pipelines.hpp"

using namespace mosm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = MOSM_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mosm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_synthesize(bool vacuum) {
  json region = {{"shape", {{"type", "sphere"}, {"center", {0.0, 0.0, 0.0}}, {"radius", 0.3}}},
                 {"eps_r", {{"diag", {{1.3, 0.2}, {1.2, 0.3}, {1.4, 0.1}}}}},
                 {"inv_mu_r", {{"diag", {{0.9, -0.1}, {0.8, -0.2}, {0.9, -0.05}}}}}};
  if (vacuum) region = {{"shape", region["shape"]}};
  return {{"mode", "synthesize"},
          {"k", 4.0},
          {"material", {{"grid", {{"lower", {-0.4, -0.4, -0.4}}, {"side", 0.8}, {"n", 8}}}, {"regions", {region}}}},
          {"directions", {{"incidence", 6}, {"observation", 6}}},
          {"noise", {{"delta", 0.3}, {"seed", 5}}}};
}

RunOptions options(const fs::path& out) {
  RunOptions o;
  o.out_dir = out;
  o.workers = 1;
  return o;
}

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json" || entry.path().filename().string().find("column_map") != std::string::npos)
      continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(load_json_file(entry.path()), kConfigs));
  }
  const ExperimentConfig c = parse_config(load_json_file(kConfigs / "lshape_synthesize.json"), kConfigs);
  CHECK(c.mode == RunMode::Synthesize);
  CHECK(c.wavenumber() == 12.0);
  CHECK(c.incidence.n == 30);
  CHECK(c.observation.n == 30);
  CHECK((c.probe.p - Vec3(1.0, -1.0, 1.0).normalized()).norm() <= 1e-15);
  const MaterialModel m = c.material->build();
  CHECK(m.support().size() == 4608);
  CHECK(m.tensors()[0].zeta == -m.tensors()[0].xi);
}

TEST_CASE("config consistency errors") {
  json j = small_synthesize(false);
  j.erase("material");
  CHECK_THROWS_AS(parse_config(j, "."), std::invalid_argument);
  j = small_synthesize(false);
  j["frequency_ghz"] = 4.0;
  CHECK_THROWS_AS(parse_config(j, "."), std::invalid_argument);
  j = small_synthesize(false);
  j["material"]["regions"][0]["shape"]["type"] = "torus";
  CHECK_THROWS_WITH_AS(parse_config(j, "."), doctest::Contains("torus"), std::invalid_argument);
  j = small_synthesize(false);
  j["noise"]["delta"] = -1.0;
  CHECK_THROWS_AS(parse_config(j, "."), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(json{{"mode", "invert"}}, "."), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(json{{"mode", "paint"}}, "."), std::invalid_argument);
}

TEST_CASE("synthesize is deterministic and vacuum data are zero") {
  const json raw = small_synthesize(false);
  const ExperimentConfig c = parse_config(raw, ".");
  const fs::path a = scratch("syn_a"), b = scratch("syn_b");
  CHECK(run_synthesize(c, raw, options(a)).passed);
  CHECK(run_synthesize(c, raw, options(b)).passed);
  CHECK(slurp(a / "farfield.dat") == slurp(b / "farfield.dat"));
  CHECK(slurp(a / "farfield_noisy.dat") == slurp(b / "farfield_noisy.dat"));
  CHECK(fs::exists(a / "summary.json"));
  CHECK(fs::exists(a / "resolved_config.json"));
  std::ifstream in(a / "farfield.dat");
  CHECK(read_far_field_data(in).entries.size() == 36);

  const json vac = small_synthesize(true);
  const fs::path v = scratch("syn_vac");
  run_synthesize(parse_config(vac, "."), vac, options(v));
  std::ifstream vin(v / "farfield.dat");
  CHECK(read_far_field_data(vin).norm() == 0.0);
}

TEST_CASE("inverting zero data is flagged") {
  const json vac = small_synthesize(true);
  const fs::path v = scratch("inv_vac_data");
  run_synthesize(parse_config(vac, "."), vac, options(v));
  const json inv = {{"mode", "invert"},
                    {"k", 4.0},
                    {"sampling", {{"lower", {-1, -1, -1}}, {"upper", {1, 1, 1}}, {"n", 5}}}};
  const RunResult r = run_invert(parse_config(inv, "."), inv, v / "farfield.dat", options(scratch("inv_vac")));
  CHECK_FALSE(r.passed);
  CHECK(r.summary["imaging"]["all_zero"] == true);
}

TEST_CASE("a wrong column map is refused before any output is written") {
  const fs::path data = scratch("fresnel_bad_data");
  fs::create_directories(data);
  {
    std::ofstream f(data / "table.txt");
    f << "# three columns only\n4 0.1 0.2\n";
    std::ofstream m(data / "map.json");
    m << R"({"receiver_radius_m": 1.796})";
  }
  const json cfg = {{"mode", "fresnel"},
                    {"fresnel", {{"column_map", (data / "map.json").string()}, {"frequency_ghz", 4.0}}},
                    {"sampling", {{"lower", {-1, -1, -1}}, {"upper", {1, 1, 1}}, {"n", 5}}}};
  const fs::path out = scratch("fresnel_bad_out");
  CHECK_THROWS_AS(run_fresnel(parse_config(cfg, "."), cfg, data / "table.txt", options(out)), StructuralError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("validate reports an inflated coupling as an assumption failure") {
  json raw = load_json_file(kConfigs / "lshape_validate_inflated_xi.json");
  raw["material"]["grid"]["n"] = 8;
  raw["material"]["grid"].erase("side");
  raw["material"]["grid"]["h"] = 1.3 / 8;
  raw["validate"]["checks"] = {"assumption"};
  const RunResult r = run_validate(parse_config(raw, kConfigs), raw, options(scratch("val_xi")));
  CHECK_FALSE(r.passed);
  CHECK(r.summary["checks"]["assumption"] == false);
}

TEST_CASE("validate: zero-noise stability row has zero gap") {
  json raw = small_synthesize(false);
  raw["mode"] = "validate";
  raw["validate"] = {{"checks", {"stability", "factorization"}}, {"deltas", {0.0, 0.3}}, {"seeds", {1}}};
  raw["sampling"] = {{"lower", {-1, -1, -1}}, {"upper", {1, 1, 1}}, {"n", 4}};
  const RunResult r = run_validate(parse_config(raw, "."), raw, options(scratch("val_stab")));
  CHECK(r.passed);
  const json& rows = r.summary["stability"]["rows"];
  CHECK(rows[0]["delta"] == 0.0);
  CHECK(rows[0]["max_gap"] == 0.0);
}
