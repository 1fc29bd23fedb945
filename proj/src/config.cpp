#include "mosm/config.hpp"

#include <fstream>
#include <stdexcept>

#include "mosm/fresnel.hpp"

namespace mosm {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: " + key + ": " + what);
}

Vec3 vec3(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) bad(key, "expected an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

cdouble complex_value(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  bad(key, "expected a number or [re, im]");
}

// Scalar (isotropic), {"diag": [a, b, c]} or {"full": 3×3}; entries number or [re, im].
CMat3 tensor(const json& j, const std::string& key) {
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()))
    return complex_value(j, key) * CMat3::Identity();
  if (j.is_object() && j.contains("diag")) {
    const json& d = j.at("diag");
    if (!d.is_array() || d.size() != 3) bad(key, "diag needs 3 entries");
    CMat3 m = CMat3::Zero();
    for (int i = 0; i < 3; ++i) m(i, i) = complex_value(d[static_cast<std::size_t>(i)], key);
    return m;
  }
  if (j.is_object() && j.contains("full")) {
    const json& f = j.at("full");
    if (!f.is_array() || f.size() != 3) bad(key, "full needs 3 rows");
    CMat3 m;
    for (int r = 0; r < 3; ++r) {
      const json& row = f[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != 3) bad(key, "full needs 3 columns per row");
      for (int c = 0; c < 3; ++c) m(r, c) = complex_value(row[static_cast<std::size_t>(c)], key);
    }
    return m;
  }
  bad(key, "expected scalar, {\"diag\": ...} or {\"full\": ...}");
}

Shape shape(const json& j, const std::string& key) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "sphere") return Shape::sphere(vec3(j.at("center"), key + ".center"), j.at("radius").get<double>());
  if (type == "box") return Shape::box(vec3(j.at("lower"), key + ".lower"), vec3(j.at("upper"), key + ".upper"));
  if (type == "cube") {
    const Vec3 c = vec3(j.at("center"), key + ".center");
    const double half = 0.5 * j.at("side").get<double>();
    return Shape::box(c - Vec3::Constant(half), c + Vec3::Constant(half));
  }
  if (type == "lshape")
    return Shape::lshape(vec3(j.at("corner"), key + ".corner"), vec3(j.at("extents"), key + ".extents"),
                         j.at("thickness").get<double>());
  if (type == "union") {
    std::vector<Shape> parts;
    for (std::size_t i = 0; i < j.at("parts").size(); ++i)
      parts.push_back(shape(j.at("parts")[i], key + ".parts[" + std::to_string(i) + "]"));
    return Shape::union_of(std::move(parts));
  }
  bad(key + ".type", "unknown shape '" + type + "'");
}

VoxelMaterial voxel_material(const json& j, const std::string& key) {
  VoxelMaterial m;
  if (j.contains("eps_r")) m.eps_r = tensor(j.at("eps_r"), key + ".eps_r");
  if (j.contains("inv_mu_r")) m.inv_mu_r = tensor(j.at("inv_mu_r"), key + ".inv_mu_r");
  if (j.contains("xi")) m.xi = tensor(j.at("xi"), key + ".xi");
  if (j.contains("zeta")) {
    const json& z = j.at("zeta");
    if (z.is_string()) {
      if (z.get<std::string>() != "minus_xi") bad(key + ".zeta", "only the string \"minus_xi\" is recognized");
      m.zeta = -m.xi;
    } else {
      m.zeta = tensor(z, key + ".zeta");
    }
  }
  return m;
}

DirectionSpec direction_spec(const json& j, const std::string& key) {
  DirectionSpec d;
  if (j.is_number_integer()) {
    d.n = j.get<int>();
    return d;
  }
  const std::string type = j.value("type", "fibonacci");
  if (type == "fibonacci") d.kind = DirectionSpec::Kind::Fibonacci;
  else if (type == "great_circle") d.kind = DirectionSpec::Kind::GreatCircle;
  else bad(key + ".type", "expected fibonacci or great_circle");
  d.n = j.at("n").get<int>();
  if (j.contains("axis")) d.axis = vec3(j.at("axis"), key + ".axis");
  return d;
}

std::array<int, 3> counts(const json& j, const std::string& key) {
  if (j.is_number_integer()) return {j.get<int>(), j.get<int>(), j.get<int>()};
  if (j.is_array() && j.size() == 3) return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
  bad(key, "expected an integer or 3 integers");
}

int axis_from(const json& j, const std::string& key) {
  if (j.is_number_integer()) return j.get<int>();
  const std::string s = j.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  bad(key, "axis must be x, y, z or 0..2");
}

}  // namespace

std::shared_ptr<const UnitDirectionSet> DirectionSpec::build() const {
  if (kind == Kind::Fibonacci) return std::make_shared<const UnitDirectionSet>(make_quasi_uniform_sphere(n));
  return std::make_shared<const UnitDirectionSet>(make_great_circle(n, axis));
}

bool MaterialSpec::contains(const Vec3& y) const {
  for (const auto& r : regions)
    if (!r.material.is_vacuum() && r.shape.contains(y)) return true;
  return false;
}

double ExperimentConfig::wavenumber() const {
  if (k) return *k;
  if (frequency_ghz) return computational_wavenumber(*frequency_ghz);
  throw std::invalid_argument("config: neither k nor frequency_ghz given");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Synthesize: return "synthesize";
    case RunMode::Invert: return "invert";
    case RunMode::Fresnel: return "fresnel";
    case RunMode::Validate: return "validate";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "synthesize") return RunMode::Synthesize;
  if (s == "invert") return RunMode::Invert;
  if (s == "fresnel") return RunMode::Fresnel;
  if (s == "validate") return RunMode::Validate;
  throw std::invalid_argument("config: mode: unknown mode '" + s + "'");
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    c.mode = run_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("k")) c.k = j.at("k").get<double>();
    if (j.contains("frequency_ghz")) c.frequency_ghz = j.at("frequency_ghz").get<double>();
    if (c.k && c.frequency_ghz) bad("k", "give either k or frequency_ghz, not both");

    if (j.contains("material")) {
      const json& m = j.at("material");
      MaterialSpec ms;
      const json& g = m.at("grid");
      ms.grid.lower = vec3(g.at("lower"), "material.grid.lower");
      const auto n = counts(g.at("n"), "material.grid.n");
      ms.grid.n = n;
      if (g.contains("side")) {
        if (n[0] != n[1] || n[1] != n[2]) bad("material.grid.side", "side needs equal counts per axis");
        ms.grid.h = g.at("side").get<double>() / n[0];
      } else {
        ms.grid.h = g.at("h").get<double>();
      }
      ms.grid.validate();
      for (std::size_t i = 0; i < m.at("regions").size(); ++i) {
        const json& r = m.at("regions")[i];
        const std::string key = "material.regions[" + std::to_string(i) + "]";
        ms.regions.push_back({shape(r.at("shape"), key + ".shape"), voxel_material(r, key)});
      }
      c.material = std::move(ms);
    }
    if (j.contains("directions")) {
      const json& d = j.at("directions");
      if (d.contains("incidence")) c.incidence = direction_spec(d.at("incidence"), "directions.incidence");
      if (d.contains("observation")) c.observation = direction_spec(d.at("observation"), "directions.observation");
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      c.solver.gmres.tol = s.value("tol", c.solver.gmres.tol);
      c.solver.gmres.max_iter = s.value("max_iter", c.solver.gmres.max_iter);
      c.solver.gmres.restart = s.value("restart", c.solver.gmres.restart);
      c.solver.force = s.value("force", false);
    }
    if (j.contains("noise")) {
      c.noise_delta = j.at("noise").value("delta", 0.0);
      c.seed = j.at("noise").value("seed", std::uint64_t{1});
      if (c.noise_delta < 0.0) bad("noise.delta", "must be nonnegative");
    }
    if (j.contains("probe")) {
      const json& p = j.at("probe");
      if (p.contains("p")) c.probe.p = vec3(p.at("p"), "probe.p");
      if (p.contains("alpha1")) c.probe.alpha1 = complex_value(p.at("alpha1"), "probe.alpha1");
      if (p.contains("alpha2")) c.probe.alpha2 = complex_value(p.at("alpha2"), "probe.alpha2");
    }
    if (j.contains("sampling")) {
      const json& s = j.at("sampling");
      c.sampling = SamplingGrid(vec3(s.at("lower"), "sampling.lower"), vec3(s.at("upper"), "sampling.upper"),
                                counts(s.at("n"), "sampling.n"));
    }
    c.isovalue = j.value("isovalue", 0.5);
    if (j.contains("slices"))
      for (std::size_t i = 0; i < j.at("slices").size(); ++i) {
        const json& s = j.at("slices")[i];
        c.slices.push_back({axis_from(s.at("axis"), "slices[" + std::to_string(i) + "].axis"),
                            s.value("offset", 0.0)});
      }
    if (j.contains("fresnel")) {
      const json& f = j.at("fresnel");
      FresnelSpec fs;
      fs.column_map = resolve(f.at("column_map").get<std::string>());
      fs.frequency_ghz = f.value("frequency_ghz", c.frequency_ghz.value_or(4.0));
      c.fresnel = fs;
    }
    if (j.contains("fixture")) {
      const json& f = j.at("fixture");
      c.fixture = FixtureSpec{f.value("sources", 81), f.value("receivers", 36)};
    }
    if (j.contains("expected_argmax")) {
      const json& e = j.at("expected_argmax");
      c.expected_argmax = ExpectedPoint{vec3(e.at("point"), "expected_argmax.point"), e.at("tolerance").get<double>()};
    }
    if (j.contains("reference_indicator")) c.reference_indicator = resolve(j.at("reference_indicator").get<std::string>());
    if (j.contains("validate")) {
      const json& v = j.at("validate");
      if (v.contains("checks")) c.validate.checks = v.at("checks").get<std::vector<std::string>>();
      c.validate.born_tau = v.value("born_tau", c.validate.born_tau);
      c.validate.born_radius = v.value("born_radius", c.validate.born_radius);
      c.validate.born_k = v.value("born_k", c.validate.born_k);
      c.validate.born_grid = v.value("born_grid", c.validate.born_grid);
      c.validate.reciprocity_pairs = v.value("reciprocity_pairs", c.validate.reciprocity_pairs);
      if (v.contains("deltas")) c.validate.deltas = v.at("deltas").get<std::vector<double>>();
      if (v.contains("seeds")) c.validate.seeds = v.at("seeds").get<std::vector<std::uint64_t>>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  // Mutual consistency per mode.
  switch (c.mode) {
    case RunMode::Synthesize:
      if (!c.material) bad("material", "synthesize needs a material");
      if (!c.k && !c.frequency_ghz) bad("k", "synthesize needs k or frequency_ghz");
      if (c.fixture && !c.fresnel) bad("fresnel", "a Fresnel fixture needs fresnel.column_map");
      break;
    case RunMode::Invert:
      if (!c.sampling) bad("sampling", "invert needs a sampling grid");
      break;
    case RunMode::Fresnel:
      if (!c.fresnel) bad("fresnel", "fresnel mode needs fresnel.column_map");
      if (!c.sampling) bad("sampling", "fresnel mode needs a sampling grid");
      break;
    case RunMode::Validate:
      if (!c.material) bad("material", "validate needs a material");
      if (!c.k) bad("k", "validate needs k");
      break;
  }
  c.probe.k = c.k.value_or(c.frequency_ghz ? computational_wavenumber(*c.frequency_ghz) : 1.0);
  return c;
}

}  // namespace mosm
