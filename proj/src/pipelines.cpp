#include "mosm/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mosm/errors.hpp"
#include "mosm/far_field_data.hpp"
#include "mosm/farfield_operator.hpp"
#include "mosm/format.hpp"
#include "mosm/fresnel.hpp"
#include "mosm/imaging.hpp"

namespace mosm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Files are staged in memory and flushed together once the run has finished.
class Artifacts {
 public:
  std::ostringstream& file(const std::string& name) { return files_[name]; }

  void flush(const fs::path& dir) const {
    fs::create_directories(dir);
    for (const auto& [name, content] : files_) {
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
      out << content.str();
    }
  }

 private:
  std::map<std::string, std::ostringstream> files_;
};

json resolved_config(const json& raw, const ExperimentConfig& c) {
  json r = raw;
  r["noise"]["seed"] = c.seed;
  r["noise"]["delta"] = c.noise_delta;
  if (c.fresnel) r["fresnel"]["column_map"] = fs::absolute(c.fresnel->column_map).string();
  if (!c.reference_indicator.empty()) r["reference_indicator"] = fs::absolute(c.reference_indicator).string();
  return r;
}

RunResult finish(json summary, const json& checks, Artifacts& files, const json& raw, const ExperimentConfig& c,
                 const RunOptions& opt) {
  bool passed = true;
  for (const auto& [name, ok] : checks.items()) passed = passed && ok.get<bool>();
  summary["checks"] = checks;
  summary["passed"] = passed;
  summary["workers"] = opt.workers;
  files.file("resolved_config.json") << resolved_config(raw, c).dump(2) << '\n';
  files.file("summary.json") << summary.dump(2) << '\n';
  files.flush(opt.out_dir);
  return {passed, std::move(summary)};
}

ExperimentConfig with_seed(ExperimentConfig c, const RunOptions& opt) {
  if (opt.seed) c.seed = *opt.seed;
  return c;
}

std::vector<double> read_indicator_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open reference indicator " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    if (pos == std::string::npos) throw ParseError("expected x,y,z,value", lineno);
    values.push_back(std::stod(line.substr(pos + 1)));
  }
  return values;
}

// Scan, write the standard artifacts and collect image metrics/checks.
void image_and_report(const FarFieldData& data, const ExperimentConfig& c, const RunOptions& opt, Artifacts& files,
                      json& summary, json& checks) {
  WaveContext ctx = c.probe;
  ctx.k = data.k;
  Stopwatch sw;
  IndicatorField field = scan(data, *c.sampling, ctx, opt.workers);
  summary["timing"]["scan_seconds"] = sw.seconds();
  write_vtk(files.file("indicator.vtk"), field);
  write_csv(files.file("indicator.csv"), field);
  json img;
  img["raw_max"] = field.raw_max;
  img["all_zero"] = field.all_zero;
  checks["indicator_nonzero"] = !field.all_zero;
  if (field.all_zero) {
    summary["imaging"] = img;
    return;
  }
  const std::size_t am = field.argmax();
  const Vec3 y = c.sampling->point(am);
  img["argmax_index"] = am;
  img["argmax_point"] = vec_json(y);
  const Isosurface iso = threshold_isosurface(field, c.isovalue);
  write_point_cloud(files.file("isosurface.csv"), field, iso);
  img["isovalue"] = c.isovalue;
  img["isosurface_points"] = iso.indices.size();
  img["isosurface_components"] = count_components(field.grid, iso.indices);
  for (std::size_t s = 0; s < c.slices.size(); ++s) {
    const Slice2D sl = slice(field, c.slices[s].axis, c.slices[s].offset);
    const std::string name = std::string("slice_") + "xyz"[c.slices[s].axis] + "_" + std::to_string(s) + ".csv";
    write_slice_csv(files.file(name), sl);
    img["slices"].push_back({{"file", name},
                             {"plane", sl.plane},
                             {"components_at_isovalue", count_components(sl, c.isovalue)}});
  }
  if (c.material) {
    const bool inside = c.material->contains(y);
    img["argmax_in_support"] = inside;
    checks["argmax_in_support"] = inside;
    std::vector<std::size_t> truth;
    for (std::size_t s = 0; s < field.grid.size(); ++s)
      if (c.material->contains(field.grid.point(s))) truth.push_back(s);
    img["jaccard_vs_truth"] = jaccard(iso.indices, truth);
  }
  if (c.expected_argmax) {
    const double dist = (y - c.expected_argmax->point).norm();
    img["argmax_distance_to_expected"] = dist;
    checks["argmax_near_expected"] = dist <= c.expected_argmax->tolerance;
  }
  if (!c.reference_indicator.empty()) {
    IndicatorField ref;
    ref.grid = field.grid;
    ref.values = read_indicator_csv(c.reference_indicator);
    if (ref.values.size() != field.values.size())
      throw std::invalid_argument("reference indicator has a different sampling grid");
    img["jaccard_vs_reference"] = jaccard(iso.indices, threshold_isosurface(ref, c.isovalue).indices);
  }
  summary["imaging"] = img;
}

json audit_json(const AssumptionReport& r) {
  return {{"compliant", r.compliant}, {"boundary_case", r.boundary_case}, {"c1", r.c1},
          {"c2", r.c2},               {"alpha", r.alpha},                 {"beta", r.beta},
          {"coupling", r.coupling},   {"coupling_limit", r.coupling_limit}, {"violations", r.violations},
          {"warnings", r.warnings}};
}

std::shared_ptr<const UnitDirectionSet> fresnel_incidence(int sources) {
  // Antennas on a Fibonacci sphere; waves travel toward the origin.
  const UnitDirectionSet pos = make_quasi_uniform_sphere(sources);
  std::vector<Vec3> d;
  for (const Vec3& p : pos.points()) d.push_back(-p);
  return std::make_shared<const UnitDirectionSet>(d, pos.weights(), Topology::Custom);
}

}  // namespace

RunResult run_synthesize(const ExperimentConfig& config, const json& raw, const RunOptions& opt) {
  const ExperimentConfig c = with_seed(config, opt);
  Stopwatch total;
  Artifacts files;
  json summary, checks;
  summary["mode"] = "synthesize";
  const double k = c.wavenumber();
  summary["k"] = k;
  const MaterialModel model = c.material->build();
  const ForwardSolver solver(model, k, c.solver);
  summary["audit"] = audit_json(solver.audit());
  summary["support_voxels"] = model.support().size();
  checks["assumption_I"] = solver.audit().compliant || c.solver.force;

  std::shared_ptr<const UnitDirectionSet> inc, obs;
  if (c.fixture) {
    inc = fresnel_incidence(c.fixture->sources);
    obs = std::make_shared<const UnitDirectionSet>(make_great_circle(c.fixture->receivers, Vec3::UnitZ()));
  } else {
    inc = c.incidence.build();
    obs = c.observation.build();
  }
  Stopwatch sw;
  FarFieldData data;
  if (c.fixture) {
    // Only the lab polarization e_θ(d) is measured: one solve per source.
    std::vector<Vec3> tags;
    for (const Vec3& d : inc->points()) tags.push_back(polar_unit_vector(d));
    const auto u = solve_far_fields(solver, *inc, tags, *obs, opt.workers);
    data = FarFieldData(k, obs, inc, ComponentMask::all());
    for (std::size_t j = 0; j < inc->size(); ++j)
      for (std::size_t i = 0; i < obs->size(); ++i) data.entry(i, j) = u[j][i] * tags[j].cast<cdouble>().transpose();
  } else {
    data = generate_synthetic_dataset(solver, inc, obs, opt.workers);
  }
  summary["timing"]["solve_seconds"] = sw.seconds();
  summary["entries"] = data.entries.size();
  const double radial = data.max_radial_fraction();
  summary["max_radial_fraction"] = radial;
  checks["far_field_tangential"] = radial <= 1e-6;

  if (c.fixture) {
    const FresnelLayout layout = layout_from_json(load_json_file(c.fresnel->column_map).dump());
    const FresnelDataset ds = fixture_from_far_field(data, layout, c.fresnel->frequency_ghz);
    export_fresnel(files.file("fresnel_fixture.txt"), ds);
    files.file("column_map.json") << layout_to_json(ds.layout) << '\n';
    summary["fixture_records"] = ds.records.size();
  } else {
    write_far_field_data(files.file("farfield.dat"), data);
    if (c.noise_delta > 0.0) {
      write_far_field_data(files.file("farfield_noisy.dat"), add_noise(data, c.noise_delta, c.seed));
      summary["noise"] = {{"delta", c.noise_delta}, {"seed", c.seed}};
    }
  }
  summary["timing"]["total_seconds"] = total.seconds();
  return finish(summary, checks, files, raw, c, opt);
}

RunResult run_invert(const ExperimentConfig& config, const json& raw, const fs::path& data_path,
                     const RunOptions& opt) {
  const ExperimentConfig c = with_seed(config, opt);
  Stopwatch total;
  Artifacts files;
  json summary, checks;
  summary["mode"] = "invert";
  std::ifstream in(data_path);
  if (!in) throw std::invalid_argument("cannot open data file " + data_path.string());
  FarFieldData data = read_far_field_data(in);
  if ((c.k || c.frequency_ghz) && std::abs(c.wavenumber() - data.k) > 1e-12 * data.k)
    throw std::invalid_argument("config wavenumber " + fmt_real(c.wavenumber()) + " does not match data k " +
                                fmt_real(data.k));
  summary["k"] = data.k;
  if (c.noise_delta > 0.0) {
    data = add_noise(data, c.noise_delta, c.seed);
    summary["noise"] = {{"delta", c.noise_delta}, {"seed", c.seed}};
  }
  image_and_report(data, c, opt, files, summary, checks);
  summary["timing"]["total_seconds"] = total.seconds();
  return finish(summary, checks, files, raw, c, opt);
}

RunResult run_fresnel(const ExperimentConfig& config, const json& raw, const fs::path& dataset_path,
                      const RunOptions& opt) {
  const ExperimentConfig c = with_seed(config, opt);
  Stopwatch total;
  Artifacts files;
  json summary, checks;
  summary["mode"] = "fresnel";
  const FresnelLayout layout = layout_from_json(load_json_file(c.fresnel->column_map).dump());
  std::ifstream in(dataset_path);
  if (!in) throw std::invalid_argument("cannot open dataset " + dataset_path.string());
  Stopwatch sw;
  const FresnelDataset ds = parse_fresnel(in, layout);
  const ComputationalData cd = to_computational_units(ds, c.fresnel->frequency_ghz);
  summary["timing"]["ingest_seconds"] = sw.seconds();
  summary["frequency_ghz"] = c.fresnel->frequency_ghz;
  summary["k"] = cd.k;
  summary["k_physical"] = cd.k_physical;
  summary["sources"] = ds.sources.size();
  summary["receivers"] = ds.receivers.size();
  write_far_field_data(files.file("farfield.dat"), cd.data);
  image_and_report(cd.data, c, opt, files, summary, checks);
  const double elapsed = total.seconds();
  summary["timing"]["total_seconds"] = elapsed;
  checks["pipeline_within_120s"] = elapsed <= 120.0;
  return finish(summary, checks, files, raw, c, opt);
}

RunResult run_validate(const ExperimentConfig& config, const json& raw, const RunOptions& opt) {
  const ExperimentConfig c = with_seed(config, opt);
  Stopwatch total;
  Artifacts files;
  json summary, checks;
  summary["mode"] = "validate";
  const double k = *c.k;
  auto wanted = [&](const std::string& name) {
    return c.validate.checks.empty() ||
           std::find(c.validate.checks.begin(), c.validate.checks.end(), name) != c.validate.checks.end();
  };
  const MaterialModel model = c.material->build();
  const AssumptionReport audit = validate_assumption_I(model, k);
  if (wanted("assumption")) {
    summary["assumption"] = audit_json(audit);
    checks["assumption"] = audit.compliant;
  }

  std::optional<FarFieldData> dataset;
  auto get_dataset = [&]() -> const FarFieldData& {
    if (!dataset) {
      ForwardOptions fo = c.solver;
      fo.force = true;  // audited above; the report already records compliance
      const ForwardSolver solver(model, k, fo);
      dataset = generate_synthetic_dataset(solver, c.incidence.build(), c.observation.build(), opt.workers);
    }
    return *dataset;
  };

  if (wanted("born")) {
    Stopwatch sw;
    const auto& v = c.validate;
    const double side = 2.4 * v.born_radius;
    const VolumeGrid g = VolumeGrid::cube(Vec3::Constant(-0.5 * side), side, v.born_grid);
    const MaterialModel sphere =
        MaterialModel::from_shapes(g, {{Shape::sphere(Vec3::Zero(), v.born_radius), VoxelMaterial::dielectric(1.0 + v.born_tau)}});
    ForwardOptions fo = c.solver;
    fo.force = true;
    const ForwardSolver solver(sphere, v.born_k, fo);
    const Vec3 d = Vec3::UnitZ();
    const CVec3 q = Vec3::UnitX().cast<cdouble>();
    const ForwardSolution sol = solver.solve(sample_plane_wave(g, d, q, v.born_k));
    const UnitDirectionSet obs = make_quasi_uniform_sphere(30);
    const auto u = solver.far_field(sol, obs);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const CVec3 b = born_sphere_far_field(obs.point(i), d, q, Vec3::Zero(), v.born_radius, v.born_tau, v.born_k);
      num += (u[i] - b).squaredNorm();
      den += b.squaredNorm();
    }
    const double rel = std::sqrt(num / den);
    summary["born"] = {{"relative_deviation", rel}, {"limit", 5.0 * v.born_tau}, {"seconds", sw.seconds()}};
    checks["born"] = rel <= 5.0 * v.born_tau;
  }

  if (wanted("reciprocity")) {
    Stopwatch sw;
    ForwardOptions fo = c.solver;
    fo.force = true;
    fo.gmres.tol = std::min(fo.gmres.tol, 1e-9);
    const ForwardSolver solver(model, k, fo);
    std::mt19937_64 gen(c.seed);
    std::normal_distribution<double> nd;
    auto random_unit = [&] { return Vec3(nd(gen), nd(gen), nd(gen)).normalized(); };
    double worst = 0.0;
    for (int pair = 0; pair < c.validate.reciprocity_pairs; ++pair) {
      const Vec3 x = random_unit(), d = random_unit();
      const Vec3 q = tangential_basis(d).e1, qp = tangential_basis(x).e1;
      const UnitDirectionSet ox({x}, {1.0}, Topology::Custom), omd({Vec3(-d)}, {1.0}, Topology::Custom);
      const cdouble a = qp.cast<cdouble>().dot(
          solver.far_field(solver.solve(sample_plane_wave(model.grid(), d, q.cast<cdouble>(), k)), ox)[0]);
      const cdouble b = q.cast<cdouble>().dot(
          solver.far_field(solver.solve(sample_plane_wave(model.grid(), -x, qp.cast<cdouble>(), k)), omd)[0]);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    summary["reciprocity"] = {{"max_relative_deviation", worst}, {"limit", 1e-5}, {"seconds", sw.seconds()}};
    checks["reciprocity"] = worst <= 1e-5;
  }

  if (wanted("coercivity")) {
    Stopwatch sw;
    const auto rep = coercivity_report(imaginary_part(assemble_operator(get_dataset())));
    summary["coercivity"] = {{"lambda_min", rep.lambda_min}, {"lambda_max", rep.lambda_max},
                             {"relative_min", rep.relative_min}, {"seconds", sw.seconds()}};
    write_spectrum_csv(files.file("spectrum.csv"), rep);
    checks["coercivity"] = rep.lambda_min >= -1e-6 * rep.lambda_max;
  }

  if (wanted("factorization")) {
    const FarFieldData& data = get_dataset();
    WaveContext ctx = c.probe;
    ctx.k = k;
    const DiscreteFarFieldOperator op = assemble_operator(data);
    std::mt19937_64 gen(c.seed);
    std::uniform_real_distribution<double> ud(-1.5, 1.5);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const Vec3 y(ud(gen), ud(gen), ud(gen));
      const double direct = mosm_value(data, y, ctx);
      const auto out = op.apply(probe_field(y, data.incidence, ctx));
      double norm2 = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) norm2 += data.observation->weight(i) * out[i].squaredNorm();
      worst = std::max(worst, std::abs(direct - norm2) / std::max(direct, norm2));
    }
    summary["factorization"] = {{"max_relative_deviation", worst}, {"limit", 1e-12}};
    checks["factorization"] = worst <= 1e-12;
  }

  if (wanted("stability")) {
    Stopwatch sw;
    WaveContext ctx = c.probe;
    ctx.k = k;
    const SamplingGrid grid = c.sampling.value_or(SamplingGrid::cube(1.5, 16));
    const StabilityReport rep = stability_gap(get_dataset(), c.validate.deltas, c.validate.seeds, grid, ctx, opt.workers);
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"delta", r.delta}, {"seed", r.seed}, {"max_gap", r.max_gap}, {"bound", r.bound},
                      {"margin", r.margin}, {"perturbation_ratio", r.perturbation_ratio}, {"holds", r.holds}});
    summary["stability"] = {{"operator_norm", rep.operator_norm}, {"probe_norm_squared", rep.probe_norm_squared},
                            {"rows", rows}, {"seconds", sw.seconds()}};
    checks["stability"] = rep.all_hold();
  }

  if (wanted("decay")) {
    const double kd = 3.0, radius = 0.5;
    const auto inc = std::make_shared<const UnitDirectionSet>(make_quasi_uniform_sphere(8000));
    const auto obs = std::make_shared<const UnitDirectionSet>(make_quasi_uniform_sphere(30));
    const FarFieldData data = born_sphere_dataset(inc, obs, Vec3::Zero(), radius, cdouble(0.01, 0.01), kd);
    WaveContext ctx = c.probe;
    ctx.k = kd;
    const double lambda = 2.0 * kPi / kd;
    const Vec3 dir = Vec3(1.0, 0.3, 0.2).normalized();
    std::vector<Vec3> ray;
    std::vector<double> dist;
    for (int s = 0; s < 64; ++s) {
      const double t = 5.0 * lambda * std::pow(4.0, s / 63.0);
      dist.push_back(t);
      ray.push_back((radius + t) * dir);
    }
    const DecayFit fit = decay_profile(data, ray, dist, ctx);
    summary["decay"] = {{"slope", fit.slope}, {"band", {-2.6, -1.4}}};
    checks["decay"] = fit.slope >= -2.6 && fit.slope <= -1.4;
  }

  if (wanted("wavenumber")) {
    const double k4 = computational_wavenumber(4.0);
    summary["wavenumber"] = {{"k_at_4GHz", k4}};
  }

  summary["timing"]["total_seconds"] = total.seconds();
  return finish(summary, checks, files, raw, c, opt);
}

}  // namespace mosm
