#include "mosm/fresnel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mosm/errors.hpp"
#include "mosm/format.hpp"

namespace mosm {

namespace {

constexpr std::size_t kMissing = std::numeric_limits<std::size_t>::max();
constexpr double kAngleTol = 1e-9;
constexpr double kFrequencyTol = 1e-9;

std::string describe_angle(double rad) { return fmt_real(rad * 180.0 / kPi) + " deg"; }

}  // namespace

int FresnelLayout::max_column() const {
  return std::max({col_frequency, col_source_theta, col_source_phi, col_receiver_phi, col_total_re, col_total_im,
                   col_incident_re, col_incident_im});
}

void FresnelLayout::validate() const {
  const int cols[] = {col_frequency, col_source_theta, col_source_phi, col_receiver_phi,
                      col_total_re,  col_total_im,     col_incident_re, col_incident_im};
  for (int c : cols)
    if (c < 0) throw std::invalid_argument("FresnelLayout: column indices must be nonnegative");
  std::vector<int> sorted(std::begin(cols), std::end(cols));
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("FresnelLayout: two quantities mapped to the same column");
  if (!(receiver_radius_m > 0.0)) throw std::invalid_argument("FresnelLayout: receiver_radius_m must be positive");
  if (!(unit_length_m > 0.0)) throw std::invalid_argument("FresnelLayout: unit_length_m must be positive");
  if (expected_sources < 0 || expected_receivers < 0)
    throw std::invalid_argument("FresnelLayout: expected counts must be nonnegative");
  if (comment_prefix.empty()) throw std::invalid_argument("FresnelLayout: comment_prefix must not be empty");
}

FresnelLayout layout_from_json(const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("column map: ") + e.what());
  }
  FresnelLayout l;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  try {
    if (j.contains("columns")) {
      const json& c = j.at("columns");
      auto col = [&](const char* key, int& field) {
        if (c.contains(key)) field = c.at(key).get<int>();
      };
      col("frequency_ghz", l.col_frequency);
      col("source_theta", l.col_source_theta);
      col("source_phi", l.col_source_phi);
      col("receiver_phi", l.col_receiver_phi);
      col("total_re", l.col_total_re);
      col("total_im", l.col_total_im);
      col("incident_re", l.col_incident_re);
      col("incident_im", l.col_incident_im);
    }
    if (j.contains("angle_unit")) {
      const std::string u = j.at("angle_unit").get<std::string>();
      if (u == "deg") l.degrees = true;
      else if (u == "rad") l.degrees = false;
      else throw std::invalid_argument("column map: angle_unit must be 'deg' or 'rad'");
    }
    get("comment_prefix", l.comment_prefix);
    get("source_angles_are_positions", l.source_angles_are_positions);
    if (!j.contains("receiver_radius_m")) throw std::invalid_argument("column map: receiver_radius_m is required");
    get("receiver_radius_m", l.receiver_radius_m);
    get("unit_length_m", l.unit_length_m);
    get("expected_sources", l.expected_sources);
    get("expected_receivers", l.expected_receivers);
    get("min_frequency_ghz", l.min_frequency_ghz);
    get("max_frequency_ghz", l.max_frequency_ghz);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("column map: ") + e.what());
  }
  l.validate();
  return l;
}

std::string layout_to_json(const FresnelLayout& l) {
  nlohmann::ordered_json j;
  j["columns"] = {{"frequency_ghz", l.col_frequency}, {"source_theta", l.col_source_theta},
                  {"source_phi", l.col_source_phi},   {"receiver_phi", l.col_receiver_phi},
                  {"total_re", l.col_total_re},       {"total_im", l.col_total_im},
                  {"incident_re", l.col_incident_re}, {"incident_im", l.col_incident_im}};
  j["angle_unit"] = l.degrees ? "deg" : "rad";
  j["comment_prefix"] = l.comment_prefix;
  j["source_angles_are_positions"] = l.source_angles_are_positions;
  j["receiver_radius_m"] = l.receiver_radius_m;
  j["unit_length_m"] = l.unit_length_m;
  j["expected_sources"] = l.expected_sources;
  j["expected_receivers"] = l.expected_receivers;
  j["min_frequency_ghz"] = l.min_frequency_ghz;
  j["max_frequency_ghz"] = l.max_frequency_ghz;
  return j.dump(2);
}

std::size_t FresnelDataset::frequency_index(double ghz) const {
  for (std::size_t f = 0; f < frequencies.size(); ++f)
    if (std::abs(frequencies[f] - ghz) <= kFrequencyTol) return f;
  throw std::invalid_argument("frequency " + fmt_real(ghz) + " GHz is not present in the dataset");
}

FresnelDataset parse_fresnel(std::istream& in, const FresnelLayout& layout) {
  layout.validate();
  FresnelDataset ds;
  ds.layout = layout;
  const double angle_scale = layout.degrees ? kPi / 180.0 : 1.0;
  const auto need = static_cast<std::size_t>(layout.max_column()) + 1;

  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line.compare(start, layout.comment_prefix.size(), layout.comment_prefix) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw ParseError("non-numeric field '" + tok + "'", lineno);
      if (!std::isfinite(x)) throw ParseError("non-finite field '" + tok + "'", lineno);
      v.push_back(x);
    }
    if (v.size() < need) {
      if (first)
        throw StructuralError("column map references column " + std::to_string(need - 1) + " but the table has " +
                              std::to_string(v.size()) + " columns (line " + std::to_string(lineno) + ")");
      throw ParseError("expected at least " + std::to_string(need) + " fields, found " + std::to_string(v.size()),
                       lineno);
    }
    first = false;
    MeasurementRecord r;
    r.frequency_ghz = v[static_cast<std::size_t>(layout.col_frequency)];
    r.source_theta = v[static_cast<std::size_t>(layout.col_source_theta)] * angle_scale;
    r.source_phi = v[static_cast<std::size_t>(layout.col_source_phi)] * angle_scale;
    r.receiver_phi = v[static_cast<std::size_t>(layout.col_receiver_phi)] * angle_scale;
    r.total = {v[static_cast<std::size_t>(layout.col_total_re)], v[static_cast<std::size_t>(layout.col_total_im)]};
    r.incident = {v[static_cast<std::size_t>(layout.col_incident_re)],
                  v[static_cast<std::size_t>(layout.col_incident_im)]};
    if (r.frequency_ghz < layout.min_frequency_ghz || r.frequency_ghz > layout.max_frequency_ghz)
      throw StructuralError("frequency " + fmt_real(r.frequency_ghz) + " GHz on line " + std::to_string(lineno) +
                            " is outside [" + fmt_real(layout.min_frequency_ghz) + ", " +
                            fmt_real(layout.max_frequency_ghz) + "] GHz; check the column map");
    ds.records.push_back(r);
  }
  if (ds.records.empty()) throw StructuralError("no measurement records found");

  // Distinct frequencies, sources and receivers.
  for (const auto& r : ds.records) {
    if (std::none_of(ds.frequencies.begin(), ds.frequencies.end(),
                     [&](double f) { return std::abs(f - r.frequency_ghz) <= kFrequencyTol; }))
      ds.frequencies.push_back(r.frequency_ghz);
    if (std::none_of(ds.sources.begin(), ds.sources.end(), [&](const std::array<double, 2>& s) {
          return std::abs(s[0] - r.source_theta) <= kAngleTol && std::abs(s[1] - r.source_phi) <= kAngleTol;
        }))
      ds.sources.push_back({r.source_theta, r.source_phi});
    if (std::none_of(ds.receivers.begin(), ds.receivers.end(),
                     [&](double p) { return std::abs(p - r.receiver_phi) <= kAngleTol; }))
      ds.receivers.push_back(r.receiver_phi);
  }
  std::sort(ds.frequencies.begin(), ds.frequencies.end());

  const std::size_t ns = ds.sources.size(), nr = ds.receivers.size();
  if (layout.expected_sources > 0 && ns != static_cast<std::size_t>(layout.expected_sources))
    throw StructuralError("found " + std::to_string(ns) + " distinct sources, expected " +
                          std::to_string(layout.expected_sources));
  if (layout.expected_receivers > 0 && nr != static_cast<std::size_t>(layout.expected_receivers))
    throw StructuralError("found " + std::to_string(nr) + " distinct receivers, expected " +
                          std::to_string(layout.expected_receivers));

  ds.index.assign(ds.frequencies.size(), std::vector<std::size_t>(ns * nr, kMissing));
  for (std::size_t k = 0; k < ds.records.size(); ++k) {
    const auto& r = ds.records[k];
    const std::size_t f = ds.frequency_index(r.frequency_ghz);
    std::size_t s = 0, q = 0;
    while (!(std::abs(ds.sources[s][0] - r.source_theta) <= kAngleTol &&
             std::abs(ds.sources[s][1] - r.source_phi) <= kAngleTol))
      ++s;
    while (!(std::abs(ds.receivers[q] - r.receiver_phi) <= kAngleTol)) ++q;
    std::size_t& slot = ds.index[f][s * nr + q];
    if (slot != kMissing)
      throw StructuralError("duplicate record at " + fmt_real(r.frequency_ghz) + " GHz, source " + std::to_string(s) +
                            ", receiver " + std::to_string(q));
    slot = k;
  }
  std::vector<std::string> missing;
  for (std::size_t f = 0; f < ds.frequencies.size(); ++f)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t q = 0; q < nr; ++q)
        if (ds.index[f][s * nr + q] == kMissing)
          missing.push_back(fmt_real(ds.frequencies[f]) + " GHz, source " + std::to_string(s) + " (theta " +
                            describe_angle(ds.sources[s][0]) + ", phi " + describe_angle(ds.sources[s][1]) +
                            "), receiver " + std::to_string(q) + " (phi " + describe_angle(ds.receivers[q]) + ")");
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " missing record(s): " + missing.front();
    for (std::size_t m = 1; m < std::min<std::size_t>(missing.size(), 5); ++m) msg += "; " + missing[m];
    throw StructuralError(msg);
  }
  return ds;
}

void export_fresnel(std::ostream& out, const FresnelDataset& dataset) {
  out << "# frequency_ghz source_theta source_phi receiver_phi total_re total_im incident_re incident_im"
         " (angles in radians)\n";
  for (const auto& r : dataset.records) {
    out << fmt_real(r.frequency_ghz) << ' ' << fmt_real(r.source_theta) << ' ' << fmt_real(r.source_phi) << ' '
        << fmt_real(r.receiver_phi) << ' ' << fmt_real(r.total.real()) << ' ' << fmt_real(r.total.imag()) << ' '
        << fmt_real(r.incident.real()) << ' ' << fmt_real(r.incident.imag()) << '\n';
  }
}

std::vector<cdouble> scattered_field(const FresnelDataset& dataset) {
  std::vector<cdouble> u;
  u.reserve(dataset.records.size());
  for (const auto& r : dataset.records) u.push_back(r.total - r.incident);
  return u;
}

cdouble near_to_far(cdouble u_scat, double radius, double k_physical) {
  if (!(radius > 0.0)) throw std::invalid_argument("near_to_far: radius must be positive");
  return u_scat * radius * std::exp(-kI * (k_physical * radius));
}

double physical_wavenumber(double frequency_ghz) { return 2.0 * kPi * frequency_ghz * 1e9 / kSpeedOfLight; }

double computational_wavenumber(double frequency_ghz, double unit_length_m) {
  return physical_wavenumber(frequency_ghz) * unit_length_m;
}

Vec3 polar_unit_vector(const Vec3& d) {
  const double rho = std::hypot(d.x(), d.y());
  if (rho < 1e-12) return tangential_basis(d).e1;
  return Vec3(d.z() * d.x() / rho, d.z() * d.y() / rho, -rho);
}

Vec3 source_position(double theta, double phi) {
  return Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
}

ComputationalData to_computational_units(const FresnelDataset& ds, double frequency_ghz) {
  const std::size_t f = ds.frequency_index(frequency_ghz);
  const FresnelLayout& l = ds.layout;
  ComputationalData out;
  out.k_physical = physical_wavenumber(ds.frequencies[f]);
  out.k = out.k_physical * l.unit_length_m;

  std::vector<Vec3> rx;
  for (double phi : ds.receivers) rx.emplace_back(std::cos(phi), std::sin(phi), 0.0);
  std::vector<Vec3> inc;
  for (const auto& s : ds.sources) {
    const Vec3 pos = source_position(s[0], s[1]);
    inc.push_back(l.source_angles_are_positions ? Vec3(-pos) : pos);
  }
  const std::size_t nr = rx.size(), ns = inc.size();
  auto obs_set = std::make_shared<const UnitDirectionSet>(
      rx, std::vector<double>(nr, 2.0 * kPi / static_cast<double>(nr)), Topology::GreatCircle);
  auto inc_set = std::make_shared<const UnitDirectionSet>(
      inc, std::vector<double>(ns, kFourPi / static_cast<double>(ns)), Topology::Custom);

  out.data = FarFieldData(out.k, obs_set, inc_set, ComponentMask::only(2));
  const std::vector<cdouble> us = scattered_field(ds);
  for (std::size_t s = 0; s < ns; ++s) {
    const Vec3 tag = polar_unit_vector(inc[s]);
    out.data.polarization_tags.push_back(tag);
    for (std::size_t r = 0; r < nr; ++r) {
      const cdouble u = near_to_far(us[ds.index[f][s * nr + r]], l.receiver_radius_m, out.k_physical) /
                        l.unit_length_m;
      CMat3 e = CMat3::Zero();
      e.row(2) = u * tag.cast<cdouble>().transpose();
      out.data.entry(r, s) = e;
    }
  }
  return out;
}

FresnelDataset fixture_from_far_field(const FarFieldData& data, const FresnelLayout& layout, double frequency_ghz) {
  layout.validate();
  data.validate();
  const double kp = physical_wavenumber(frequency_ghz);
  const double R = layout.receiver_radius_m;
  std::vector<double> rphi;
  for (const Vec3& x : data.observation->points()) {
    if (std::abs(x.z()) > 1e-12) throw std::invalid_argument("fixture_from_far_field: receivers must lie on z = 0");
    rphi.push_back(std::atan2(x.y(), x.x()));
  }
  std::ostringstream text;
  FresnelDataset tmp;
  tmp.layout = FresnelLayout{};
  tmp.layout.receiver_radius_m = R;
  for (std::size_t s = 0; s < data.n_inc(); ++s) {
    const Vec3& d = data.incidence->point(s);
    const Vec3 pos = layout.source_angles_are_positions ? Vec3(-d) : d;
    const double theta = std::acos(std::clamp(pos.z(), -1.0, 1.0));
    const double phi = std::atan2(pos.y(), pos.x());
    const Vec3 tag = polar_unit_vector(d);
    for (std::size_t r = 0; r < data.n_obs(); ++r) {
      const cdouble uinf = (data.entry(r, s) * tag.cast<cdouble>())(2) * layout.unit_length_m;
      const Vec3 xr = R * data.observation->point(r);
      MeasurementRecord rec;
      rec.frequency_ghz = frequency_ghz;
      rec.source_theta = theta;
      rec.source_phi = phi;
      rec.receiver_phi = rphi[r];
      rec.incident = tag.z() * std::exp(kI * (kp * d.dot(xr)));
      rec.total = rec.incident + uinf * std::exp(kI * (kp * R)) / R;
      tmp.records.push_back(rec);
    }
  }
  // Re-parse through the exporter so the fixture obeys every ingest invariant.
  FresnelLayout canonical = layout;
  canonical.col_frequency = 0;
  canonical.col_source_theta = 1;
  canonical.col_source_phi = 2;
  canonical.col_receiver_phi = 3;
  canonical.col_total_re = 4;
  canonical.col_total_im = 5;
  canonical.col_incident_re = 6;
  canonical.col_incident_im = 7;
  canonical.degrees = false;
  canonical.comment_prefix = "#";
  export_fresnel(text, tmp);
  std::istringstream in(text.str());
  return parse_fresnel(in, canonical);
}

}  // namespace mosm
