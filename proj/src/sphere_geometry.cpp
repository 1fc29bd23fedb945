#include "mosm/sphere_geometry.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mosm/errors.hpp"
#include "mosm/format.hpp"

namespace mosm {

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::FullSphere: return "full-sphere";
    case Topology::GreatCircle: return "great-circle";
    case Topology::Custom: return "custom";
  }
  return "custom";
}

Topology topology_from_string(std::string_view text) {
  if (text == "full-sphere") return Topology::FullSphere;
  if (text == "great-circle") return Topology::GreatCircle;
  if (text == "custom") return Topology::Custom;
  throw std::invalid_argument("unknown topology tag '" + std::string(text) + "'");
}

UnitDirectionSet::UnitDirectionSet(std::vector<Vec3> points, std::vector<double> weights,
                                   Topology topology)
    : points_(std::move(points)), weights_(std::move(weights)), topology_(topology) {
  if (points_.size() != weights_.size())
    throw std::invalid_argument("UnitDirectionSet: points and weights differ in length");
  if (points_.empty()) throw std::invalid_argument("UnitDirectionSet: empty set");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(std::abs(points_[i].norm() - 1.0) <= 1e-12))
      throw std::invalid_argument("UnitDirectionSet: point " + std::to_string(i) +
                                  " is not a unit vector");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw std::invalid_argument("UnitDirectionSet: weight " + std::to_string(i) +
                                  " is not positive");
  }
  if (topology_ == Topology::FullSphere && std::abs(total_weight() - kFourPi) > 1e-10)
    throw std::invalid_argument("UnitDirectionSet: full-sphere weights do not sum to 4π");
}

double UnitDirectionSet::total_weight() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

UnitDirectionSet make_quasi_uniform_sphere(int n) {
  if (n < 4) throw std::invalid_argument("make_quasi_uniform_sphere: n must be >= 4");
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> points(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    Vec3 p(r * std::cos(phi), r * std::sin(phi), z);
    points[static_cast<std::size_t>(i)] = p / p.norm();
  }
  std::vector<double> weights(static_cast<std::size_t>(n), kFourPi / n);
  return UnitDirectionSet(std::move(points), std::move(weights), Topology::FullSphere);
}

UnitDirectionSet make_great_circle(int n, const Vec3& axis) {
  if (n < 3) throw std::invalid_argument("make_great_circle: n must be >= 3");
  if (std::abs(axis.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("make_great_circle: axis must be a unit vector");
  const TangentFrame frame = tangential_basis(axis);
  // (u, v, axis) right-handed with u = e_x for axis = e_z.
  const Vec3 u = frame.e2;
  const Vec3 v = axis.cross(u);
  std::vector<Vec3> points(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * kPi * i / n;
    Vec3 p = std::cos(phi) * u + std::sin(phi) * v;
    points[static_cast<std::size_t>(i)] = p / p.norm();
  }
  std::vector<double> weights(static_cast<std::size_t>(n), 2.0 * kPi / n);
  return UnitDirectionSet(std::move(points), std::move(weights), Topology::GreatCircle);
}

TangentFrame tangential_basis(const Vec3& d) {
  const double ax = std::abs(d.x()), ay = std::abs(d.y()), az = std::abs(d.z());
  Vec3 axis = Vec3::UnitZ();
  if (ax <= ay && ax <= az)
    axis = Vec3::UnitX();
  else if (ay <= az)
    axis = Vec3::UnitY();
  Vec3 e1 = axis.cross(d);
  e1.normalize();
  Vec3 e2 = d.cross(e1);
  e2.normalize();
  return {e1, e2};
}

CVec3 tangential_projection(const Vec3& d, const CVec3& v) {
  const cdouble dv = d.cast<cdouble>().dot(v);  // dot() conjugates the first argument; d is real
  return v - dv * d.cast<cdouble>();
}

TangentialField::TangentialField(std::shared_ptr<const UnitDirectionSet> base,
                                 std::vector<CVec3> values)
    : base_(std::move(base)), values_(std::move(values)) {
  if (!base_) throw std::invalid_argument("TangentialField: null direction set");
  if (values_.size() != base_->size())
    throw std::invalid_argument("TangentialField: value count does not match direction set");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double radial = std::abs(base_->point(i).cast<cdouble>().dot(values_[i]));
    if (radial > 1e-10 * values_[i].norm() + 1e-300)
      throw std::invalid_argument("TangentialField: value " + std::to_string(i) +
                                  " is not tangential");
  }
}

double TangentialField::norm_squared() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += base_->weight(i) * values_[i].squaredNorm();
  return s;
}

void write_directions(std::ostream& out, const UnitDirectionSet& set) {
  out << "# topology " << to_string(set.topology()) << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec3& p = set.point(i);
    out << fmt_real(p.x()) << ' ' << fmt_real(p.y()) << ' ' << fmt_real(p.z()) << ' '
        << fmt_real(set.weight(i)) << '\n';
  }
}

UnitDirectionSet read_directions(std::istream& in) {
  Topology topology = Topology::Custom;
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key, value;
      if (ss >> key >> value && key == "topology") topology = topology_from_string(value);
      continue;
    }
    std::istringstream ss(line);
    double x, y, z, w;
    if (!(ss >> x >> y >> z >> w)) throw ParseError("expected 'x y z w'", lineno);
    points.emplace_back(x, y, z);
    weights.push_back(w);
  }
  return UnitDirectionSet(std::move(points), std::move(weights), topology);
}

}  // namespace mosm
