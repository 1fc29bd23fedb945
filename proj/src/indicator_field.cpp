#include "mosm/indicator_field.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "mosm/format.hpp"

namespace mosm {

SamplingGrid::SamplingGrid(const Vec3& lo, const Vec3& hi, std::array<int, 3> counts)
    : lower(lo), upper(hi), n(counts) {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 2) throw std::invalid_argument("SamplingGrid: need at least 2 points per axis");
    if (!(upper[a] > lower[a])) throw std::invalid_argument("SamplingGrid: degenerate box");
  }
}

std::array<int, 3> SamplingGrid::coords(std::size_t idx) const {
  const auto n0 = static_cast<std::size_t>(n[0]);
  const auto n1 = static_cast<std::size_t>(n[1]);
  return {static_cast<int>(idx % n0), static_cast<int>((idx / n0) % n1), static_cast<int>(idx / (n0 * n1))};
}

Vec3 SamplingGrid::point(std::size_t idx) const {
  const auto c = coords(idx);
  return Vec3(coordinate(0, c[0]), coordinate(1, c[1]), coordinate(2, c[2]));
}

void IndicatorField::normalize() {
  raw_max = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (!(raw_max > 0.0)) {
    all_zero = true;
    normalized = false;
    return;
  }
  for (double& v : values) v /= raw_max;
  normalized = true;
  all_zero = false;
}

std::size_t IndicatorField::argmax() const {
  if (values.empty()) throw std::invalid_argument("argmax of empty field");
  std::size_t best = 0;
  for (std::size_t idx = 1; idx < values.size(); ++idx) {
    if (values[idx] > values[best]) {
      best = idx;
    } else if (values[idx] == values[best]) {
      const auto a = grid.coords(idx), b = grid.coords(best);
      if (a < b) best = idx;
    }
  }
  return best;
}

void write_vtk(std::ostream& out, const IndicatorField& field, const char* name) {
  const SamplingGrid& g = field.grid;
  out << "# vtk DataFile Version 3.0\n";
  out << "mosm indicator field\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.n[0] << ' ' << g.n[1] << ' ' << g.n[2] << '\n';
  out << "ORIGIN " << fmt_real(g.lower.x()) << ' ' << fmt_real(g.lower.y()) << ' ' << fmt_real(g.lower.z()) << '\n';
  out << "SPACING " << fmt_real(g.spacing(0)) << ' ' << fmt_real(g.spacing(1)) << ' ' << fmt_real(g.spacing(2))
      << '\n';
  out << "POINT_DATA " << g.size() << '\n';
  out << "SCALARS " << name << " double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (double v : field.values) out << fmt_real(v) << '\n';
}

void write_csv(std::ostream& out, const IndicatorField& field) {
  out << "x,y,z,value\n";
  for (std::size_t idx = 0; idx < field.values.size(); ++idx) {
    const Vec3 y = field.grid.point(idx);
    out << fmt_real(y.x()) << ',' << fmt_real(y.y()) << ',' << fmt_real(y.z()) << ',' << fmt_real(field.values[idx])
        << '\n';
  }
}

}  // namespace mosm
