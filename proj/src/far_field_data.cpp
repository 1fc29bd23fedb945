#include "mosm/far_field_data.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mosm/errors.hpp"
#include "mosm/format.hpp"

namespace mosm {

FarFieldData::FarFieldData(double k_, std::shared_ptr<const UnitDirectionSet> obs,
                           std::shared_ptr<const UnitDirectionSet> inc, ComponentMask mask_)
    : k(k_), observation(std::move(obs)), incidence(std::move(inc)), mask(mask_) {
  if (!observation || !incidence) throw std::invalid_argument("FarFieldData: direction sets required");
  entries.assign(observation->size() * incidence->size(), CMat3::Zero());
}

void FarFieldData::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("FarFieldData: k must be positive");
  if (!observation || !incidence) throw std::invalid_argument("FarFieldData: direction sets required");
  if (entries.size() != n_obs() * n_inc()) throw std::invalid_argument("FarFieldData: entry count mismatch");
  if (!polarization_tags.empty() && polarization_tags.size() != n_inc())
    throw std::invalid_argument("FarFieldData: polarization tag count mismatch");
  if (!(mask.on[0] || mask.on[1] || mask.on[2])) throw std::invalid_argument("FarFieldData: empty component mask");
}

double FarFieldData::norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.squaredNorm();
  return std::sqrt(s);
}

double FarFieldData::max_radial_fraction() const {
  // ‖x̂ᵀU‖/‖U‖ per entry; measured on the whole matrix so rank-one entries
  // (one measured polarization) do not divide rounding noise by itself.
  double worst = 0.0;
  for (std::size_t j = 0; j < n_inc(); ++j)
    for (std::size_t i = 0; i < n_obs(); ++i) {
      const CMat3& e = entry(i, j);
      const double n = e.norm();
      if (n == 0.0) continue;
      worst = std::max(worst, (observation->point(i).cast<cdouble>().transpose() * e).norm() / n);
    }
  return worst;
}

namespace {

void write_table(std::ostream& out, const char* name, const UnitDirectionSet& set) {
  out << name << ' ' << to_string(set.topology()) << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec3& p = set.point(i);
    out << fmt_real(p.x()) << ' ' << fmt_real(p.y()) << ' ' << fmt_real(p.z()) << ' ' << fmt_real(set.weight(i))
        << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty, non-comment line.
  std::string next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return line;
    }
    throw ParseError(std::string("unexpected end of file, expecting ") + expecting, lineno_ + 1);
  }

  std::size_t lineno() const { return lineno_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, lineno_); }

 private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

std::string keyed(LineReader& r, const std::string& key) {
  const std::string line = r.next(key.c_str());
  std::istringstream ss(line);
  std::string k, v, extra;
  if (!(ss >> k >> v) || k != key || (ss >> extra)) r.fail("expected '" + key + " <value>'");
  return v;
}

std::size_t parse_count(LineReader& r, const std::string& key) {
  const std::string v = keyed(r, key);
  try {
    std::size_t pos = 0;
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    r.fail("bad count for " + key + ": " + v);
  }
}

std::shared_ptr<const UnitDirectionSet> read_table(LineReader& r, const std::string& name, std::size_t n) {
  const std::string v = keyed(r, name);
  Topology topology;
  try {
    topology = topology_from_string(v);
  } catch (const std::exception&) {
    r.fail("unknown topology '" + v + "'");
  }
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream ss(r.next("direction row"));
    double x, y, z, wt;
    std::string extra;
    if (!(ss >> x >> y >> z >> wt) || (ss >> extra)) r.fail("expected 'x y z w'");
    pts.emplace_back(x, y, z);
    w.push_back(wt);
  }
  try {
    return std::make_shared<const UnitDirectionSet>(std::move(pts), std::move(w), topology);
  } catch (const std::invalid_argument& e) {
    r.fail(std::string("invalid ") + name + " table: " + e.what());
  }
}

}  // namespace

void write_far_field_data(std::ostream& out, const FarFieldData& data) {
  data.validate();
  out << "# mosm far-field data\n";
  out << "k " << fmt_real(data.k) << '\n';
  out << "nobs " << data.n_obs() << '\n';
  out << "ninc " << data.n_inc() << '\n';
  out << "mask " << (data.mask.on[0] ? '1' : '0') << (data.mask.on[1] ? '1' : '0') << (data.mask.on[2] ? '1' : '0')
      << '\n';
  out << "tags " << (data.polarization_tags.empty() ? 0 : 1) << '\n';
  write_table(out, "observations", *data.observation);
  write_table(out, "incidences", *data.incidence);
  for (const Vec3& t : data.polarization_tags)
    out << fmt_real(t.x()) << ' ' << fmt_real(t.y()) << ' ' << fmt_real(t.z()) << '\n';
  for (const CMat3& e : data.entries) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        if (r + c > 0) out << ' ';
        out << fmt_real(e(r, c).real()) << ' ' << fmt_real(e(r, c).imag());
      }
    out << '\n';
  }
}

FarFieldData read_far_field_data(std::istream& in) {
  LineReader r(in);
  const std::string kv = keyed(r, "k");
  double k;
  try {
    k = std::stod(kv);
  } catch (const std::exception&) {
    r.fail("bad wavenumber '" + kv + "'");
  }
  const std::size_t nobs = parse_count(r, "nobs");
  const std::size_t ninc = parse_count(r, "ninc");
  const std::string bits = keyed(r, "mask");
  if (bits.size() != 3 || bits.find_first_not_of("01") != std::string::npos) r.fail("mask must be three 0/1 digits");
  ComponentMask mask{{bits[0] == '1', bits[1] == '1', bits[2] == '1'}};
  const std::size_t tags = parse_count(r, "tags");
  if (tags > 1) r.fail("tags must be 0 or 1");

  auto obs = read_table(r, "observations", nobs);
  auto inc = read_table(r, "incidences", ninc);
  FarFieldData data(k, obs, inc, mask);
  if (tags == 1) {
    for (std::size_t j = 0; j < ninc; ++j) {
      std::istringstream ss(r.next("polarization tag"));
      double x, y, z;
      if (!(ss >> x >> y >> z)) r.fail("expected 'x y z' polarization tag");
      data.polarization_tags.emplace_back(x, y, z);
    }
  }
  for (auto& e : data.entries) {
    std::istringstream ss(r.next("entry row"));
    for (int rr = 0; rr < 3; ++rr)
      for (int c = 0; c < 3; ++c) {
        double re, im;
        if (!(ss >> re >> im)) r.fail("expected 18 reals per entry row");
        e(rr, c) = cdouble(re, im);
      }
    std::string extra;
    if (ss >> extra) r.fail("trailing data in entry row");
  }
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  return data;
}

FarFieldData add_noise(const FarFieldData& data, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw std::invalid_argument("add_noise: delta must be nonnegative");
  FarFieldData out = data;
  if (delta == 0.0) return out;
  std::mt19937_64 gen(seed);
  // Uniform on (−1, 1) from the top 53 bits; identical on every platform.
  auto uniform = [&gen] {
    for (;;) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
      const double v = 2.0 * u - 1.0;
      if (v > -1.0) return v;
    }
  };
  std::vector<cdouble> noise;
  noise.reserve(data.entries.size() * 9);
  double nn = 0.0;
  for (std::size_t e = 0; e < data.entries.size() * 9; ++e) {
    const double a = uniform();
    const double b = uniform();
    noise.emplace_back(a, b);
    nn += a * a + b * b;
  }
  const double scale = delta * data.norm() / std::sqrt(nn);
  std::size_t idx = 0;
  for (auto& m : out.entries)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) += scale * noise[idx++];
  return out;
}

}  // namespace mosm
