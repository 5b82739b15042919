// Radial solar-type coefficient profiles: CSV ingestion and monotone cubic interpolation.

#include "ghdg/coeffs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace ghdg {

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& x) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  auto res = std::from_chars(b, s.data() + s.size(), x);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(x);
}

// Jet of f(|x|) given {f, f', f''} at |x|; f'(0) = 0 is assumed at the origin.
Jet radial_jet(const Point2& x, const std::array<double, 3>& f) {
  const double r = x.norm();
  Jet j(f[0]);
  if (r < 1e-12) {
    j.h = f[2] * Eigen::Matrix2d::Identity();
    return j;
  }
  const Eigen::Vector2d e = x / r;
  j.g = f[1] * e;
  j.h = f[2] * e * e.transpose() + (f[1] / r) * (Eigen::Matrix2d::Identity() - e * e.transpose());
  return j;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, bool zero_left_slope)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("MonotoneCubic: abscissae not strictly increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (sgn(delta[i - 1]) * sgn(delta[i]) <= 0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (sgn(d) != sgn(d0)) d = 0.0;
      else if (sgn(d0) != sgn(d1) && std::abs(d) > std::abs(3.0 * d0)) d = 3.0 * d0;
      return d;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
  if (zero_left_slope) d_[0] = 0.0;
}

std::array<double, 3> MonotoneCubic::eval(double x) const {
  const std::size_t n = x_.size();
  if (x <= x_.front()) return {y_.front() + d_.front() * (x - x_.front()), d_.front(), 0.0};
  if (x >= x_.back()) return {y_.back() + d_.back() * (x - x_.back()), d_.back(), 0.0};
  std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1;
  i = std::min(i, n - 2);
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double y0 = y_[i], y1 = y_[i + 1], m0 = h * d_[i], m1 = h * d_[i + 1];
  const double f = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
                   (t3 - t2) * m1;
  const double f1 = (6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 +
                    (3 * t2 - 2 * t) * m1;
  const double f2 = (12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1;
  return {f, f1 / h, f2 / (h * h)};
}

SolarModel solar_load(const std::string& path) {
  using K = SolarLoadError::Kind;
  std::ifstream is(path);
  if (!is) throw SolarLoadError(K::Missing, "solar model: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw SolarLoadError(K::Malformed, "solar model: empty file");
  const std::vector<std::string> header = split_csv(line);
  int ir = -1, ic = -1, id = -1, ip = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h = header[i];
    std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
    if (h == "radius") ir = int(i);
    else if (h == "soundspeed") ic = int(i);
    else if (h == "density") id = int(i);
    else if (h == "pressure") ip = int(i);
  }
  if (ir < 0 || ic < 0 || id < 0)
    throw SolarLoadError(K::Malformed, "solar model: header must name radius, soundspeed, density");
  SolarModel m;
  m.has_pressure = ip >= 0;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size())
      throw SolarLoadError(K::Malformed, "solar model: row " + std::to_string(row) + " has " +
                                             std::to_string(cells.size()) + " fields, expected " +
                                             std::to_string(header.size()));
    double r, c, d, p = 0.0;
    if (!parse_number(cells[ir], r) || !parse_number(cells[ic], c) || !parse_number(cells[id], d) ||
        (ip >= 0 && !parse_number(cells[ip], p)))
      throw SolarLoadError(K::Malformed, "solar model: non-numeric value in row " + std::to_string(row));
    if (!m.radius.empty() && !(r > m.radius.back()))
      throw SolarLoadError(K::NonMonotone,
                           "solar model: radius not strictly increasing at row " + std::to_string(row));
    if (r < 0.0)
      throw SolarLoadError(K::NonMonotone, "solar model: negative radius at row " + std::to_string(row));
    if (!(c > 0.0) || !(d > 0.0) || (ip >= 0 && !(p > 0.0)))
      throw SolarLoadError(K::NonPositive, "solar model: nonpositive sample in row " + std::to_string(row));
    m.radius.push_back(r);
    m.cs.push_back(c);
    m.rho.push_back(d);
    if (ip >= 0) m.p.push_back(p);
  }
  if (m.radius.size() < 3) throw SolarLoadError(K::Malformed, "solar model: need at least 3 samples");
  return m;
}

SolarModel synthetic_solar_model(int samples) {
  // Smooth stand-in with solar-like trends: density falls by ~9 orders of
  // magnitude toward the surface, sound speed by ~2.
  const double R = 1.0007126;
  SolarModel m;
  m.has_pressure = true;
  for (int i = 0; i < samples; ++i) {
    const double s = double(i) / (samples - 1);
    const double rho = 150.0 * std::exp(-10.5 * s * s) * std::pow(1.0 - 0.999 * s * s, 3) + 1e-7;
    const double cs = 5e-4 * (1.0 - 0.97 * s * s) + 1e-5;
    m.radius.push_back(R * s);
    m.rho.push_back(rho);
    m.cs.push_back(cs);
    m.p.push_back(rho * cs * cs / (5.0 / 3.0));
  }
  return m;
}

void write_solar_csv(const std::string& path, const SolarModel& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "radius,soundspeed,density" << (m.has_pressure ? ",pressure" : "") << '\n';
  for (std::size_t i = 0; i < m.radius.size(); ++i) {
    os << m.radius[i] << ',' << m.cs[i] << ',' << m.rho[i];
    if (m.has_pressure) os << ',' << m.p[i];
    os << '\n';
  }
}

CoefficientSet solar_coefficients(const SolarModel& m) {
  const double R = m.radius.back();
  std::vector<double> s(m.radius.size());
  std::transform(m.radius.begin(), m.radius.end(), s.begin(), [R](double r) { return r / R; });
  std::vector<double> cs2(m.cs.size());
  std::transform(m.cs.begin(), m.cs.end(), cs2.begin(), [](double c) { return c * c; });
  std::vector<double> p = m.p;
  const double gamma1 = 5.0 / 3.0;
  if (!m.has_pressure) {
    p.resize(m.rho.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = m.rho[i] * cs2[i] / gamma1;
  }
  const bool at_origin = s.front() == 0.0;
  const auto rho_i = std::make_shared<MonotoneCubic>(s, m.rho, at_origin);
  const auto cs2_i = std::make_shared<MonotoneCubic>(s, cs2, at_origin);
  const auto p_i = std::make_shared<MonotoneCubic>(s, p, at_origin);

  CoefficientSet c;
  c.name = "solar";
  c.rho = {[rho_i](const Point2& x) { return radial_jet(x, rho_i->eval(x.norm())); }};
  c.cs2 = {[cs2_i](const Point2& x) { return radial_jet(x, cs2_i->eval(x.norm())); }};
  c.p = {[p_i](const Point2& x) { return radial_jet(x, p_i->eval(x.norm())); }};
  c.phi = ScalarField::constant(0.0);
  c.omega = 0.003 * 2.0 * M_PI * R;
  c.gamma = ScalarField::constant(c.omega / 100.0);
  c.rot = 0.0;
  std::ostringstream os;
  os.precision(17);
  os << R;
  c.metadata["R_sun"] = os.str();
  c.metadata["radius_normalization"] = "r / R_sun";
  c.metadata["pressure"] = m.has_pressure ? "from data" : "rho c^2 / 1.6666666666666667";
  os.str("");
  os << c.omega / 100.0;
  c.metadata["gamma"] = os.str();
  return c;
}

}  // namespace ghdg
