#include "rpz/zerostats.hpp"

#include <algorithm>
#include <cmath>

#include "rpz/bounds.hpp"

namespace rpz {

void validate(const AnnularSector& s) {
  if (!(s.r > 0.0 && s.r < 1.0)) {
    throw config_error("sector r must lie in (0,1)");
  }
  if (!(s.alpha >= 0.0 && s.alpha < kTwoPi)) {
    throw config_error("sector alpha must lie in [0, 2pi)");
  }
  if (!(s.beta > s.alpha && s.beta <= s.alpha + kTwoPi)) {
    throw config_error("sector beta must lie in (alpha, alpha + 2pi]");
  }
}

RegionSpec RegionSpec::make_sector(AnnularSector s) {
  RegionSpec rg;
  rg.kind = Kind::sector;
  rg.sector = s;
  validate(rg);
  return rg;
}

RegionSpec RegionSpec::make_disk(double center_theta, double radius) {
  RegionSpec rg;
  rg.kind = Kind::disk;
  rg.center_theta = center_theta;
  rg.radius = radius;
  validate(rg);
  return rg;
}

RegionSpec RegionSpec::make_polygon(std::vector<double> vertices_theta) {
  RegionSpec rg;
  rg.kind = Kind::polygon;
  rg.vertices_theta = std::move(vertices_theta);
  validate(rg);
  return rg;
}

RegionSpec RegionSpec::make_annulus_complement(double r) {
  RegionSpec rg;
  rg.kind = Kind::annulus_complement;
  rg.r = r;
  validate(rg);
  return rg;
}

void validate(const RegionSpec& region) {
  switch (region.kind) {
    case RegionSpec::Kind::sector:
      validate(region.sector);
      return;
    case RegionSpec::Kind::disk:
      if (!(region.radius > 0.0 && region.radius < 2.0)) {
        throw config_error("disk radius must lie in (0,2)");
      }
      return;
    case RegionSpec::Kind::polygon: {
      if (region.vertices_theta.size() < 3) {
        throw config_error("polygon needs at least 3 vertices");
      }
      // counterclockwise check via the signed area
      double area2 = 0;
      const std::size_t n = region.vertices_theta.size();
      for (std::size_t i = 0; i < n; ++i) {
        const cplx a = std::polar(1.0, region.vertices_theta[i]);
        const cplx b = std::polar(1.0, region.vertices_theta[(i + 1) % n]);
        area2 += a.real() * b.imag() - b.real() * a.imag();
      }
      if (!(area2 > 0)) {
        throw config_error("polygon vertices must be listed counterclockwise");
      }
      return;
    }
    case RegionSpec::Kind::annulus_complement:
      if (!(region.r > 0.0 && region.r < 1.0)) {
        throw config_error("annulus complement r must lie in (0,1)");
      }
      return;
  }
}

namespace {

bool in_sector(cplx z, const AnnularSector& s) {
  const double a = std::abs(z);
  if (!(a > s.r && a < 1.0 / s.r)) return false;
  double theta = std::arg(z);
  if (theta < 0) theta += kTwoPi;
  // lift into [alpha, alpha + 2pi)
  if (theta < s.alpha) theta += kTwoPi;
  return theta < s.beta;
}

// Boundary counted inside; even-odd crossing for interior points.
bool in_polygon(cplx z, const std::vector<cplx>& verts) {
  const std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = verts[i];
    const cplx b = verts[(i + 1) % n];
    const cplx ab = b - a;
    const cplx az = z - a;
    const double cross = ab.real() * az.imag() - ab.imag() * az.real();
    if (cross == 0.0) {
      const double dot = ab.real() * az.real() + ab.imag() * az.imag();
      if (dot >= 0.0 && dot <= std::norm(ab)) return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = verts[i];
    const cplx b = verts[(i + 1) % n];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x_int =
          a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) /
                         (b.imag() - a.imag());
      if (z.real() < x_int) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

double sector_measure(const RootSet& roots, const AnnularSector& s) {
  validate(s);
  if (roots.roots.empty()) {
    throw config_error("sector_measure: empty root set");
  }
  long count = 0;
  for (const cplx& z : roots.roots) {
    if (in_sector(z, s)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(roots.roots.size());
}

double sector_discrepancy(const RootSet& roots, const AnnularSector& s) {
  return std::abs(sector_measure(roots, s) - (s.beta - s.alpha) / kTwoPi);
}

int region_count(const RootSet& roots, const RegionSpec& region) {
  validate(region);
  int count = 0;
  switch (region.kind) {
    case RegionSpec::Kind::sector:
      for (const cplx& z : roots.roots) {
        if (in_sector(z, region.sector)) ++count;
      }
      return count;
    case RegionSpec::Kind::disk: {
      const cplx w = std::polar(1.0, region.center_theta);
      for (const cplx& z : roots.roots) {
        if (std::abs(z - w) < region.radius) ++count;
      }
      return count;
    }
    case RegionSpec::Kind::polygon: {
      std::vector<cplx> verts;
      verts.reserve(region.vertices_theta.size());
      for (double t : region.vertices_theta) verts.push_back(std::polar(1.0, t));
      for (const cplx& z : roots.roots) {
        if (in_polygon(z, verts)) ++count;
      }
      return count;
    }
    case RegionSpec::Kind::annulus_complement:
      for (const cplx& z : roots.roots) {
        const double a = std::abs(z);
        if (a <= region.r || a >= 1.0 / region.r) ++count;
      }
      return count;
  }
  return count;
}

double erdos_turan_rhs(const Polynomial& p, const RootSet& roots,
                       const AnnularSector& s, int grid_factor) {
  validate(s);
  const double a0 = std::abs(p.constant());
  const double an = std::abs(p.leading());
  if (a0 < kUnderflowZero || an < kUnderflowZero) {
    throw degenerate_draw("erdos_turan_rhs: zero endpoint coefficient");
  }
  const int n = p.degree();
  const double half_log_ends = 0.5 * (std::log(a0) + std::log(an));
  const SupNormInterval sup = sup_norm_circle(p, grid_factor);
  // ||P|| >= sqrt|c_0 c_n| always; clamp guards rounding only
  const double log_ratio =
      std::max(0.0, std::log(sup.hi) - half_log_ends);
  const double m_scaled =
      std::max(0.0, mahler_measure(p, roots) - half_log_ends);
  const double first =
      std::sqrt(kTwoPi / catalan()) * std::sqrt(log_ratio / n);
  const double second = 2.0 / (n * (1.0 - s.r)) * m_scaled;
  return first + second;
}

}  // namespace rpz
