#pragma once

#include <vector>

#include "rpz/common.hpp"
#include "rpz/polycore.hpp"

namespace rpz {

// A_r(alpha, beta) = { r < |z| < 1/r, alpha <= arg z < beta } with
// r in (0,1) and 0 < beta - alpha <= 2 pi.
struct AnnularSector {
  double r = 0.5;
  double alpha = 0.0;
  double beta = kTwoPi;
};

void validate(const AnnularSector& s);

struct RegionSpec {
  enum class Kind { sector, disk, polygon, annulus_complement };
  Kind kind = Kind::disk;
  AnnularSector sector{};                // sector
  double center_theta = 0.0;             // disk center e^{i theta} on T
  double radius = 1.0;                   // disk radius in (0,2)
  std::vector<double> vertices_theta;    // polygon vertices on T, ccw
  double r = 0.5;                        // annulus complement parameter

  static RegionSpec make_sector(AnnularSector s);
  static RegionSpec make_disk(double center_theta, double radius);
  static RegionSpec make_polygon(std::vector<double> vertices_theta);
  static RegionSpec make_annulus_complement(double r);
};

void validate(const RegionSpec& region);

// tau_n of the sector: (roots inside) / n. Boundary conventions: arg = alpha
// included, beta excluded, radial bounds strict.
double sector_measure(const RootSet& roots, const AnnularSector& s);

// | tau_n(A_r(alpha,beta)) - (beta-alpha)/(2 pi) |
double sector_discrepancy(const RootSet& roots, const AnnularSector& s);

// n * tau_n(region). Disk open; polygon boundary counted inside; annulus
// complement takes |z| <= r or |z| >= 1/r.
int region_count(const RootSet& roots, const RegionSpec& region);

// Per-sample discrepancy bound for P with c_0 c_n != 0:
//   sqrt(2 pi / k) sqrt(log(||P||/sqrt|c_0 c_n|) / n)
//     + 2 m(P / sqrt|c_0 c_n|) / (n (1-r))
// evaluated with the certified upper end of the sup norm, so the result is
// a valid upper bound for every sector with this r.
double erdos_turan_rhs(const Polynomial& p, const RootSet& roots,
                       const AnnularSector& s, int grid_factor = 32);

}  // namespace rpz
