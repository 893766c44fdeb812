// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <utility>
#include <vector>

namespace isacsim {

using Vec3 = arma::vec3;

/// Square uniform planar array, half-wavelength spacing.
struct ArrayGeometry {
  int m_v = 12;  // antennas per column
  int m_h = 12;  // antennas per row

  int size() const { return m_v * m_h; }
  static ArrayGeometry square(int side) { return {side, side}; }
};

struct ApNode {
  enum class Role { kIlluminator, kReceiver };
  Vec3 position;
  int boresight_sign = +1;  // +1 toward +x, -1 toward -x (metadata only)
  Role role = Role::kIlluminator;
  int index = 0;  // 1-based illuminator index; 0 for the receiver
};

struct VoxelGrid {
  std::vector<Vec3> centers;
  double spacing = 0.0;

  int count() const { return static_cast<int>(centers.size()); }
};

/// Normalized SSB steering matrix F: each burst-set block is one beam
/// repeated over 4 symbols; columns have unit norm.
struct SsbCodebook {
  arma::cx_mat columns;                                 // M x R
  int block_count = 0;                                  // R'
  std::vector<std::pair<double, double>> block_angles;  // (theta, phi) per block

  int symbol_count() const { return static_cast<int>(columns.n_cols); }  // R = 4R'
};

/// Symbol q carries the sensing beam of voxel `voxel` and SSB column `column`.
struct SymbolSchedule {
  struct Entry {
    int voxel;
    int column;
  };
  std::vector<Entry> entries;
};

/// Departure/arrival angles and path lengths of one bistatic hop pair.
struct BistaticAngles {
  double theta_dep;  // azimuth AP -> voxel
  double phi_dep;    // elevation AP -> voxel
  double theta_arr;  // azimuth voxel -> receiver
  double phi_arr;    // elevation voxel -> receiver
  double range_dep;  // |voxel - AP|
  double range_arr;  // |voxel - receiver|
};

/// a(theta, phi) = a_V(phi, 0) (x) a_H(theta, phi), unit-modulus entries.
arma::cx_vec upa_steering(double theta, double phi, const ArrayGeometry& geom);

/// SSB beam directions: theta = arcsin(2i/sqrt(M)), i in {0, +-1, ..., +-floor(sqrt(M)/2)};
/// phi = arcsin(2i'/sqrt(M)), i' in {0, -1, ..., -floor(sqrt(M)/2)}.
/// Elevation-major Cartesian product; azimuths enumerated 0, +1, -1, +2, -2, ...
/// `exclude_endfire` drops the arcsin(+-1) azimuth endpoints.
std::vector<std::pair<double, double>> ssb_angle_grid(const ArrayGeometry& geom,
                                                      bool exclude_endfire = false);

SsbCodebook build_codebook(const ArrayGeometry& geom, bool exclude_endfire = false);

/// Hexagonal-grid placement: receiver at the origin, adjacent cell centers
/// 2r apart, AP_1/AP_2 west facing +x, AP_3 east facing -x.
std::vector<ApNode> hex_layout(double inner_radius, int illuminator_count, double ap_height);

/// Regular lattice of pitch d filling the box; per-axis count max(1, round(L/d)),
/// centers at cell midpoints. Ordering is x-fastest.
VoxelGrid make_voxel_grid(const Vec3& center, const Vec3& dims, double spacing);

BistaticAngles bistatic_angles(const Vec3& ap, const Vec3& voxel, const Vec3& rx);

SymbolSchedule make_symbol_schedule(const VoxelGrid& grid, const SsbCodebook& book);

/// Immutable after construction; safe to share read-only across workers.
struct Scene {
  ArrayGeometry geom;
  std::vector<ApNode> illuminators;
  ApNode receiver;
  VoxelGrid grid;
  SsbCodebook codebook;
  SymbolSchedule schedule;
  double carrier_hz = 15e9;
  bool non_paper_layout = false;  // set when J != 3

  int illuminator_count() const { return static_cast<int>(illuminators.size()); }

  /// Conjugated SSB precoder f*_q for the symbol serving voxel q.
  arma::cx_vec ssb_precoder_conj(int q) const;
};

}  // namespace isacsim
