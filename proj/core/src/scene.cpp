// SPDX-License-Identifier: Apache-2.0
#include "isacsim/scene.hpp"

#include <cmath>
#include <string>

#include "isacsim/errors.hpp"

namespace isacsim {

arma::cx_vec upa_steering(double theta, double phi, const ArrayGeometry& geom) {
  if (phi < -M_PI / 2 - 1e-12 || phi > M_PI / 2 + 1e-12) {
    throw GeometryError("upa_steering: elevation outside [-pi/2, pi/2]: " + std::to_string(phi));
  }
  const std::complex<double> jpi(0.0, -M_PI);
  arma::cx_vec a_v(geom.m_v);
  for (int v = 0; v < geom.m_v; ++v) {
    a_v(v) = std::exp(jpi * (static_cast<double>(v) * std::sin(phi)));
  }
  arma::cx_vec a_h(geom.m_h);
  const double sx = std::sin(theta) * std::cos(phi);
  for (int h = 0; h < geom.m_h; ++h) {
    a_h(h) = std::exp(jpi * (static_cast<double>(h) * sx));
  }
  return arma::kron(a_v, a_h);
}

std::vector<std::pair<double, double>> ssb_angle_grid(const ArrayGeometry& geom,
                                                      bool exclude_endfire) {
  const int m = geom.size();
  const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (root * root != m) {
    throw ConfigError("ssb_angle_grid: array size " + std::to_string(m) + " is not a square");
  }
  const int half = root / 2;

  std::vector<int> az_idx;
  az_idx.push_back(0);
  for (int i = 1; i <= half; ++i) {
    if (exclude_endfire && 2 * i == root) continue;
    az_idx.push_back(i);
    az_idx.push_back(-i);
  }

  std::vector<std::pair<double, double>> grid;
  for (int ip = 0; ip >= -half; --ip) {
    const double phi = std::asin(2.0 * ip / root);
    for (int i : az_idx) {
      grid.emplace_back(std::asin(2.0 * i / root), phi);
    }
  }
  return grid;
}

SsbCodebook build_codebook(const ArrayGeometry& geom, bool exclude_endfire) {
  SsbCodebook book;
  book.block_angles = ssb_angle_grid(geom, exclude_endfire);
  book.block_count = static_cast<int>(book.block_angles.size());
  const int m = geom.size();
  book.columns.set_size(m, 4 * book.block_count);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int blk = 0; blk < book.block_count; ++blk) {
    const arma::cx_vec col =
        scale * upa_steering(book.block_angles[blk].first, book.block_angles[blk].second, geom);
    for (int rep = 0; rep < 4; ++rep) {
      book.columns.col(4 * blk + rep) = col;
    }
  }
  return book;
}

std::vector<ApNode> hex_layout(double inner_radius, int illuminator_count, double ap_height) {
  if (inner_radius <= 0.0) throw ConfigError("hex_layout: inner radius must be positive");
  if (illuminator_count < 1) throw ConfigError("hex_layout: need at least one illuminator");
  if (illuminator_count > 6) throw ConfigError("hex_layout: at most 6 illuminators supported");

  // Ring of cell centers 2r from the receiver; first three match the paper's
  // boresight description (AP_1, AP_2 west of the receiver, AP_3 east).
  static const double ring_deg[6] = {180.0, 240.0, 0.0, 120.0, 300.0, 60.0};

  std::vector<ApNode> nodes;
  ApNode rx;
  rx.position = {0.0, 0.0, ap_height};
  rx.boresight_sign = -1;
  rx.role = ApNode::Role::kReceiver;
  rx.index = 0;
  nodes.push_back(rx);

  for (int j = 0; j < illuminator_count; ++j) {
    const double ang = ring_deg[j] * M_PI / 180.0;
    ApNode ap;
    ap.position = {2.0 * inner_radius * std::cos(ang), 2.0 * inner_radius * std::sin(ang),
                   ap_height};
    ap.boresight_sign = ap.position(0) <= 0.0 ? +1 : -1;
    ap.role = ApNode::Role::kIlluminator;
    ap.index = j + 1;
    nodes.push_back(ap);
  }
  return nodes;
}

VoxelGrid make_voxel_grid(const Vec3& center, const Vec3& dims, double spacing) {
  if (spacing <= 0.0) throw ConfigError("voxel grid: spacing must be positive");
  for (int k = 0; k < 3; ++k) {
    if (dims(k) <= 0.0) throw ConfigError("voxel grid: dimensions must be positive");
  }
  int n[3];
  for (int k = 0; k < 3; ++k) {
    n[k] = std::max(1, static_cast<int>(std::lround(dims(k) / spacing)));
  }
  VoxelGrid grid;
  grid.spacing = spacing;
  grid.centers.reserve(static_cast<std::size_t>(n[0]) * n[1] * n[2]);
  // x-fastest lattice order; cells of edge `spacing` centered on the box.
  for (int kz = 0; kz < n[2]; ++kz) {
    for (int ky = 0; ky < n[1]; ++ky) {
      for (int kx = 0; kx < n[0]; ++kx) {
        Vec3 p = center;
        p(0) += (kx + 0.5) * spacing - 0.5 * n[0] * spacing;
        p(1) += (ky + 0.5) * spacing - 0.5 * n[1] * spacing;
        p(2) += (kz + 0.5) * spacing - 0.5 * n[2] * spacing;
        if (p(2) < 0.0) throw ConfigError("voxel grid: voxel center below ground");
        grid.centers.push_back(p);
      }
    }
  }
  return grid;
}

BistaticAngles bistatic_angles(const Vec3& ap, const Vec3& voxel, const Vec3& rx) {
  const Vec3 dep = voxel - ap;
  const Vec3 arr = rx - voxel;
  const double l_dep = arma::norm(dep);
  const double l_arr = arma::norm(arr);
  if (l_dep < 1e-9 || l_arr < 1e-9) {
    throw GeometryError("bistatic_angles: voxel coincides with an AP");
  }
  BistaticAngles out;
  out.theta_dep = std::atan2(dep(1), dep(0));
  out.phi_dep = std::asin(dep(2) / l_dep);
  out.theta_arr = std::atan2(arr(1), arr(0));
  out.phi_arr = std::asin(arr(2) / l_arr);
  out.range_dep = l_dep;
  out.range_arr = l_arr;
  return out;
}

SymbolSchedule make_symbol_schedule(const VoxelGrid& grid, const SsbCodebook& book) {
  if (grid.count() >= book.symbol_count()) {
    throw ConfigError("symbol schedule: sweep cannot cover volume within one burst set (Q=" +
                      std::to_string(grid.count()) + " >= R=" + std::to_string(book.symbol_count()) +
                      ")");
  }
  SymbolSchedule sched;
  sched.entries.reserve(grid.count());
  for (int q = 0; q < grid.count(); ++q) {
    sched.entries.push_back({q, q});
  }
  return sched;
}

arma::cx_vec Scene::ssb_precoder_conj(int q) const {
  return arma::conj(codebook.columns.col(schedule.entries.at(q).column));
}

}  // namespace isacsim
