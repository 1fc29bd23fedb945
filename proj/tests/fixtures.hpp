#pragma once

#include "mosm/material.hpp"

namespace mosm::test {

// Diagonal bianisotropic medium of the L-shape experiment, ζ = −ξ.
inline VoxelMaterial experiment_material() {
  VoxelMaterial m;
  m.eps_r = CMat3::Zero();
  m.eps_r.diagonal() << cdouble(0.8, 0.5), cdouble(0.7, 1.0), cdouble(0.6, 0.4);
  m.inv_mu_r = CMat3::Zero();
  m.inv_mu_r.diagonal() << cdouble(0.2, -0.3), cdouble(0.6, -0.4), cdouble(0.9, -0.7);
  m.xi = CMat3::Zero();
  m.xi.diagonal() << 0.03, 0.02, 0.01;
  m.zeta = -m.xi;
  return m;
}

// L-shape whose faces fall on voxel boundaries of both 32³ and 48³ grids of [−0.65, 0.65]³.
inline Shape experiment_lshape() {
  return Shape::lshape(Vec3(-0.56875, -0.24375, -0.56875), Vec3(1.1375, 0.4875, 1.1375), 0.325);
}

inline MaterialModel experiment_model(int n) {
  return MaterialModel::from_shapes(VolumeGrid::cube(Vec3::Constant(-0.65), 1.3, n),
                                    {{experiment_lshape(), experiment_material()}});
}

}  // namespace mosm::test
