#pragma once

#include <cstdint>

#include "wedge/core/raster.hpp"
#include "wedge/core/transform.hpp"

namespace wedge::pose {

/// Three quarter-faces of a cube meeting at the origin (the faces x = 0,
/// y = 0 and z = 0 of the octant x, y, z >= 0), each `edge_mm` square.
/// One point per `spacing_mm` cell, jittered uniformly inside the cell: a
/// regular lattice aliases against itself under ICP and creates false
/// minima.
PointCloud cube_corner_model(double edge_mm = 20.0, double spacing_mm = 0.5, std::uint64_t seed = 1);

/// Pose pressing the corner into the gel: the cube diagonal points straight
/// away from the gel and the vertex sits at (x, y) mm with `indentation_mm`.
RigidTransform cube_corner_rest_pose(double x_mm, double y_mm, double indentation_mm);

/// Gel indentation made by the cube corner under `pose` (model -> sensor):
/// max(0, deepest cube point above each pixel). Faces are treated as
/// unbounded, which holds while the contact patch is smaller than the cube.
DepthMap cube_corner_depth(const RigidTransform& pose, int height, int width, double ppmm);

}  // namespace wedge::pose
