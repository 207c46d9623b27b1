#pragma once

#include <string>
#include <vector>

#include "oss/vec.hpp"

namespace oss {

/// Lossy dielectric wall material.
struct Material {
    double rel_permittivity = 6.0;  // eps_r, >= 1
    double conductivity = 0.136;    // [S/m], >= 0
    double thickness = 0.3;         // [m], > 0
};

struct Building {
    std::vector<Vec2> footprint;  // simple polygon, counter-clockwise
    double height = 0.0;          // [m]
    Material material;
};

struct Extent2 {
    Vec2 min;
    Vec2 max;
};

/// The propagation scenario: extruded building footprints over a ground plane
/// at z = 0. Immutable after load; safe to share across workers.
struct Scene {
    Extent2 extent;
    std::string grid_mode = "cells";  // default probe-grid convention
    Material ground_material;
    std::vector<Building> buildings;
};

enum class GridMode { nodes, cells };

/// Probe grid over a rectangular region at a fixed height.
struct RegionOfInterest {
    Vec2 center;
    double width_x = 0.0;
    double width_y = 0.0;
    double height = 1.5;   // [m] probe height
    double spacing = 5.0;  // [m]
    GridMode grid_mode = GridMode::cells;
};

/// Oriented planar rectangle: points are origin + a*edge_u + b*edge_v with
/// a, b in [0, 1]. Wall normals point away from the building interior.
struct Face {
    Vec3 origin;
    Vec3 edge_u;
    Vec3 edge_v;
    Vec3 normal;
    Material material;
    int building = -1;  // -1 for the ground face
    bool is_ground = false;
};

GridMode parse_grid_mode(const std::string& s);

Scene load_scene(const std::string& path);
Scene parse_scene(const std::string& json_text);
std::string serialize_scene(const Scene& scene);  // canonical form
void save_scene(const Scene& scene, const std::string& path);
/// Checks all scene invariants; normalizes clockwise footprints to CCW.
void validate_scene(Scene& scene);

std::size_t probe_count_axis(double width, double spacing, GridMode mode);

/// Row-major probe grid (y-major, x-minor), first point at the minimum corner
/// for node grids or half a cell inside it for cell grids.
std::vector<Vec3> probe_points(const RegionOfInterest& roi);

/// One outward-facing vertical rectangle per footprint edge, plus an optional
/// horizontal ground face covering the scene extent.
std::vector<Face> wall_faces(const Scene& scene, bool with_ground);

bool point_in_building(const Scene& scene, Vec3 p);

/// Rejects probes that fall inside a building (reported by probe index).
void validate_roi(const Scene& scene, const RegionOfInterest& roi);

}  // namespace oss
