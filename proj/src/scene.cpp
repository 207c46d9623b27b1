#include "oss/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oss/errors.hpp"

namespace oss {
namespace {

using json = nlohmann::ordered_json;

constexpr double kGeomEps = 1e-9;

double polygon_signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        a += cross2(poly[j], poly[i]);
    }
    return 0.5 * a;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double d1 = cross2(q2 - q1, p1 - q1);
    const double d2 = cross2(q2 - q1, p2 - q1);
    const double d3 = cross2(p2 - p1, q1 - p1);
    const double d4 = cross2(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return false;
}

bool polygon_self_intersects(const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a1 = poly[i];
        const Vec2 a2 = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip edges sharing a vertex
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(a1, a2, poly[j], poly[(j + 1) % n])) return true;
        }
    }
    return false;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2 a = poly[j];
        const Vec2 b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xc = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

bool polygons_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            if (segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])) return true;
        }
    }
    // containment without edge crossings
    if (point_in_polygon(a[0], b) || point_in_polygon(b[0], a)) return true;
    return false;
}

Material parse_material(const json& j) {
    Material m;
    m.rel_permittivity = j.at("eps_r").get<double>();
    m.conductivity = j.at("sigma").get<double>();
    m.thickness = j.at("thickness").get<double>();
    return m;
}

json material_json(const Material& m) {
    json j;
    j["eps_r"] = m.rel_permittivity;
    j["sigma"] = m.conductivity;
    j["thickness"] = m.thickness;
    return j;
}

void check_material(const Material& m, const std::string& where) {
    if (!(m.rel_permittivity >= 1.0)) {
        throw ValidationError(where + ": rel_permittivity must be >= 1, got " +
                              std::to_string(m.rel_permittivity));
    }
    if (!(m.conductivity >= 0.0)) {
        throw ValidationError(where + ": conductivity must be >= 0");
    }
    if (!(m.thickness > 0.0)) {
        throw ValidationError(where + ": thickness must be > 0");
    }
}

}  // namespace

GridMode parse_grid_mode(const std::string& s) {
    if (s == "nodes") return GridMode::nodes;
    if (s == "cells") return GridMode::cells;
    throw FormatError("grid_mode must be 'nodes' or 'cells', got '" + s + "'");
}

Scene parse_scene(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("scene parse failure: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "oss-scene/1") {
            throw FormatError("unsupported scene format tag");
        }
        Scene scene;
        const auto& ext = j.at("extent");
        scene.extent.min = {ext.at("min").at(0).get<double>(), ext.at("min").at(1).get<double>()};
        scene.extent.max = {ext.at("max").at(0).get<double>(), ext.at("max").at(1).get<double>()};
        scene.grid_mode = j.at("grid_mode").get<std::string>();
        parse_grid_mode(scene.grid_mode);  // value check
        if (j.contains("ground_material")) {
            scene.ground_material = parse_material(j.at("ground_material"));
        }
        for (const auto& bj : j.at("buildings")) {
            Building b;
            for (const auto& v : bj.at("footprint")) {
                b.footprint.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
            }
            b.height = bj.at("height").get<double>();
            b.material = parse_material(bj.at("material"));
            scene.buildings.push_back(std::move(b));
        }
        validate_scene(scene);
        return scene;
    } catch (const json::exception& e) {
        throw FormatError(std::string("scene parse failure: ") + e.what());
    }
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open scene file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str());
}

std::string serialize_scene(const Scene& scene) {
    json j;
    j["format"] = "oss-scene/1";
    j["extent"]["min"] = {scene.extent.min.x, scene.extent.min.y};
    j["extent"]["max"] = {scene.extent.max.x, scene.extent.max.y};
    j["grid_mode"] = scene.grid_mode;
    j["ground_material"] = material_json(scene.ground_material);
    j["buildings"] = json::array();
    for (const auto& b : scene.buildings) {
        json bj;
        bj["footprint"] = json::array();
        for (const auto& v : b.footprint) bj["footprint"].push_back({v.x, v.y});
        bj["height"] = b.height;
        bj["material"] = material_json(b.material);
        j["buildings"].push_back(std::move(bj));
    }
    return j.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write scene file: " + path);
    out << serialize_scene(scene);
}

void validate_scene(Scene& scene) {
    if (!(scene.extent.max.x > scene.extent.min.x && scene.extent.max.y > scene.extent.min.y)) {
        throw ValidationError("scene extent is empty");
    }
    check_material(scene.ground_material, "ground material");
    for (std::size_t i = 0; i < scene.buildings.size(); ++i) {
        Building& b = scene.buildings[i];
        const std::string where = "building " + std::to_string(i);
        if (b.footprint.size() < 3) {
            throw ValidationError(where + ": footprint needs >= 3 vertices");
        }
        if (!(b.height > 0.0)) {
            throw ValidationError(where + ": height must be > 0");
        }
        check_material(b.material, where);
        if (polygon_self_intersects(b.footprint)) {
            throw ValidationError(where + ": footprint polygon self-intersects");
        }
        const double area = polygon_signed_area(b.footprint);
        if (std::abs(area) < kGeomEps) {
            throw ValidationError(where + ": footprint is degenerate");
        }
        if (area < 0.0) {
            std::reverse(b.footprint.begin(), b.footprint.end());  // normalize to CCW
        }
        for (const auto& v : b.footprint) {
            if (v.x < scene.extent.min.x - kGeomEps || v.x > scene.extent.max.x + kGeomEps ||
                v.y < scene.extent.min.y - kGeomEps || v.y > scene.extent.max.y + kGeomEps) {
                throw ValidationError(where + ": footprint outside scene extent");
            }
        }
    }
    for (std::size_t i = 0; i < scene.buildings.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.buildings.size(); ++j) {
            if (polygons_overlap(scene.buildings[i].footprint, scene.buildings[j].footprint)) {
                throw ValidationError("buildings " + std::to_string(i) + " and " +
                                      std::to_string(j) + " overlap");
            }
        }
    }
}

std::size_t probe_count_axis(double width, double spacing, GridMode mode) {
    if (mode == GridMode::nodes) {
        return static_cast<std::size_t>(std::floor(width / spacing + kGeomEps)) + 1;
    }
    const auto cells = static_cast<std::size_t>(std::llround(width / spacing));
    return std::max<std::size_t>(cells, 1);
}

std::vector<Vec3> probe_points(const RegionOfInterest& roi) {
    if (!(roi.width_x > 0.0 && roi.width_y > 0.0 && roi.spacing > 0.0)) {
        throw ValidationError("roi widths and spacing must be > 0");
    }
    const std::size_t nx = probe_count_axis(roi.width_x, roi.spacing, roi.grid_mode);
    const std::size_t ny = probe_count_axis(roi.width_y, roi.spacing, roi.grid_mode);
    const double offset = (roi.grid_mode == GridMode::cells) ? 0.5 * roi.spacing : 0.0;
    const double x0 = roi.center.x - 0.5 * roi.width_x + offset;
    const double y0 = roi.center.y - 0.5 * roi.width_y + offset;
    std::vector<Vec3> points;
    points.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            points.push_back({x0 + static_cast<double>(ix) * roi.spacing,
                              y0 + static_cast<double>(iy) * roi.spacing, roi.height});
        }
    }
    return points;
}

std::vector<Face> wall_faces(const Scene& scene, bool with_ground) {
    std::vector<Face> faces;
    for (std::size_t bi = 0; bi < scene.buildings.size(); ++bi) {
        const Building& b = scene.buildings[bi];
        const std::size_t n = b.footprint.size();
        for (std::size_t e = 0; e < n; ++e) {
            const Vec2 v0 = b.footprint[e];
            const Vec2 v1 = b.footprint[(e + 1) % n];
            Face f;
            f.origin = {v0.x, v0.y, 0.0};
            f.edge_u = {v1.x - v0.x, v1.y - v0.y, 0.0};
            f.edge_v = {0.0, 0.0, b.height};
            // CCW footprint: interior lies left of the edge, outward normal right
            const Vec2 d = v1 - v0;
            const double len = std::sqrt(dot2(d, d));
            f.normal = {d.y / len, -d.x / len, 0.0};
            f.material = b.material;
            f.building = static_cast<int>(bi);
            faces.push_back(f);
        }
    }
    if (with_ground) {
        Face g;
        g.origin = {scene.extent.min.x, scene.extent.min.y, 0.0};
        g.edge_u = {scene.extent.max.x - scene.extent.min.x, 0.0, 0.0};
        g.edge_v = {0.0, scene.extent.max.y - scene.extent.min.y, 0.0};
        g.normal = {0.0, 0.0, 1.0};
        g.material = scene.ground_material;
        g.is_ground = true;
        faces.push_back(g);
    }
    return faces;
}

bool point_in_building(const Scene& scene, Vec3 p) {
    for (const auto& b : scene.buildings) {
        if (p.z >= 0.0 && p.z <= b.height && point_in_polygon({p.x, p.y}, b.footprint)) {
            return true;
        }
    }
    return false;
}

void validate_roi(const Scene& scene, const RegionOfInterest& roi) {
    const auto points = probe_points(roi);
    for (std::size_t m = 0; m < points.size(); ++m) {
        if (point_in_building(scene, points[m])) {
            throw ValidationError("roi probe " + std::to_string(m) +
                                  " lies inside a building footprint");
        }
    }
}

}  // namespace oss
