#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "marching_cubes_table.hpp"
#include "segrad/features.hpp"

namespace segrad {

namespace {

// Cube corners as (dx, dy, dz) offsets, in table order.
constexpr std::array<std::array<int, 3>, 8> kCorner{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

constexpr std::array<std::array<int, 2>, 12> kEdge{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

using Point = std::array<double, 3>;

Point cross(const Point& a, const Point& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

MeshMeasures mesh_measures(const LabelMask& mask) {
    auto box = bounding_box(mask);
    if (!box) throw Error(ErrorKind::EmptyRoi, "shape: mask is empty");
    const Grid3& g = mask.grid();

    // Pad the bounding box by one empty voxel per side so the surface closes.
    const Index3 n{box->hi[0] - box->lo[0] + 3, box->hi[1] - box->lo[1] + 3, box->hi[2] - box->lo[2] + 3};
    auto inside = [&](std::size_t i, std::size_t j, std::size_t k) -> bool {
        if (i == 0 || j == 0 || k == 0 || i == n[0] - 1 || j == n[1] - 1 || k == n[2] - 1) return false;
        return mask.at(box->lo[0] + i - 1, box->lo[1] + j - 1, box->lo[2] + k - 1) != 0;
    };
    // Coordinates relative to the padded box center keep the signed-volume sum well conditioned.
    const Point center{0.5 * static_cast<double>(n[0] - 1), 0.5 * static_cast<double>(n[1] - 1),
                       0.5 * static_cast<double>(n[2] - 1)};

    MeshMeasures out;
    double signed_volume = 0.0;
    std::array<Point, 12> edge_point{};
    for (std::size_t k = 0; k + 1 < n[2]; ++k) {
        for (std::size_t j = 0; j + 1 < n[1]; ++j) {
            for (std::size_t i = 0; i + 1 < n[0]; ++i) {
                unsigned config = 0;
                for (unsigned c = 0; c < 8; ++c) {
                    // Table convention: bit set when the corner is below the iso-level.
                    if (!inside(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2])) config |= 1u << c;
                }
                if (config == 0 || config == 255) continue;
                const auto& tris = detail::kTriangleTable[config];
                for (int e = 0; e < 12; ++e) {
                    const auto& a = kCorner[kEdge[e][0]];
                    const auto& b = kCorner[kEdge[e][1]];
                    // Binary field at iso 0.5: every crossing sits at the edge midpoint.
                    edge_point[e] = {
                        (static_cast<double>(i) + 0.5 * (a[0] + b[0]) - center[0]) * g.spacing[0],
                        (static_cast<double>(j) + 0.5 * (a[1] + b[1]) - center[1]) * g.spacing[1],
                        (static_cast<double>(k) + 0.5 * (a[2] + b[2]) - center[2]) * g.spacing[2],
                    };
                }
                for (int t = 0; tris[t] != -1; t += 3) {
                    const Point& p0 = edge_point[tris[t]];
                    const Point& p1 = edge_point[tris[t + 1]];
                    const Point& p2 = edge_point[tris[t + 2]];
                    const Point e1{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
                    const Point e2{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
                    const Point nrm = cross(e1, e2);
                    out.surface_area += 0.5 * std::sqrt(dot(nrm, nrm));
                    signed_volume += dot(p0, cross(p1, p2)) / 6.0;
                    ++out.triangles;
                }
            }
        }
    }
    out.volume = std::abs(signed_volume);
    return out;
}

std::array<double, 3> principal_moments(const LabelMask& mask) {
    const Grid3& g = mask.grid();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    std::size_t count = 0;
    for (std::size_t idx = 0; idx < mask.size(); ++idx) {
        if (!mask[idx]) continue;
        Index3 p = g.unravel(idx);
        mean += Eigen::Vector3d(static_cast<double>(p[0]) * g.spacing[0], static_cast<double>(p[1]) * g.spacing[1],
                                static_cast<double>(p[2]) * g.spacing[2]);
        ++count;
    }
    if (count == 0) throw Error(ErrorKind::EmptyRoi, "shape: mask is empty");
    mean /= static_cast<double>(count);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t idx = 0; idx < mask.size(); ++idx) {
        if (!mask[idx]) continue;
        Index3 p = g.unravel(idx);
        Eigen::Vector3d d(static_cast<double>(p[0]) * g.spacing[0], static_cast<double>(p[1]) * g.spacing[1],
                          static_cast<double>(p[2]) * g.spacing[2]);
        d -= mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(count);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
    Eigen::Vector3d ev = solver.eigenvalues();  // ascending
    std::array<double, 3> out{ev[2], ev[1], ev[0]};
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

NamedValues shape_features(const LabelMask& mask) {
    const std::size_t voxels = count_inside(mask);
    if (voxels == 0) throw Error(ErrorKind::EmptyRoi, "shape: mask is empty");

    const MeshMeasures mesh = mesh_measures(mask);
    const auto lambda = principal_moments(mask);

    NamedValues out;
    out.emplace_back("VoxelVolume", FeatureValue{static_cast<double>(voxels) * mask.grid().voxel_volume()});
    out.emplace_back("MeshVolume", FeatureValue{mesh.volume});
    out.emplace_back("SurfaceArea", FeatureValue{mesh.surface_area});
    const double sphericity =
        std::cbrt(std::numbers::pi) * std::pow(6.0 * mesh.volume, 2.0 / 3.0) / mesh.surface_area;
    out.emplace_back("Sphericity", FeatureValue{sphericity});

    if (lambda[0] > 0.0) {
        out.emplace_back("Elongation", FeatureValue{std::sqrt(lambda[1] / lambda[0])});
        out.emplace_back("Flatness", FeatureValue{std::sqrt(lambda[2] / lambda[0])});
    } else {
        out.emplace_back("Elongation", FeatureValue{0.0, true});
        out.emplace_back("Flatness", FeatureValue{0.0, true});
    }
    return out;
}

}  // namespace segrad
