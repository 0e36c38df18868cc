#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "curveflow/geometry.hpp"

namespace curveflow {

/// Closed polyline on a surface: vertex N-1 connects back to vertex 0 and the
/// closing vertex is not duplicated.
///
/// Construction validates N >= 8, |F(p_i)| <= 1e-8 on implicit surfaces and
/// strictly positive edges (InvalidCurve otherwise). The value is immutable;
/// every operation below returns a new curve.
class DiscreteCurve {
public:
    static constexpr std::size_t kMinVertices = 8;
    static constexpr double kSurfaceTolerance = 1e-8;

    DiscreteCurve(std::shared_ptr<const Surface> surface, std::vector<Vec3> vertices);

    const Surface& surface() const { return *surface_; }
    const std::shared_ptr<const Surface>& surface_ptr() const { return surface_; }
    const std::vector<Vec3>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec3& operator[](std::size_t i) const { return vertices_[i]; }

    /// Displacement from vertex i to vertex i+1 (shortest representative on the flat torus).
    Vec3 edge(std::size_t i) const;

private:
    std::shared_ptr<const Surface> surface_;
    std::vector<Vec3> vertices_;
};

/// Cyclic chord-length sum.
double length(const DiscreteCurve& curve);

/// Dual spacing h_i = (|p_i - p_{i-1}| + |p_{i+1} - p_i|) / 2.
std::vector<double> dual_spacing(const DiscreteCurve& curve);

/// Discrete geodesic curvature vectors
///   K_i = T_{p_i}((p_{i-1} - 2 p_i + p_{i+1}) / h_i^2),
/// tangent to the surface. Accurate on near-uniform curves; call after
/// resample_uniform.
std::vector<Vec3> curvature_vectors(const DiscreteCurve& curve);
std::vector<Vec3> curvature_vectors(const DiscreteCurve& curve, const std::vector<double>& spacing);

/// sum_i |K_i|^2 h_i.
double integral_k_squared(const DiscreteCurve& curve);
double integral_k_squared(const std::vector<Vec3>& curvature, const std::vector<double>& spacing);

/// Place `count` vertices at equal arclength along the polyline starting at
/// vertex 0, then project each onto the surface.
DiscreteCurve resample_uniform(const DiscreteCurve& curve, std::size_t count);

/// Embeddedness monitor threshold: min edge length / 4.
double embedding_epsilon(const DiscreteCurve& curve);

/// True iff two non-adjacent edges meet. Plane and flat torus use exact 2D
/// segment intersection (the torus over the 9 neighbouring copies of the
/// fundamental domain); implicit surfaces flag any pair of non-adjacent
/// edges closer than embedding_epsilon() in R^3.
bool self_intersects(const DiscreteCurve& curve);

/// Homotopy class (p, q) of a flat-torus curve from its accumulated
/// displacement. Zero for curves on other surfaces.
std::array<long, 2> winding_numbers(const DiscreteCurve& curve);

} // namespace curveflow
