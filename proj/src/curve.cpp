#include "curveflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "curveflow/errors.hpp"

namespace curveflow {

DiscreteCurve::DiscreteCurve(std::shared_ptr<const Surface> surface, std::vector<Vec3> vertices)
    : surface_(std::move(surface)), vertices_(std::move(vertices))
{
    if (!surface_)
        throw InvalidCurve("curve needs a surface");
    if (vertices_.size() < kMinVertices)
        throw InvalidCurve("curve needs at least 8 vertices, got " + std::to_string(vertices_.size()));
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertices_[i].allFinite())
            throw InvalidCurve("vertex " + std::to_string(i) + " is not finite");
        if (surface_->is_implicit() && std::abs(surface_->level(vertices_[i])) > kSurfaceTolerance)
            throw InvalidCurve("vertex " + std::to_string(i) + " is off the surface");
        if (edge(i).norm() <= 0.0)
            throw InvalidCurve("edge " + std::to_string(i) + " has zero length");
    }
}

Vec3 DiscreteCurve::edge(std::size_t i) const
{
    const std::size_t next = i + 1 == vertices_.size() ? 0 : i + 1;
    return surface_->difference(vertices_[i], vertices_[next]);
}

double length(const DiscreteCurve& curve)
{
    double total = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i)
        total += curve.edge(i).norm();
    return total;
}

std::vector<double> dual_spacing(const DiscreteCurve& curve)
{
    const std::size_t n = curve.size();
    std::vector<double> edges(n);
    for (std::size_t i = 0; i < n; ++i)
        edges[i] = curve.edge(i).norm();
    std::vector<double> spacing(n);
    for (std::size_t i = 0; i < n; ++i)
        spacing[i] = 0.5 * (edges[(i + n - 1) % n] + edges[i]);
    return spacing;
}

std::vector<Vec3> curvature_vectors(const DiscreteCurve& curve, const std::vector<double>& spacing)
{
    const std::size_t n = curve.size();
    const Surface& surface = curve.surface();
    std::vector<Vec3> curvature(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 back = -curve.edge((i + n - 1) % n);
        const Vec3 ahead = curve.edge(i);
        const Vec3 second = (back + ahead) / (spacing[i] * spacing[i]);
        curvature[i] = surface.tangent_project(curve[i], second);
    }
    return curvature;
}

std::vector<Vec3> curvature_vectors(const DiscreteCurve& curve)
{
    return curvature_vectors(curve, dual_spacing(curve));
}

double integral_k_squared(const std::vector<Vec3>& curvature, const std::vector<double>& spacing)
{
    double total = 0.0;
    for (std::size_t i = 0; i < curvature.size(); ++i)
        total += curvature[i].squaredNorm() * spacing[i];
    return total;
}

double integral_k_squared(const DiscreteCurve& curve)
{
    const auto spacing = dual_spacing(curve);
    return integral_k_squared(curvature_vectors(curve, spacing), spacing);
}

DiscreteCurve resample_uniform(const DiscreteCurve& curve, std::size_t count)
{
    if (count < DiscreteCurve::kMinVertices)
        throw InvalidCurve("resample target must be at least 8 vertices");
    const std::size_t n = curve.size();
    std::vector<double> arclength(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        arclength[i + 1] = arclength[i] + curve.edge(i).norm();
    const double total = arclength[n];

    const Surface& surface = curve.surface();
    std::vector<Vec3> out;
    out.reserve(count);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(count);
        while (seg + 1 < n && arclength[seg + 1] <= target)
            ++seg;
        const double edge_length = arclength[seg + 1] - arclength[seg];
        const double fraction = std::clamp((target - arclength[seg]) / edge_length, 0.0, 1.0);
        out.push_back(surface.project(curve[seg] + fraction * curve.edge(seg)));
    }
    return DiscreteCurve(curve.surface_ptr(), std::move(out));
}

double embedding_epsilon(const DiscreteCurve& curve)
{
    double shortest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.size(); ++i)
        shortest = std::min(shortest, curve.edge(i).norm());
    return shortest / 4.0;
}

namespace {

struct Segment {
    Vec3 a;
    Vec3 b;
    Vec3 lo;
    Vec3 hi;
    std::size_t edge;
    bool original;
};

Segment make_segment(const Vec3& a, const Vec3& b, std::size_t edge, bool original, double pad)
{
    const Vec3 lo = a.cwiseMin(b).array() - pad;
    const Vec3 hi = a.cwiseMax(b).array() + pad;
    return Segment{a, b, lo, hi, edge, original};
}

bool adjacent(std::size_t i, std::size_t j, std::size_t n)
{
    return i == j || (i + 1) % n == j || (j + 1) % n == i;
}

double orient2d(const Vec3& a, const Vec3& b, const Vec3& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool within_box2d(const Vec3& a, const Vec3& b, const Vec3& p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect2d(const Segment& s, const Segment& t)
{
    const double d1 = orient2d(s.a, s.b, t.a);
    const double d2 = orient2d(s.a, s.b, t.b);
    const double d3 = orient2d(t.a, t.b, s.a);
    const double d4 = orient2d(t.a, t.b, s.b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return (d1 == 0 && within_box2d(s.a, s.b, t.a)) || (d2 == 0 && within_box2d(s.a, s.b, t.b)) ||
           (d3 == 0 && within_box2d(t.a, t.b, s.a)) || (d4 == 0 && within_box2d(t.a, t.b, s.b));
}

// Closest distance between segments [p1,q1] and [p2,q2] (Ericson, RTCD 5.1.9).
double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2)
{
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0;
    double t = 0.0;
    if (a <= 0.0 && e <= 0.0)
        return r.norm();
    if (a <= 0.0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 0.0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + s * d1) - (p2 + t * d2)).norm();
}

// Sort-and-sweep over x; calls `test` on every box-overlapping pair with at
// least one original segment whose edges are not adjacent.
template <typename Test>
bool sweep(std::vector<Segment>& segments, std::size_t n, Test&& test)
{
    std::sort(segments.begin(), segments.end(), [](const Segment& l, const Segment& r) {
        if (l.lo.x() != r.lo.x())
            return l.lo.x() < r.lo.x();
        return l.edge < r.edge;
    });
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        for (std::size_t j = i + 1; j < segments.size() && segments[j].lo.x() <= s.hi.x(); ++j) {
            const Segment& t = segments[j];
            if (!s.original && !t.original)
                continue;
            if (adjacent(s.edge, t.edge, n))
                continue;
            if (t.lo.y() > s.hi.y() || s.lo.y() > t.hi.y() || t.lo.z() > s.hi.z() || s.lo.z() > t.hi.z())
                continue;
            if (test(s, t))
                return true;
        }
    }
    return false;
}

} // namespace

bool self_intersects(const DiscreteCurve& curve)
{
    const std::size_t n = curve.size();
    const Surface& surface = curve.surface();
    std::vector<Segment> segments;

    if (surface.kind() == SurfaceKind::Plane || surface.kind() == SurfaceKind::FlatTorus) {
        const bool torus = surface.kind() == SurfaceKind::FlatTorus;
        segments.reserve(torus ? 9 * n : n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 a = curve[i];
            const Vec3 b = a + curve.edge(i);
            segments.push_back(make_segment(a, b, i, true, 0.0));
            if (!torus)
                continue;
            for (int dx = -1; dx <= 1; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) {
                    if (dx == 0 && dy == 0)
                        continue;
                    const Vec3 shift(dx, dy, 0.0);
                    segments.push_back(make_segment(a + shift, b + shift, i, false, 0.0));
                }
            }
        }
        return sweep(segments, n, segments_intersect2d);
    }

    const double eps = embedding_epsilon(curve);
    segments.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        segments.push_back(make_segment(curve[i], curve[i] + curve.edge(i), i, true, 0.5 * eps));
    return sweep(segments, n, [eps](const Segment& s, const Segment& t) {
        return segment_distance(s.a, s.b, t.a, t.b) < eps;
    });
}

std::array<long, 2> winding_numbers(const DiscreteCurve& curve)
{
    if (curve.surface().kind() != SurfaceKind::FlatTorus)
        return {0, 0};
    Vec3 total = Vec3::Zero();
    for (std::size_t i = 0; i < curve.size(); ++i)
        total += curve.edge(i);
    return {std::lround(total.x()), std::lround(total.y())};
}

} // namespace curveflow
