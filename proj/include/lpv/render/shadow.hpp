#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "lpv/core/error.hpp"
#include "lpv/core/math.hpp"
#include "lpv/sim/rigid.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::render {

// Planar projection of an occluder silhouette along the light direction
// onto the ground plane y = 0. Spheres project to ellipses, boxes to the
// convex hull of their projected corners.
struct ShadowShape {
    bool is_ellipse = true;
    Vec3 center;            // on the ground
    Vec3 axis_u, axis_v;    // ellipse: semi-axes as ground vectors
    std::vector<Vec3> poly; // polygon: convex, counter-clockwise on the ground
};

namespace detail {

inline Vec3 project_to_ground(const Vec3& p, const Vec3& light_dir) {
    const double t = p.y / (-light_dir.y);
    return {p.x + light_dir.x * t, 0.0, p.z + light_dir.z * t};
}

// convex hull (monotone chain) over ground points
inline std::vector<Vec3> convex_hull_xz(std::vector<Vec3> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
        return a.x < b.x || (a.x == b.x && a.z < b.z);
    });
    auto cross = [](const Vec3& o, const Vec3& a, const Vec3& b) {
        return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
    };
    std::vector<Vec3> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size(); i-- > 1;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k > 1 ? k - 1 : k);
    return hull;
}

} // namespace detail

inline ShadowShape project_shadow(const sim::RigidBodyState& occluder, const Vec3& light_dir) {
    if (light_dir.y >= -1e-6)
        throw LightParallelToGround("project_shadow: light does not reach the ground");
    ShadowShape s;
    if (occluder.shape == sim::ShapeType::Sphere) {
        const double r = occluder.radius();
        const double sin_elev = -light_dir.y; // unit light direction
        s.is_ellipse = true;
        s.center = detail::project_to_ground(occluder.pos, light_dir);
        Vec3 u{light_dir.x, 0, light_dir.z};
        const double un = u.norm();
        u = un > 1e-9 ? u / un : Vec3{1, 0, 0};
        Vec3 v{-u.z, 0, u.x};
        s.axis_u = u * (r / sin_elev);
        s.axis_v = v * r;
    } else {
        s.is_ellipse = false;
        std::vector<Vec3> pts;
        Vec3 ax = occluder.orient.rotate({1, 0, 0}) * occluder.half_extents.x;
        Vec3 ay = occluder.orient.rotate({0, 1, 0}) * occluder.half_extents.y;
        Vec3 az = occluder.orient.rotate({0, 0, 1}) * occluder.half_extents.z;
        for (int i = -1; i <= 1; i += 2)
            for (int j = -1; j <= 1; j += 2)
                for (int k = -1; k <= 1; k += 2)
                    pts.push_back(detail::project_to_ground(
                        occluder.pos + ax * i + ay * j + az * k, light_dir));
        s.poly = detail::convex_hull_xz(std::move(pts));
        Vec3 c{0, 0, 0};
        for (const Vec3& p : s.poly) c += p;
        s.center = s.poly.empty() ? Vec3{0, 0, 0} : c / static_cast<double>(s.poly.size());
    }
    return s;
}

inline bool shadow_contains(const ShadowShape& s, const Vec3& ground_pt) {
    if (s.is_ellipse) {
        Vec3 rel = ground_pt - s.center;
        const double lu = s.axis_u.norm(), lv = s.axis_v.norm();
        if (lu < 1e-12 || lv < 1e-12) return false;
        const double cu = rel.dot(s.axis_u) / (lu * lu);
        const double cv = rel.dot(s.axis_v) / (lv * lv);
        return cu * cu + cv * cv <= 1.0;
    }
    const std::size_t n = s.poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = s.poly[i];
        const Vec3& b = s.poly[(i + 1) % n];
        const double cr = (b.x - a.x) * (ground_pt.z - a.z) - (b.z - a.z) * (ground_pt.x - a.x);
        if (cr < 0) return false;
    }
    return true;
}

struct ShadowOverrideSlot {
    std::size_t shape_index = 0;
};

// One frame's shadow state: geometric shapes per caster plus the optional
// override transform that replaces the geometric result.
struct ShadowContext {
    std::vector<ShadowShape> shapes;
    std::vector<Vec3> anchors; // ground point beneath each caster
    const sim::ShadowOverride* override_ = nullptr;
    std::optional<ShadowOverrideSlot> override_slot;
    Vec3 light_dir;

    bool lit_ground(const Vec3& p) const { return !any_shadow(p); }

    bool any_shadow(const Vec3& p) const {
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            Vec3 q = p;
            if (override_ && override_slot && override_slot->shape_index == i) {
                switch (override_->mode) {
                    case sim::ShadowOverride::Mode::Vanish: continue;
                    case sim::ShadowOverride::Mode::Mirror:
                        q = anchors[i] * 2.0 - p;
                        q.y = 0;
                        break;
                    case sim::ShadowOverride::Mode::Offset: q = p - override_->offset; break;
                    case sim::ShadowOverride::Mode::ShapeSwap: {
                        Vec3 u{light_dir.x, 0, light_dir.z};
                        const double un = u.norm();
                        u = un > 1e-9 ? u / un : Vec3{1, 0, 0};
                        Vec3 v{-u.z, 0, u.x};
                        Vec3 rel = p - shapes[i].center;
                        double lu = rel.dot(u), lv = rel.dot(v);
                        const double c = std::cos(-override_->rotate),
                                     sn = std::sin(-override_->rotate);
                        const double ru = lu * c - lv * sn;
                        const double rv = lu * sn + lv * c;
                        q = shapes[i].center + u * (ru / override_->stretch) +
                            v * (rv * override_->stretch);
                        break;
                    }
                }
            }
            if (shadow_contains(shapes[i], q)) return true;
        }
        return false;
    }
};

inline ShadowContext make_shadow_context(const sim::SceneState& state) {
    ShadowContext ctx;
    ctx.light_dir = state.light_dir;
    if (state.light_dir.y >= -1e-6) return ctx; // no ground shadows possible
    for (std::size_t bi = 0; bi < state.bodies.size(); ++bi) {
        const sim::RigidBodyState& b = state.bodies[bi];
        if (!b.casts_shadow) continue;
        if (b.inv_mass == 0 && b.shape == sim::ShapeType::Box &&
            (b.half_extents.x > 0.8 || b.half_extents.z > 0.8))
            continue; // scenery slabs (ramps, banks) shade the whole ground; skip
        ctx.shapes.push_back(project_shadow(b, state.light_dir));
        ctx.anchors.push_back({b.pos.x, 0, b.pos.z});
        if (state.shadow_override &&
            state.shadow_override->body_index == static_cast<int>(bi)) {
            ShadowOverrideSlot slot;
            slot.shape_index = ctx.shapes.size() - 1;
            ctx.override_slot = slot;
            ctx.override_ = &*state.shadow_override;
        }
    }
    return ctx;
}

} // namespace lpv::render
