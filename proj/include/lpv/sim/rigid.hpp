#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lpv/core/error.hpp"
#include "lpv/core/math.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::sim {

struct StaticPlane {
    Vec3 normal{0, 1, 0}; // unit, pointing out of the solid
    double offset = 0.0;  // plane: x . normal == offset
    double mu = 0.0;
};

// Velocity kick first, then position advance with the average velocity;
// exact for constant acceleration, so ballistic segments carry no
// integrator energy drift.
inline void integrate_ballistic(RigidBodyState& b, double dt, const Vec3& gravity) {
    if (b.inv_mass <= 0) return;
    Vec3 v0 = b.vel;
    b.vel += gravity * dt;
    b.pos += (v0 + b.vel) * (0.5 * dt);
}

// Impulse exchange between two bodies along a contact normal (from b to a).
// Linear momentum is conserved exactly; the relative normal speed is scaled
// by -e. Returns the impulse magnitude.
inline double resolve_collision(RigidBodyState& a, RigidBodyState& b, const Vec3& normal,
                                double restitution, double mu = 0.0) {
    const double inv_sum = a.inv_mass + b.inv_mass;
    if (inv_sum <= 0) return 0.0;
    Vec3 rel = a.vel - b.vel;
    const double vn = rel.dot(normal); // negative when approaching
    if (vn >= 0) return 0.0;
    const double j = -(1.0 + restitution) * vn / inv_sum;
    a.vel += normal * (j * a.inv_mass);
    b.vel -= normal * (j * b.inv_mass);
    if (mu > 0) {
        rel = a.vel - b.vel;
        Vec3 vt = rel - normal * rel.dot(normal);
        const double speed = vt.norm();
        if (speed > 1e-12) {
            const double jt = std::min(mu * j, speed / inv_sum);
            Vec3 that = vt / speed;
            a.vel -= that * (jt * a.inv_mass);
            b.vel += that * (jt * b.inv_mass);
        }
    }
    return j;
}

// Body vs infinite-mass plane.
inline double resolve_plane_collision(RigidBodyState& a, const Vec3& normal, double restitution,
                                      double mu = 0.0) {
    if (a.inv_mass <= 0) return 0.0;
    const double vn = a.vel.dot(normal);
    if (vn >= 0) return 0.0;
    const double j = -(1.0 + restitution) * vn / a.inv_mass;
    a.vel += normal * (j * a.inv_mass);
    if (mu > 0) {
        Vec3 vt = a.vel - normal * a.vel.dot(normal);
        const double speed = vt.norm();
        if (speed > 1e-12) {
            const double jt = std::min(mu * j, speed / a.inv_mass);
            a.vel -= (vt / speed) * (jt * a.inv_mass);
        }
    }
    return j;
}

// Degenerate-normal fallback: +y by contract.
inline Vec3 contact_normal(const Vec3& from_b_to_a) {
    const double n = from_b_to_a.norm();
    if (n < 1e-12) return Vec3{0, 1, 0};
    return from_b_to_a / n;
}

// Support radius of a body along a direction (sphere: radius; box: projected
// half-extent of the oriented box).
inline double support_radius(const RigidBodyState& b, const Vec3& dir) {
    if (b.shape == ShapeType::Sphere) return b.radius();
    Vec3 ax = b.orient.rotate({1, 0, 0});
    Vec3 ay = b.orient.rotate({0, 1, 0});
    Vec3 az = b.orient.rotate({0, 0, 1});
    return std::abs(ax.dot(dir)) * b.half_extents.x + std::abs(ay.dot(dir)) * b.half_extents.y +
           std::abs(az.dot(dir)) * b.half_extents.z;
}

// Closest point on an oriented box to a world-space point.
inline Vec3 box_closest_point(const RigidBodyState& box, const Vec3& p) {
    Vec3 ax = box.orient.rotate({1, 0, 0});
    Vec3 ay = box.orient.rotate({0, 1, 0});
    Vec3 az = box.orient.rotate({0, 0, 1});
    Vec3 rel = p - box.pos;
    double lx = clampd(rel.dot(ax), -box.half_extents.x, box.half_extents.x);
    double ly = clampd(rel.dot(ay), -box.half_extents.y, box.half_extents.y);
    double lz = clampd(rel.dot(az), -box.half_extents.z, box.half_extents.z);
    return box.pos + ax * lx + ay * ly + az * lz;
}

// A small impulse world over spheres, boxes, and static planes. Contacts are
// resolved at their exact time of impact inside each substep (linear motion
// between velocity kicks), so momentum is conserved to rounding and elastic
// collisions add no spurious energy from de-penetration.
class RigidWorld {
public:
    std::vector<RigidBodyState> bodies;
    std::vector<StaticPlane> planes;
    Vec3 gravity{0, -9.81, 0};
    double restitution = 0.85;
    double body_mu = 0.0;      // friction at body-body impacts
    double gravity_scale = 1.0;

    // Violation hooks; inactive in any valid run.
    double restitution_override = -1.0; // >= 0 replaces restitution
    double impulse_scale = 1.0;         // scales effective restitution
    bool collide_bodies = true;
    bool collide_planes = true;
    int clearance_body = -1;            // body kept clearance above planes
    double clearance = 0.0;
    std::vector<char> disabled;         // frozen, invisible, non-colliding

    bool is_disabled(std::size_t i) const { return i < disabled.size() && disabled[i]; }

    std::vector<ImpactEvent>* events = nullptr;
    int current_frame = 0;

    void step_frame(double frame_dt, int substeps) {
        const double h = frame_dt / substeps;
        for (int s = 0; s < substeps; ++s) substep(h);
        for (const RigidBodyState& b : bodies)
            if (!b.pos.finite() || !b.vel.finite())
                throw UnstableSimulation("rigid world: non-finite state");
    }

    double effective_restitution() const {
        double e = restitution_override >= 0 ? restitution_override : restitution;
        return clampd(e * impulse_scale, 0.0, 4.0);
    }

    void substep(double h) {
        const Vec3 g = gravity * gravity_scale;
        const double rest_speed = std::max(0.05, 2.0 * g.norm() * h);

        // Velocity kick.
        for (std::size_t i = 0; i < bodies.size(); ++i)
            if (bodies[i].inv_mass > 0 && !is_disabled(i)) bodies[i].vel += g * h;

        // Resting contacts: kill the normal component and apply Coulomb
        // friction against the supporting surface.
        std::vector<std::vector<Vec3>> rest_normals(bodies.size());
        if (collide_planes)
            for (std::size_t i = 0; i < bodies.size(); ++i) {
                RigidBodyState& b = bodies[i];
                if (b.inv_mass <= 0 || is_disabled(i)) continue;
                for (const StaticPlane& pl : planes) {
                    const double gap = plane_gap(b, pl, static_cast<int>(i));
                    const double vn = b.vel.dot(pl.normal);
                    if (gap <= 1e-4 && std::abs(vn) <= rest_speed) {
                        if (vn < 0) b.vel -= pl.normal * vn;
                        if (pl.mu > 0) {
                            Vec3 vt = b.vel - pl.normal * b.vel.dot(pl.normal);
                            const double speed = vt.norm();
                            const double an = std::abs(g.dot(pl.normal));
                            const double dv = pl.mu * an * h;
                            if (speed > 1e-12)
                                b.vel -= (vt / speed) * std::min(dv, speed);
                        }
                        // settle exactly onto the surface
                        if (gap < 0) b.pos -= pl.normal * gap;
                        rest_normals[i].push_back(pl.normal);
                    }
                }
            }
        if (collide_bodies)
            for (std::size_t i = 0; i < bodies.size(); ++i)
                for (std::size_t j = i + 1; j < bodies.size(); ++j) {
                    if (is_disabled(i) || is_disabled(j)) continue;
                    rest_contact_pair(bodies[i], bodies[j], rest_speed);
                }

        // Position advance with exact first time of impact. The half-kick
        // correction makes free segments exact; resting bodies have any
        // normal drift removed so they track their support exactly.
        std::vector<Vec3> vpos(bodies.size());
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            if (bodies[i].inv_mass <= 0 || is_disabled(i)) continue;
            vpos[i] = bodies[i].vel - g * (0.5 * h);
            for (const Vec3& n : rest_normals[i]) vpos[i] -= n * vpos[i].dot(n);
        }

        double remaining = h;
        for (int iter = 0; iter < 12 && remaining > 1e-12; ++iter) {
            Contact c = earliest_contact(vpos, remaining);
            const double advance = c.hit ? c.time : remaining;
            for (std::size_t i = 0; i < bodies.size(); ++i)
                if (bodies[i].inv_mass > 0) bodies[i].pos += vpos[i] * advance;
            remaining -= advance;
            if (!c.hit) break;
            resolve_contact(c, vpos, rest_speed, g, remaining);
        }
    }

    double kinetic_energy() const {
        double e = 0;
        for (std::size_t i = 0; i < bodies.size(); ++i)
            if (bodies[i].inv_mass > 0 && !is_disabled(i))
                e += 0.5 * bodies[i].mass() * bodies[i].vel.norm2();
        return e;
    }

    double potential_energy() const {
        double e = 0;
        const Vec3 g = gravity * gravity_scale;
        for (std::size_t i = 0; i < bodies.size(); ++i)
            if (bodies[i].inv_mass > 0 && !is_disabled(i))
                e += bodies[i].mass() * (-g.y) * bodies[i].pos.y;
        return e;
    }

private:
    struct Contact {
        bool hit = false;
        double time = 0;
        int a = -1;
        int b = -1; // -1: plane contact, index in plane_idx
        int plane_idx = -1;
        Vec3 normal;
    };

    double plane_gap(const RigidBodyState& b, const StaticPlane& pl, int body_idx) const {
        const double extra = body_idx == clearance_body ? clearance : 0.0;
        return b.pos.dot(pl.normal) - pl.offset - support_radius(b, pl.normal) - extra;
    }

    void rest_contact_pair(RigidBodyState& a, RigidBodyState& b, double rest_speed) {
        if (a.inv_mass <= 0 && b.inv_mass <= 0) return;
        double dist;
        Vec3 n;
        pair_gap(a, b, dist, n);
        if (dist > 1e-6) return;
        const double inv_sum = a.inv_mass + b.inv_mass;
        const double vn = (a.vel - b.vel).dot(n);
        if (std::abs(vn) <= rest_speed && vn < 0) {
            a.vel -= n * (vn * a.inv_mass / inv_sum);
            b.vel += n * (vn * b.inv_mass / inv_sum);
        }
        // positional stabilization against slow stacking drift
        if (dist < 0) {
            a.pos -= n * (dist * a.inv_mass / inv_sum);
            b.pos += n * (dist * b.inv_mass / inv_sum);
        }
    }

    void pair_gap(const RigidBodyState& a, const RigidBodyState& b, double& dist, Vec3& n) const {
        if (a.shape == ShapeType::Sphere && b.shape == ShapeType::Sphere) {
            Vec3 d = a.pos - b.pos;
            n = contact_normal(d);
            dist = d.norm() - a.radius() - b.radius();
        } else if (a.shape == ShapeType::Sphere || b.shape == ShapeType::Sphere) {
            const RigidBodyState& s = a.shape == ShapeType::Sphere ? a : b;
            const RigidBodyState& box = a.shape == ShapeType::Sphere ? b : a;
            Vec3 cp = box_closest_point(box, s.pos);
            Vec3 d = s.pos - cp;
            double nd = d.norm();
            Vec3 toward = nd < 1e-12 ? Vec3{0, 1, 0} : d / nd;
            dist = nd - s.radius();
            n = (a.shape == ShapeType::Sphere) ? toward : -toward;
        } else {
            // box-box unsupported in the scenario set; report no contact
            dist = std::numeric_limits<double>::infinity();
            n = {0, 1, 0};
        }
    }

    Contact earliest_contact(const std::vector<Vec3>& vpos, double window) const {
        Contact best;
        best.time = window;
        if (collide_planes)
            for (std::size_t i = 0; i < bodies.size(); ++i) {
                const RigidBodyState& b = bodies[i];
                if (b.inv_mass <= 0 || is_disabled(i)) continue;
                for (std::size_t p = 0; p < planes.size(); ++p) {
                    const StaticPlane& pl = planes[p];
                    const double vn = vpos[i].dot(pl.normal);
                    if (vn >= -1e-12) continue;
                    const double gap = plane_gap(b, pl, static_cast<int>(i));
                    if (gap < -1e-9) continue; // resting pass owns it
                    const double t = gap / (-vn);
                    if (t >= 0 && t < best.time) {
                        best = Contact{true, t, static_cast<int>(i), -1, static_cast<int>(p),
                                       pl.normal};
                    }
                }
            }
        if (collide_bodies)
            for (std::size_t i = 0; i < bodies.size(); ++i)
                for (std::size_t j = i + 1; j < bodies.size(); ++j) {
                    if (is_disabled(i) || is_disabled(j)) continue;
                    const RigidBodyState& a = bodies[i];
                    const RigidBodyState& b = bodies[j];
                    if (a.inv_mass <= 0 && b.inv_mass <= 0) continue;
                    double t;
                    Vec3 n;
                    if (pair_toi(a, b, vpos[i], vpos[j], best.time, t, n))
                        best = Contact{true, t, static_cast<int>(i), static_cast<int>(j), -1, n};
                }
        if (!best.hit) best.time = window;
        return best;
    }

    bool pair_toi(const RigidBodyState& a, const RigidBodyState& b, const Vec3& va,
                  const Vec3& vb, double window, double& t_out, Vec3& n_out) const {
        if (a.shape == ShapeType::Sphere && b.shape == ShapeType::Sphere) {
            const Vec3 dp = a.pos - b.pos;
            const Vec3 dv = va - vb;
            const double R = a.radius() + b.radius();
            const double c = dp.norm2() - R * R;
            const double bq = 2.0 * dp.dot(dv);
            if (c <= 1e-12) return false; // touching: resting pass owns it
            if (bq >= 0) return false;    // separating
            const double aq = dv.norm2();
            if (aq < 1e-16) return false;
            const double disc = bq * bq - 4 * aq * c;
            if (disc < 0) return false;
            const double t = (-bq - std::sqrt(disc)) / (2 * aq);
            if (t < 0 || t >= window) return false;
            t_out = t;
            n_out = contact_normal((a.pos + va * t) - (b.pos + vb * t));
            return true;
        }
        if (a.shape == ShapeType::Box && b.shape == ShapeType::Box) return false;
        // box-sphere: bisection on the closest-point distance along the
        // (piecewise linear) relative motion.
        const RigidBodyState& sph = a.shape == ShapeType::Sphere ? a : b;
        const RigidBodyState& box = a.shape == ShapeType::Sphere ? b : a;
        const Vec3 vs = a.shape == ShapeType::Sphere ? va : vb;
        const Vec3 vbx = a.shape == ShapeType::Sphere ? vb : va;
        auto dist_at = [&](double t) {
            RigidBodyState bx = box;
            bx.pos += vbx * t;
            Vec3 sp = sph.pos + vs * t;
            return (sp - box_closest_point(bx, sp)).norm() - sph.radius();
        };
        if (dist_at(0.0) <= 1e-9) return false; // resting pass owns it
        const int kSamples = 8;
        double prev_t = 0.0, prev_d = dist_at(0.0);
        double lo = -1, hi = -1;
        for (int s = 1; s <= kSamples; ++s) {
            double t = window * s / kSamples;
            double d = dist_at(t);
            if (prev_d > 0 && d <= 0) {
                lo = prev_t;
                hi = t;
                break;
            }
            prev_t = t;
            prev_d = d;
        }
        if (lo < 0) return false;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            (dist_at(mid) > 0 ? lo : hi) = mid;
        }
        t_out = lo;
        RigidBodyState bx = box;
        bx.pos += vbx * t_out;
        Vec3 sp = sph.pos + vs * t_out;
        Vec3 toward = contact_normal(sp - box_closest_point(bx, sp));
        n_out = (a.shape == ShapeType::Sphere) ? toward : -toward;
        return a.inv_mass > 0 || b.inv_mass > 0;
    }

    // Resolves an impulse at a contact reached mid-substep. Velocities are
    // rolled back to their value at the contact time (the kick covered the
    // whole substep), reflected there, and the unconsumed gravity re-added,
    // so elastic bounces conserve energy to rounding.
    void resolve_contact(const Contact& c, std::vector<Vec3>& vpos, double rest_speed,
                         const Vec3& g, double tau_after) {
        const double e = effective_restitution();
        const Vec3 dv_after = g * tau_after;
        if (c.b < 0) {
            RigidBodyState& body = bodies[static_cast<std::size_t>(c.a)];
            const StaticPlane& pl = planes[static_cast<std::size_t>(c.plane_idx)];
            body.vel -= dv_after; // velocity at contact time
            ImpactEvent ev;
            ev.frame = current_frame;
            ev.body_a = c.a;
            ev.body_b = -1;
            ev.normal = pl.normal;
            ev.pre_rel_normal_speed = -body.vel.dot(pl.normal);
            ev.pre_momentum = body.vel * body.mass();
            ev.pre_kinetic = 0.5 * body.mass() * body.vel.norm2();
            resolve_plane_collision(body, pl.normal, e, pl.mu);
            double post = body.vel.dot(pl.normal);
            if (std::abs(post) < rest_speed * 0.5) {
                body.vel -= pl.normal * post;
                post = 0.0;
            }
            ev.post_rel_normal_speed = post;
            ev.post_momentum = body.vel * body.mass();
            ev.post_kinetic = 0.5 * body.mass() * body.vel.norm2();
            if (events && ev.pre_rel_normal_speed > 0.02) events->push_back(ev);
            vpos[static_cast<std::size_t>(c.a)] = body.vel + dv_after * 0.5;
            body.vel += dv_after;
        } else {
            RigidBodyState& a = bodies[static_cast<std::size_t>(c.a)];
            RigidBodyState& b = bodies[static_cast<std::size_t>(c.b)];
            const Vec3 da = a.inv_mass > 0 ? dv_after : Vec3{};
            const Vec3 db = b.inv_mass > 0 ? dv_after : Vec3{};
            a.vel -= da;
            b.vel -= db;
            ImpactEvent ev;
            ev.frame = current_frame;
            ev.body_a = c.a;
            ev.body_b = c.b;
            ev.normal = c.normal;
            ev.pre_rel_normal_speed = -(a.vel - b.vel).dot(c.normal);
            ev.pre_momentum = a.vel * a.mass() + b.vel * b.mass();
            ev.pre_kinetic = 0.5 * a.mass() * a.vel.norm2() + 0.5 * b.mass() * b.vel.norm2();
            resolve_collision(a, b, c.normal, e, body_mu);
            ev.post_rel_normal_speed = (a.vel - b.vel).dot(c.normal);
            ev.post_momentum = a.vel * a.mass() + b.vel * b.mass();
            ev.post_kinetic = 0.5 * a.mass() * a.vel.norm2() + 0.5 * b.mass() * b.vel.norm2();
            if (events && ev.pre_rel_normal_speed > 0.02) events->push_back(ev);
            vpos[static_cast<std::size_t>(c.a)] = a.inv_mass > 0 ? a.vel + da * 0.5 : Vec3{};
            vpos[static_cast<std::size_t>(c.b)] = b.inv_mass > 0 ? b.vel + db * 0.5 : Vec3{};
            a.vel += da;
            b.vel += db;
        }
    }
};

} // namespace lpv::sim
