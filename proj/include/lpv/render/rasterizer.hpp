#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "lpv/core/tensor.hpp"
#include "lpv/render/camera.hpp"
#include "lpv/render/shadow.hpp"
#include "lpv/sim/cloth.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::render {

struct ClipMeta {
    std::string scenario;
    int variation = 0;
    std::string violation = "valid"; // tag name or "valid"
    int onset_frame = -1;
    std::uint64_t seed = 0;
    double fps = 24.0;
};

struct VideoClip {
    TensorF data; // [F, 3, H, W], values in [0, 1]
    ClipMeta meta;
};

namespace detail {

struct FrameBuffer {
    std::size_t h, w;
    std::vector<float> color; // 3 * h * w, channel-major planes
    std::vector<double> depth;

    FrameBuffer(std::size_t h_, std::size_t w_)
        : h(h_), w(w_), color(3 * h_ * w_, 0.f), depth(h_ * w_, 1e30) {}

    void put(std::size_t x, std::size_t y, double d, const Vec3& c) {
        const std::size_t i = y * w + x;
        if (d >= depth[i]) return;
        depth[i] = d;
        const std::size_t plane = h * w;
        color[i] = static_cast<float>(clampd(c.x, 0.0, 1.0));
        color[i + plane] = static_cast<float>(clampd(c.y, 0.0, 1.0));
        color[i + 2 * plane] = static_cast<float>(clampd(c.z, 0.0, 1.0));
    }
};

inline double lambert(const Vec3& n, const Vec3& light_dir) {
    return 0.25 + 0.75 * std::max(0.0, n.dot(-light_dir));
}

// Seeded procedural checker over the ground plane.
inline Vec3 checker_color(const sim::AppearanceParams& ap, double x, double z) {
    const long ix = static_cast<long>(std::floor(x / ap.checker_cell)) + (ap.checker_id & 7);
    const long iz = static_cast<long>(std::floor(z / ap.checker_cell)) + ((ap.checker_id >> 3) & 7);
    return ((ix + iz) & 1) ? ap.ground_color_a : ap.ground_color_b;
}

inline void draw_sphere(FrameBuffer& fb, const Camera& cam, const Vec3& center, double radius,
                        const Vec3& albedo, const Vec3& light_dir) {
    double sx, sy, depth;
    if (!cam.project(center, sx, sy, depth)) return;
    const double pr = cam.pixel_radius(radius, std::max(1e-6, depth - radius)) + 1.0;
    const long x0 = std::max(0L, static_cast<long>(std::floor(sx - pr)));
    const long x1 = std::min(static_cast<long>(fb.w) - 1, static_cast<long>(std::ceil(sx + pr)));
    const long y0 = std::max(0L, static_cast<long>(std::floor(sy - pr)));
    const long y1 = std::min(static_cast<long>(fb.h) - 1, static_cast<long>(std::ceil(sy + pr)));
    const Vec3 org = cam.position();
    for (long y = y0; y <= y1; ++y)
        for (long x = x0; x <= x1; ++x) {
            Vec3 dir = cam.ray_dir(static_cast<double>(x), static_cast<double>(y));
            Vec3 oc = org - center;
            const double b = oc.dot(dir);
            const double c = oc.norm2() - radius * radius;
            const double disc = b * b - c;
            if (disc < 0) continue;
            const double t = -b - std::sqrt(disc);
            if (t <= cam.near_plane()) continue;
            Vec3 hit = org + dir * t;
            Vec3 n = (hit - center) / radius;
            fb.put(static_cast<std::size_t>(x), static_cast<std::size_t>(y), t,
                   albedo * lambert(n, light_dir));
        }
}

// Scanline triangle fill with perspective-correct depth.
inline void draw_triangle(FrameBuffer& fb, const Camera& cam, const Vec3& a, const Vec3& b,
                          const Vec3& c, const Vec3& albedo, const Vec3& light_dir,
                          bool double_sided) {
    double ax, ay, az, bx, by, bz, cx, cy, cz;
    if (!cam.project(a, ax, ay, az) || !cam.project(b, bx, by, bz) || !cam.project(c, cx, cy, cz))
        return; // clipped triangles are skipped (scenes keep objects in view)
    Vec3 n = (b - a).cross(c - a);
    const double nn = n.norm();
    if (nn < 1e-12) return;
    n = n / nn;
    if (double_sided && n.dot(a - cam.position()) > 0) n = -n;
    const Vec3 shade = albedo * lambert(n, light_dir);

    const double area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (std::abs(area) < 1e-12) return;
    const long x0 = std::max(0L, static_cast<long>(std::floor(std::min({ax, bx, cx}))));
    const long x1 =
        std::min(static_cast<long>(fb.w) - 1, static_cast<long>(std::ceil(std::max({ax, bx, cx}))));
    const long y0 = std::max(0L, static_cast<long>(std::floor(std::min({ay, by, cy}))));
    const long y1 =
        std::min(static_cast<long>(fb.h) - 1, static_cast<long>(std::ceil(std::max({ay, by, cy}))));
    const double inv_area = 1.0 / area;
    const double iza = 1.0 / az, izb = 1.0 / bz, izc = 1.0 / cz;
    for (long y = y0; y <= y1; ++y)
        for (long x = x0; x <= x1; ++x) {
            const double px = static_cast<double>(x), py = static_cast<double>(y);
            const double w0 = ((bx - px) * (cy - py) - (by - py) * (cx - px)) * inv_area;
            const double w1 = ((cx - px) * (ay - py) - (cy - py) * (ax - px)) * inv_area;
            const double w2 = 1.0 - w0 - w1;
            if (w0 < 0 || w1 < 0 || w2 < 0) continue;
            const double inv_z = w0 * iza + w1 * izb + w2 * izc;
            if (inv_z <= 0) continue;
            fb.put(static_cast<std::size_t>(x), static_cast<std::size_t>(y), 1.0 / inv_z, shade);
        }
}

inline void draw_box(FrameBuffer& fb, const Camera& cam, const sim::RigidBodyState& box,
                     const Vec3& light_dir) {
    const Vec3 ax = box.orient.rotate({1, 0, 0}) * box.half_extents.x;
    const Vec3 ay = box.orient.rotate({0, 1, 0}) * box.half_extents.y;
    const Vec3 az = box.orient.rotate({0, 0, 1}) * box.half_extents.z;
    Vec3 v[8];
    for (int i = 0; i < 8; ++i)
        v[i] = box.pos + ax * ((i & 1) ? 1 : -1) + ay * ((i & 2) ? 1 : -1) +
               az * ((i & 4) ? 1 : -1);
    static const int faces[6][4] = {{0, 2, 6, 4}, {1, 5, 7, 3}, {0, 4, 5, 1},
                                    {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 6, 7, 5}};
    for (const auto& f : faces) {
        draw_triangle(fb, cam, v[f[0]], v[f[1]], v[f[2]], box.color, light_dir, false);
        draw_triangle(fb, cam, v[f[0]], v[f[2]], v[f[3]], box.color, light_dir, false);
    }
}

inline void draw_ground(FrameBuffer& fb, const Camera& cam, const sim::AppearanceParams& ap,
                        const Vec3& light_dir, const ShadowContext& shadows) {
    const Vec3 org = cam.position();
    for (std::size_t y = 0; y < fb.h; ++y)
        for (std::size_t x = 0; x < fb.w; ++x) {
            Vec3 dir = cam.ray_dir(static_cast<double>(x), static_cast<double>(y));
            if (dir.y >= -1e-9) continue; // sky
            const double t = -org.y / dir.y;
            if (t <= cam.near_plane() || t >= cam.far_plane()) continue;
            Vec3 p = org + dir * t;
            Vec3 albedo = checker_color(ap, p.x, p.z);
            if (shadows.any_shadow(p)) albedo *= 0.45;
            fb.put(x, y, t, albedo * lambert({0, 1, 0}, light_dir));
        }
}

} // namespace detail

// Rasterizes one scene state. Deterministic: identical state and camera
// produce bit-identical frames.
inline void render_frame(const sim::SceneState& state, const sim::AppearanceParams& ap,
                         const sim::CameraPose& base_camera, std::size_t height,
                         std::size_t width, float* out /* 3*H*W channel planes */) {
    if (height < 32 || width < 32) throw ConfigParseError("render: resolution below 32x32");
    const sim::CameraPose& pose =
        state.camera_override ? *state.camera_override : base_camera;
    Camera cam(pose, height, width);
    detail::FrameBuffer fb(height, width);

    // background
    const std::size_t plane = height * width;
    for (std::size_t i = 0; i < plane; ++i) {
        fb.color[i] = static_cast<float>(ap.background.x);
        fb.color[i + plane] = static_cast<float>(ap.background.y);
        fb.color[i + 2 * plane] = static_cast<float>(ap.background.z);
    }

    ShadowContext shadows = make_shadow_context(state);
    detail::draw_ground(fb, cam, ap, state.light_dir, shadows);

    for (const sim::RigidBodyState& b : state.bodies) {
        if (!b.visible) continue;
        if (b.shape == sim::ShapeType::Sphere)
            detail::draw_sphere(fb, cam, b.pos, b.radius(), b.color, state.light_dir);
        else
            detail::draw_box(fb, cam, b, state.light_dir);
    }

    if (state.cloth) {
        const sim::ClothState& c = *state.cloth;
        for (int j = 0; j + 1 < c.ny; ++j)
            for (int i = 0; i + 1 < c.nx; ++i) {
                const Vec3& p00 = c.pos[static_cast<std::size_t>(c.idx(i, j))];
                const Vec3& p10 = c.pos[static_cast<std::size_t>(c.idx(i + 1, j))];
                const Vec3& p01 = c.pos[static_cast<std::size_t>(c.idx(i, j + 1))];
                const Vec3& p11 = c.pos[static_cast<std::size_t>(c.idx(i + 1, j + 1))];
                detail::draw_triangle(fb, cam, p00, p10, p11, c.color, state.light_dir, true);
                detail::draw_triangle(fb, cam, p00, p11, p01, c.color, state.light_dir, true);
            }
    }

    if (state.fluid) {
        const sim::FluidState& f = *state.fluid;
        for (const Vec3& p : f.pos)
            detail::draw_sphere(fb, cam, p, f.radius, f.color, state.light_dir);
    }

    std::copy(fb.color.begin(), fb.color.end(), out);
}

// Renders a trajectory into a clip, with uniform temporal resampling when
// the requested frame count differs: frame j reads state floor(j*F/F').
inline VideoClip render_clip(const sim::SceneTrajectory& traj, std::size_t height,
                             std::size_t width, std::size_t frames_out = 0) {
    const std::size_t f_in = traj.states.size();
    const std::size_t f_out = frames_out == 0 ? f_in : frames_out;
    VideoClip clip;
    clip.data = TensorF(f_out, 3, height, width);
    clip.meta.scenario = sim::to_string(traj.spec.scenario_id);
    clip.meta.fps = 1.0 / traj.spec.frame_dt;
    if (traj.violation) {
        clip.meta.violation = sim::to_string(traj.violation->kind);
        clip.meta.onset_frame = traj.violation->onset_frame;
    }
    const std::size_t plane = 3 * height * width;
    for (std::size_t j = 0; j < f_out; ++j) {
        const std::size_t src = (j * f_in) / f_out;
        render_frame(traj.states[src], traj.spec.appearance, traj.spec.appearance.camera, height,
                     width, clip.data.data() + j * plane);
    }
    return clip;
}

// Debug dump: one frame as binary PPM (8-bit).
inline void write_ppm(const TensorF& clip, std::size_t frame, const std::string& path) {
    const std::size_t h = clip.h(), w = clip.w();
    std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(3 * h * w);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c) {
                float v = clip(frame, c, y, x);
                bytes.push_back(static_cast<unsigned char>(clampd(v, 0.f, 1.f) * 255.0f + 0.5f));
            }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IOError("write_ppm: cannot open " + path);
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace lpv::render
