#pragma once

#include <cmath>

#include "lpv/core/math.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::render {

// Pinhole camera with precomputed basis; generates one ray per pixel.
class Camera {
public:
    Camera(const sim::CameraPose& pose, std::size_t height, std::size_t width)
        : pos_(pose.position), near_(pose.near_plane), far_(pose.far_plane),
          h_(static_cast<double>(height)), w_(static_cast<double>(width)) {
        fwd_ = (pose.look_at - pose.position).normalized();
        Vec3 up{0, 1, 0};
        if (std::abs(fwd_.dot(up)) > 0.999) up = {0, 0, 1};
        right_ = fwd_.cross(up).normalized();
        up_ = right_.cross(fwd_);
        tan_half_ = std::tan(deg2rad(pose.vfov_deg) * 0.5);
        aspect_ = w_ / h_;
    }

    const Vec3& position() const { return pos_; }
    double near_plane() const { return near_; }
    double far_plane() const { return far_; }

    Vec3 ray_dir(double px, double py) const {
        const double x = ((px + 0.5) / w_ * 2.0 - 1.0) * tan_half_ * aspect_;
        const double y = (1.0 - (py + 0.5) / h_ * 2.0) * tan_half_;
        return (fwd_ + right_ * x + up_ * y).normalized();
    }

    // Projects a world point to (pixel x, pixel y, view depth). Returns
    // false behind the camera.
    bool project(const Vec3& p, double& sx, double& sy, double& depth) const {
        Vec3 rel = p - pos_;
        depth = rel.dot(fwd_);
        if (depth <= near_) return false;
        const double x = rel.dot(right_) / (depth * tan_half_ * aspect_);
        const double y = rel.dot(up_) / (depth * tan_half_);
        sx = (x + 1.0) * 0.5 * w_ - 0.5;
        sy = (1.0 - y) * 0.5 * h_ - 0.5;
        return true;
    }

    // Screen-space radius of a sphere of radius r at view depth d.
    double pixel_radius(double r, double depth) const {
        return r / (depth * tan_half_) * (h_ * 0.5);
    }

private:
    Vec3 pos_, fwd_, right_, up_;
    double near_, far_, h_, w_, tan_half_, aspect_;
};

} // namespace lpv::render
