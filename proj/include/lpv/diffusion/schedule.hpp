#pragma once

#include <cmath>
#include <vector>

#include "lpv/core/error.hpp"

namespace lpv::diffusion {

// Forward-process noise schedule: per-step beta_t and cumulative
// alpha_bar_t = prod_{s<=t} (1 - beta_s).
struct NoiseSchedule {
    int total_steps = 0;
    std::vector<double> beta;
    std::vector<double> alpha_bar;
};

// Linear beta interpolation from beta_start to beta_end over total_steps.
inline NoiseSchedule make_schedule(int total_steps, double beta_start, double beta_end) {
    if (total_steps < 2 || !(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end)
        throw InvalidScheduleParams("make_schedule: need 0 < beta_start <= beta_end < 1 and T >= 2");
    NoiseSchedule s;
    s.total_steps = total_steps;
    s.beta.resize(total_steps);
    s.alpha_bar.resize(total_steps);
    double prod = 1.0;
    for (int t = 0; t < total_steps; ++t) {
        double b = beta_start + (beta_end - beta_start) * static_cast<double>(t) /
                                    static_cast<double>(total_steps - 1);
        s.beta[t] = b;
        prod *= (1.0 - b);
        s.alpha_bar[t] = prod;
    }
    return s;
}

inline NoiseSchedule default_schedule() { return make_schedule(1000, 1e-4, 0.02); }

// K stratum midpoints over [0, T): t_i = floor((i + 0.5) * T / K).
// Strictly increasing, covers the schedule, avoids both endpoints.
inline std::vector<int> select_timesteps(int total_steps, int k) {
    if (k < 1 || k > total_steps)
        throw InvalidScheduleParams("select_timesteps: need 1 <= K <= T");
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        out[static_cast<std::size_t>(i)] = static_cast<int>(
            std::floor((i + 0.5) * static_cast<double>(total_steps) / static_cast<double>(k)));
    return out;
}

} // namespace lpv::diffusion
