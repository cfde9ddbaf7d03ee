#include "abdesign/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "abdesign/errors.hpp"

namespace abdesign {

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "linear") return ScheduleKind::Linear;
    if (s == "cosine") return ScheduleKind::Cosine;
    throw ConfigError("unknown schedule kind: '" + s + "' (expected linear or cosine)");
}

std::string to_string(ScheduleKind k) {
    return k == ScheduleKind::Linear ? "linear" : "cosine";
}

NoiseSchedule build_schedule(int T, ScheduleKind kind, double beta_min, double beta_max) {
    if (T < 1) throw ConfigError("schedule needs T >= 1, got T=" + std::to_string(T));
    if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0))
        throw ConfigError("schedule bounds must satisfy 0 < beta_min <= beta_max < 1");

    NoiseSchedule s;
    s.T = T;
    s.beta.resize(static_cast<std::size_t>(T));

    if (kind == ScheduleKind::Linear) {
        for (int t = 1; t <= T; ++t) {
            double frac = T == 1 ? 0.0 : static_cast<double>(t - 1) / static_cast<double>(T - 1);
            s.beta[static_cast<std::size_t>(t - 1)] = beta_min + (beta_max - beta_min) * frac;
        }
    } else {
        // Squared-cosine alpha_bar curve with the usual small offset; betas
        // come from consecutive ratios and are clamped into the given bounds.
        const double offset = 0.008;
        auto curve = [&](double u) {
            double v = std::cos((u + offset) / (1.0 + offset) * M_PI / 2.0);
            return v * v;
        };
        double prev = curve(0.0);
        for (int t = 1; t <= T; ++t) {
            double cur = curve(static_cast<double>(t) / static_cast<double>(T));
            double b = 1.0 - cur / prev;
            s.beta[static_cast<std::size_t>(t - 1)] = std::clamp(b, beta_min, beta_max);
            prev = cur;
        }
    }

    s.alpha_bar.resize(static_cast<std::size_t>(T));
    s.beta_bar.resize(static_cast<std::size_t>(T));
    double prod = 1.0;
    for (int t = 1; t <= T; ++t) {
        prod *= 1.0 - s.beta[static_cast<std::size_t>(t - 1)];
        s.alpha_bar[static_cast<std::size_t>(t - 1)] = prod;
        s.beta_bar[static_cast<std::size_t>(t - 1)] = 1.0 - prod;
    }
    return s;
}

}  // namespace abdesign
