#pragma once

#include <string>
#include <vector>

namespace abdesign {

enum class ScheduleKind { Linear, Cosine };

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleKind k);

/// Diffusion time discretization and noise coefficients.
///
/// Time is 1-based: t runs over 1..T for noisy states and t = 0 denotes clean
/// data. Stored arrays use index t-1. Invariants, established at construction
/// and immutable afterwards:
///   alpha_bar(t) = prod_{tau<=t} (1 - beta(tau)),  strictly decreasing in t
///   beta_bar(t)  = 1 - alpha_bar(t)
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;       // beta[t-1] in (0,1)
    std::vector<double> alpha_bar;  // alpha_bar[t-1] in (0,1]
    std::vector<double> beta_bar;   // beta_bar[t-1] in [0,1)

    double beta_at(int t) const { return beta.at(static_cast<std::size_t>(t - 1)); }
    double alpha_bar_at(int t) const {
        return t == 0 ? 1.0 : alpha_bar.at(static_cast<std::size_t>(t - 1));
    }
    double beta_bar_at(int t) const {
        return t == 0 ? 0.0 : beta_bar.at(static_cast<std::size_t>(t - 1));
    }
};

/// Build a schedule of T steps. `beta_min`/`beta_max` are the per-step noise
/// bounds; the cosine kind derives betas from a squared-cosine alpha_bar curve
/// and clamps them into [beta_min, beta_max] before re-accumulating, so the
/// NoiseSchedule invariants hold for both kinds by construction.
///
/// Throws ConfigError when T < 1 or the bounds violate 0 < beta_min <=
/// beta_max < 1.
NoiseSchedule build_schedule(int T, ScheduleKind kind, double beta_min, double beta_max);

}  // namespace abdesign
