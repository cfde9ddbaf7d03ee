#pragma once

#include <memory>
#include <optional>
#include <string>

#include "abdesign/guidance.hpp"
#include "abdesign/metrics.hpp"

namespace abdesign {

/// Everything one design chain needs. `queries_used` in the resulting report
/// counts evaluator calls made during the chain itself; reward reporting on
/// the finished design happens after the count is taken and is not charged
/// to the budget.
struct RunSpec {
    NoiseSchedule schedule;
    GuidanceConfig guidance;
    std::shared_ptr<Evaluator> evaluator;  // may be null for unconditional runs
    int n_designs = 1;
    std::optional<CdrState> reference;
    ComplexContext context;
    std::string denoiser_id;

    void validate() const;
};

struct SampleResult {
    CdrState state;  // t = 0
    DesignReport report;
};

/// Prior at t = T: types uniform over the alphabet, coordinates standard
/// normal, orientations isotropic around the identity with concentration 1.
CdrState init_prior(int m, const NoiseSchedule& sched, Rng& rng,
                    so3::IgSo3TableCache* cache = nullptr);

/// Latent-guided chain: DDPM steps while t > t_init, guided steps after.
SampleResult sample_guided(const RunSpec& spec, const Denoiser& den, Rng& rng,
                           so3::IgSo3TableCache* cache = nullptr,
                           const StepObserver& observer = nullptr);

/// Full DDPM chain, zero evaluator queries.
SampleResult sample_unconditional(const RunSpec& spec, const Denoiser& den, Rng& rng,
                                  so3::IgSo3TableCache* cache = nullptr);

/// Raw-space best-of-K chain: DDPM above t_init, candidate selection after.
SampleResult sample_raw_guided(const RunSpec& spec, const Denoiser& den, Rng& rng,
                               so3::IgSo3TableCache* cache = nullptr,
                               const StepObserver& observer = nullptr);

/// Dispatch on spec.guidance.strategy.
SampleResult run_design(const RunSpec& spec, const Denoiser& den, Rng& rng,
                        so3::IgSo3TableCache* cache = nullptr,
                        const StepObserver& observer = nullptr);

}  // namespace abdesign
