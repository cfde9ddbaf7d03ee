#include "abdesign/pipeline.hpp"

#include <stdexcept>

#include "abdesign/errors.hpp"

namespace abdesign {

void RunSpec::validate() const {
    if (n_designs < 1) throw ConfigError("run spec: n_designs must be >= 1");
    if (schedule.T < 1) throw ConfigError("run spec: missing schedule");
    if (guidance.t_init < 0 || guidance.t_init > schedule.T)
        throw ConfigError("run spec: t_init must lie in [0, T]");
    if (guidance.strategy != GuidanceStrategy::None && guidance.t_init > 0 && !evaluator)
        throw ConfigError("run spec: guided runs need an evaluator");
    if (context.cdr_span.length < 1)
        throw ConfigError("run spec: context cdr_span must cover at least one residue");
    if (reference && reference->size() != static_cast<std::size_t>(context.cdr_span.length))
        throw ConfigError("run spec: reference length does not match cdr_span");
}

CdrState init_prior(int m, const NoiseSchedule& sched, Rng& rng, so3::IgSo3TableCache* cache) {
    if (m < 1) throw ConfigError("init_prior: m must be >= 1");
    so3::IgSo3TableCache local;
    so3::IgSo3TableCache& tables = cache ? *cache : local;
    const so3::IgSo3Table& prior_table = tables.get(1.0);

    CdrState s;
    s.t = sched.T;
    s.types.reserve(static_cast<std::size_t>(m));
    s.coords.reserve(static_cast<std::size_t>(m));
    s.orients.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        s.types.push_back(static_cast<AminoAcid>(rng.below(kNumAminoAcids)));
        s.coords.push_back(rng.normal3());
        s.orients.push_back(so3::sample_igso3(Rotation::Identity(), prior_table, rng));
    }
    return s;
}

namespace {

DesignReport finalize(const RunSpec& spec, const CdrState& final_state,
                      std::uint64_t queries_used) {
    DesignReport report;
    report.queries_used = queries_used;
    if (spec.reference) {
        report.aar = aar(final_state, *spec.reference);
        report.rmsd = rmsd(final_state, *spec.reference);
    }
    if (spec.evaluator) {
        report.rewards[spec.evaluator->name()] = spec.evaluator->evaluate(final_state);
        if (auto* weighted = dynamic_cast<WeightedObjective*>(spec.evaluator.get())) {
            auto raw = weighted->component_raw_values(final_state);
            const auto& comps = weighted->components();
            for (std::size_t i = 0; i < comps.size(); ++i)
                report.rewards[comps[i].evaluator->name()] = raw[i];
        }
    }
    return report;
}

SampleResult run_chain(const RunSpec& spec, const Denoiser& den, Rng& rng,
                       so3::IgSo3TableCache* cache, const StepObserver& observer) {
    spec.validate();
    const auto& sched = spec.schedule;
    const auto strategy = spec.guidance.strategy;
    const bool guided = strategy != GuidanceStrategy::None && spec.guidance.t_init > 0;
    const std::uint64_t queries_before = spec.evaluator ? spec.evaluator->query_count() : 0;

    so3::IgSo3TableCache local;
    so3::IgSo3TableCache* tables = cache ? cache : &local;

    CdrState state = init_prior(spec.context.cdr_span.length, sched, rng, tables);
    for (int t = sched.T; t >= 1; --t) {
        try {
            if (!guided || t > spec.guidance.t_init) {
                state = ddpm_step(state, spec.context, den, sched, rng, tables);
            } else if (is_raw_strategy(strategy)) {
                state = guideraw_step(state, spec.context, den, *spec.evaluator,
                                      spec.guidance.K, strategy == GuidanceStrategy::RawSoft,
                                      sched, rng, tables, observer);
            } else {
                state = guided_step(state, spec.context, den, *spec.evaluator, spec.guidance,
                                    sched, rng, tables, observer);
            }
        } catch (const EvaluatorError& e) {
            // Keep the error class so callers can still tell timeout,
            // protocol and process failures apart.
            throw EvaluatorError("design aborted at t=" + std::to_string(t) + ": " + e.what(),
                                 e.candidate_index);
        } catch (const std::exception& e) {
            throw ContractError("design aborted at t=" + std::to_string(t) + ": " + e.what());
        }
    }

    const std::uint64_t queries_after = spec.evaluator ? spec.evaluator->query_count() : 0;
    SampleResult result;
    result.report = finalize(spec, state, queries_after - queries_before);
    result.state = std::move(state);
    return result;
}

}  // namespace

SampleResult sample_guided(const RunSpec& spec, const Denoiser& den, Rng& rng,
                           so3::IgSo3TableCache* cache, const StepObserver& observer) {
    if (!is_latent_strategy(spec.guidance.strategy) &&
        spec.guidance.strategy != GuidanceStrategy::None)
        throw ConfigError("sample_guided expects a latent strategy");
    return run_chain(spec, den, rng, cache, observer);
}

SampleResult sample_unconditional(const RunSpec& spec, const Denoiser& den, Rng& rng,
                                  so3::IgSo3TableCache* cache) {
    RunSpec unconditional = spec;
    unconditional.guidance.strategy = GuidanceStrategy::None;
    return run_chain(unconditional, den, rng, cache, nullptr);
}

SampleResult sample_raw_guided(const RunSpec& spec, const Denoiser& den, Rng& rng,
                               so3::IgSo3TableCache* cache, const StepObserver& observer) {
    if (!is_raw_strategy(spec.guidance.strategy))
        throw ConfigError("sample_raw_guided expects guideraw_H or guideraw_S");
    return run_chain(spec, den, rng, cache, observer);
}

SampleResult run_design(const RunSpec& spec, const Denoiser& den, Rng& rng,
                        so3::IgSo3TableCache* cache, const StepObserver& observer) {
    return run_chain(spec, den, rng, cache, observer);
}

}  // namespace abdesign
