#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "abdesign/oracle.hpp"
#include "abdesign/pipeline.hpp"
#include "abdesign/toy_denoiser.hpp"

namespace abdesign {

struct DenoiserSpec {
    std::string kind = "oracle";  // oracle | toy
    std::string checkpoint;       // toy: load from file when set
    int train_epochs = 40;        // toy: trained on the fly otherwise
    int train_dataset_size = 256;
};

struct EvaluatorSpec {
    std::string kind = "quadratic";  // hydropathy | quadratic | weighted | external
    // quadratic
    int target_component = 1;
    double lambda = 2.0;
    double mu = 1.0;
    // weighted
    std::vector<EvaluatorSpec> components;
    std::vector<double> weights;
    // external
    std::vector<std::string> command;
    int timeout_ms = 30000;
};

struct ExperimentConfig {
    std::string task = "synthetic_mixture";
    SyntheticTask task_def = SyntheticTask::default_task();

    std::vector<GuidanceStrategy> strategies = {GuidanceStrategy::Hard};
    int K = 20;
    std::vector<int> k_sweep;           // when set, one cell per K
    std::vector<double> weight_sweep;   // when set, one cell per w (needs 2-component weighted)
    std::optional<int> t_init;          // default: T/2 latent, T raw, 0 none
    SigmaPolicy sigma;
    int n_designs = 16;
    std::uint64_t seed = 0;
    std::string output_dir = "runs/out";
    int workers = 1;
    int calibration_samples = 100;
    DenoiserSpec denoiser;
    EvaluatorSpec evaluator;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int resolved_t_init(GuidanceStrategy s) const;
};

/// One generated design in an experiment table.
struct DesignRow {
    std::string strategy;
    int K = 0;
    std::optional<double> w;
    std::uint64_t seed = 0;
    int design_index = 0;
    std::optional<double> aar;
    std::optional<double> rmsd;
    std::map<std::string, double> rewards;
    std::uint64_t queries_used = 0;
    std::string error;  // empty on success
};

struct ExperimentResults {
    std::vector<DesignRow> rows;
    std::vector<std::string> reward_columns;   // union of reward names, sorted
    std::vector<std::string> component_names;  // weighted objectives only
    std::vector<Normalizer> normalizers;       // weighted objectives only
    std::string results_path;
    std::string aggregates_path;
    std::string meta_path;
};

/// Run every (strategy, K, w) cell of the config: n_designs chains per cell,
/// per-design rows in results.csv, per-cell mean/std in aggregates.csv and a
/// metadata sidecar (config hash, schedule, normalizers, code version) in
/// meta.json. Output is a deterministic function of config + seed; designs
/// are distributed over `workers` threads but rows are written in design
/// order. A failed design becomes a row with the error column set and the
/// run continues.
ExperimentResults run_experiment(const ExperimentConfig& cfg);

/// Fig-style trade-off table from a weight sweep over a two-component
/// objective: one `w, mean_1, mean_2, std_1, std_2` row per weight, sorted
/// ascending in w.
void emit_tradeoff_data(const ExperimentResults& results, const std::string& path);

/// Query-efficiency table from a K sweep: one `strategy, K, mean_reward,
/// std_reward, total_queries` row per cell, strategies in config order.
void emit_query_curve(const ExperimentResults& results, const std::string& path);

/// FNV-1a over the canonical config serialization; recorded in meta.json.
std::uint64_t config_hash(const ExperimentConfig& cfg);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace abdesign
