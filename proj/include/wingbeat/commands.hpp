#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wingbeat/bayes.hpp"
#include "wingbeat/detect.hpp"

namespace wingbeat {

// Everything a run needs, loadable from a JSON config file. Each eval run
// directory gets a copy so results are reproducible from the directory alone.
struct RunConfig {
    double band_lo_hz = kBandLoHz;
    double band_hi_hz = kBandHiHz;
    std::optional<int> k;
    std::vector<int> k_candidates = {1, 2, 4, 8, 16};
    bool empirical_priors = false;
    std::string feature_config_path;  // rhythm tiers + geo weights (JSON)
    DecisionPolicy policy;
    std::uint64_t seed = 1;
    int jobs = 1;

    // Detector inputs
    std::vector<std::string> insect_exemplar_wavs;
    std::string background_wav;
    double window_ms = 100.0;
    double hop_ms = 10.0;
    DetectorModel::Tuning tuning;

    // Experiment extras
    std::string eval_target;                 // sweep / ablation target class
    std::string eval_class;                  // independence-check class
    std::vector<double> sweep_thresholds;    // empty -> 0.5 down to 0.05
    std::string scenario_json;               // synth / geo-sim scenario (raw JSON)

    std::string source_path;  // where this config was loaded from, if anywhere
};

RunConfig load_run_config(const std::string& path);

int cmd_detect(const std::string& input_dir, const std::string& out_dir,
               const RunConfig& config, std::ostream& log);
int cmd_train(const std::string& manifest_path, const std::string& model_out,
              const RunConfig& config, std::ostream& log);
int cmd_classify(const std::string& manifest_path, const std::string& model_path,
                 const std::string& out_csv, const RunConfig& config, std::ostream& log);
int cmd_eval(const std::string& experiment, const std::string& manifest_path,
             const std::string& out_dir, const RunConfig& config, std::ostream& log);
int cmd_synth(const std::string& out_dir, const RunConfig& config, std::ostream& log);

// Deterministic float formatting shared by all CSV writers.
std::string fmt_double(double v);

}  // namespace wingbeat
