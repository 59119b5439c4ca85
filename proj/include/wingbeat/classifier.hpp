#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wingbeat/bayes.hpp"
#include "wingbeat/dataset.hpp"
#include "wingbeat/geo.hpp"
#include "wingbeat/rhythm.hpp"

namespace wingbeat {

// A trained n-feature Bayesian classifier: kNN spectrum likelihood plus the
// optional time-of-intercept and location-of-intercept features.
struct Classifier {
    int sample_rate_hz = 8000;
    double band_lo_hz = kBandLoHz;
    double band_hi_hz = kBandHiHz;

    PriorVector priors;
    KnnSpectrumModel knn;
    std::optional<GaussianWingbeatModel> wingbeat;  // fitted for reporting/baselines
    bool use_wingbeat_gaussian = false;
    std::map<ClassLabel, CircadianRhythm> rhythms;   // empty -> time feature unused
    std::map<std::string, GeoModel> geo_by_sensor;   // empty -> geo feature unused
    DecisionPolicy policy;
    std::vector<std::string> exemplar_paths;  // aligned with knn.exemplars; may be empty

    struct Result {
        PosteriorVector posterior;
        std::optional<ClassLabel> decision;  // nullopt = Unknown
        double nn_distance = 0.0;
        bool used_time = false;
        bool used_geo = false;
    };

    Result classify(const Exemplar& query) const;
    std::vector<ClassLabel> classes() const;
};

struct TrainConfig {
    std::optional<int> k;                       // absent -> select_k over candidates
    std::vector<int> k_candidates = {1, 2, 4, 8, 16};
    bool empirical_priors = false;
    int rhythm_bin_minutes = 1;
    double rhythm_epsilon = kDefaultRhythmEpsilon;
    std::map<ClassLabel, CircadianRhythm> rhythm_overrides;  // configured tiers
    std::map<std::string, GeoModel> geo_by_sensor;
    DecisionPolicy policy;
    double band_lo_hz = kBandLoHz;
    double band_hi_hz = kBandHiHz;
    int sample_rate_hz = 8000;
    std::uint64_t seed = 1;
};

// Builds the kNN model, Gaussian wingbeat fit, per-class rhythms (learned
// where timestamps exist, configured tier otherwise) and priors. Classes with
// fewer than two exemplars are rejected by name.
Classifier train_classifier(const std::vector<Exemplar>& data, const TrainConfig& config,
                            std::vector<std::string>* warnings = nullptr);

// Classifies a batch; with jobs > 1 rows are processed in parallel and results
// are returned in input order.
std::vector<Classifier::Result> classify_batch(const Classifier& model,
                                               const std::vector<Exemplar>& rows,
                                               int jobs = 1);

}  // namespace wingbeat
