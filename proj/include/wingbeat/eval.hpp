#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wingbeat/bayes.hpp"
#include "wingbeat/classifier.hpp"
#include "wingbeat/dataset.hpp"
#include "wingbeat/geo.hpp"
#include "wingbeat/rhythm.hpp"
#include "wingbeat/synth.hpp"

namespace wingbeat {

// Per-class feature histogram over shared bin edges; masses need not sum to 1.
struct DiscreteDensity {
    std::vector<double> mass;
};

struct ConfusionMatrix {
    std::vector<ClassLabel> classes;
    std::vector<std::vector<std::size_t>> counts;  // [actual][predicted]
    std::vector<std::size_t> unknown;              // Unknown outcomes per actual class

    std::size_t total() const;
    std::size_t row_total(std::size_t actual) const;
    void write_csv(std::ostream& out) const;
};

struct ExperimentReport {
    double accuracy = 0.0;
    double error_rate = 0.0;
    std::map<ClassLabel, double> per_class_accuracy;
    std::size_t n_total = 0;
    std::size_t n_decided = 0;
    std::size_t n_unknown = 0;
    std::uint64_t seed = 0;
    std::string parameters;
};

// Optimal (Bayes) error of any classifier using this one discrete feature:
// 1 - sum_bins max_i P(C_i) p_i(bin), densities normalized to sum 1.
// `priors` aligns with `densities` by index.
double bayes_error(const std::vector<DiscreteDensity>& densities,
                   const std::vector<double>& priors);

// Same quantity for Gaussian class-conditionals, by numerical integration
// over [min mu - 6 sigma, max mu + 6 sigma].
double gaussian_bayes_error(const GaussianWingbeatModel& model, const PriorVector& priors,
                            double grid_hz = 0.25);

// Which features the evaluation classifier uses and how rhythms are sourced.
// Classes not in rhythm_overrides learn their rhythm from the data itself
// (downdated per fold); classes with no timestamps fall back to uniform.
struct ClassifierSpec {
    int k = 8;
    bool use_spectrum = true;
    bool use_wingbeat_gaussian = false;
    bool use_time = false;
    bool use_geo = false;
    bool empirical_priors = false;
    std::map<ClassLabel, CircadianRhythm> rhythm_overrides;
    std::map<std::string, GeoModel> geo_by_sensor;
    int rhythm_bin_minutes = 1;
    double rhythm_epsilon = kDefaultRhythmEpsilon;
    int jobs = 1;
    std::uint64_t seed = 1;
};

struct LooResult {
    ExperimentReport report;
    ConfusionMatrix confusion;
    std::vector<PosteriorVector> posteriors;            // per dataset row
    std::vector<std::optional<ClassLabel>> predictions;  // nullopt = Unknown
};

// Each exemplar classified by a model trained on all others. Exact folds:
// kNN neighbors exclude the row, Gaussian fits, learned rhythms and empirical
// priors are downdated by the held-out row.
LooResult leave_one_out(const std::vector<Exemplar>& data, const ClassifierSpec& spec,
                        const DecisionPolicy& policy = {});

struct SweepPoint {
    double threshold = 0.0;
    double target_missed_rate = 0.0;  // actual target predicted as the other class
    double other_missed_rate = 0.0;   // actual other predicted as target
};

// Applies the threshold decision rule over a grid to held-out posteriors of a
// binary task.
std::vector<SweepPoint> threshold_sweep(const std::vector<Exemplar>& data,
                                        const ClassifierSpec& spec,
                                        const ClassLabel& target_class,
                                        const std::vector<double>& thresholds);

struct ScalingStep {
    std::size_t step = 0;  // number of classes
    double accuracy = 0.0;
};

// Leave-one-out accuracy over the first n classes, for n = 2..N.
std::vector<ScalingStep> class_scaling_experiment(const std::vector<ClassLabel>& ordered_classes,
                                                  const std::vector<Exemplar>& data,
                                                  const ClassifierSpec& spec);

struct TimeWindow {
    TimeOfDay start;
    TimeOfDay end;  // half-open, may wrap past midnight

    bool contains(TimeOfDay t) const;
};

inline const TimeWindow kDefaultDawnWindow{TimeOfDay(5 * 60.0), TimeOfDay(8 * 60.0)};
inline const TimeWindow kDefaultDuskWindow{TimeOfDay(20 * 60.0), TimeOfDay(23 * 60.0)};

struct IndependenceResult {
    double mean_error = 0.0;
    std::vector<double> per_resampling;
};

// Labels one class's exemplars by capture window and classifies on spectrum
// alone; error near 0.5 indicates the spectrum is independent of the time.
IndependenceResult independence_check(const std::vector<Exemplar>& single_class_data,
                                      const TimeWindow& window_a, const TimeWindow& window_b,
                                      std::size_t samples_per_window = 1000,
                                      std::size_t resamplings = 10, int k = 8,
                                      std::uint64_t seed = 1);

// Rhythm source for the ablation's target class.
struct RhythmVariant {
    enum class Kind { none, uniform, text_template, proxy, learned };
    Kind kind = Kind::none;
    CircadianRhythm rhythm;  // used by uniform / text_template / proxy
    std::string name() const;
};

struct AblationRow {
    RhythmVariant::Kind kind;
    double accuracy = 0.0;
};

// One leave-one-out accuracy per rhythm approximation tier for target_class,
// all on identical folds; non-target classes keep their learned rhythms.
std::vector<AblationRow> ablation_rhythms(const std::vector<Exemplar>& data,
                                          const ClassLabel& target_class,
                                          const std::vector<RhythmVariant>& variants,
                                          const ClassifierSpec& base_spec);

struct GeoSimOptions {
    std::size_t n_train_per_class = 300;
    std::size_t n_geo_per_species = 10000;
    std::optional<double> snr_db = 20.0;
    int k = 8;
    std::uint64_t seed = 7;
};

struct GeoSimResult {
    std::map<std::string, std::map<ClassLabel, std::size_t>> capture_counts;
    double error_without_geo = 0.0;
    double error_with_geo = 0.0;
    std::size_t n_test = 0;
};

// Location-of-intercept simulation: trains on synthetic snippets, estimates
// per-sensor prevalence ratios from a calibration projection, then classifies
// the captured test insects with and without the location feature.
GeoSimResult geo_simulation(const GeoScenario& scenario,
                            const std::vector<SpeciesSpec>& specs,
                            const GeoSimOptions& options = {});

std::string report_text(const ExperimentReport& report);

}  // namespace wingbeat
