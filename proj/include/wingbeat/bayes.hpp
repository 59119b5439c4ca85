#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wingbeat/bayes_types.hpp"
#include "wingbeat/spectrum.hpp"

namespace wingbeat {

// Per-class Gaussian fit of the wingbeat (fundamental) frequency.
struct GaussianWingbeatModel {
    struct Params {
        double mean_hz = 0.0;
        double std_hz = 0.0;
    };
    std::map<ClassLabel, Params> classes;
};

// Labeled band-truncated spectra plus the neighborhood size k.
struct KnnSpectrumModel {
    struct Entry {
        Spectrum spectrum;
        ClassLabel label;
    };
    std::vector<Entry> exemplars;
    int k = 8;
};

// How a posterior becomes a decision. In threshold mode the target class is
// predicted iff its posterior reaches the threshold. Optional Unknown rules:
// flag when the posterior peak is below tau, or when the query's nearest
// training neighbor is further than max_nn_distance.
struct DecisionPolicy {
    enum class Mode { argmax, threshold };
    Mode mode = Mode::argmax;
    ClassLabel target_class;
    double threshold = 0.5;

    std::optional<double> unknown_tau;
    std::optional<double> max_nn_distance;
};

// Likelihood floor applied before posterior combination so that no single
// feature can zero out a class (Laplacian correction).
inline constexpr double kLikelihoodFloor = 1e-12;

// Euclidean distance between two band-truncated magnitude spectra.
double spectrum_distance(const Spectrum& a, const Spectrum& b);

struct KnnVote {
    LikelihoodVector likelihood;  // fraction of the k nearest neighbors per class
    double nn_distance = 0.0;     // distance to the single nearest neighbor
};

// kNN density estimate: P(X|C_i) = k_i / k over the k nearest exemplars.
// Distance ties keep the earliest-indexed exemplar.
KnnVote knn_vote(const Spectrum& query, const KnnSpectrumModel& model);
LikelihoodVector knn_likelihood(const Spectrum& query, const KnnSpectrumModel& model);

// Per-class normal density of the observed wingbeat frequency.
LikelihoodVector gaussian_likelihood(double freq_hz, const GaussianWingbeatModel& model);

// Prior times the product of all present likelihoods, renormalized to sum 1.
// Missing features contribute no factor. An all-zero product throws
// DegeneratePosterior.
PosteriorVector combine_posterior(const PriorVector& prior,
                                  const std::vector<LikelihoodVector>& likelihoods);

// Incremental form: multiply one new feature into an existing posterior.
PosteriorVector update_posterior(const PosteriorVector& current,
                                 const LikelihoodVector& new_feature);

// Applies the policy; nullopt means Unknown.
std::optional<ClassLabel> decide(const PosteriorVector& posterior,
                                 const DecisionPolicy& policy,
                                 std::optional<double> nn_distance = std::nullopt);

// Sample mean and sample standard deviation per class. Classes with fewer
// than two samples throw NotEnoughData, zero spread throws NotEnoughVariance.
GaussianWingbeatModel fit_gaussian_model(
    const std::vector<std::pair<ClassLabel, double>>& labeled_freqs);

// Validation-accuracy selection of k over the candidates; ties prefer the
// smaller k. The split is deterministic for a given seed.
int select_k(const std::vector<KnnSpectrumModel::Entry>& exemplars,
             const std::vector<int>& candidate_ks,
             double validation_fraction = 0.2,
             std::uint64_t seed = 1);

// Raises every entry to at least kLikelihoodFloor.
LikelihoodVector floor_likelihood(LikelihoodVector v, double floor = kLikelihoodFloor);

PriorVector uniform_prior(const std::vector<ClassLabel>& classes);
void validate_prior(const PriorVector& prior);

// 99th percentile of each exemplar's distance to its nearest other exemplar;
// the default Unknown cutoff.
double default_unknown_distance(const KnnSpectrumModel& model, double percentile = 0.99);

}  // namespace wingbeat
