#include "wingbeat/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<ClassLabel> model_classes(const KnnSpectrumModel& model) {
    std::set<ClassLabel> seen;
    for (const auto& e : model.exemplars) seen.insert(e.label);
    return {seen.begin(), seen.end()};
}

// Indices of the k nearest exemplars, ties at equal distance keeping the
// earlier index.
std::vector<std::size_t> k_nearest(const Spectrum& query,
                                   const std::vector<KnnSpectrumModel::Entry>& exemplars,
                                   std::size_t k) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(exemplars.size());
    for (std::size_t i = 0; i < exemplars.size(); ++i) {
        ranked.emplace_back(spectrum_distance(query, exemplars[i].spectrum), i);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k),
                      ranked.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = ranked[i].second;
    return out;
}

}  // namespace

double spectrum_distance(const Spectrum& a, const Spectrum& b) {
    if (!a.same_geometry(b)) {
        throw BinMismatch("spectrum_distance: spectra have different bin geometry");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.magnitudes[i] - b.magnitudes[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

KnnVote knn_vote(const Spectrum& query, const KnnSpectrumModel& model) {
    if (model.exemplars.empty()) throw InvalidInput("knn_vote: model has no exemplars");
    if (model.k < 1 || static_cast<std::size_t>(model.k) > model.exemplars.size()) {
        throw InvalidInput("knn_vote: k out of range");
    }
    const auto top = k_nearest(query, model.exemplars, static_cast<std::size_t>(model.k));

    KnnVote vote;
    for (const ClassLabel& c : model_classes(model)) vote.likelihood.values[c] = 0.0;
    const double frac = 1.0 / static_cast<double>(model.k);
    for (std::size_t idx : top) vote.likelihood.values[model.exemplars[idx].label] += frac;
    vote.nn_distance = spectrum_distance(query, model.exemplars[top.front()].spectrum);
    return vote;
}

LikelihoodVector knn_likelihood(const Spectrum& query, const KnnSpectrumModel& model) {
    return knn_vote(query, model).likelihood;
}

LikelihoodVector gaussian_likelihood(double freq_hz, const GaussianWingbeatModel& model) {
    if (!std::isfinite(freq_hz)) throw InvalidInput("gaussian_likelihood: non-finite frequency");
    LikelihoodVector out;
    for (const auto& [label, params] : model.classes) {
        const double z = (freq_hz - params.mean_hz) / params.std_hz;
        out.values[label] = std::exp(-0.5 * z * z) / (params.std_hz * std::sqrt(kTwoPi));
    }
    return out;
}

PosteriorVector combine_posterior(const PriorVector& prior,
                                  const std::vector<LikelihoodVector>& likelihoods) {
    PosteriorVector post = prior;
    for (const LikelihoodVector& lv : likelihoods) {
        if (lv.missing) continue;
        if (lv.values.size() != prior.size()) {
            throw InvalidInput("combine_posterior: likelihood covers a different class set");
        }
        for (auto& [label, p] : post) {
            const auto it = lv.values.find(label);
            if (it == lv.values.end()) {
                throw InvalidInput("combine_posterior: likelihood missing class " + label.str());
            }
            p *= it->second;
        }
    }
    const double total = std::accumulate(post.begin(), post.end(), 0.0,
                                         [](double acc, const auto& kv) { return acc + kv.second; });
    if (!(total > 0.0)) {
        throw DegeneratePosterior("combine_posterior: all posterior mass is zero");
    }
    for (auto& [label, p] : post) p /= total;
    return post;
}

PosteriorVector update_posterior(const PosteriorVector& current,
                                 const LikelihoodVector& new_feature) {
    return combine_posterior(current, {new_feature});
}

std::optional<ClassLabel> decide(const PosteriorVector& posterior,
                                 const DecisionPolicy& policy,
                                 std::optional<double> nn_distance) {
    if (posterior.empty()) throw InvalidInput("decide: empty posterior");

    const auto argmax_of = [](const PosteriorVector& p) {
        auto best = p.begin();
        for (auto it = std::next(p.begin()); it != p.end(); ++it) {
            if (it->second > best->second) best = it;  // ties keep the lexicographically first
        }
        return best;
    };

    const auto best = argmax_of(posterior);
    if (policy.unknown_tau && best->second < *policy.unknown_tau) return std::nullopt;
    if (policy.max_nn_distance && nn_distance && *nn_distance > *policy.max_nn_distance) {
        return std::nullopt;
    }

    if (policy.mode == DecisionPolicy::Mode::threshold) {
        const auto target = posterior.find(policy.target_class);
        if (target == posterior.end()) {
            throw InvalidInput("decide: target class " + policy.target_class.str() +
                               " not in posterior");
        }
        if (target->second >= policy.threshold) return policy.target_class;
        PosteriorVector rest = posterior;
        rest.erase(policy.target_class);
        if (rest.empty()) return policy.target_class;
        return argmax_of(rest)->first;
    }
    return best->first;
}

GaussianWingbeatModel fit_gaussian_model(
    const std::vector<std::pair<ClassLabel, double>>& labeled_freqs) {
    std::map<ClassLabel, std::vector<double>> per_class;
    for (const auto& [label, f] : labeled_freqs) per_class[label].push_back(f);
    if (per_class.empty()) throw EmptyInput("fit_gaussian_model: no samples");

    GaussianWingbeatModel model;
    for (const auto& [label, xs] : per_class) {
        const auto n = static_cast<double>(xs.size());
        if (xs.size() < 2) {
            throw NotEnoughData("fit_gaussian_model: class " + label.str() +
                                " has fewer than 2 samples");
        }
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0)) {
            throw NotEnoughVariance("fit_gaussian_model: class " + label.str() +
                                    " has zero spread");
        }
        model.classes[label] = {mean, sd};
    }
    return model;
}

int select_k(const std::vector<KnnSpectrumModel::Entry>& exemplars,
             const std::vector<int>& candidate_ks,
             double validation_fraction, std::uint64_t seed) {
    if (candidate_ks.empty()) throw InvalidInput("select_k: no candidates");
    if (candidate_ks.size() == 1) return candidate_ks.front();
    if (exemplars.size() < 4) throw NotEnoughData("select_k: too few exemplars to split");
    if (validation_fraction <= 0.0 || validation_fraction >= 1.0) {
        throw InvalidInput("select_k: validation_fraction must be in (0, 1)");
    }

    std::vector<std::size_t> order(exemplars.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(validation_fraction *
                                                 static_cast<double>(exemplars.size()))));
    KnnSpectrumModel train;
    std::vector<const KnnSpectrumModel::Entry*> validation;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < n_val) {
            validation.push_back(&exemplars[order[i]]);
        } else {
            train.exemplars.push_back(exemplars[order[i]]);
        }
    }
    if (train.exemplars.empty()) throw NotEnoughData("select_k: empty training split");

    int best_k = 0;
    double best_acc = -1.0;
    std::vector<int> ks = candidate_ks;
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
        if (k < 1 || static_cast<std::size_t>(k) > train.exemplars.size()) continue;
        train.k = k;
        std::size_t correct = 0;
        for (const auto* v : validation) {
            const auto lik = knn_likelihood(v->spectrum, train);
            const auto pred = decide(combine_posterior(
                uniform_prior(model_classes(train)), {lik}), DecisionPolicy{});
            if (pred && *pred == v->label) ++correct;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(validation.size());
        if (acc > best_acc) {  // ties keep the smaller k (ks sorted ascending)
            best_acc = acc;
            best_k = k;
        }
    }
    if (best_k == 0) throw InvalidInput("select_k: no candidate k fits the training split");
    return best_k;
}

LikelihoodVector floor_likelihood(LikelihoodVector v, double floor) {
    for (auto& [label, p] : v.values) p = std::max(p, floor);
    return v;
}

PriorVector uniform_prior(const std::vector<ClassLabel>& classes) {
    if (classes.empty()) throw EmptyInput("uniform_prior: no classes");
    PriorVector prior;
    const double p = 1.0 / static_cast<double>(classes.size());
    for (const ClassLabel& c : classes) prior[c] = p;
    return prior;
}

void validate_prior(const PriorVector& prior) {
    if (prior.empty()) throw InvalidInput("prior has no classes");
    double total = 0.0;
    for (const auto& [label, p] : prior) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw InvalidInput("prior for " + label.str() + " is invalid");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidInput("prior sums to " + std::to_string(total));
    }
}

double default_unknown_distance(const KnnSpectrumModel& model, double percentile) {
    if (model.exemplars.size() < 2) {
        throw NotEnoughData("default_unknown_distance: need at least 2 exemplars");
    }
    std::vector<double> nn(model.exemplars.size(),
                           std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < model.exemplars.size(); ++i) {
        for (std::size_t j = i + 1; j < model.exemplars.size(); ++j) {
            const double d = spectrum_distance(model.exemplars[i].spectrum,
                                               model.exemplars[j].spectrum);
            nn[i] = std::min(nn[i], d);
            nn[j] = std::min(nn[j], d);
        }
    }
    std::sort(nn.begin(), nn.end());
    const auto idx = static_cast<std::size_t>(
        std::clamp(percentile, 0.0, 1.0) * static_cast<double>(nn.size() - 1));
    return nn[idx];
}

}  // namespace wingbeat
