#include "wingbeat/classifier.hpp"

#include <algorithm>
#include <thread>

#include "wingbeat/errors.hpp"

namespace wingbeat {

std::vector<ClassLabel> Classifier::classes() const {
    std::vector<ClassLabel> out;
    out.reserve(priors.size());
    for (const auto& [label, p] : priors) out.push_back(label);
    return out;
}

Classifier::Result Classifier::classify(const Exemplar& query) const {
    Result result;
    std::vector<LikelihoodVector> liks;

    const KnnVote vote = knn_vote(query.spectrum, knn);
    result.nn_distance = vote.nn_distance;
    LikelihoodVector spectrum_lik = vote.likelihood;
    for (const auto& [label, p] : priors) {
        if (!spectrum_lik.values.count(label)) spectrum_lik.values[label] = 0.0;
    }
    liks.push_back(floor_likelihood(std::move(spectrum_lik)));

    if (use_wingbeat_gaussian && wingbeat) {
        const Spectrum& s = query.spectrum;
        const double f0 = fundamental_frequency(s, s.start_hz, s.bin_center_hz(s.size() - 1));
        liks.push_back(floor_likelihood(gaussian_likelihood(f0, *wingbeat)));
    }

    if (!rhythms.empty()) {
        if (query.time) {
            LikelihoodVector lv;
            for (const auto& [label, rhythm] : rhythms) {
                lv.values[label] = rhythm_density(rhythm, *query.time);
            }
            liks.push_back(floor_likelihood(std::move(lv)));
            result.used_time = true;
        } else {
            liks.push_back(LikelihoodVector::missing_feature());
        }
    }

    if (!geo_by_sensor.empty()) {
        const auto it = query.sensor ? geo_by_sensor.find(*query.sensor)
                                     : geo_by_sensor.end();
        if (it != geo_by_sensor.end()) {
            LikelihoodVector lv;
            for (const auto& [label, p] : priors) lv.values[label] = geo_ratio(it->second, label);
            liks.push_back(floor_likelihood(std::move(lv)));
            result.used_geo = true;
        } else {
            liks.push_back(LikelihoodVector::missing_feature());
        }
    }

    result.posterior = combine_posterior(priors, liks);
    result.decision = decide(result.posterior, policy, result.nn_distance);
    return result;
}

Classifier train_classifier(const std::vector<Exemplar>& data, const TrainConfig& config,
                            std::vector<std::string>* warnings) {
    if (data.empty()) throw EmptyInput("train_classifier: empty dataset");

    std::map<ClassLabel, std::size_t> counts;
    for (const Exemplar& e : data) {
        if (!e.label) throw InvalidInput("train_classifier: unlabeled exemplar");
        ++counts[*e.label];
        if (!e.spectrum.same_geometry(data.front().spectrum)) {
            throw BinMismatch("train_classifier: spectra disagree in bin geometry");
        }
    }
    if (counts.size() < 2) throw NotEnoughData("train_classifier: need at least 2 classes");
    for (const auto& [label, n] : counts) {
        if (n < 2) {
            throw NotEnoughData("class " + label.str() + " has " + std::to_string(n) +
                                " exemplar(s); need at least 2");
        }
    }

    Classifier model;
    model.sample_rate_hz = config.sample_rate_hz;
    model.band_lo_hz = config.band_lo_hz;
    model.band_hi_hz = config.band_hi_hz;
    model.policy = config.policy;
    model.geo_by_sensor = config.geo_by_sensor;

    for (const Exemplar& e : data) {
        model.knn.exemplars.push_back({e.spectrum, *e.label});
        model.exemplar_paths.push_back(e.path);
    }
    if (config.k) {
        model.knn.k = *config.k;
        if (model.knn.k < 1 ||
            static_cast<std::size_t>(model.knn.k) > model.knn.exemplars.size()) {
            throw InvalidInput("train_classifier: configured k out of range");
        }
    } else {
        model.knn.k = select_k(model.knn.exemplars, config.k_candidates, 0.2, config.seed);
        if (warnings) {
            warnings->push_back("k selected by validation: " + std::to_string(model.knn.k));
        }
    }

    // Priors
    if (config.empirical_priors) {
        const auto total = static_cast<double>(data.size());
        for (const auto& [label, n] : counts) {
            model.priors[label] = static_cast<double>(n) / total;
        }
    } else {
        std::vector<ClassLabel> labels;
        for (const auto& [label, n] : counts) labels.push_back(label);
        model.priors = uniform_prior(labels);
    }

    // Gaussian wingbeat fit; informational unless use_wingbeat_gaussian is on.
    try {
        std::vector<std::pair<ClassLabel, double>> freqs;
        for (const Exemplar& e : data) {
            const Spectrum& s = e.spectrum;
            freqs.emplace_back(*e.label, fundamental_frequency(s, s.start_hz,
                                                               s.bin_center_hz(s.size() - 1)));
        }
        model.wingbeat = fit_gaussian_model(freqs);
    } catch (const NotEnoughVariance&) {
        if (warnings) warnings->push_back("wingbeat frequencies degenerate; Gaussian fit skipped");
    }

    // Rhythms: configured tier wins, otherwise learned, otherwise uniform.
    std::map<ClassLabel, std::vector<TimeOfDay>> times;
    for (const Exemplar& e : data) {
        if (e.time) times[*e.label].push_back(*e.time);
    }
    for (const auto& [label, n] : counts) {
        const auto override_it = config.rhythm_overrides.find(label);
        if (override_it != config.rhythm_overrides.end()) {
            model.rhythms[label] = override_it->second;
            continue;
        }
        const auto times_it = times.find(label);
        if (times_it != times.end() && !times_it->second.empty()) {
            model.rhythms[label] = learn_rhythm(times_it->second, config.rhythm_bin_minutes,
                                                config.rhythm_epsilon);
        } else {
            model.rhythms[label] = uniform_rhythm(config.rhythm_bin_minutes);
            if (warnings) {
                warnings->push_back("class " + label.str() +
                                    " has no timestamps; rhythm set to uniform");
            }
        }
    }
    return model;
}

std::vector<Classifier::Result> classify_batch(const Classifier& model,
                                               const std::vector<Exemplar>& rows,
                                               int jobs) {
    std::vector<Classifier::Result> results(rows.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) results[i] = model.classify(rows[i]);
        return results;
    }
    std::vector<std::thread> workers;
    const auto stride = static_cast<std::size_t>(jobs);
    for (std::size_t t = 0; t < stride; ++t) {
        workers.emplace_back([&, t]() {
            for (std::size_t i = t; i < rows.size(); i += stride) {
                results[i] = model.classify(rows[i]);
            }
        });
    }
    for (auto& w : workers) w.join();
    return results;
}

}  // namespace wingbeat
