#include "wingbeat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(kTwoPi));
}

// ---------------------------------------------------------------------------
// Shared leave-one-out machinery. The kNN neighbor lists, fundamentals and
// per-class statistics do not depend on the rhythm/geo configuration, so they
// are computed once and reused across experiment variants.
// ---------------------------------------------------------------------------

struct Neighbor {
    double d2 = 0.0;
    std::size_t idx = 0;
};

// Sorted fixed-capacity neighbor list; ties at equal distance keep the
// earlier-arriving (lower) index.
void consider_neighbor(std::vector<Neighbor>& best, std::size_t k, double d2, std::size_t idx) {
    if (best.size() == k && d2 >= best.back().d2) return;
    auto pos = std::upper_bound(best.begin(), best.end(), d2,
                                [](double v, const Neighbor& nb) { return v < nb.d2; });
    best.insert(pos, {d2, idx});
    if (best.size() > k) best.pop_back();
}

struct GaussStats {
    double n = 0.0, sum = 0.0, sumsq = 0.0;
};

struct RhythmCounts {
    std::vector<double> counts;
    double n = 0.0;
};

struct LooContext {
    std::vector<ClassLabel> classes;
    std::map<ClassLabel, std::size_t> class_counts;
    std::vector<std::vector<Neighbor>> neighbors;  // per row, k nearest (self excluded)
    std::vector<double> nn_distance;
    std::vector<double> fundamental_hz;
    std::map<ClassLabel, GaussStats> gauss;
    std::map<ClassLabel, RhythmCounts> rhythm_counts;
    int bin_minutes = 1;
    int k = 8;
};

double row_distance2(const Spectrum& a, const Spectrum& b) {
    const double* pa = a.magnitudes.data();
    const double* pb = b.magnitudes.data();
    const std::size_t n = a.magnitudes.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return acc;
}

void compute_neighbors(const std::vector<Exemplar>& data, LooContext& ctx, int jobs) {
    const std::size_t n = data.size();
    const auto k = static_cast<std::size_t>(ctx.k);
    ctx.neighbors.assign(n, {});
    for (auto& nb : ctx.neighbors) nb.reserve(k + 1);

    if (jobs <= 1) {
        // Symmetric pass: each pair distance computed once. Candidates arrive
        // in ascending index order for every row, preserving the tie rule.
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d2 = row_distance2(data[i].spectrum, data[j].spectrum);
                consider_neighbor(ctx.neighbors[i], k, d2, j);
                consider_neighbor(ctx.neighbors[j], k, d2, i);
            }
        }
    } else {
        std::vector<std::thread> workers;
        const auto stride = static_cast<std::size_t>(jobs);
        for (std::size_t t = 0; t < stride; ++t) {
            workers.emplace_back([&, t]() {
                for (std::size_t i = t; i < n; i += stride) {
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) continue;
                        const double d2 = row_distance2(data[i].spectrum, data[j].spectrum);
                        consider_neighbor(ctx.neighbors[i], k, d2, j);
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    ctx.nn_distance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ctx.nn_distance[i] = ctx.neighbors[i].empty()
                                 ? 0.0
                                 : std::sqrt(ctx.neighbors[i].front().d2);
    }
}

LooContext build_loo_context(const std::vector<Exemplar>& data, const ClassifierSpec& spec) {
    if (data.size() < 2) throw NotEnoughData("leave-one-out needs at least 2 exemplars");
    LooContext ctx;
    ctx.k = spec.k;
    ctx.bin_minutes = spec.rhythm_bin_minutes;

    for (const Exemplar& e : data) {
        if (!e.label) throw InvalidInput("leave-one-out requires labeled exemplars");
        ++ctx.class_counts[*e.label];
        if (!e.spectrum.same_geometry(data.front().spectrum)) {
            throw BinMismatch("dataset spectra disagree in bin geometry");
        }
    }
    for (const auto& [label, count] : ctx.class_counts) {
        if (count < 2) {
            throw NotEnoughData("class " + label.str() + " has a single exemplar");
        }
        ctx.classes.push_back(label);
    }
    if (spec.k < 1 || static_cast<std::size_t>(spec.k) >= data.size()) {
        throw InvalidInput("k out of range for leave-one-out");
    }

    if (spec.use_spectrum) compute_neighbors(data, ctx, spec.jobs);

    if (spec.use_wingbeat_gaussian) {
        ctx.fundamental_hz.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const Spectrum& s = data[i].spectrum;
            ctx.fundamental_hz[i] =
                fundamental_frequency(s, s.start_hz, s.bin_center_hz(s.size() - 1));
            auto& g = ctx.gauss[*data[i].label];
            g.n += 1.0;
            g.sum += ctx.fundamental_hz[i];
            g.sumsq += ctx.fundamental_hz[i] * ctx.fundamental_hz[i];
        }
    }

    if (spec.use_time) {
        const auto n_bins = static_cast<std::size_t>(1440 / ctx.bin_minutes);
        for (const Exemplar& e : data) {
            if (!e.time) continue;
            auto& rc = ctx.rhythm_counts[*e.label];
            if (rc.counts.empty()) rc.counts.assign(n_bins, 0.0);
            const auto bin = std::min(n_bins - 1,
                                      static_cast<std::size_t>(e.time->minutes_since_midnight /
                                                               ctx.bin_minutes));
            rc.counts[bin] += 1.0;
            rc.n += 1.0;
        }
    }
    return ctx;
}

// Learned-rhythm density of one bin with an optional held-out observation
// removed; mirrors learn_rhythm's floor-then-normalize.
double learned_density_at(const RhythmCounts& rc, std::size_t bin, double eps,
                          bool downdate) {
    const double n = rc.n - (downdate ? 1.0 : 0.0);
    if (n < 1.0) return 1.0 / static_cast<double>(rc.counts.size());
    double z = 0.0;
    double at_bin = 0.0;
    for (std::size_t b = 0; b < rc.counts.size(); ++b) {
        double c = rc.counts[b];
        if (downdate && b == bin) c -= 1.0;
        const double q = std::max(c / n, eps);
        z += q;
        if (b == bin) at_bin = q;
    }
    return at_bin / z;
}

struct EvalOptions {
    const ClassifierSpec* spec = nullptr;
    const DecisionPolicy* policy = nullptr;
};

LooResult evaluate_loo(const std::vector<Exemplar>& data, const LooContext& ctx,
                       const EvalOptions& opt) {
    const ClassifierSpec& spec = *opt.spec;
    const DecisionPolicy& policy = *opt.policy;
    const std::size_t n = data.size();
    const auto n_bins = static_cast<std::size_t>(1440 / ctx.bin_minutes);

    LooResult result;
    result.posteriors.resize(n);
    result.predictions.resize(n);
    result.confusion.classes = ctx.classes;
    result.confusion.counts.assign(ctx.classes.size(),
                                   std::vector<std::size_t>(ctx.classes.size(), 0));
    result.confusion.unknown.assign(ctx.classes.size(), 0);

    std::map<ClassLabel, std::size_t> class_index;
    for (std::size_t c = 0; c < ctx.classes.size(); ++c) class_index[ctx.classes[c]] = c;

    std::size_t correct = 0, decided = 0;
    std::map<ClassLabel, std::size_t> class_correct;

    for (std::size_t i = 0; i < n; ++i) {
        const ClassLabel& actual = *data[i].label;

        PriorVector prior;
        if (spec.empirical_priors) {
            const double total = static_cast<double>(n - 1);
            for (const ClassLabel& c : ctx.classes) {
                const double cnt = static_cast<double>(ctx.class_counts.at(c)) -
                                   (c == actual ? 1.0 : 0.0);
                prior[c] = cnt / total;
            }
        } else {
            prior = uniform_prior(ctx.classes);
        }

        std::vector<LikelihoodVector> liks;
        if (spec.use_spectrum) {
            LikelihoodVector lv;
            for (const ClassLabel& c : ctx.classes) lv.values[c] = 0.0;
            const double frac = 1.0 / static_cast<double>(ctx.k);
            for (const Neighbor& nb : ctx.neighbors[i]) {
                lv.values[*data[nb.idx].label] += frac;
            }
            liks.push_back(floor_likelihood(std::move(lv)));
        }
        if (spec.use_wingbeat_gaussian) {
            LikelihoodVector lv;
            for (const ClassLabel& c : ctx.classes) {
                GaussStats g = ctx.gauss.at(c);
                if (c == actual) {
                    g.n -= 1.0;
                    g.sum -= ctx.fundamental_hz[i];
                    g.sumsq -= ctx.fundamental_hz[i] * ctx.fundamental_hz[i];
                }
                if (g.n < 2.0) throw NotEnoughData("class " + c.str() + " too small for fold");
                const double mean = g.sum / g.n;
                const double var = (g.sumsq - g.n * mean * mean) / (g.n - 1.0);
                if (!(var > 0.0)) throw NotEnoughVariance("class " + c.str() +
                                                          " has zero spread in a fold");
                lv.values[c] = normal_pdf(ctx.fundamental_hz[i], mean, std::sqrt(var));
            }
            liks.push_back(floor_likelihood(std::move(lv)));
        }
        if (spec.use_time) {
            if (!data[i].time) {
                liks.push_back(LikelihoodVector::missing_feature());
            } else {
                const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(
                                                          data[i].time->minutes_since_midnight /
                                                          ctx.bin_minutes));
                LikelihoodVector lv;
                for (const ClassLabel& c : ctx.classes) {
                    const auto override_it = spec.rhythm_overrides.find(c);
                    if (override_it != spec.rhythm_overrides.end()) {
                        lv.values[c] = rhythm_density(override_it->second, *data[i].time);
                        continue;
                    }
                    const auto rc_it = ctx.rhythm_counts.find(c);
                    if (rc_it == ctx.rhythm_counts.end()) {
                        lv.values[c] = 1.0 / static_cast<double>(n_bins);  // no timestamps
                        continue;
                    }
                    lv.values[c] = learned_density_at(rc_it->second, bin, spec.rhythm_epsilon,
                                                      c == actual);
                }
                liks.push_back(floor_likelihood(std::move(lv)));
            }
        }
        if (spec.use_geo) {
            const auto sensor_it = data[i].sensor
                                       ? spec.geo_by_sensor.find(*data[i].sensor)
                                       : spec.geo_by_sensor.end();
            if (sensor_it == spec.geo_by_sensor.end()) {
                liks.push_back(LikelihoodVector::missing_feature());
            } else {
                LikelihoodVector lv;
                for (const ClassLabel& c : ctx.classes) {
                    lv.values[c] = geo_ratio(sensor_it->second, c);
                }
                liks.push_back(floor_likelihood(std::move(lv)));
            }
        }

        result.posteriors[i] = combine_posterior(prior, liks);
        const auto nn = spec.use_spectrum ? std::optional<double>(ctx.nn_distance[i])
                                          : std::nullopt;
        result.predictions[i] = decide(result.posteriors[i], policy, nn);

        const std::size_t a = class_index.at(actual);
        if (result.predictions[i]) {
            ++decided;
            const std::size_t p = class_index.at(*result.predictions[i]);
            ++result.confusion.counts[a][p];
            if (p == a) {
                ++correct;
                ++class_correct[actual];
            }
        } else {
            ++result.confusion.unknown[a];
        }
    }

    result.report.n_total = n;
    result.report.n_decided = decided;
    result.report.n_unknown = n - decided;
    result.report.accuracy = decided > 0 ? static_cast<double>(correct) /
                                               static_cast<double>(decided)
                                         : 0.0;
    result.report.error_rate = decided > 0 ? 1.0 - result.report.accuracy : 0.0;
    result.report.seed = spec.seed;
    for (const ClassLabel& c : ctx.classes) {
        const auto total = static_cast<double>(ctx.class_counts.at(c));
        result.report.per_class_accuracy[c] =
            static_cast<double>(class_correct[c]) / total;
    }
    std::ostringstream params;
    params << "k=" << spec.k << " spectrum=" << spec.use_spectrum
           << " wingbeat=" << spec.use_wingbeat_gaussian << " time=" << spec.use_time
           << " geo=" << spec.use_geo;
    result.report.parameters = params.str();
    return result;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (std::size_t a = 0; a < counts.size(); ++a) t += row_total(a);
    return t;
}

std::size_t ConfusionMatrix::row_total(std::size_t actual) const {
    std::size_t t = unknown.empty() ? 0 : unknown[actual];
    for (std::size_t p = 0; p < counts[actual].size(); ++p) t += counts[actual][p];
    return t;
}

void ConfusionMatrix::write_csv(std::ostream& out) const {
    out << "actual\\predicted";
    for (const auto& c : classes) out << ',' << c.str();
    out << ",Unknown\n";
    for (std::size_t a = 0; a < classes.size(); ++a) {
        out << classes[a].str();
        for (std::size_t p = 0; p < classes.size(); ++p) out << ',' << counts[a][p];
        out << ',' << (unknown.empty() ? 0 : unknown[a]) << '\n';
    }
}

double bayes_error(const std::vector<DiscreteDensity>& densities,
                   const std::vector<double>& priors) {
    if (densities.size() < 2) throw InvalidInput("bayes_error: need at least 2 densities");
    if (priors.size() != densities.size()) {
        throw InvalidInput("bayes_error: priors must align with densities");
    }
    const std::size_t bins = densities.front().mass.size();
    std::vector<std::vector<double>> p(densities.size());
    for (std::size_t c = 0; c < densities.size(); ++c) {
        if (densities[c].mass.size() != bins) {
            throw BinMismatch("bayes_error: densities have different bin counts");
        }
        double total = 0.0;
        for (double m : densities[c].mass) {
            if (m < 0.0 || !std::isfinite(m)) throw InvalidInput("bayes_error: bad mass");
            total += m;
        }
        if (!(total > 0.0)) throw InvalidInput("bayes_error: density has no mass");
        p[c] = densities[c].mass;
        for (double& m : p[c]) m /= total;
    }
    double captured = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        double best = 0.0;
        for (std::size_t c = 0; c < densities.size(); ++c) {
            best = std::max(best, priors[c] * p[c][b]);
        }
        captured += best;
    }
    return 1.0 - captured;
}

double gaussian_bayes_error(const GaussianWingbeatModel& model, const PriorVector& priors,
                            double grid_hz) {
    if (model.classes.size() < 2) throw InvalidInput("gaussian_bayes_error: need 2+ classes");
    if (!(grid_hz > 0.0) || grid_hz > 1.0) {
        throw InvalidInput("gaussian_bayes_error: grid must be in (0, 1] Hz");
    }
    validate_prior(priors);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [label, p] : model.classes) {
        lo = std::min(lo, p.mean_hz - 6.0 * p.std_hz);
        hi = std::max(hi, p.mean_hz + 6.0 * p.std_hz);
    }
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / grid_hz));
    double captured = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * grid_hz;
        double best = 0.0;
        for (const auto& [label, p] : model.classes) {
            const auto prior_it = priors.find(label);
            if (prior_it == priors.end()) {
                throw InvalidInput("gaussian_bayes_error: prior missing class " + label.str());
            }
            best = std::max(best, prior_it->second * normal_pdf(x, p.mean_hz, p.std_hz));
        }
        captured += best;
    }
    return 1.0 - captured * grid_hz;
}

LooResult leave_one_out(const std::vector<Exemplar>& data, const ClassifierSpec& spec,
                        const DecisionPolicy& policy) {
    const LooContext ctx = build_loo_context(data, spec);
    EvalOptions opt{&spec, &policy};
    return evaluate_loo(data, ctx, opt);
}

std::vector<SweepPoint> threshold_sweep(const std::vector<Exemplar>& data,
                                        const ClassifierSpec& spec,
                                        const ClassLabel& target_class,
                                        const std::vector<double>& thresholds) {
    const LooContext ctx = build_loo_context(data, spec);
    if (ctx.classes.size() != 2) {
        throw InvalidTask("threshold_sweep: task must be binary, got " +
                          std::to_string(ctx.classes.size()) + " classes");
    }
    if (std::find(ctx.classes.begin(), ctx.classes.end(), target_class) == ctx.classes.end()) {
        throw InvalidInput("threshold_sweep: target class not in dataset");
    }
    DecisionPolicy argmax_policy;
    EvalOptions opt{&spec, &argmax_policy};
    const LooResult base = evaluate_loo(data, ctx, opt);

    std::size_t n_target = 0, n_other = 0;
    for (const Exemplar& e : data) {
        if (*e.label == target_class) ++n_target;
        else ++n_other;
    }

    std::vector<SweepPoint> sweep;
    for (double t : thresholds) {
        std::size_t target_missed = 0, other_missed = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const bool predicted_target = base.posteriors[i].at(target_class) >= t;
            if (*data[i].label == target_class && !predicted_target) ++target_missed;
            if (*data[i].label != target_class && predicted_target) ++other_missed;
        }
        sweep.push_back({t,
                         static_cast<double>(target_missed) / static_cast<double>(n_target),
                         static_cast<double>(other_missed) / static_cast<double>(n_other)});
    }
    return sweep;
}

std::vector<ScalingStep> class_scaling_experiment(const std::vector<ClassLabel>& ordered_classes,
                                                  const std::vector<Exemplar>& data,
                                                  const ClassifierSpec& spec) {
    if (ordered_classes.size() < 2) {
        throw InvalidInput("class_scaling_experiment: need at least 2 classes");
    }
    std::vector<ScalingStep> steps;
    for (std::size_t n = 2; n <= ordered_classes.size(); ++n) {
        const std::set<ClassLabel> keep(ordered_classes.begin(),
                                        ordered_classes.begin() + static_cast<std::ptrdiff_t>(n));
        std::vector<Exemplar> subset;
        for (const Exemplar& e : data) {
            if (e.label && keep.count(*e.label)) subset.push_back(e);
        }
        const LooResult r = leave_one_out(subset, spec);
        steps.push_back({n, r.report.accuracy});
    }
    return steps;
}

bool TimeWindow::contains(TimeOfDay t) const {
    const double s = start.minutes_since_midnight;
    const double e = end.minutes_since_midnight;
    const double x = t.minutes_since_midnight;
    if (s <= e) return x >= s && x < e;
    return x >= s || x < e;  // wraps past midnight
}

IndependenceResult independence_check(const std::vector<Exemplar>& single_class_data,
                                      const TimeWindow& window_a, const TimeWindow& window_b,
                                      std::size_t samples_per_window,
                                      std::size_t resamplings, int k, std::uint64_t seed) {
    std::vector<const Exemplar*> pool_a, pool_b;
    for (const Exemplar& e : single_class_data) {
        if (!e.time) continue;
        if (window_a.contains(*e.time)) pool_a.push_back(&e);
        if (window_b.contains(*e.time)) pool_b.push_back(&e);
    }
    if (pool_a.size() < 100 || pool_b.size() < 100) {
        throw NotEnoughData("independence_check: each window needs at least 100 exemplars");
    }

    const ClassLabel label_a{"window", "a"};
    const ClassLabel label_b{"window", "b"};
    IndependenceResult result;
    for (std::size_t r = 0; r < resamplings; ++r) {
        std::mt19937_64 rng(seed + r);
        std::uniform_int_distribution<std::size_t> pick_a(0, pool_a.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_b(0, pool_b.size() - 1);
        std::vector<Exemplar> rows;
        rows.reserve(2 * samples_per_window);
        for (std::size_t i = 0; i < samples_per_window; ++i) {
            Exemplar e = *pool_a[pick_a(rng)];
            e.label = label_a;
            e.time.reset();
            rows.push_back(std::move(e));
        }
        for (std::size_t i = 0; i < samples_per_window; ++i) {
            Exemplar e = *pool_b[pick_b(rng)];
            e.label = label_b;
            e.time.reset();
            rows.push_back(std::move(e));
        }
        ClassifierSpec spec;
        spec.k = k;
        spec.use_spectrum = true;
        spec.seed = seed + r;
        const LooResult loo = leave_one_out(rows, spec);
        result.per_resampling.push_back(loo.report.error_rate);
    }
    result.mean_error = std::accumulate(result.per_resampling.begin(),
                                        result.per_resampling.end(), 0.0) /
                        static_cast<double>(result.per_resampling.size());
    return result;
}

std::string RhythmVariant::name() const {
    switch (kind) {
        case Kind::none: return "none";
        case Kind::uniform: return "uniform";
        case Kind::text_template: return "template";
        case Kind::proxy: return "proxy";
        case Kind::learned: return "learned";
    }
    return "?";
}

std::vector<AblationRow> ablation_rhythms(const std::vector<Exemplar>& data,
                                          const ClassLabel& target_class,
                                          const std::vector<RhythmVariant>& variants,
                                          const ClassifierSpec& base_spec) {
    if (variants.empty()) throw InvalidInput("ablation_rhythms: no variants");
    ClassifierSpec spec = base_spec;
    spec.use_time = true;
    const LooContext ctx = build_loo_context(data, spec);
    if (std::find(ctx.classes.begin(), ctx.classes.end(), target_class) == ctx.classes.end()) {
        throw InvalidInput("ablation_rhythms: target class not in dataset");
    }

    DecisionPolicy policy;
    std::vector<AblationRow> rows;
    for (const RhythmVariant& v : variants) {
        ClassifierSpec variant_spec = spec;
        variant_spec.rhythm_overrides.erase(target_class);
        switch (v.kind) {
            case RhythmVariant::Kind::none:
                variant_spec.use_time = false;
                break;
            case RhythmVariant::Kind::learned:
                break;  // no override: learned from the data
            default:
                variant_spec.rhythm_overrides[target_class] = v.rhythm;
                break;
        }
        EvalOptions opt{&variant_spec, &policy};
        const LooResult r = evaluate_loo(data, ctx, opt);
        rows.push_back({v.kind, r.report.accuracy});
    }
    return rows;
}

GeoSimResult geo_simulation(const GeoScenario& scenario,
                            const std::vector<SpeciesSpec>& specs,
                            const GeoSimOptions& options) {
    if (specs.size() < 2) throw InvalidInput("geo_simulation: need at least 2 species");

    // Train a spectrum+time classifier on clean synthetic snippets.
    SnippetDatasetOptions synth_opts;
    synth_opts.synth.snr_db = options.snr_db;
    const auto train = gen_snippet_dataset(specs, options.n_train_per_class,
                                           options.seed, synth_opts);
    TrainConfig train_config;
    train_config.k = options.k;
    train_config.seed = options.seed;
    Classifier model = train_classifier(train, train_config);

    // Prevalence ratios per sensor from an independent calibration projection.
    const auto calibration = gen_geo_samples(scenario, options.n_geo_per_species,
                                             options.seed + 1);
    std::map<ClassLabel, double> zero;
    for (const auto& spec : specs) zero[spec.label] = 0.0;
    std::map<std::string, GeoModel> geo;
    for (const auto& [sensor, counts] : geo_capture_counts(calibration)) {
        auto weights = zero;
        for (const auto& [label, n] : counts) weights[label] = static_cast<double>(n);
        geo[sensor] = geo_model_from_counts(weights, 1.0);
    }

    // Test captures: each captured insect flies across the sensor once.
    const auto captures = gen_geo_samples(scenario, options.n_geo_per_species,
                                          options.seed + 2);
    GeoSimResult result;
    result.capture_counts = geo_capture_counts(captures);

    std::map<ClassLabel, const SpeciesSpec*> spec_of;
    for (const auto& spec : specs) spec_of[spec.label] = &spec;

    std::vector<Exemplar> test;
    std::mt19937_64 time_rng(options.seed + 3);
    std::uint64_t clip_seed = options.seed + 1000003;
    for (const auto& [sensor, draws] : captures) {
        for (const GeoDraw& d : draws) {
            const SpeciesSpec& spec = *spec_of.at(d.label);
            const auto gen = gen_wingbeat_clip(spec, ++clip_seed, synth_opts.synth);
            Exemplar e;
            e.spectrum = snippet_spectrum(gen.clip);
            e.time = draw_time_of_day(spec.rhythm, time_rng);
            e.sensor = sensor;
            e.label = d.label;
            test.push_back(std::move(e));
        }
    }
    result.n_test = test.size();
    if (test.empty()) return result;

    const auto error_rate = [&](const Classifier& m) {
        std::size_t wrong = 0;
        const auto results = classify_batch(m, test);
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (!results[i].decision || *results[i].decision != *test[i].label) ++wrong;
        }
        return static_cast<double>(wrong) / static_cast<double>(test.size());
    };

    result.error_without_geo = error_rate(model);
    model.geo_by_sensor = geo;
    result.error_with_geo = error_rate(model);
    return result;
}

std::string report_text(const ExperimentReport& report) {
    std::ostringstream out;
    out << "exemplars:      " << report.n_total << "\n"
        << "decided:        " << report.n_decided << "\n"
        << "unknown:        " << report.n_unknown << "\n"
        << "accuracy:       " << report.accuracy << "\n"
        << "error rate:     " << report.error_rate << "\n"
        << "seed:           " << report.seed << "\n"
        << "parameters:     " << report.parameters << "\n";
    for (const auto& [label, acc] : report.per_class_accuracy) {
        out << "  " << label.str() << ": " << acc << "\n";
    }
    return out.str();
}

}  // namespace wingbeat
