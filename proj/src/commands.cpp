#include "wingbeat/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wingbeat/classifier.hpp"
#include "wingbeat/dataset.hpp"
#include "wingbeat/errors.hpp"
#include "wingbeat/eval.hpp"
#include "wingbeat/model_io.hpp"
#include "wingbeat/synth.hpp"
#include "wingbeat/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wingbeat {

namespace {

std::string sanitize_label(const std::string& label) {
    std::string out = label;
    for (char& c : out) {
        if (c == '/' || c == ' ' || c == '.' || c == ',') c = '-';
    }
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string());
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

CircadianRhythm parse_rhythm_json(const json& j, int bin_minutes, double eps) {
    const std::string type = j.value("type", "uniform");
    if (type == "uniform") return uniform_rhythm(bin_minutes);
    if (type == "template") {
        ActivityTemplateSpec spec;
        for (const auto& iv : j.at("intervals")) {
            spec.intervals.push_back({parse_time_of_day(iv.at("start").get<std::string>()),
                                      parse_time_of_day(iv.at("end").get<std::string>()),
                                      iv.at("level").get<int>()});
        }
        return template_rhythm(spec, bin_minutes, eps);
    }
    if (type == "gaussian_mix") {
        std::vector<RhythmPeak> peaks;
        for (const auto& p : j.at("peaks")) {
            peaks.push_back({parse_time_of_day(p.at("center").get<std::string>()),
                             p.value("sigma_minutes", 60.0), p.value("weight", 1.0)});
        }
        return gaussian_mixture_rhythm(peaks, bin_minutes, eps);
    }
    if (type == "density") {
        CircadianRhythm r;
        r.bin_minutes = bin_minutes;
        r.density = j.at("density").get<std::vector<double>>();
        double total = 0.0;
        for (double& d : r.density) {
            d = std::max(d, eps);
            total += d;
        }
        for (double& d : r.density) d /= total;
        validate_rhythm(r);
        return r;
    }
    throw InvalidInput("unknown rhythm type '" + type + "'");
}

std::vector<SpeciesSpec> parse_species(const json& scenario) {
    std::vector<SpeciesSpec> specs;
    for (const auto& s : scenario.at("species")) {
        SpeciesSpec spec;
        spec.label = ClassLabel::parse(s.at("label").get<std::string>());
        spec.fundamental_mean_hz = s.value("fundamental_mean_hz", 365.0);
        spec.fundamental_std_hz = s.value("fundamental_std_hz", 41.0);
        if (s.contains("harmonics")) {
            spec.harmonic_amplitudes = s["harmonics"].get<std::vector<double>>();
        }
        spec.harmonic_jitter = s.value("harmonic_jitter", 0.2);
        spec.duration_mean_ms = s.value("duration_mean_ms", 100.0);
        spec.duration_jitter_ms = s.value("duration_jitter_ms", 30.0);
        if (s.contains("rhythm")) {
            spec.rhythm = parse_rhythm_json(s["rhythm"], 1, kDefaultRhythmEpsilon);
        }
        specs.push_back(std::move(spec));
    }
    if (specs.empty()) throw InvalidInput("scenario has no species");
    return specs;
}

GeoScenario parse_geo_scenario(const json& scenario, const std::vector<SpeciesSpec>& specs) {
    const auto& g = scenario.at("geo");
    GeoScenario geo;
    for (const auto& b : g.at("bumps")) {
        GeoScenario::Bump bump;
        bump.label = ClassLabel::parse(b.at("label").get<std::string>());
        bump.center_x = b.at("center")[0].get<double>();
        bump.center_y = b.at("center")[1].get<double>();
        bump.sigma_x = b.at("sigma")[0].get<double>();
        bump.sigma_y = b.at("sigma")[1].get<double>();
        geo.bumps.push_back(std::move(bump));
    }
    for (const auto& s : g.at("sensors")) {
        geo.sensors.push_back({s.at("id").get<std::string>(),
                               s.at("center")[0].get<double>(),
                               s.at("center")[1].get<double>(),
                               s.at("half_width").get<double>()});
    }
    for (const auto& bump : geo.bumps) {
        const bool known = std::any_of(specs.begin(), specs.end(), [&](const SpeciesSpec& sp) {
            return sp.label == bump.label;
        });
        if (!known) throw InvalidInput("geo bump references unknown species " + bump.label.str());
    }
    return geo;
}

json effective_config_json(const RunConfig& config) {
    json j;
    j["band_hz"] = {config.band_lo_hz, config.band_hi_hz};
    if (config.k) j["k"] = *config.k;
    j["k_candidates"] = config.k_candidates;
    j["empirical_priors"] = config.empirical_priors;
    if (!config.feature_config_path.empty()) j["feature_config"] = config.feature_config_path;
    j["seed"] = config.seed;
    j["jobs"] = config.jobs;
    j["window_ms"] = config.window_ms;
    j["hop_ms"] = config.hop_ms;
    j["gate_db"] = config.tuning.gate_db;
    j["merge_gap_ms"] = config.tuning.merge_gap_ms;
    if (!config.insect_exemplar_wavs.empty()) j["insect_exemplars"] = config.insect_exemplar_wavs;
    if (!config.background_wav.empty()) j["background_wav"] = config.background_wav;
    if (!config.eval_target.empty()) j["eval_target"] = config.eval_target;
    if (!config.eval_class.empty()) j["eval_class"] = config.eval_class;
    if (!config.sweep_thresholds.empty()) j["sweep_thresholds"] = config.sweep_thresholds;
    json policy;
    policy["mode"] = config.policy.mode == DecisionPolicy::Mode::argmax ? "argmax" : "threshold";
    policy["threshold"] = config.policy.threshold;
    policy["target"] = config.policy.target_class.str();
    if (config.policy.unknown_tau) policy["unknown_tau"] = *config.policy.unknown_tau;
    if (config.policy.max_nn_distance) {
        policy["max_nn_distance"] = *config.policy.max_nn_distance;
    }
    j["policy"] = policy;
    if (!config.scenario_json.empty()) j["scenario"] = json::parse(config.scenario_json);
    return j;
}

void stamp_run_dir(const fs::path& run_dir, const RunConfig& config) {
    ensure_dir(run_dir);
    if (!config.source_path.empty() && fs::exists(config.source_path)) {
        fs::copy_file(config.source_path, run_dir / "run_config.json",
                      fs::copy_options::overwrite_existing);
    } else {
        write_text_file(run_dir / "run_config.json", effective_config_json(config).dump(1) + "\n");
    }
}

// Feature config resolved against rhythms learned from the dataset itself.
struct ResolvedFeatures {
    std::map<ClassLabel, CircadianRhythm> rhythm_overrides;  // configured classes only
    std::map<std::string, GeoModel> geo_by_sensor;
    int bin_minutes = 1;
    double epsilon = kDefaultRhythmEpsilon;
};

ResolvedFeatures resolve_features(const RunConfig& config,
                                  const std::vector<Exemplar>& data) {
    ResolvedFeatures out;
    if (config.feature_config_path.empty()) return out;
    const FeatureConfig fc = load_feature_config(config.feature_config_path);
    out.bin_minutes = fc.bin_minutes;
    out.epsilon = fc.epsilon;
    out.geo_by_sensor = fc.geo_by_sensor;

    std::map<ClassLabel, std::vector<TimeOfDay>> times;
    for (const Exemplar& e : data) {
        if (e.label && e.time) times[*e.label].push_back(*e.time);
    }
    std::map<ClassLabel, CircadianRhythm> learned;
    for (const auto& [label, ts] : times) {
        learned[label] = learn_rhythm(ts, fc.bin_minutes, fc.epsilon);
    }
    const auto resolved = resolve_rhythms(fc, learned);
    for (const auto& [label, src] : fc.rhythms) {
        out.rhythm_overrides[label] = resolved.at(label);
    }
    return out;
}

ClassifierSpec spec_from_config(const RunConfig& config, const std::vector<Exemplar>& data,
                                const ResolvedFeatures& features) {
    ClassifierSpec spec;
    spec.k = config.k.value_or(8);
    spec.use_spectrum = true;
    spec.use_time = std::any_of(data.begin(), data.end(),
                                [](const Exemplar& e) { return e.time.has_value(); });
    spec.use_geo = !features.geo_by_sensor.empty() &&
                   std::any_of(data.begin(), data.end(),
                               [](const Exemplar& e) { return e.sensor.has_value(); });
    spec.empirical_priors = config.empirical_priors;
    spec.rhythm_overrides = features.rhythm_overrides;
    spec.geo_by_sensor = features.geo_by_sensor;
    spec.rhythm_bin_minutes = features.bin_minutes;
    spec.rhythm_epsilon = features.epsilon;
    spec.jobs = config.jobs;
    spec.seed = config.seed;
    return spec;
}

void write_report_csv(const fs::path& path, const ExperimentReport& report, int k) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "accuracy," << fmt_double(report.accuracy) << '\n';
    out << "error_rate," << fmt_double(report.error_rate) << '\n';
    out << "exemplars," << report.n_total << '\n';
    out << "decided," << report.n_decided << '\n';
    out << "unknown," << report.n_unknown << '\n';
    out << "seed," << report.seed << '\n';
    out << "k," << k << '\n';
    for (const auto& [label, acc] : report.per_class_accuracy) {
        out << "accuracy:" << label.str() << ',' << fmt_double(acc) << '\n';
    }
    write_text_file(path, out.str());
}

ClassLabel largest_class(const std::vector<Exemplar>& data) {
    std::map<ClassLabel, std::size_t> counts;
    for (const Exemplar& e : data) {
        if (e.label) ++counts[*e.label];
    }
    if (counts.empty()) throw InvalidInput("dataset has no labeled exemplars");
    return std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
               return a.second < b.second;
           })->first;
}

// Crepuscular default template used when the feature config does not supply
// one for the ablation target: high at dawn and dusk, low otherwise.
ActivityTemplateSpec default_crepuscular_template() {
    ActivityTemplateSpec spec;
    spec.intervals = {{TimeOfDay::from_hm(5, 0), TimeOfDay::from_hm(7, 0), 3},
                      {TimeOfDay::from_hm(7, 0), TimeOfDay::from_hm(18, 0), 1},
                      {TimeOfDay::from_hm(18, 0), TimeOfDay::from_hm(20, 0), 3},
                      {TimeOfDay::from_hm(20, 0), TimeOfDay::from_hm(5, 0), 1}};
    return spec;
}

}  // namespace

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }

    RunConfig config;
    config.source_path = path;
    if (j.contains("band_hz")) {
        config.band_lo_hz = j["band_hz"][0].get<double>();
        config.band_hi_hz = j["band_hz"][1].get<double>();
    }
    if (j.contains("k")) config.k = j["k"].get<int>();
    if (j.contains("k_candidates")) {
        config.k_candidates = j["k_candidates"].get<std::vector<int>>();
    }
    config.empirical_priors = j.value("empirical_priors", false);
    config.feature_config_path = j.value("feature_config", "");
    if (!config.feature_config_path.empty()) {
        fs::path p = config.feature_config_path;
        if (p.is_relative()) p = fs::path(path).parent_path() / p;
        config.feature_config_path = p.string();
    }
    config.seed = j.value("seed", 1ull);
    config.jobs = j.value("jobs", 1);
    config.window_ms = j.value("window_ms", 100.0);
    config.hop_ms = j.value("hop_ms", 10.0);
    config.tuning.gate_db = j.value("gate_db", 6.0);
    config.tuning.merge_gap_ms = j.value("merge_gap_ms", 150.0);
    config.tuning.band_lo_hz = config.band_lo_hz;
    config.tuning.band_hi_hz = config.band_hi_hz;
    if (j.contains("insect_exemplars")) {
        config.insect_exemplar_wavs = j["insect_exemplars"].get<std::vector<std::string>>();
    }
    config.background_wav = j.value("background_wav", "");
    config.eval_target = j.value("eval_target", "");
    config.eval_class = j.value("eval_class", "");
    if (j.contains("sweep_thresholds")) {
        config.sweep_thresholds = j["sweep_thresholds"].get<std::vector<double>>();
    }
    if (j.contains("policy")) {
        const auto& p = j["policy"];
        if (p.value("mode", "argmax") == std::string("threshold")) {
            config.policy.mode = DecisionPolicy::Mode::threshold;
        }
        config.policy.threshold = p.value("threshold", 0.5);
        config.policy.target_class = ClassLabel::parse(p.value("target", ""));
        if (p.contains("unknown_tau")) config.policy.unknown_tau = p["unknown_tau"].get<double>();
        if (p.contains("max_nn_distance")) {
            config.policy.max_nn_distance = p["max_nn_distance"].get<double>();
        }
    }
    // Resolve relative WAV paths against the config file location.
    const fs::path base = fs::path(path).parent_path();
    for (std::string& w : config.insect_exemplar_wavs) {
        fs::path p = w;
        if (p.is_relative()) w = (base / p).string();
    }
    if (!config.background_wav.empty()) {
        fs::path p = config.background_wav;
        if (p.is_relative()) config.background_wav = (base / p).string();
    }
    if (j.contains("scenario")) config.scenario_json = j["scenario"].dump();
    return config;
}

int cmd_detect(const std::string& input_dir, const std::string& out_dir,
               const RunConfig& config, std::ostream& log) {
    if (config.insect_exemplar_wavs.empty() || config.background_wav.empty()) {
        log << "detect: config must name insect_exemplars and background_wav\n";
        return 2;
    }

    std::vector<AudioClip> insect_clips;
    for (const std::string& path : config.insect_exemplar_wavs) {
        insect_clips.push_back(read_wav(path));
    }
    DetectorModel::Tuning tuning = config.tuning;
    tuning.band_lo_hz = config.band_lo_hz;
    tuning.band_hi_hz = config.band_hi_hz;
    const DetectorModel model = build_detector_model(insect_clips, read_wav(config.background_wav),
                                                     10, config.window_ms, tuning);

    std::vector<fs::path> inputs;
    if (fs::exists(input_dir)) {
        for (const auto& entry : fs::directory_iterator(input_dir)) {
            if (entry.path().extension() == ".wav") inputs.push_back(entry.path());
        }
    }
    std::sort(inputs.begin(), inputs.end());

    ensure_dir(fs::path(out_dir) / "snippets");
    std::vector<ManifestRow> manifest;
    int failures = 0;
    std::size_t detected = 0;

    for (const fs::path& input : inputs) {
        try {
            const AudioClip recording = read_wav(input.string());
            const std::string stem = input.stem().string();
            std::string sensor = "?";
            std::optional<Timestamp> start;
            const auto underscore = stem.find('_');
            if (underscore != std::string::npos) {
                const std::string time_part = stem.substr(underscore + 1);
                try {
                    start = Timestamp::parse(time_part);
                    sensor = stem.substr(0, underscore);
                } catch (const Error&) {
                    log << "detect: cannot parse start time from " << stem << ", using ?\n";
                }
            }

            const auto events = detect_events(recording, model, config.window_ms,
                                              config.hop_ms, stem);
            std::size_t index = 0;
            for (const EventSnippet& ev : events) {
                char name[64];
                std::snprintf(name, sizeof(name), "_ev%04zu.wav", index++);
                const std::string rel = "snippets/" + stem + name;
                write_wav((fs::path(out_dir) / rel).string(), ev.clip);
                ManifestRow row;
                row.path = rel;
                row.label = "?";
                row.timestamp = start ? start->plus_seconds(ev.event_offset_s).iso() : "?";
                row.sensor = sensor;
                manifest.push_back(std::move(row));
            }
            detected += events.size();
            log << "detect: " << input.filename().string() << " -> " << events.size()
                << " event(s)\n";
        } catch (const Error& e) {
            ++failures;
            log << "detect: error on " << input.string() << ": " << e.what() << "\n";
        }
    }

    write_manifest((fs::path(out_dir) / "manifest.csv").string(), manifest);
    log << "detect: " << detected << " snippet(s), " << failures << " failed file(s)\n";
    return failures == 0 ? 0 : 1;
}

int cmd_train(const std::string& manifest_path, const std::string& model_out,
              const RunConfig& config, std::ostream& log) {
    int sample_rate = 0;
    const auto data = load_exemplars(manifest_path, config.band_lo_hz, config.band_hi_hz,
                                     &sample_rate);
    if (data.empty()) {
        log << "train: manifest is empty\n";
        return 2;
    }
    const ResolvedFeatures features = resolve_features(config, data);

    TrainConfig tc;
    tc.k = config.k;
    tc.k_candidates = config.k_candidates;
    tc.empirical_priors = config.empirical_priors;
    tc.rhythm_bin_minutes = features.bin_minutes;
    tc.rhythm_epsilon = features.epsilon;
    tc.rhythm_overrides = features.rhythm_overrides;
    tc.geo_by_sensor = features.geo_by_sensor;
    tc.policy = config.policy;
    tc.band_lo_hz = config.band_lo_hz;
    tc.band_hi_hz = config.band_hi_hz;
    tc.sample_rate_hz = sample_rate;
    tc.seed = config.seed;

    std::vector<std::string> warnings;
    const Classifier model = train_classifier(data, tc, &warnings);
    for (const std::string& w : warnings) log << "train: " << w << "\n";
    save_classifier(model, model_out);
    log << "train: " << model.knn.exemplars.size() << " exemplars, "
        << model.priors.size() << " classes, k=" << model.knn.k << " -> " << model_out << "\n";
    return 0;
}

int cmd_classify(const std::string& manifest_path, const std::string& model_path,
                 const std::string& out_csv, const RunConfig& config, std::ostream& log) {
    const Classifier model = load_classifier(model_path);
    const auto rows = read_manifest(manifest_path);
    const std::string base = fs::path(manifest_path).parent_path().string();

    std::vector<Exemplar> loaded;
    std::vector<std::size_t> loaded_index;  // manifest row per loaded exemplar
    int failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            loaded.push_back(load_exemplar_row(rows[i], base, model.band_lo_hz,
                                               model.band_hi_hz, model.sample_rate_hz));
            loaded_index.push_back(i);
        } catch (const Error& e) {
            ++failures;
            log << "classify: error on " << rows[i].path << ": " << e.what() << "\n";
        }
    }

    const auto results = classify_batch(model, loaded, config.jobs);

    const auto classes = model.classes();
    std::ostringstream out;
    out << "path,predicted";
    for (const ClassLabel& c : classes) out << ",posterior:" << c.str();
    out << ",features_used\n";
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        const auto& r = results[i];
        out << rows[loaded_index[i]].path << ','
            << (r.decision ? r.decision->str() : "Unknown");
        for (const ClassLabel& c : classes) out << ',' << fmt_double(r.posterior.at(c));
        out << ",spectrum";
        if (r.used_time) out << "+time";
        if (r.used_geo) out << "+geo";
        out << '\n';
    }
    write_text_file(out_csv, out.str());
    log << "classify: " << loaded.size() << " row(s) -> " << out_csv << ", " << failures
        << " failed\n";
    return failures == 0 ? 0 : 1;
}

int cmd_eval(const std::string& experiment, const std::string& manifest_path,
             const std::string& out_dir, const RunConfig& config, std::ostream& log) {
    const fs::path run_dir(out_dir);
    stamp_run_dir(run_dir, config);

    if (experiment == "geo-sim") {
        if (config.scenario_json.empty()) {
            log << "eval geo-sim: config needs a scenario\n";
            return 2;
        }
        const json scenario = json::parse(config.scenario_json);
        const auto specs = parse_species(scenario);
        const GeoScenario geo = parse_geo_scenario(scenario, specs);
        GeoSimOptions options;
        options.seed = config.seed;
        options.k = config.k.value_or(8);
        if (scenario.contains("geo")) {
            options.n_geo_per_species = scenario["geo"].value("n_per_species", 10000);
            options.n_train_per_class = scenario["geo"].value("n_train_per_class", 300);
        }
        if (scenario.contains("snr_db")) options.snr_db = scenario["snr_db"].get<double>();
        const GeoSimResult result = geo_simulation(geo, specs, options);

        std::ostringstream counts;
        counts << "sensor,class,captures\n";
        for (const auto& [sensor, per_class] : result.capture_counts) {
            for (const auto& [label, n] : per_class) {
                counts << sensor << ',' << label.str() << ',' << n << '\n';
            }
        }
        write_text_file(run_dir / "geo_counts.csv", counts.str());

        std::ostringstream sim;
        sim << "metric,value\n";
        sim << "error_without_location," << fmt_double(result.error_without_geo) << '\n';
        sim << "error_with_location," << fmt_double(result.error_with_geo) << '\n';
        sim << "test_exemplars," << result.n_test << '\n';
        sim << "seed," << config.seed << '\n';
        write_text_file(run_dir / "geo_sim.csv", sim.str());
        log << "eval geo-sim: error " << result.error_without_geo << " -> "
            << result.error_with_geo << " with location\n";
        return result.error_with_geo <= result.error_without_geo ? 0 : 1;
    }

    int sample_rate = 0;
    const auto data = load_exemplars(manifest_path, config.band_lo_hz, config.band_hi_hz,
                                     &sample_rate);
    if (data.empty()) {
        log << "eval: manifest is empty\n";
        return 2;
    }
    const ResolvedFeatures features = resolve_features(config, data);
    const ClassifierSpec spec = spec_from_config(config, data, features);

    if (experiment == "loo") {
        const LooResult result = leave_one_out(data, spec, config.policy);
        write_report_csv(run_dir / "report.csv", result.report, spec.k);
        std::ostringstream confusion;
        result.confusion.write_csv(confusion);
        write_text_file(run_dir / "confusion.csv", confusion.str());
        write_text_file(run_dir / "summary.txt", report_text(result.report));
        log << "eval loo: accuracy " << result.report.accuracy << " over "
            << result.report.n_total << " exemplars\n";
        return result.confusion.total() == result.report.n_total ? 0 : 1;
    }

    if (experiment == "bayes-error") {
        // Wingbeat-frequency densities per class at 1 Hz resolution.
        std::map<ClassLabel, std::vector<double>> hist;
        const auto bins = static_cast<std::size_t>(config.band_hi_hz - config.band_lo_hz) + 1;
        std::vector<std::pair<ClassLabel, double>> freqs;
        for (const Exemplar& e : data) {
            if (!e.label) continue;
            const Spectrum& s = e.spectrum;
            const double f0 =
                fundamental_frequency(s, s.start_hz, s.bin_center_hz(s.size() - 1));
            freqs.emplace_back(*e.label, f0);
            auto& h = hist[*e.label];
            if (h.empty()) h.assign(bins, 0.0);
            const auto bin = static_cast<std::size_t>(f0 - config.band_lo_hz);
            h[std::min(bin, bins - 1)] += 1.0;
        }
        if (hist.size() < 2) {
            log << "eval bayes-error: need at least 2 labeled classes\n";
            return 2;
        }
        std::vector<DiscreteDensity> densities;
        std::vector<double> priors;
        std::size_t total = freqs.size();
        for (const auto& [label, h] : hist) {
            densities.push_back({h});
            const auto n = static_cast<double>(
                std::count_if(freqs.begin(), freqs.end(),
                              [&, l = label](const auto& f) { return f.first == l; }));
            priors.push_back(config.empirical_priors ? n / static_cast<double>(total)
                                                     : 1.0 / static_cast<double>(hist.size()));
        }
        const double ber_hist = bayes_error(densities, priors);

        const auto gaussians = fit_gaussian_model(freqs);
        PriorVector prior_vec;
        std::size_t idx = 0;
        for (const auto& [label, h] : hist) prior_vec[label] = priors[idx++];
        const double ber_gauss = gaussian_bayes_error(gaussians, prior_vec, 0.25);

        std::ostringstream out;
        out << "method,bayes_error\n";
        out << "histogram," << fmt_double(ber_hist) << '\n';
        out << "gaussian," << fmt_double(ber_gauss) << '\n';
        write_text_file(run_dir / "bayes_error.csv", out.str());
        log << "eval bayes-error: histogram " << ber_hist << ", gaussian " << ber_gauss << "\n";
        return 0;
    }

    if (experiment == "sweep") {
        if (config.eval_target.empty()) {
            log << "eval sweep: --target (or eval_target in config) is required\n";
            return 2;
        }
        std::vector<double> thresholds = config.sweep_thresholds;
        if (thresholds.empty()) {
            for (double t = 0.5; t >= 0.049; t -= 0.05) thresholds.push_back(t);
        }
        std::sort(thresholds.rbegin(), thresholds.rend());
        const auto sweep = threshold_sweep(data, spec, ClassLabel::parse(config.eval_target),
                                           thresholds);
        std::ostringstream out;
        out << "threshold,target_missed_rate,other_missed_rate\n";
        for (const SweepPoint& p : sweep) {
            out << fmt_double(p.threshold) << ',' << fmt_double(p.target_missed_rate) << ','
                << fmt_double(p.other_missed_rate) << '\n';
        }
        write_text_file(run_dir / "sweep.csv", out.str());

        bool monotone = true;
        for (std::size_t i = 1; i < sweep.size(); ++i) {
            if (sweep[i].target_missed_rate > sweep[i - 1].target_missed_rate + 1e-12 ||
                sweep[i].other_missed_rate < sweep[i - 1].other_missed_rate - 1e-12) {
                monotone = false;
            }
        }
        log << "eval sweep: " << sweep.size() << " thresholds, monotone="
            << (monotone ? "yes" : "NO") << "\n";
        return monotone ? 0 : 1;
    }

    if (experiment == "scaling") {
        std::vector<ClassLabel> order;
        std::set<ClassLabel> seen;
        for (const Exemplar& e : data) {
            if (e.label && seen.insert(*e.label).second) order.push_back(*e.label);
        }
        const auto steps = class_scaling_experiment(order, data, spec);
        std::ostringstream out;
        out << "step,classes,accuracy\n";
        for (const ScalingStep& s : steps) {
            out << s.step << ',' << order[s.step - 1].str() << ',' << fmt_double(s.accuracy)
                << '\n';
        }
        write_text_file(run_dir / "scaling.csv", out.str());
        log << "eval scaling: " << steps.size() << " step(s)\n";
        return 0;
    }

    if (experiment == "ablation") {
        const ClassLabel target = config.eval_target.empty()
                                      ? largest_class(data)
                                      : ClassLabel::parse(config.eval_target);
        std::vector<RhythmVariant> variants;
        variants.push_back({RhythmVariant::Kind::none, {}});
        variants.push_back({RhythmVariant::Kind::uniform,
                            uniform_rhythm(features.bin_minutes)});
        CircadianRhythm tmpl;
        const auto override_it = features.rhythm_overrides.find(target);
        if (override_it != features.rhythm_overrides.end() &&
            override_it->second.provenance == RhythmProvenance::text_template) {
            tmpl = override_it->second;
        } else {
            tmpl = template_rhythm(default_crepuscular_template(), features.bin_minutes,
                                   features.epsilon);
        }
        variants.push_back({RhythmVariant::Kind::text_template, tmpl});
        if (override_it != features.rhythm_overrides.end() &&
            override_it->second.provenance == RhythmProvenance::proxy_taxon) {
            variants.push_back({RhythmVariant::Kind::proxy, override_it->second});
        } else {
            log << "eval ablation: no proxy rhythm configured for " << target.str()
                << "; proxy tier skipped\n";
        }
        variants.push_back({RhythmVariant::Kind::learned, {}});

        ClassifierSpec ablation_spec = spec;
        ablation_spec.rhythm_overrides.clear();  // the variants own the target's rhythm
        const auto rows = ablation_rhythms(data, target, variants, ablation_spec);
        std::ostringstream out;
        out << "variant,accuracy\n";
        for (const AblationRow& r : rows) {
            RhythmVariant v;
            v.kind = r.kind;
            out << v.name() << ',' << fmt_double(r.accuracy) << '\n';
        }
        write_text_file(run_dir / "ablation.csv", out.str());
        log << "eval ablation: target " << target.str() << ", " << rows.size()
            << " variant(s)\n";
        return 0;
    }

    if (experiment == "independence") {
        const ClassLabel which = config.eval_class.empty()
                                     ? largest_class(data)
                                     : ClassLabel::parse(config.eval_class);
        std::vector<Exemplar> subset;
        for (const Exemplar& e : data) {
            if (e.label && *e.label == which) subset.push_back(e);
        }
        const auto result = independence_check(subset, kDefaultDawnWindow, kDefaultDuskWindow,
                                               1000, 10, spec.k, config.seed);
        std::ostringstream out;
        out << "resampling,error_rate\n";
        for (std::size_t i = 0; i < result.per_resampling.size(); ++i) {
            out << i << ',' << fmt_double(result.per_resampling[i]) << '\n';
        }
        out << "mean," << fmt_double(result.mean_error) << '\n';
        write_text_file(run_dir / "independence.csv", out.str());
        log << "eval independence: class " << which.str() << ", mean error "
            << result.mean_error << "\n";
        return 0;
    }

    log << "eval: unknown experiment '" << experiment
        << "' (expected loo|bayes-error|sweep|scaling|ablation|independence|geo-sim)\n";
    return 2;
}

int cmd_synth(const std::string& out_dir, const RunConfig& config, std::ostream& log) {
    if (config.scenario_json.empty()) {
        log << "synth: config needs a scenario\n";
        return 2;
    }
    const json scenario = json::parse(config.scenario_json);
    const std::string kind = scenario.value("kind", "snippets");
    const auto specs = parse_species(scenario);
    ensure_dir(out_dir);

    if (kind == "snippets") {
        SnippetDatasetOptions options;
        options.synth.sample_rate_hz = scenario.value("sample_rate_hz", 8000);
        if (scenario.contains("snr_db")) options.synth.snr_db = scenario["snr_db"].get<double>();
        const auto n = scenario.value("clips_per_class", 100);
        const std::string date = scenario.value("date", "2013-07-15");
        const std::string sensor = scenario.value("sensor", "?");

        ensure_dir(fs::path(out_dir) / "snippets");
        std::vector<ManifestRow> manifest;
        std::mt19937_64 time_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
        std::uint64_t clip_seed = config.seed;
        for (const SpeciesSpec& spec : specs) {
            for (int i = 0; i < n; ++i) {
                const auto gen = gen_wingbeat_clip(spec, ++clip_seed, options.synth);
                char name[128];
                std::snprintf(name, sizeof(name), "%s_%05d.wav",
                              sanitize_label(spec.label.str()).c_str(), i);
                const std::string rel = std::string("snippets/") + name;
                write_wav((fs::path(out_dir) / rel).string(), gen.clip);

                const TimeOfDay t = draw_time_of_day(spec.rhythm, time_rng);
                Timestamp ts = Timestamp::parse(date + "T00:00:00");
                ts = ts.plus_seconds(t.minutes_since_midnight * 60.0);
                ManifestRow row;
                row.path = rel;
                row.label = spec.label.str();
                row.timestamp = ts.iso();
                row.sensor = sensor;
                manifest.push_back(std::move(row));
            }
        }
        write_manifest((fs::path(out_dir) / "manifest.csv").string(), manifest);
        log << "synth: " << manifest.size() << " snippet(s) -> " << out_dir << "\n";
        return 0;
    }

    if (kind == "recording") {
        RecordingOptions options;
        const auto& r = scenario.at("recording");
        options.sample_rate_hz = scenario.value("sample_rate_hz", 8000);
        options.duration_s = r.value("duration_s", 60.0);
        options.noise_rms = r.value("noise_rms", 0.01);
        options.hum_60hz_amplitude = r.value("hum_60hz", 0.0);
        options.snr_db = r.value("snr_db", 15.0);
        const std::string start_text = r.value("start", "2013-07-15T06:00:00");
        const Timestamp start = Timestamp::parse(start_text);
        options.start_time = start.time_of_day();
        const std::string sensor = r.value("sensor", "S1");
        const auto n_events = r.value("events", 20);

        const auto rec = gen_recording(specs, static_cast<std::size_t>(n_events), config.seed,
                                       options);
        char stamp[32];
        const int total_s = static_cast<int>(start.seconds_of_day);
        std::snprintf(stamp, sizeof(stamp), "%04d%02d%02dT%02d%02d%02d", start.year, start.month,
                      start.day, total_s / 3600, (total_s / 60) % 60, total_s % 60);
        const std::string wav_name = sensor + "_" + stamp + ".wav";
        write_wav((fs::path(out_dir) / wav_name).string(), rec.clip);

        std::ostringstream truth;
        truth << "offset_s,label,fundamental_hz,timestamp\n";
        for (const PlantedEvent& ev : rec.events) {
            truth << fmt_double(ev.offset_s) << ',' << ev.label.str() << ','
                  << fmt_double(ev.fundamental_hz) << ','
                  << start.plus_seconds(ev.offset_s).iso() << '\n';
        }
        write_text_file(fs::path(out_dir) / "truth.csv", truth.str());
        log << "synth: recording with " << rec.events.size() << " event(s) -> "
            << (fs::path(out_dir) / wav_name).string() << "\n";
        return 0;
    }

    if (kind == "geo") {
        const GeoScenario geo = parse_geo_scenario(scenario, specs);
        const auto n = scenario.at("geo").value("n_per_species", 10000);
        const auto samples = gen_geo_samples(geo, static_cast<std::size_t>(n), config.seed);

        std::ostringstream captures;
        captures << "sensor,class,x,y\n";
        for (const auto& [sensor, draws] : samples) {
            for (const GeoDraw& d : draws) {
                captures << sensor << ',' << d.label.str() << ',' << fmt_double(d.x) << ','
                         << fmt_double(d.y) << '\n';
            }
        }
        write_text_file(fs::path(out_dir) / "captures.csv", captures.str());

        std::ostringstream counts;
        counts << "sensor,class,captures\n";
        for (const auto& [sensor, per_class] : geo_capture_counts(samples)) {
            for (const auto& [label, c] : per_class) {
                counts << sensor << ',' << label.str() << ',' << c << '\n';
            }
        }
        write_text_file(fs::path(out_dir) / "counts.csv", counts.str());
        log << "synth: geo captures -> " << out_dir << "\n";
        return 0;
    }

    log << "synth: unknown scenario kind '" << kind << "'\n";
    return 2;
}

}  // namespace wingbeat
