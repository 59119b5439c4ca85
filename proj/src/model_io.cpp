#include "wingbeat/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "wingbeat/errors.hpp"
#include "wingbeat/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wingbeat {

namespace {

const char* provenance_name(RhythmProvenance p) {
    switch (p) {
        case RhythmProvenance::learned: return "learned";
        case RhythmProvenance::proxy_taxon: return "proxy";
        case RhythmProvenance::text_template: return "template";
        case RhythmProvenance::uniform: return "uniform";
    }
    return "uniform";
}

RhythmProvenance provenance_from(const std::string& name) {
    if (name == "learned") return RhythmProvenance::learned;
    if (name == "proxy") return RhythmProvenance::proxy_taxon;
    if (name == "template") return RhythmProvenance::text_template;
    return RhythmProvenance::uniform;
}

json policy_to_json(const DecisionPolicy& p) {
    json j;
    j["mode"] = p.mode == DecisionPolicy::Mode::argmax ? "argmax" : "threshold";
    j["target"] = p.target_class.str();
    j["threshold"] = p.threshold;
    if (p.unknown_tau) j["unknown_tau"] = *p.unknown_tau;
    if (p.max_nn_distance) j["max_nn_distance"] = *p.max_nn_distance;
    return j;
}

DecisionPolicy policy_from_json(const json& j) {
    DecisionPolicy p;
    if (j.value("mode", "argmax") == std::string("threshold")) {
        p.mode = DecisionPolicy::Mode::threshold;
    }
    p.target_class = ClassLabel::parse(j.value("target", ""));
    p.threshold = j.value("threshold", 0.5);
    if (j.contains("unknown_tau")) p.unknown_tau = j["unknown_tau"].get<double>();
    if (j.contains("max_nn_distance")) p.max_nn_distance = j["max_nn_distance"].get<double>();
    return p;
}

}  // namespace

void save_classifier(const Classifier& model, const std::string& path) {
    json j;
    j["format"] = "wingbeat-model";
    j["version"] = 1;
    j["sample_rate_hz"] = model.sample_rate_hz;
    j["band_hz"] = {model.band_lo_hz, model.band_hi_hz};
    j["k"] = model.knn.k;
    j["use_wingbeat_gaussian"] = model.use_wingbeat_gaussian;

    json priors = json::object();
    for (const auto& [label, p] : model.priors) priors[label.str()] = p;
    j["priors"] = priors;

    if (model.wingbeat) {
        json gaussian = json::object();
        for (const auto& [label, params] : model.wingbeat->classes) {
            gaussian[label.str()] = {{"mean_hz", params.mean_hz}, {"std_hz", params.std_hz}};
        }
        j["gaussian"] = gaussian;
    }

    json rhythms = json::object();
    for (const auto& [label, rhythm] : model.rhythms) {
        rhythms[label.str()] = {{"bin_minutes", rhythm.bin_minutes},
                                {"provenance", provenance_name(rhythm.provenance)},
                                {"density", rhythm.density}};
    }
    j["rhythms"] = rhythms;

    if (!model.geo_by_sensor.empty()) {
        json geo = json::object();
        for (const auto& [sensor, gm] : model.geo_by_sensor) {
            json weights = json::object();
            for (const auto& [label, w] : gm.weights) weights[label.str()] = w;
            geo[sensor] = weights;
        }
        j["geo"] = geo;
    }

    j["policy"] = policy_to_json(model.policy);

    json exemplars = json::array();
    for (std::size_t i = 0; i < model.knn.exemplars.size(); ++i) {
        const auto& e = model.knn.exemplars[i];
        json entry;
        entry["label"] = e.label.str();
        const bool has_path = i < model.exemplar_paths.size() &&
                              !model.exemplar_paths[i].empty();
        if (has_path) {
            entry["path"] = model.exemplar_paths[i];
        } else {
            entry["spectrum"] = {{"start_hz", e.spectrum.start_hz},
                                 {"bin_width_hz", e.spectrum.bin_width_hz},
                                 {"magnitudes", e.spectrum.magnitudes}};
        }
        exemplars.push_back(std::move(entry));
    }
    j["exemplars"] = std::move(exemplars);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model " + path);
    out << j.dump(1) << '\n';
}

Classifier load_classifier(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    if (j.value("format", "") != std::string("wingbeat-model")) {
        throw IoError(path + ": not a wingbeat model file");
    }

    Classifier model;
    model.sample_rate_hz = j.value("sample_rate_hz", 8000);
    if (j.contains("band_hz")) {
        model.band_lo_hz = j["band_hz"][0].get<double>();
        model.band_hi_hz = j["band_hz"][1].get<double>();
    }
    model.knn.k = j.value("k", 8);
    model.use_wingbeat_gaussian = j.value("use_wingbeat_gaussian", false);

    for (const auto& [key, value] : j["priors"].items()) {
        model.priors[ClassLabel::parse(key)] = value.get<double>();
    }
    if (j.contains("gaussian")) {
        GaussianWingbeatModel g;
        for (const auto& [key, value] : j["gaussian"].items()) {
            g.classes[ClassLabel::parse(key)] = {value["mean_hz"].get<double>(),
                                                 value["std_hz"].get<double>()};
        }
        model.wingbeat = std::move(g);
    }
    if (j.contains("rhythms")) {
        for (const auto& [key, value] : j["rhythms"].items()) {
            CircadianRhythm r;
            r.bin_minutes = value.value("bin_minutes", 1);
            r.provenance = provenance_from(value.value("provenance", "uniform"));
            r.density = value["density"].get<std::vector<double>>();
            validate_rhythm(r);
            model.rhythms[ClassLabel::parse(key)] = std::move(r);
        }
    }
    if (j.contains("geo")) {
        for (const auto& [sensor, weights] : j["geo"].items()) {
            GeoModel gm;
            for (const auto& [key, w] : weights.items()) {
                gm.weights[ClassLabel::parse(key)] = w.get<double>();
            }
            validate_geo_model(gm);
            model.geo_by_sensor[sensor] = std::move(gm);
        }
    }
    if (j.contains("policy")) model.policy = policy_from_json(j["policy"]);

    const fs::path base = fs::path(path).parent_path();
    for (const auto& entry : j["exemplars"]) {
        KnnSpectrumModel::Entry e;
        e.label = ClassLabel::parse(entry["label"].get<std::string>());
        if (entry.contains("path")) {
            fs::path p = entry["path"].get<std::string>();
            if (p.is_relative()) p = base / p;
            e.spectrum = snippet_spectrum(read_wav(p.string()), model.band_lo_hz,
                                          model.band_hi_hz);
            model.exemplar_paths.push_back(p.string());
        } else {
            const auto& s = entry["spectrum"];
            e.spectrum.start_hz = s["start_hz"].get<double>();
            e.spectrum.bin_width_hz = s["bin_width_hz"].get<double>();
            e.spectrum.magnitudes = s["magnitudes"].get<std::vector<double>>();
            model.exemplar_paths.emplace_back();
        }
        model.knn.exemplars.push_back(std::move(e));
    }
    if (model.knn.exemplars.empty()) throw IoError(path + ": model has no exemplars");
    if (model.knn.k < 1 ||
        static_cast<std::size_t>(model.knn.k) > model.knn.exemplars.size()) {
        throw IoError(path + ": k out of range");
    }
    return model;
}

TimeOfDay parse_time_of_day(const std::string& hhmm) {
    int h = 0, m = 0;
    if (std::sscanf(hhmm.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 24 || m < 0 || m > 59) {
        throw InvalidInput("cannot parse time of day: " + hhmm);
    }
    return TimeOfDay(60.0 * h + m);
}

FeatureConfig load_feature_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open feature config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }

    FeatureConfig config;
    config.bin_minutes = j.value("bin_minutes", 1);
    config.epsilon = j.value("epsilon", kDefaultRhythmEpsilon);

    if (j.contains("rhythms")) {
        for (const auto& [key, value] : j["rhythms"].items()) {
            FeatureConfig::RhythmSource src;
            const std::string type = value.value("type", "uniform");
            if (type == "uniform") {
                src.kind = FeatureConfig::RhythmSource::Kind::uniform;
            } else if (type == "proxy") {
                src.kind = FeatureConfig::RhythmSource::Kind::proxy;
                src.proxy_class = value.at("class").get<std::string>();
            } else if (type == "template") {
                src.kind = FeatureConfig::RhythmSource::Kind::text_template;
                for (const auto& iv : value.at("intervals")) {
                    src.template_spec.intervals.push_back(
                        {parse_time_of_day(iv.at("start").get<std::string>()),
                         parse_time_of_day(iv.at("end").get<std::string>()),
                         iv.at("level").get<int>()});
                }
            } else if (type == "density") {
                src.kind = FeatureConfig::RhythmSource::Kind::density;
                src.density = value.at("density").get<std::vector<double>>();
            } else {
                throw InvalidInput(path + ": unknown rhythm type '" + type + "'");
            }
            config.rhythms[ClassLabel::parse(key)] = std::move(src);
        }
    }
    if (j.contains("geo")) {
        for (const auto& [sensor, weights] : j["geo"].items()) {
            GeoModel gm;
            for (const auto& [key, w] : weights.items()) {
                gm.weights[ClassLabel::parse(key)] = w.get<double>();
            }
            validate_geo_model(gm);
            config.geo_by_sensor[sensor] = std::move(gm);
        }
    }
    return config;
}

std::map<ClassLabel, CircadianRhythm> resolve_rhythms(
    const FeatureConfig& config, const std::map<ClassLabel, CircadianRhythm>& learned) {
    std::map<ClassLabel, CircadianRhythm> out = learned;
    // Non-proxy entries first so proxies may reference them.
    for (const auto& [label, src] : config.rhythms) {
        using Kind = FeatureConfig::RhythmSource::Kind;
        switch (src.kind) {
            case Kind::uniform:
                out[label] = uniform_rhythm(config.bin_minutes);
                break;
            case Kind::text_template:
                out[label] = template_rhythm(src.template_spec, config.bin_minutes,
                                             config.epsilon);
                break;
            case Kind::density: {
                CircadianRhythm r;
                r.bin_minutes = config.bin_minutes;
                r.density = src.density;
                if (r.density.size() != static_cast<std::size_t>(1440 / config.bin_minutes)) {
                    throw InvalidInput("rhythm density for " + label.str() + " needs " +
                                       std::to_string(1440 / config.bin_minutes) + " bins");
                }
                double total = 0.0;
                for (double& d : r.density) {
                    d = std::max(d, config.epsilon);
                    total += d;
                }
                for (double& d : r.density) d /= total;
                r.provenance = RhythmProvenance::learned;
                validate_rhythm(r);
                out[label] = std::move(r);
                break;
            }
            case Kind::proxy:
                break;
        }
    }
    for (const auto& [label, src] : config.rhythms) {
        if (src.kind != FeatureConfig::RhythmSource::Kind::proxy) continue;
        const auto it = out.find(ClassLabel::parse(src.proxy_class));
        if (it == out.end()) {
            throw UnknownClass("rhythm proxy references unknown class " + src.proxy_class);
        }
        CircadianRhythm r = it->second;
        r.provenance = RhythmProvenance::proxy_taxon;
        out[label] = std::move(r);
    }
    return out;
}

}  // namespace wingbeat
