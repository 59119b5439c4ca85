#pragma once

#include <map>
#include <string>

#include "wingbeat/classifier.hpp"

namespace wingbeat {

// Writes the model as JSON. Exemplar spectra are stored as snippet paths when
// available (recomputed on load) and inline otherwise.
void save_classifier(const Classifier& model, const std::string& path);

Classifier load_classifier(const std::string& path);

// Per-class rhythm sources plus per-sensor geo weights, from a JSON file:
//   {"rhythms": {"<class>": {"type": "uniform"}
//                           | {"type": "proxy", "class": "<class>"}
//                           | {"type": "template", "intervals": [
//                                {"start": "05:00", "end": "07:00", "level": 3}, ...]}
//                           | {"type": "density", "density": [...]}},
//    "geo": {"<sensor>": {"<class>": <weight>, ...}},
//    "bin_minutes": 1, "epsilon": 1e-6}
struct FeatureConfig {
    struct RhythmSource {
        enum class Kind { uniform, proxy, text_template, density } kind = Kind::uniform;
        std::string proxy_class;
        ActivityTemplateSpec template_spec;
        std::vector<double> density;
    };
    std::map<ClassLabel, RhythmSource> rhythms;
    std::map<std::string, GeoModel> geo_by_sensor;
    int bin_minutes = 1;
    double epsilon = kDefaultRhythmEpsilon;
};

FeatureConfig load_feature_config(const std::string& path);

// Materializes configured rhythm sources into rhythms; proxy entries copy the
// referenced class's rhythm from `learned` (or from another configured entry).
std::map<ClassLabel, CircadianRhythm> resolve_rhythms(
    const FeatureConfig& config, const std::map<ClassLabel, CircadianRhythm>& learned);

TimeOfDay parse_time_of_day(const std::string& hhmm);

}  // namespace wingbeat
