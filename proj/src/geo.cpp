#include "wingbeat/geo.hpp"

#include <algorithm>

#include "wingbeat/errors.hpp"

namespace wingbeat {

double geo_ratio(const GeoModel& model, const ClassLabel& label) {
    const auto it = model.weights.find(label);
    if (it == model.weights.end()) {
        throw UnknownClass("geo_ratio: no weight for class " + label.str());
    }
    return it->second;
}

GeoModel geo_model_from_counts(const std::map<ClassLabel, double>& counts, double laplace) {
    GeoModel model;
    for (const auto& [label, count] : counts) {
        model.weights[label] = std::max(count, laplace);
    }
    validate_geo_model(model);
    return model;
}

void validate_geo_model(const GeoModel& model) {
    if (model.weights.empty()) throw InvalidInput("geo model has no classes");
    for (const auto& [label, w] : model.weights) {
        if (!(w > 0.0)) throw InvalidInput("geo weight for " + label.str() + " must be > 0");
    }
}

}  // namespace wingbeat
