#pragma once

#include <map>

#include "wingbeat/bayes_types.hpp"

namespace wingbeat {

// Relative prevalence of each class at one sensor site. Only the ratios
// between classes are meaningful.
struct GeoModel {
    std::map<ClassLabel, double> weights;
};

// Relative weight of observing `label` at this site; strictly positive.
double geo_ratio(const GeoModel& model, const ClassLabel& label);

// Builds a model from capture counts, flooring empty classes at `laplace`.
GeoModel geo_model_from_counts(const std::map<ClassLabel, double>& counts,
                               double laplace = 1.0);

// Throws InvalidInput unless all weights are strictly positive.
void validate_geo_model(const GeoModel& model);

}  // namespace wingbeat
