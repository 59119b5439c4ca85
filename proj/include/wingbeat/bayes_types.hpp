#pragma once

#include <compare>
#include <map>
#include <string>

namespace wingbeat {

// Species plus optional sex; different sexes of one species are distinct
// classes. Text form is "species" or "species/sex".
struct ClassLabel {
    std::string species;
    std::string sex;  // empty when not sexed

    auto operator<=>(const ClassLabel&) const = default;

    std::string str() const { return sex.empty() ? species : species + "/" + sex; }

    static ClassLabel parse(const std::string& text) {
        const auto slash = text.find('/');
        if (slash == std::string::npos) return {text, ""};
        return {text.substr(0, slash), text.substr(slash + 1)};
    }
};

using ClassMap = std::map<ClassLabel, double>;

// P(C_i); entries >= 0 and sum to 1.
using PriorVector = ClassMap;

// P(C_i | X); entries >= 0 and sum to 1.
using PosteriorVector = ClassMap;

// P(F_j = f_j | C_i) for one feature. A feature that was not observed is
// marked missing and contributes no factor to the posterior.
struct LikelihoodVector {
    ClassMap values;
    bool missing = false;

    static LikelihoodVector missing_feature() { return {{}, true}; }
};

}  // namespace wingbeat
