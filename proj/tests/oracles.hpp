// Independent reference implementations used only by tests. These must stay
// naive: the point is that they share no code path with the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracles {

// O(N^2) direct-summation DFT, one-sided magnitudes.
inline std::vector<double> direct_dft_magnitudes(const std::vector<double>& x,
                                                 std::size_t dft_length) {
    const std::size_t half = dft_length / 2;
    std::vector<double> mags(half + 1, 0.0);
    for (std::size_t k = 0; k <= half; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t n = 0; n < x.size() && n < dft_length; ++n) {
            const double angle = -2.0 * M_PI * static_cast<double>(k) *
                                 static_cast<double>(n) / static_cast<double>(dft_length);
            acc += x[n] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        mags[k] = std::abs(acc);
    }
    return mags;
}

// Exhaustive k-nearest-neighbor vote over plain vectors: returns per-class
// counts among the k nearest by Euclidean distance, ties by lower index.
inline std::vector<std::size_t> brute_force_knn(const std::vector<std::vector<double>>& train,
                                                const std::vector<double>& query,
                                                std::size_t k) {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) {
            const double d = train[i][j] - query[j];
            d2 += d * d;
        }
        ranked.emplace_back(d2, i);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::size_t> top;
    for (std::size_t i = 0; i < k && i < ranked.size(); ++i) top.push_back(ranked[i].second);
    return top;
}

// Monte-Carlo estimate of the optimal-rule error for discrete class densities:
// draw a class by prior, a bin by that class's density, classify by
// argmax_i prior_i * p_i(bin), and count mistakes.
inline double monte_carlo_bayes_error(const std::vector<std::vector<double>>& densities,
                                      const std::vector<double>& priors,
                                      std::size_t draws, std::uint64_t seed) {
    const std::size_t n_classes = densities.size();
    std::vector<std::vector<double>> p(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        double total = 0.0;
        for (double m : densities[c]) total += m;
        p[c] = densities[c];
        for (double& m : p[c]) m /= total;
    }

    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> class_draw(priors.begin(), priors.end());
    std::vector<std::discrete_distribution<std::size_t>> bin_draw;
    for (std::size_t c = 0; c < n_classes; ++c) {
        bin_draw.emplace_back(p[c].begin(), p[c].end());
    }

    std::size_t wrong = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        const std::size_t actual = class_draw(rng);
        const std::size_t bin = bin_draw[actual](rng);
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            const double score = priors[c] * p[c][bin];
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        if (best != actual) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(draws);
}

// Standard normal CDF.
inline double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracles
