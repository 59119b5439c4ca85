#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wingbeat/errors.hpp"
#include "wingbeat/geo.hpp"
#include "wingbeat/rhythm.hpp"
#include "wingbeat/synth.hpp"

using namespace wingbeat;

namespace {

void check_normalized(const CircadianRhythm& r) {
    double total = 0.0;
    double min_density = 1.0;
    for (double d : r.density) {
        total += d;
        min_density = std::min(min_density, d);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(min_density > 0.0);
}

ActivityTemplateSpec fig_style_diurnal_template() {
    // Dawn and dusk high, daytime medium, night low.
    ActivityTemplateSpec spec;
    spec.intervals = {{TimeOfDay::from_hm(5, 0), TimeOfDay::from_hm(7, 0), 3},
                      {TimeOfDay::from_hm(7, 0), TimeOfDay::from_hm(18, 0), 2},
                      {TimeOfDay::from_hm(18, 0), TimeOfDay::from_hm(20, 0), 3},
                      {TimeOfDay::from_hm(20, 0), TimeOfDay::from_hm(5, 0), 1}};
    return spec;
}

}  // namespace

TEST_CASE("TimeOfDay wraps modulo one day") {
    CHECK(TimeOfDay(1500.0).minutes_since_midnight == doctest::Approx(60.0));
    CHECK(TimeOfDay(-60.0).minutes_since_midnight == doctest::Approx(1380.0));
    CHECK(TimeOfDay(1440.0).minutes_since_midnight == doctest::Approx(0.0));
}

TEST_CASE("learn_rhythm concentrates a point mass and floors the rest") {
    std::vector<TimeOfDay> stamps(1000, TimeOfDay::from_hm(6, 0));
    const auto rhythm = learn_rhythm(stamps, 1, 1e-6);
    check_normalized(rhythm);
    CHECK(rhythm.provenance == RhythmProvenance::learned);

    const double peak = rhythm_density(rhythm, TimeOfDay::from_hm(6, 0));
    const double off_a = rhythm_density(rhythm, TimeOfDay::from_hm(12, 0));
    const double off_b = rhythm_density(rhythm, TimeOfDay::from_hm(23, 30));
    CHECK(peak > 0.99);
    CHECK(off_a == doctest::Approx(off_b));   // every empty bin gets the same floor
    CHECK(off_a == doctest::Approx(1e-6 / (1.0 + 1439e-6)));
}

TEST_CASE("learn_rhythm on uniform draws is uniform within multinomial noise") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> minute(0.0, 1440.0);
    std::vector<TimeOfDay> stamps;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) stamps.emplace_back(minute(rng));

    const int bin_minutes = 60;  // 24 bins keeps the per-bin count high
    const auto rhythm = learn_rhythm(stamps, bin_minutes, 1e-6);
    check_normalized(rhythm);

    const double expected = 1.0 / 24.0;
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
    for (double d : rhythm.density) CHECK(std::abs(d - expected) <= 3.5 * sigma);
}

TEST_CASE("learn_rhythm recovers dawn and dusk modes of a bimodal rhythm") {
    const auto truth = gaussian_mixture_rhythm(
        {{TimeOfDay::from_hm(6, 0), 30.0, 1.0}, {TimeOfDay::from_hm(19, 0), 30.0, 1.0}});
    const auto stamps = draw_times_of_day(truth, 20000, 99);
    const auto rhythm = learn_rhythm(stamps, 30, 1e-6);

    // The two heaviest bins sit at the generating modes.
    std::vector<std::size_t> order(rhythm.density.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rhythm.density[a] > rhythm.density[b];
    });
    const double top0 = (static_cast<double>(order[0]) + 0.5) * 30.0;
    const double top1 = (static_cast<double>(order[1]) + 0.5) * 30.0;
    const double dawn = 360.0, dusk = 1140.0;
    const bool recovered = (std::abs(top0 - dawn) <= 45.0 && std::abs(top1 - dusk) <= 45.0) ||
                           (std::abs(top0 - dusk) <= 45.0 && std::abs(top1 - dawn) <= 45.0);
    CHECK(recovered);
}

TEST_CASE("learn_rhythm rejects empty input") {
    CHECK_THROWS_AS(learn_rhythm({}, 1, 1e-6), EmptyInput);
}

TEST_CASE("template_rhythm level arithmetic") {
    SUBCASE("all-level-1 template is uniform") {
        ActivityTemplateSpec spec;
        spec.intervals = {{TimeOfDay(0.0), TimeOfDay(0.0), 1}};  // full-day wrap
        const auto rhythm = template_rhythm(spec);
        check_normalized(rhythm);
        CHECK(rhythm_density(rhythm, TimeOfDay::from_hm(3, 0)) ==
              doctest::Approx(1.0 / 1440.0));
        CHECK(rhythm.provenance == RhythmProvenance::text_template);
    }

    SUBCASE("dawn/dusk high, day medium, night low: dawn is 3x night") {
        const auto rhythm = template_rhythm(fig_style_diurnal_template());
        check_normalized(rhythm);
        const double dawn = rhythm_density(rhythm, TimeOfDay::from_hm(6, 0));
        const double day = rhythm_density(rhythm, TimeOfDay::from_hm(12, 0));
        const double night = rhythm_density(rhythm, TimeOfDay::from_hm(23, 0));
        CHECK(dawn == doctest::Approx(3.0 * night));
        CHECK(day == doctest::Approx(2.0 * night));
    }

    SUBCASE("crepuscular template: dawn to noon ratio is 3") {
        ActivityTemplateSpec spec;
        spec.intervals = {{TimeOfDay::from_hm(5, 0), TimeOfDay::from_hm(7, 0), 3},
                          {TimeOfDay::from_hm(7, 0), TimeOfDay::from_hm(18, 0), 1},
                          {TimeOfDay::from_hm(18, 0), TimeOfDay::from_hm(20, 0), 3},
                          {TimeOfDay::from_hm(20, 0), TimeOfDay::from_hm(5, 0), 1}};
        const auto rhythm = template_rhythm(spec);
        CHECK(rhythm_density(rhythm, TimeOfDay::from_hm(6, 0)) ==
              doctest::Approx(3.0 * rhythm_density(rhythm, TimeOfDay::from_hm(12, 0))));
    }

    SUBCASE("gaps are rejected") {
        ActivityTemplateSpec spec;
        spec.intervals = {{TimeOfDay::from_hm(0, 0), TimeOfDay::from_hm(12, 0), 1}};
        CHECK_THROWS_AS(template_rhythm(spec), InvalidTemplate);
    }

    SUBCASE("overlaps are rejected") {
        ActivityTemplateSpec spec;
        spec.intervals = {{TimeOfDay::from_hm(0, 0), TimeOfDay::from_hm(13, 0), 1},
                          {TimeOfDay::from_hm(12, 0), TimeOfDay::from_hm(0, 0), 2}};
        CHECK_THROWS_AS(template_rhythm(spec), InvalidTemplate);
    }

    SUBCASE("bad level is rejected") {
        ActivityTemplateSpec spec;
        spec.intervals = {{TimeOfDay(0.0), TimeOfDay(0.0), 4}};
        CHECK_THROWS_AS(template_rhythm(spec), InvalidTemplate);
    }

    SUBCASE("splitting an interval changes nothing") {
        ActivityTemplateSpec split = fig_style_diurnal_template();
        split.intervals.erase(split.intervals.begin() + 1);
        split.intervals.push_back({TimeOfDay::from_hm(7, 0), TimeOfDay::from_hm(11, 0), 2});
        split.intervals.push_back({TimeOfDay::from_hm(11, 0), TimeOfDay::from_hm(18, 0), 2});
        const auto a = template_rhythm(fig_style_diurnal_template());
        const auto b = template_rhythm(split);
        for (std::size_t i = 0; i < a.density.size(); ++i) {
            CHECK(a.density[i] == doctest::Approx(b.density[i]));
        }
    }
}

TEST_CASE("rhythm_density lookups") {
    SUBCASE("uniform rhythm returns 1/bins everywhere") {
        const auto rhythm = uniform_rhythm(1);
        CHECK(rhythm_density(rhythm, TimeOfDay::from_hm(4, 17)) ==
              doctest::Approx(1.0 / 1440.0));
    }

    SUBCASE("learned rhythms reproduce a 3x density ratio at 06:00") {
        // Two rhythms shaped so the first is three times as active at dawn.
        std::vector<TimeOfDay> heavy, light;
        for (int i = 0; i < 900; ++i) heavy.push_back(TimeOfDay::from_hm(6, 0));
        for (int i = 0; i < 100; ++i) heavy.push_back(TimeOfDay::from_hm(15, 0));
        for (int i = 0; i < 300; ++i) light.push_back(TimeOfDay::from_hm(6, 0));
        for (int i = 0; i < 700; ++i) light.push_back(TimeOfDay::from_hm(13, 0));
        const auto crepuscular = learn_rhythm(heavy, 1, 1e-9);
        const auto day_active = learn_rhythm(light, 1, 1e-9);
        const double at_dawn_a = rhythm_density(crepuscular, TimeOfDay::from_hm(6, 0));
        const double at_dawn_b = rhythm_density(day_active, TimeOfDay::from_hm(6, 0));
        CHECK(at_dawn_a == doctest::Approx(3.0 * at_dawn_b).epsilon(1e-5));
    }

    SUBCASE("off-peak lookup returns the floor, never zero") {
        const auto rhythm = learn_rhythm({TimeOfDay::from_hm(6, 0)}, 1, 1e-6);
        CHECK(rhythm_density(rhythm, TimeOfDay::from_hm(18, 0)) > 0.0);
    }

    SUBCASE("wrapped times hit the same bin") {
        const auto rhythm = learn_rhythm(draw_times_of_day(uniform_rhythm(), 500, 3), 1, 1e-6);
        const double a = rhythm_density(rhythm, TimeOfDay(100.0));
        const double b = rhythm_density(rhythm, TimeOfDay(100.0 + 1440.0));
        CHECK(a == b);
    }
}

TEST_CASE("learn_rhythm converges to the generating template") {
    // 15-minute bins: at 1e5 draws the multinomial L1 noise floor over 1440
    // one-minute bins would alone exceed the 0.05 bound.
    const auto truth = template_rhythm(fig_style_diurnal_template(), 15);
    const auto stamps = draw_times_of_day(truth, 100000, 12345);
    const auto learned = learn_rhythm(stamps, 15, 1e-6);
    REQUIRE(learned.density.size() == truth.density.size());
    double l1 = 0.0;
    for (std::size_t i = 0; i < truth.density.size(); ++i) {
        l1 += std::abs(truth.density[i] - learned.density[i]);
    }
    CHECK(l1 <= 0.05);
}

TEST_CASE("geo_ratio returns configured prevalence ratios") {
    const ClassLabel tarsalis{"Culex tarsalis", ""};
    const ClassLabel stigmatosoma{"Culex stigmatosoma", ""};

    SUBCASE("twice-as-likely knowledge becomes a 2:1 weight pair") {
        GeoModel model;
        model.weights[tarsalis] = 2.0;
        model.weights[stigmatosoma] = 1.0;
        CHECK(geo_ratio(model, tarsalis) == doctest::Approx(2.0));
        CHECK(geo_ratio(model, stigmatosoma) == doctest::Approx(1.0));
    }

    SUBCASE("uniform model has equal weights") {
        const auto model = geo_model_from_counts({{tarsalis, 5.0}, {stigmatosoma, 5.0}});
        CHECK(geo_ratio(model, tarsalis) == geo_ratio(model, stigmatosoma));
    }

    SUBCASE("unknown class is rejected") {
        GeoModel model;
        model.weights[tarsalis] = 1.0;
        CHECK_THROWS_AS(geo_ratio(model, stigmatosoma), UnknownClass);
    }

    SUBCASE("counts are floored above zero") {
        const auto model = geo_model_from_counts({{tarsalis, 277.0}, {stigmatosoma, 0.0}});
        CHECK(geo_ratio(model, stigmatosoma) > 0.0);
    }
}
