#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ncorr/wave.hpp"

using namespace ncorr;

TEST_CASE("spectral density matches the closed form") {
    const auto spec = bretschneider_form(1.0, 1.0);
    // 5/3 * exp(-5/4) evaluated by hand
    CHECK(spectral_density(spec, 1.0) == Catch::Approx(0.47750).margin(1e-5));
    CHECK(spectral_density(bretschneider_form(0.0, 1.0), 0.7) == 0.0);
    CHECK(spectral_density(spec, 50.0) < 1e-8);
    CHECK(spectral_density(spec, 1e6) < 1e-29);
    CHECK_THROWS_AS(spectral_density(spec, 0.0), ConfigError);
    CHECK_THROWS_AS(spectral_density(spec, -1.0), ConfigError);
}

TEST_CASE("spectral closure: zeroth moment equals Hs^2/3") {
    for (const double hs : {0.5, 1.0, 2.0}) {
        const auto spec = bretschneider_form(hs, 1.0);
        const double m0 = spectral_moment0(spec, 20.0);
        CHECK(m0 == Catch::Approx(hs * hs / 3.0).epsilon(0.005));
    }
}

TEST_CASE("jonswap normalization gives Hs^2/16") {
    const auto spec = jonswap(2.0, 8.5, 1.0);
    const double m0 = spectral_moment0(spec, 20.0 * spec.omega_p);
    CHECK(m0 == Catch::Approx(2.0 * 2.0 / 16.0).epsilon(0.005));

    // gamma = 1 reduces to the Pierson-Moskowitz-type shape with a known
    // closed-form coefficient: S = (5/16) Hs^2 wp^4 w^-5 exp(-1.25 (wp/w)^4).
    const double wp = spec.omega_p;
    for (const double w : {0.5 * wp, wp, 1.5 * wp, 3.0 * wp}) {
        const double expected = (5.0 / 16.0) * 4.0 * std::pow(wp, 4) *
                                std::pow(w, -5.0) *
                                std::exp(-1.25 * std::pow(wp / w, 4));
        CHECK(spectral_density(spec, w) == Catch::Approx(expected).epsilon(1e-3));
    }

    // Peak enhancement concentrates energy but keeps the moment pinned.
    const auto peaked = jonswap(2.0, 8.5, 3.3);
    CHECK(spectral_moment0(peaked, 20.0 * wp) ==
          Catch::Approx(2.0 * 2.0 / 16.0).epsilon(0.005));
    CHECK(spectral_density(peaked, wp) > spectral_density(spec, wp));
    CHECK_THROWS_AS(jonswap(2.0, 8.5, 0.5), ConfigError);
}

TEST_CASE("sample_realization bandwidth, amplitudes, and determinism") {
    const auto spec = bretschneider_form(1.0, 1.0);
    const auto real = sample_realization(spec, 500.0, 0);
    CHECK(real.delta_omega == Catch::Approx(2.0 * M_PI / 500.0).epsilon(1e-12));

    // equally spaced, strictly increasing, amplitude-consistent components
    REQUIRE(real.components.size() > 100);
    for (std::size_t i = 0; i < real.components.size(); ++i) {
        const auto& c = real.components[i];
        CHECK(c.omega > 0.0);
        if (i > 0) {
            CHECK(c.omega > real.components[i - 1].omega);
            CHECK(c.omega - real.components[i - 1].omega ==
                  Catch::Approx(real.delta_omega).epsilon(1e-9));
        }
        const double s = spectral_density(spec, c.omega);
        CHECK(c.amplitude * c.amplitude ==
              Catch::Approx(2.0 * s * real.delta_omega).margin(1e-18));
        CHECK(c.phase >= -2.0 * M_PI);
        CHECK(c.phase <= 2.0 * M_PI);
    }

    // determinism: bitwise identical component lists
    const auto again = sample_realization(spec, 500.0, 0);
    REQUIRE(again.components.size() == real.components.size());
    for (std::size_t i = 0; i < real.components.size(); ++i) {
        CHECK(again.components[i].omega == real.components[i].omega);
        CHECK(again.components[i].amplitude == real.components[i].amplitude);
        CHECK(again.components[i].phase == real.components[i].phase);
    }
    const auto other = sample_realization(spec, 500.0, 1);
    CHECK(other.components[0].phase != real.components[0].phase);

    // component band captures >= 99.9% of the spectral variance
    CHECK(real.variance() == Catch::Approx(1.0 / 3.0).epsilon(0.005));
    CHECK_THROWS_AS(sample_realization(spec, 0.0, 0), ConfigError);
}

TEST_CASE("elevation of a single component") {
    WaveRealization real;
    real.components = {{1.0, 1.0, 0.0}};
    real.duration = 2.0 * M_PI;
    real.delta_omega = 1.0;
    CHECK(elevation(real, 0.0) == Catch::Approx(1.0));
    CHECK(elevation(real, M_PI) == Catch::Approx(-1.0));
}

TEST_CASE("elevation is periodic and zero-mean over the repeat period") {
    const auto spec = bretschneider_form(1.0, 1.0);
    const auto real = sample_realization(spec, 200.0, 3);
    for (const double t : {0.0, 13.7, 55.2, 121.9}) {
        CHECK(elevation(real, t) ==
              Catch::Approx(elevation(real, t + real.repeat_period())).margin(1e-9));
    }

    // discrete mean over one full period vanishes (stationarity)
    const std::size_t n = 4096;
    const double dt = real.repeat_period() / n;
    const auto eta = elevation_series(real, 0.0, dt, n);
    double mean = 0.0;
    for (const double e : eta) mean += e;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 1e-10 * spec.hs);

    // discrete variance equals sum zeta^2/2 (exact orthogonality, no aliasing)
    double var = 0.0;
    for (const double e : eta) var += (e - mean) * (e - mean);
    var /= static_cast<double>(n);
    CHECK(var == Catch::Approx(real.variance()).epsilon(1e-6));
    CHECK(var == Catch::Approx(spec.hs * spec.hs / 3.0).epsilon(0.005));
}

TEST_CASE("zero-up-crossing count") {
    // pure cosine over exactly 3 periods: one up-crossing per period
    std::vector<double> cosine(3000);
    for (std::size_t i = 0; i < cosine.size(); ++i)
        cosine[i] = std::cos(2.0 * M_PI * 3.0 * static_cast<double>(i) /
                             static_cast<double>(cosine.size()));
    CHECK(count_zero_upcrossings(cosine) == 3);

    const std::vector<double> positive{1.0, 2.0, 0.5, 3.0};
    CHECK(count_zero_upcrossings(positive) == 0);

    const std::vector<double> single{1.0};
    CHECK_THROWS_AS(count_zero_upcrossings(single), DataError);

    // the training-wave configuration lands near the reported count
    const auto real = sample_realization(bretschneider_form(1.0, 1.0), 500.0, 11);
    const auto eta = elevation_series(real, 0.0, 0.1, 5001);
    const auto zuc = count_zero_upcrossings(eta);
    CHECK(zuc >= 100);
    CHECK(zuc <= 115);
}

TEST_CASE("realization json round trip") {
    const auto spec = jonswap(4.0, 8.5, 1.0);
    const auto real = sample_realization(spec, 60.0, 42);
    const auto j = to_json(real);
    CHECK(j.at("kind") == "jonswap");
    CHECK(j.contains("Tp"));
    const auto back = realization_from_json(j);
    REQUIRE(back.components.size() == real.components.size());
    for (std::size_t i = 0; i < real.components.size(); ++i) {
        CHECK(back.components[i].omega == real.components[i].omega);
        CHECK(back.components[i].amplitude == real.components[i].amplitude);
        CHECK(back.components[i].phase == real.components[i].phase);
    }
    CHECK(back.seed == real.seed);
    CHECK(back.duration == real.duration);

    const auto jb = to_json(sample_realization(bretschneider_form(1.0, 1.0), 10.0, 1));
    CHECK(jb.at("kind") == "bretschneider");
    CHECK(jb.contains("omega_p"));
}

TEST_CASE("elevation csv export") {
    const auto path = std::filesystem::temp_directory_path() / "ncorr_eta_test.csv";
    const auto real = sample_realization(bretschneider_form(1.0, 1.0), 20.0, 5);
    write_elevation_csv(path, real, 0.5, 41);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,eta");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 41);
    std::filesystem::remove(path);
}
