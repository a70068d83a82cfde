#include "doctest.h"

#include "ksn/errors.hpp"
#include "ksn/units.hpp"

#include <cmath>
#include <sstream>

using namespace ksn;
using units::Dimension;

TEST_CASE("default kaon parameters match the measured values")
{
    const auto p = units::default_kaon_parameters();
    CHECK(p.m_K == doctest::Approx(497.614).epsilon(1e-12));
    CHECK(p.delta_m == doctest::Approx(3.484e-12).epsilon(1e-12));
    // width ratio from the PDG lifetimes 8.954e-11 s / 5.116e-8 s
    CHECK(p.gamma_S / p.gamma_L == doctest::Approx(571.3647).epsilon(1e-4));
    CHECK(p.gamma_S > p.gamma_L);
    CHECK(p.gamma_L > 0);
    CHECK(p.tau_S_seconds() == doctest::Approx(8.954e-11).epsilon(1e-12));
    CHECK(p.tau_L_seconds() == doctest::Approx(5.116e-8).epsilon(1e-12));
    // CP-violation scale 2 Re eps / (1 + |eps|^2) ~ 1e-3
    const double r = 2.0 * p.epsilon.real() / (1.0 + std::norm(p.epsilon));
    CHECK(r == doctest::Approx(3.2322521523827853e-3).epsilon(1e-10));
    CHECK(r > 1e-3);
    CHECK(r < 5e-3);
    CHECK_NOTHROW(p.validate());

    const auto lit = units::default_kaon_parameters(units::DeltaMSource::literal_3p483);
    CHECK(lit.delta_m == doctest::Approx(3.483).epsilon(1e-12));
}

TEST_CASE("natural-unit conversion factors")
{
    // 1 m = 1/(hbar c) in MeV^-1
    CHECK(units::to_natural(1.0, Dimension::length)
          == doctest::Approx(5.0677307161563958e12).epsilon(1e-12));
    CHECK(units::to_natural(1.0, Dimension::length)
          == doctest::Approx(5.068e12).epsilon(1e-3));
    CHECK(units::from_natural(1.0, Dimension::length)
          == doctest::Approx(1.9732698045930247e-13).epsilon(1e-12));
    CHECK(units::to_natural(1.0, Dimension::time)
          == doctest::Approx(1.5192674478786262e21).epsilon(1e-12));
    CHECK(units::to_natural(0.0, Dimension::mass) == 0.0);
    CHECK(units::from_natural(0.0, Dimension::energy) == 0.0);
    // defining relation of natural units
    CHECK(units::to_natural(units::constants().hbar(), Dimension::action)
          == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(units::g_natural() == doctest::Approx(6.7088307462314586e-45).epsilon(1e-12));
}

TEST_CASE("to_natural / from_natural round-trip over 120 magnitudes")
{
    const Dimension dims[] = {Dimension::length, Dimension::time, Dimension::mass,
                              Dimension::energy, Dimension::action};
    for (auto d : dims) {
        for (int i = 0; i < 120; ++i) {
            const double x = std::pow(10.0, -60.0 + i);
            const double rt = units::from_natural(units::to_natural(x, d), d);
            CHECK(std::abs(rt - x) <= 1e-14 * x);
        }
    }
}

TEST_CASE("unknown dimension tag is rejected")
{
    CHECK_THROWS_AS(units::dimension_from_string("charge"), std::invalid_argument);
    CHECK(units::dimension_from_string("length") == Dimension::length);
}

TEST_CASE("parameter validation")
{
    auto p = units::default_kaon_parameters();
    p.m_K = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = units::default_kaon_parameters();
    p.epsilon = {0.9, 0.9};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = units::default_kaon_parameters();
    p.delta_m = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("key=value parameter files")
{
    const auto base = units::default_kaon_parameters();

    SUBCASE("empty file keeps the defaults")
    {
        std::istringstream in("\n  # only a comment\n");
        const auto p = units::load_kaon_parameters(in, base);
        CHECK(p.m_K == base.m_K);
        CHECK(p.delta_m == base.delta_m);
        CHECK(p.gamma_S == base.gamma_S);
        CHECK(p.epsilon == base.epsilon);
    }

    SUBCASE("setting a key to its default value is a fixed point")
    {
        std::istringstream in("delta_m_MeV=3.484e-12\n");
        const auto p = units::load_kaon_parameters(in, base);
        CHECK(p.delta_m == base.delta_m);
    }

    SUBCASE("all keys are applied")
    {
        std::istringstream in(
            "m_K_MeV = 500\n"
            "delta_m_MeV = 1e-12\n"
            "tau_S_s = 1e-10\n"
            "tau_L_s = 1e-8\n"
            "eps_re = 1e-3\n"
            "eps_im = 2e-3\n"
            "csl_gamma = 1e-36\n"
            "csl_rC_m = 2e-7\n"
            "csl_m0_MeV = 939\n");
        const auto p = units::load_kaon_parameters(in, base);
        CHECK(p.m_K == 500.0);
        CHECK(p.delta_m == 1e-12);
        CHECK(p.tau_S_seconds() == doctest::Approx(1e-10).epsilon(1e-13));
        CHECK(p.tau_L_seconds() == doctest::Approx(1e-8).epsilon(1e-13));
        CHECK(p.epsilon == std::complex<double>(1e-3, 2e-3));
        CHECK(p.m0 == 939.0);
        CHECK(units::from_natural(p.r_C, Dimension::length)
              == doctest::Approx(2e-7).epsilon(1e-13));
        // gamma_csl converts m^3/s -> MeV^-2 and back
        const double back = p.gamma_csl
                            / (std::pow(units::to_natural(1.0, Dimension::length), 3)
                               / units::to_natural(1.0, Dimension::time));
        CHECK(back == doctest::Approx(1e-36).epsilon(1e-13));
    }

    SUBCASE("unknown keys are rejected with the offending name")
    {
        std::istringstream in("bogus=1\n");
        CHECK_THROWS_WITH_AS(units::load_kaon_parameters(in, base),
                             doctest::Contains("bogus"), config_error);
    }

    SUBCASE("malformed lines report the line number")
    {
        std::istringstream in("m_K_MeV=500\nnot a line\n");
        CHECK_THROWS_WITH_AS(units::load_kaon_parameters(in, base),
                             doctest::Contains("line 2"), config_error);
        std::istringstream in2("m_K_MeV=12abc\n");
        CHECK_THROWS_AS(units::load_kaon_parameters(in2, base), config_error);
    }
}
