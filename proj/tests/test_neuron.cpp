#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gnconvert/neuron.hpp"

namespace {

using gnc::GNConfig;
using gnc::IFConfig;

// Constant-input run of T steps: spike count times the per-spike weight, over T.
double simulate_if_rate(double x, double theta, int T, double v0) {
    gnc::IFState s{v0};
    int count = 0;
    for (int t = 0; t < T; ++t) {
        const auto r = gnc::if_step(s, IFConfig{theta}, x);
        s = r.state;
        count += r.out.count;
    }
    return (count * theta) / T;
}

double simulate_gn_rate(double x, double theta, int tau, int T, double v0) {
    const GNConfig cfg(theta, tau);
    gnc::GNState s{v0};
    int count = 0;
    for (int t = 0; t < T; ++t) {
        const auto r = gnc::gn_step(s, cfg, x);
        s = r.state;
        count += r.out.count;
    }
    return (count * cfg.theta_gn()) / T;
}

TEST(IfStep, FiresAndSubtractsThreshold) {
    const auto r = gnc::if_step({0.6}, IFConfig{1.0}, 0.5);
    EXPECT_EQ(r.out.count, 1);
    EXPECT_DOUBLE_EQ(r.out.psp, 1.0);
    EXPECT_NEAR(r.state.v, 0.1, 1e-15);
}

TEST(IfStep, NegativePotentialStaysAndDoesNotFire) {
    const auto r = gnc::if_step({0.0}, IFConfig{1.0}, -0.5);
    EXPECT_EQ(r.out.count, 0);
    EXPECT_EQ(r.out.psp, 0.0);
    EXPECT_EQ(r.state.v, -0.5);
}

TEST(IfStep, ReachingThresholdExactlyFires) {
    const auto r = gnc::if_step({0.0}, IFConfig{1.0}, 1.0);
    EXPECT_EQ(r.out.count, 1);
    EXPECT_EQ(r.state.v, 0.0);
}

TEST(IfConfig, RejectsNonPositiveThreshold) {
    EXPECT_THROW(IFConfig{0.0}.validate(), std::invalid_argument);
    EXPECT_THROW(IFConfig{-1.0}.validate(), std::invalid_argument);
    EXPECT_THROW(IFConfig{std::nan("")}.validate(), std::invalid_argument);
    EXPECT_NO_THROW(IFConfig{1e-6}.validate());
}

TEST(GnConfig, MemberThresholds) {
    const GNConfig cfg(2.0, 4);
    EXPECT_DOUBLE_EQ(cfg.theta_gn(), 0.5);
    EXPECT_EQ(cfg.member_thresholds(), (std::vector<double>{0.5, 1.0, 1.5, 2.0}));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> th(1e-3, 10.0);
    for (int n = 0; n < 500; ++n) {
        const double theta = th(gen);
        for (int tau = 1; tau <= 16; ++tau) {
            const GNConfig c(theta, tau);
            const auto t = c.member_thresholds();
            ASSERT_EQ(t.size(), static_cast<std::size_t>(tau));
            EXPECT_EQ(t.front(), c.theta_gn());
            EXPECT_EQ(t.back(), theta);
            for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(t[i - 1], t[i]);
        }
    }
}

TEST(GnConfig, RejectsBadParameters) {
    EXPECT_THROW(GNConfig(1.0, 0), std::invalid_argument);
    EXPECT_THROW(GNConfig(0.0, 4), std::invalid_argument);
    EXPECT_THROW(GNConfig(-2.0, 4), std::invalid_argument);
    EXPECT_THROW(GNConfig(INFINITY, 4), std::invalid_argument);
}

TEST(GnStep, TwoOfThreeMembersFire) {
    for (auto step : {gnc::gn_step, gnc::gn_step_memberloop}) {
        const auto r = step({0.0}, GNConfig(1.0, 3), 0.7);
        EXPECT_EQ(r.out.count, 2);
        EXPECT_NEAR(r.state.v, 0.7 - 2.0 / 3.0, 1e-15);
        EXPECT_NEAR(r.out.psp, 2.0 / 3.0, 1e-15);
    }
}

TEST(GnStep, TopThresholdFiresEveryMember) {
    for (auto step : {gnc::gn_step, gnc::gn_step_memberloop}) {
        const auto r = step({0.0}, GNConfig(1.0, 3), 1.0);
        EXPECT_EQ(r.out.count, 3);
        EXPECT_NEAR(r.state.v, 0.0, 1e-15);
    }
}

TEST(GnStep, BelowLowestMemberIsSilent) {
    for (auto step : {gnc::gn_step, gnc::gn_step_memberloop}) {
        const auto r = step({0.0}, GNConfig(1.0, 3), 0.2);
        EXPECT_EQ(r.out.count, 0);
        EXPECT_EQ(r.state.v, 0.2);
    }
}

TEST(GnStep, MemberLoopFullGroup) {
    const auto r = gnc::gn_step_memberloop({0.1}, GNConfig(1.0, 4), 0.9);
    EXPECT_EQ(r.out.count, 4);
    EXPECT_EQ(r.state.v, 0.0);
}

TEST(GnStep, MatchesMemberLoopOnRandomInputs) {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> tau_d(1, 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 20000; ++n) {
        const int tau = tau_d(gen);
        const double theta = 4.0 * (1.0 - u(gen));
        const GNConfig cfg(theta, tau);
        const double v = theta * (4.0 * u(gen) - 2.0);
        const double x = theta * (4.0 * u(gen) - 2.0);
        const auto a = gnc::gn_step({v}, cfg, x);
        const auto b = gnc::gn_step_memberloop({v}, cfg, x);
        ASSERT_EQ(a.out.count, b.out.count) << "tau=" << tau << " theta=" << theta << " v=" << v << " x=" << x;
        ASSERT_NEAR(a.state.v, b.state.v, 1e-12);
    }
}

TEST(GnStep, MatchesMemberLoopAtThresholds) {
    // Potentials placed on, and one ulp either side of, every member threshold.
    for (double theta : {1.0, 0.3, 0.7, 1.1, 2.9, 3.7, 1e-3}) {
        for (int tau = 1; tau <= 12; ++tau) {
            const GNConfig cfg(theta, tau);
            for (int i = 1; i <= tau; ++i) {
                const double th = cfg.member_threshold(i);
                for (double p : {std::nextafter(th, 0.0), th, std::nextafter(th, 10.0)}) {
                    const auto a = gnc::gn_step({0.0}, cfg, p);
                    const auto b = gnc::gn_step_memberloop({0.0}, cfg, p);
                    ASSERT_EQ(a.out.count, b.out.count) << theta << " " << tau << " " << i << " " << p;
                    ASSERT_NEAR(a.state.v, b.state.v, 1e-12);
                }
            }
        }
    }
}

TEST(GnStep, SingleMemberBehavesLikeIf) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int run = 0; run < 200; ++run) {
        const double theta = 0.1 + std::abs(u(gen));
        gnc::IFState si{u(gen) * theta};
        gnc::GNState sg{si.v};
        for (int t = 0; t < 64; ++t) {
            const double x = u(gen) * theta;
            const auto a = gnc::if_step(si, IFConfig{theta}, x);
            const auto b = gnc::gn_step(sg, GNConfig(theta, 1), x);
            const auto c = gnc::gn_step_memberloop(sg, GNConfig(theta, 1), x);
            ASSERT_EQ(a.out.count, b.out.count);
            ASSERT_EQ(a.out.count, c.out.count);
            ASSERT_EQ(a.out.psp, b.out.psp);
            ASSERT_EQ(a.state.v, b.state.v);
            ASSERT_EQ(a.state.v, c.state.v);
            si = a.state;
            sg = b.state;
        }
    }
}

TEST(GnStep, CountBoundsAndSaturation) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int n = 0; n < 20000; ++n) {
        const int tau = 1 + n % 9;
        const double theta = 0.05 + std::abs(u(gen));
        const double v = u(gen), x = u(gen);
        const auto r = gnc::gn_step({v}, GNConfig(theta, tau), x);
        ASSERT_GE(r.out.count, 0);
        ASSERT_LE(r.out.count, tau);
        if (v + x >= theta) {
            ASSERT_EQ(r.out.count, tau);
        }
        if (v + x < theta / tau) {
            ASSERT_EQ(r.out.count, 0);
        }
    }
}

TEST(GnStep, CountNonDecreasingInInput) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 300; ++n) {
        const int tau = 1 + n % 8;
        const double theta = 0.2 + std::abs(u(gen));
        const double v = u(gen) * theta;
        int prev = -1;
        for (int i = 0; i <= 400; ++i) {
            const double x = -2.0 * theta + 4.0 * theta * i / 400.0;
            const int c = gnc::gn_step({v}, GNConfig(theta, tau), x).out.count;
            ASSERT_GE(c, prev);
            prev = c;
        }
    }
}

TEST(Conservation, SummedPspEqualsChargeMinusFinalPotential) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int run = 0; run < 300; ++run) {
        const double theta = 0.1 + 2.0 * std::abs(u(gen));
        const int tau = 1 + run % 8;
        const int T = 1 + run % 40;
        const double v0 = theta * u(gen);
        gnc::IFState si{v0};
        gnc::GNState sg{v0};
        double sum_x = 0, psp_if = 0, psp_gn = 0;
        for (int t = 0; t < T; ++t) {
            const double x = 2.0 * theta * u(gen);
            sum_x += x;
            const auto a = gnc::if_step(si, IFConfig{theta}, x);
            const auto b = gnc::gn_step(sg, GNConfig(theta, tau), x);
            si = a.state;
            sg = b.state;
            psp_if += a.out.psp;
            psp_gn += b.out.psp;
        }
        EXPECT_NEAR(psp_if, v0 + sum_x - si.v, 1e-9);
        EXPECT_NEAR(psp_gn, v0 + sum_x - sg.v, 1e-9);
    }
}

TEST(ClosedForm, OneEighthNeedsEightIfSteps) {
    EXPECT_EQ(gnc::closed_form_if_rate(0.125, 1.0, 8, 0.5), 0.125);
    for (int T = 1; T < 8; ++T) {
        EXPECT_NE(gnc::closed_form_if_rate(0.125, 1.0, T, 0.5), 0.125) << T;
        EXPECT_NE(gnc::closed_form_if_rate(0.125, 1.0, T, 0.0), 0.125) << T;
    }
    EXPECT_EQ(gnc::closed_form_gn_rate(0.125, 1.0, 4, 2, 0.125), 0.125);
    EXPECT_EQ(gnc::closed_form_gn_rate(0.125, 1.0, 4, 2, 0.0), 0.125);
}

TEST(ClosedForm, ZeroInputGivesZero) {
    for (double theta : {0.5, 1.0, 3.0}) {
        for (int T : {1, 4, 17}) {
            for (double v0 : {-0.4 * theta, 0.0, 0.99 * theta}) {
                EXPECT_EQ(gnc::closed_form_if_rate(0.0, theta, T, v0), 0.0);
            }
        }
    }
}

TEST(ClosedForm, MatchesSimulationExamples) {
    EXPECT_EQ(gnc::closed_form_if_rate(0.3, 1.0, 4, 0.5), simulate_if_rate(0.3, 1.0, 4, 0.5));
    EXPECT_EQ(gnc::closed_form_if_rate(0.3, 1.0, 4, 0.5), 0.25);
    EXPECT_EQ(gnc::closed_form_gn_rate(0.37, 1.0, 4, 4, 0.125), simulate_gn_rate(0.37, 1.0, 4, 4, 0.125));
    EXPECT_EQ(gnc::closed_form_gn_rate(0.37, 1.0, 4, 4, 0.125), 0.375);
}

TEST(ClosedForm, MatchesSimulationOnDyadicGrid) {
    // Dyadic inputs and thresholds keep every partial sum exact.
    for (double theta : {0.5, 1.0, 2.0}) {
        for (int T = 1; T <= 16; ++T) {
            for (int i = -64; i <= 192; ++i) {
                const double x = theta * i / 128.0;
                for (double v0 : {0.0, theta / 2.0, -theta / 4.0}) {
                    if (v0 < 0.0 && x > theta) continue;
                    ASSERT_EQ(gnc::closed_form_if_rate(x, theta, T, v0), simulate_if_rate(x, theta, T, v0))
                        << theta << " " << T << " " << x << " " << v0;
                }
                for (int tau : {1, 2, 4, 8}) {
                    for (double v0 : {0.0, theta / tau / 2.0}) {
                        ASSERT_EQ(gnc::closed_form_gn_rate(x, theta, tau, T, v0),
                                  simulate_gn_rate(x, theta, tau, T, v0))
                            << theta << " " << tau << " " << T << " " << x << " " << v0;
                    }
                }
            }
        }
    }
}

TEST(ClosedForm, MatchesSimulationAwayFromBreakpoints) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int n = 0; n < 20000; ++n) {
        const double theta = 0.1 + 3.0 * u(gen);
        const int tau = 1 + n % 8;
        const int T = 1 + n % 32;
        const double unit = theta / tau;
        const double v0 = unit * u(gen);
        const double x = theta * (2.0 * u(gen) - 0.5);
        // Rounding in the running sum may move an input sitting on a breakpoint.
        const double k = (v0 + T * x) / unit;
        if (std::abs(k - std::round(k)) < 1e-9) continue;
        ++checked;
        ASSERT_EQ(gnc::closed_form_gn_rate(x, theta, tau, T, v0), simulate_gn_rate(x, theta, tau, T, v0));
        if (v0 < theta) {
            const double kk = (v0 + T * x) / theta;
            if (std::abs(kk - std::round(kk)) > 1e-9) {
                ASSERT_EQ(gnc::closed_form_if_rate(x, theta, T, v0), simulate_if_rate(x, theta, T, v0));
            }
        }
    }
    EXPECT_GT(checked, 19000);
}

TEST(ClosedForm, SingleMemberEqualsIf) {
    for (int i = -20; i <= 60; ++i) {
        const double x = i / 40.0;
        for (int T : {1, 3, 8}) {
            EXPECT_EQ(gnc::closed_form_gn_rate(x, 1.0, 1, T, 0.5), gnc::closed_form_if_rate(x, 1.0, T, 0.5));
        }
    }
}

TEST(ClosedForm, GroupStaircaseHasSixteenthSteps) {
    // tau=4, T=4 from v0 = 0: the rate rises by 1/16 at every x = k/16.
    double prev = gnc::closed_form_gn_rate(0.0, 1.0, 4, 4, 0.0);
    EXPECT_EQ(prev, 0.0);
    for (int k = 1; k <= 16; ++k) {
        const double below = gnc::closed_form_gn_rate(std::nextafter(k / 16.0, 0.0), 1.0, 4, 4, 0.0);
        const double at = gnc::closed_form_gn_rate(k / 16.0, 1.0, 4, 4, 0.0);
        EXPECT_EQ(below, prev);
        EXPECT_EQ(at, k / 16.0);
        prev = at;
    }
}

TEST(ClosedForm, RejectsOutOfRangeArguments) {
    EXPECT_THROW(gnc::closed_form_if_rate(0.5, 1.0, 0, 0.0), std::invalid_argument);
    EXPECT_THROW(gnc::closed_form_if_rate(0.5, -1.0, 4, 0.0), std::invalid_argument);
    EXPECT_THROW(gnc::closed_form_if_rate(0.5, 1.0, 4, 1.0), std::invalid_argument);
    EXPECT_THROW(gnc::closed_form_if_rate(1.5, 1.0, 4, -0.5), std::invalid_argument);
    EXPECT_THROW(gnc::closed_form_gn_rate(0.5, 1.0, 0, 4, 0.0), std::invalid_argument);
    EXPECT_THROW(gnc::closed_form_gn_rate(0.5, 1.0, 4, 4, 0.25), std::invalid_argument);
}

}  // namespace
