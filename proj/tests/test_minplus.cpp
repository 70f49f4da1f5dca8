#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle/grid_oracle.hpp"
#include "support/oracle_check.hpp"
#include "whnc/errors.hpp"
#include "whnc/minplus.hpp"

using namespace whnc;
using doctest::Approx;

namespace {

constexpr double kBig = 1e12;  // finite stand-in for an infinite rate

void check_service(const ServiceCurve& s, double rate, double latency)
{
    if (std::isinf(rate))
        CHECK(std::isinf(s.rate));
    else
        CHECK(s.rate == Approx(rate));
    CHECK(s.latency == Approx(latency));
}

} // namespace

TEST_CASE("curve construction")
{
    CHECK_THROWS_AS(ArrivalCurve(-1, 1), InvalidArgument);
    CHECK_THROWS_AS(ArrivalCurve(1, -1), InvalidArgument);
    CHECK_THROWS_AS(ServiceCurve(0, 1), InvalidArgument);
    CHECK_THROWS_AS(ServiceCurve(1, -0.5), InvalidArgument);
    ArrivalCurve a(10, 2);
    CHECK(a(0) == 10);  // right limit
    CHECK(a(1) == 12);
    ServiceCurve s(4, 3);
    CHECK(s(2) == 0);
    CHECK(s(5) == 8);
    CHECK(ServiceCurve::identity().rate == kInfiniteRate);
}

TEST_CASE("convolve")
{
    check_service(convolve({10, 5}, {4, 2}), 4, 7);
    check_service(convolve({10, 5}, {kBig, 0}), 10, 5);
    check_service(convolve({3, 1}, {3, 0}), 3, 1);
    check_service(convolve({10, 5}, ServiceCurve::identity()), 10, 5);
    check_service(convolve(ServiceCurve::identity(), ServiceCurve::identity()), kInfiniteRate, 0);
}

TEST_CASE("delay_shift")
{
    check_service(delay_shift({10, 5}, 2), 10, 7);
    check_service(delay_shift({10, 5}, 0), 10, 5);
    check_service(delay_shift({100, 0}, 0.8), 100, 0.8);
    CHECK_THROWS_AS(delay_shift({10, 5}, -1), InvalidArgument);
}

TEST_CASE("deconvolve")
{
    ArrivalCurve out = deconvolve({30, 2}, {5, 4});
    CHECK(out.burst == Approx(38));
    CHECK(out.rate == Approx(2));
    out = deconvolve({30, 2}, {kBig, 0});
    CHECK(out.burst == Approx(30));
    out = deconvolve({0, 0}, {5, 4});
    CHECK(out.burst == 0);
    CHECK(out.rate == 0);
    CHECK_THROWS_AS(deconvolve({1, 6}, {5, 4}), InstabilityError);
}

TEST_CASE("residual_blind")
{
    check_service(residual_blind({10, 5}, {20, 4}), 6, 70.0 / 6.0);
    check_service(residual_blind({10, 5}, {0, 0}), 10, 5);
    check_service(residual_blind({10, 0}, {10, 5}), 5, 2);
    CHECK_THROWS_AS(residual_blind({10, 0}, {1, 10}), InstabilityError);
    CHECK_THROWS_AS(residual_blind({10, 0}, {1, 12}), InstabilityError);
}

TEST_CASE("hdev and vdev")
{
    CHECK(hdev({64, 1}, {10, 5}) == Approx(11.4));
    CHECK(hdev({0, 0}, {10, 5}) == Approx(5));
    CHECK(hdev({10, 10}, {10, 0}) == Approx(1));
    CHECK(hdev({64, 0.64}, {10, 5}) == Approx(11.4));
    CHECK_THROWS_AS(hdev({1, 11}, {10, 0}), InstabilityError);

    CHECK(vdev({30, 2}, {5, 4}) == Approx(38));
    CHECK(vdev({30, 2}, {5, 0}) == Approx(30));
    CHECK(vdev({0, 0}, {5, 4}) == 0);
    CHECK(vdev({0, 0}, {1, 100}) == 0);
}

TEST_CASE("sum_arrivals")
{
    std::vector<ArrivalCurve> two{{10, 1}, {20, 2}};
    ArrivalCurve s = sum_arrivals(two);
    CHECK(s.burst == 30);
    CHECK(s.rate == 3);
    std::vector<ArrivalCurve> none;
    CHECK(sum_arrivals(none).burst == 0);
    std::vector<ArrivalCurve> one{{5, 0}};
    CHECK(sum_arrivals(one) == ArrivalCurve(5, 0));
}

TEST_CASE("algebraic properties")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rate(0.5, 50), lat(0, 10), burst(0, 100);
    for (int n = 0; n < 500; ++n) {
        ServiceCurve a(rate(rng), lat(rng)), b(rate(rng), lat(rng)), c(rate(rng), lat(rng));
        CHECK(convolve(a, b) == convolve(b, a));
        CHECK(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)));
        double d1 = lat(rng), d2 = lat(rng);
        CHECK(delay_shift(delay_shift(a, d1), d2) == delay_shift(a, d1 + d2));

        ArrivalCurve x(burst(rng), 0.0);
        x.rate = std::uniform_real_distribution<double>(0, a.rate * 0.95)(rng);
        CHECK(hdev(x, a) >= a.latency);
        CHECK(vdev(x, a) >= x.burst);
        // Output burst equals the backlog bound for these curve classes.
        CHECK(deconvolve(x, a).burst == Approx(vdev(x, a)));
        ServiceCurve left = residual_blind(a, x);
        CHECK(left.rate < a.rate);
        CHECK(left.latency >= a.latency);
        // Delay through a tandem never beats either server alone.
        if (x.rate < b.rate)
            CHECK(hdev(x, convolve(a, b)) >= std::max(hdev(x, a), hdev(x, b)) - 1e-9);
    }
}

TEST_CASE("grid oracle agrees on the documented examples")
{
    oracle::Grid g(0.01, 100);
    auto c = g.convolve(oracle::rate_latency(10, 5), oracle::rate_latency(4, 2));
    CHECK(std::abs(g.latency_of(c) - 7.0) <= g.step());
    CHECK(g.rate_of(c) == Approx(4.0));
    CHECK(g.deconvolve_at(oracle::token_bucket(30, 2), oracle::rate_latency(5, 4), 0.0) == Approx(38).epsilon(0.05 / 38));
    CHECK(g.hdev(oracle::token_bucket(64, 1), oracle::rate_latency(10, 5)) == Approx(11.4).epsilon(0.05 / 11.4));
    auto r = g.residual(oracle::rate_latency(10, 5), oracle::token_bucket(20, 4));
    CHECK(std::abs(g.latency_of(r) - 70.0 / 6.0) <= g.step());
}

TEST_CASE("grid oracle reports a short horizon")
{
    oracle::Grid g(0.01, 5);
    CHECK_THROWS_AS(g.hdev(oracle::token_bucket(64, 1), oracle::rate_latency(10, 5)), oracle::HorizonError);
    CHECK_THROWS_AS(g.vdev(oracle::token_bucket(30, 2), oracle::rate_latency(5, 6)), oracle::HorizonError);
}

TEST_CASE("closed forms match the grid oracle on random curves")
{
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto mismatch = testing::compare_with_oracle(testing::random_oracle_instance(seed));
        INFO("seed " << seed);
        CHECK_MESSAGE(!mismatch, mismatch.value_or(""));
    }
}
