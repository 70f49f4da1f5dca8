// Random (arrival, service) instances compared pointwise against the grid
// oracle. Tolerances amount to one grid step along the time axis.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "oracle/grid_oracle.hpp"
#include "whnc/minplus.hpp"

namespace whnc::testing {

struct OracleInstance {
    ServiceCurve s1, s2;
    ArrivalCurve a;
    double step = 0.0;
};

inline OracleInstance random_oracle_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto latency = [&] { return u(0, 1) < 0.1 ? 0.0 : u(0.5, 10); };
    OracleInstance in;
    in.s1 = {u(1, 10), latency()};
    in.s2 = {u(1, 10), latency()};
    double burst = u(0, 1) < 0.05 ? 0.0 : u(5, 50);
    in.a = {burst, u(0, 0.8) * std::min(in.s1.rate, in.s2.rate)};

    // One percent of the smallest time scale among the parameters.
    double scale = 10.0;
    for (double v : {in.s1.latency, in.s2.latency, in.a.burst / in.s1.rate})
        if (v > 0.0)
            scale = std::min(scale, v);
    in.step = 0.01 * scale;
    return in;
}

// Empty on agreement, otherwise a description of the first mismatch.
inline std::optional<std::string> compare_with_oracle(const OracleInstance& in)
{
    using oracle::Grid;
    const auto& [s1, s2, a, step] = in;
    auto beta1 = oracle::rate_latency(s1.rate, s1.latency);
    auto beta2 = oracle::rate_latency(s2.rate, s2.latency);
    auto alpha = oracle::token_bucket(a.burst, a.rate);
    std::ostringstream why;
    why << "s1=(" << s1.rate << "," << s1.latency << ") s2=(" << s2.rate << "," << s2.latency << ") a=(" << a.burst
        << "," << a.rate << ") step=" << step << ": ";
    const double slack = 1e-9;

    try {
        Grid g(step, s1.latency + s2.latency + 2.0);
        auto grid = g.convolve(beta1, beta2);
        ServiceCurve c = convolve(s1, s2);
        double tol = std::max(s1.rate, s2.rate) * step + slack;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(grid[i] - c(g.at(i))) > tol) {
                why << "convolve differs at t=" << g.at(i) << ": " << grid[i] << " vs " << c(g.at(i));
                return why.str();
            }
    } catch (const oracle::HorizonError& e) {
        return why.str() + e.what();
    }

    try {
        Grid g(step, s1.latency + 2.0);
        ArrivalCurve out = deconvolve(a, s1);
        double tol = (a.rate + s1.rate) * step + slack;
        for (double t : {0.0, 0.5 * s1.latency, 3.0}) {
            double want = out.burst + out.rate * t;
            double got = g.deconvolve_at(alpha, beta1, t);
            if (std::abs(got - want) > tol) {
                why << "deconvolve differs at t=" << t << ": " << got << " vs " << want;
                return why.str();
            }
        }
    } catch (const oracle::HorizonError& e) {
        return why.str() + e.what();
    }

    try {
        ServiceCurve left = residual_blind(s1, a);
        Grid g(step, 2.0 * left.latency + 2.0);
        auto grid = g.residual(beta1, alpha);
        double tol = s1.rate * step + slack;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(grid[i] - left(g.at(i))) > tol) {
                why << "residual differs at t=" << g.at(i) << ": " << grid[i] << " vs " << left(g.at(i));
                return why.str();
            }
    } catch (const oracle::HorizonError& e) {
        return why.str() + e.what();
    }

    try {
        Grid g(step, 2.0 * (s1.latency + a.burst / s1.rate) + 2.0);
        double want = hdev(a, s1);
        double got = g.hdev(alpha, beta1);
        if (std::abs(got - want) > step + slack) {
            why << "hdev " << got << " vs " << want;
            return why.str();
        }
    } catch (const oracle::HorizonError& e) {
        return why.str() + e.what();
    }

    try {
        Grid g(step, s1.latency + 2.0);
        double want = vdev(a, s1);
        double got = g.vdev(alpha, beta1);
        if (std::abs(got - want) > (a.rate + s1.rate) * step + slack) {
            why << "vdev " << got << " vs " << want;
            return why.str();
        }
    } catch (const oracle::HorizonError& e) {
        return why.str() + e.what();
    }
    return std::nullopt;
}

} // namespace whnc::testing
