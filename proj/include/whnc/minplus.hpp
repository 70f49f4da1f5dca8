// minplus.hpp - Closed-form min-plus operators on token-bucket arrival curves
// and rate-latency service curves.
//
// Both curve classes are closed under every operator used by the analysis
// (output bound, concatenation, blind multiplexing, Dirac shift), so no
// general piecewise-linear representation is needed here.

#pragma once

#include <limits>
#include <span>

namespace whnc {

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

// Relative tolerance used by approx_equal and by rate comparisons.
inline constexpr double kRelTol = 1e-9;

bool approx_equal(double a, double b, double rel_tol = kRelTol);

// alpha(t) = burst + rate * t for t >= 0, 0 before.
struct ArrivalCurve {
    double burst = 0.0;
    double rate = 0.0;

    ArrivalCurve() = default;
    ArrivalCurve(double burst, double rate);

    double operator()(double t) const;
};

// beta(t) = rate * max(0, t - latency).
struct ServiceCurve {
    double rate = kInfiniteRate;
    double latency = 0.0;

    ServiceCurve() = default;
    ServiceCurve(double rate, double latency);

    // Neutral element of convolution (delta_0).
    static ServiceCurve identity() { return {}; }

    double operator()(double t) const;
};

bool operator==(const ArrivalCurve& a, const ArrivalCurve& b);
bool operator==(const ServiceCurve& a, const ServiceCurve& b);

// Concatenation of two servers in tandem.
ServiceCurve convolve(const ServiceCurve& a, const ServiceCurve& b);

// Convolution with a Dirac delta_d.
ServiceCurve delay_shift(const ServiceCurve& s, double d);

// Output envelope of a flow constrained by `a` crossing a server `s`.
ArrivalCurve deconvolve(const ArrivalCurve& a, const ServiceCurve& s);

// Service left to a flow once `cross` is served first: (beta - alpha)^+.
ServiceCurve residual_blind(const ServiceCurve& s, const ArrivalCurve& cross);

// Delay bound.
double hdev(const ArrivalCurve& a, const ServiceCurve& s);

// Backlog bound.
double vdev(const ArrivalCurve& a, const ServiceCurve& s);

ArrivalCurve sum_arrivals(std::span<const ArrivalCurve> curves);

} // namespace whnc
