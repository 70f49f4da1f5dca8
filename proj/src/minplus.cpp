#include "whnc/minplus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "whnc/errors.hpp"

namespace whnc {

namespace {

// a <= b up to the relative tolerance, so that rates equal in exact
// arithmetic are not rejected because of rounding.
bool rate_le(double a, double b)
{
    if (std::isinf(b))
        return true;
    return a <= b + kRelTol * std::max(std::abs(a), std::abs(b));
}

[[noreturn]] void unstable(const char* op, double in_rate, double server_rate)
{
    std::ostringstream os;
    os << op << ": arrival rate " << in_rate << " exceeds service rate " << server_rate;
    throw InstabilityError(os.str());
}

} // namespace

bool approx_equal(double a, double b, double rel_tol)
{
    if (a == b)
        return true;
    if (std::isinf(a) || std::isinf(b))
        return false;
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

ArrivalCurve::ArrivalCurve(double b, double r) : burst(b), rate(r)
{
    if (!(b >= 0.0) || !(r >= 0.0) || std::isinf(b) || std::isinf(r))
        throw InvalidArgument("arrival curve needs finite burst >= 0 and rate >= 0");
}

double ArrivalCurve::operator()(double t) const
{
    return t < 0.0 ? 0.0 : burst + rate * t;
}

ServiceCurve::ServiceCurve(double r, double t) : rate(r), latency(t)
{
    if (!(r > 0.0))
        throw InvalidArgument("service curve needs rate > 0");
    if (!(t >= 0.0) || std::isinf(t))
        throw InvalidArgument("service curve needs finite latency >= 0");
}

double ServiceCurve::operator()(double t) const
{
    if (t <= latency)
        return 0.0;
    return rate * (t - latency);
}

bool operator==(const ArrivalCurve& a, const ArrivalCurve& b)
{
    return approx_equal(a.burst, b.burst) && approx_equal(a.rate, b.rate);
}

bool operator==(const ServiceCurve& a, const ServiceCurve& b)
{
    return approx_equal(a.rate, b.rate) && approx_equal(a.latency, b.latency);
}

ServiceCurve convolve(const ServiceCurve& a, const ServiceCurve& b)
{
    return {std::min(a.rate, b.rate), a.latency + b.latency};
}

ServiceCurve delay_shift(const ServiceCurve& s, double d)
{
    if (!(d >= 0.0))
        throw InvalidArgument("delay_shift: negative delay");
    return {s.rate, s.latency + d};
}

ArrivalCurve deconvolve(const ArrivalCurve& a, const ServiceCurve& s)
{
    if (!rate_le(a.rate, s.rate))
        unstable("deconvolve", a.rate, s.rate);
    return {a.burst + a.rate * s.latency, a.rate};
}

ServiceCurve residual_blind(const ServiceCurve& s, const ArrivalCurve& cross)
{
    if (cross.rate == 0.0 && cross.burst == 0.0)
        return s;
    if (std::isinf(s.rate))
        return {kInfiniteRate, s.latency};
    if (!(cross.rate < s.rate) || s.rate - cross.rate <= kRelTol * s.rate)
        unstable("residual_blind", cross.rate, s.rate);
    // beta(t) - alpha(t) crosses zero at (R*T + b) / (R - r) and grows with
    // slope R - r afterwards.
    double rate = s.rate - cross.rate;
    return {rate, (s.rate * s.latency + cross.burst) / rate};
}

double hdev(const ArrivalCurve& a, const ServiceCurve& s)
{
    if (!rate_le(a.rate, s.rate))
        unstable("hdev", a.rate, s.rate);
    if (std::isinf(s.rate))
        return s.latency;
    return s.latency + a.burst / s.rate;
}

double vdev(const ArrivalCurve& a, const ServiceCurve& s)
{
    if (!rate_le(a.rate, s.rate))
        unstable("vdev", a.rate, s.rate);
    return a.burst + a.rate * s.latency;
}

ArrivalCurve sum_arrivals(std::span<const ArrivalCurve> curves)
{
    ArrivalCurve total;
    for (const auto& c : curves) {
        total.burst += c.burst;
        total.rate += c.rate;
    }
    return total;
}

} // namespace whnc
