#pragma once

// Reference computations that do not share code with the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

/// Explicit Euler on dS=-bIS, dE=bIS-sE, dI=sE-gI, dR=gI.
inline std::array<double, 4> seir_euler(std::array<double, 4> y, double beta, double sigma, double gamma, double t,
                                        double h)
{
    const auto steps = static_cast<std::int64_t>(std::llround(t / h));
    for (std::int64_t k = 0; k < steps; ++k) {
        const double si = beta * y[2] * y[0];
        const double ei = sigma * y[1];
        const double ir = gamma * y[2];
        y[0] -= h * si;
        y[1] += h * (si - ei);
        y[2] += h * (ei - ir);
        y[3] += h * ir;
    }
    return y;
}

/// P(t) = P0 exp(-(beta + sigma) t).
inline double fleet_petrol(double p0, double beta, double sigma, double t)
{
    return p0 * std::exp(-(beta + sigma) * t);
}

/// Closed form of the fleet system for L(t) when beta + sigma != gamma.
inline double fleet_lpg(double p0, double l0, double beta, double sigma, double gamma, double t)
{
    const double k = beta + sigma;
    return l0 * std::exp(-gamma * t) + beta * p0 / (gamma - k) * (std::exp(-k * t) - std::exp(-gamma * t));
}

/// Frozen high-accuracy reference (DOP853, rtol 1e-13) of the SEIR system at
/// t=30 from (990, 0, 10, 0) with beta=3e-4, sigma=0.2, gamma=0.1.
inline constexpr std::array<double, 4> kSeirT30 = {732.9967990240777, 76.8898364473555, 89.92549512734516,
                                                   100.1878694012214};

} // namespace oracle
