#pragma once

#include <stdexcept>

namespace negcall {

/// Parameters of the reference claim: an at-the-money European call with
/// unit strike and horizon 1. The whole construction is pinned to this
/// horizon; strike is kept as a field for documentation and validation.
struct ClaimParams {
    double strike = 1.0;
    double maturity = 1.0;

    void validate() const {
        if (!(strike > 0.0)) throw std::invalid_argument("ClaimParams: strike must be > 0");
        if (maturity != 1.0) throw std::invalid_argument("ClaimParams: maturity is fixed at 1");
    }
};

/// Standard normal CDF. In-house rational erf/erfc (Cody's Chebyshev
/// approximations), absolute error well below 1e-14; validated against an
/// adaptive-quadrature oracle in the test suite.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0,1). Acklam's rational initial guess polished
/// with one Halley step of normal_cdf; |Phi(quantile(p)) - p| < 1e-14.
double normal_quantile(double p);

/// Price at time t in [0,1] of the unit-strike call on a driftless
/// unit-volatility lognormal asset at spot s, zero rates:
///   s*Phi((log s + (1-t)/2)/sqrt(1-t)) - Phi((log s - (1-t)/2)/sqrt(1-t)),
/// and the payoff (s-1)^+ at t = 1. Nonnegative by construction.
double bs_price(double t, double s);

/// Hedge ratio dC/ds = Phi((log s + (1-t)/2)/sqrt(1-t)); defined for t < 1 only.
double bs_delta(double t, double s);

/// Quadratic-variation clock tau(t) = -log(1-t) for t in [0,1).
double qv_time(double t);

/// Inverse clock: t = 1 - exp(-tau) for tau >= 0.
double calendar_time(double tau);

/// P(T_a > tau) = 2*Phi(a/sqrt(tau)) - 1 for the first passage time T_a of
/// standard Brownian motion to level a > 0; equals 1 at tau = 0.
double hitting_tail(double a, double tau);

/// Gambler's ruin: P(min of standard Brownian motion before hitting +a
/// falls below -L) = a/(a+L), for a, L > 0.
double ruin_tail(double a, double L);

}  // namespace negcall
