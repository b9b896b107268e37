#include "negcall/analytics.hpp"

#include <cmath>
#include <limits>

namespace negcall {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;  // 1/sqrt(2)
constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)
constexpr double kSqrt2Pi = 2.50662827463100050242;    // sqrt(2*pi)

// Rational Chebyshev approximations for erf/erfc after W. J. Cody
// (Math. Comp. 23, 1969); same coefficient sets as NETLIB's CALERF.
// Relative error below 1.2e-16 in each region.

// |x| <= 0.46875: erf(x) = x * P(x^2)/Q(x^2)
constexpr double kErfP[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                             3.77485237685302021e2, 3.20937758913846947e3,
                             1.85777706184603153e-1};
constexpr double kErfQ[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                             1.28261652607737228e3, 2.84423683343917062e3};

// 0.46875 < x <= 4: erfc(x) = exp(-x^2) * P(x)/Q(x)
constexpr double kErfcP[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                              6.61191906371416295e1,  2.98635138197400131e2,
                              8.81952221241769090e2,  1.71204761263407058e3,
                              2.05107837782607147e3,  1.23033935479799725e3,
                              2.15311535474403846e-8};
constexpr double kErfcQ[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                              5.37181101862009858e2, 1.62138957456669019e3,
                              3.29079923573345963e3, 4.36261909014324716e3,
                              3.43936767414372164e3, 1.23033935480374942e3};

// x > 4: erfc(x) = exp(-x^2)/x * (1/sqrt(pi) + R(1/x^2)/x^2)
constexpr double kErfcFarP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                 1.25781726111229246e-1, 1.60837851487422766e-2,
                                 6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr double kErfcFarQ[5] = {2.56852019228982242e0,  1.87295284992346047e0,
                                 5.27905102951428412e-1, 6.05183413124413191e-2,
                                 2.33520497626869185e-3};

// exp(-x^2) split as exp(-z^2)*exp(-(x-z)(x+z)) with z = x rounded to 1/16,
// keeping the argument of the big exponential exact.
double exp_neg_sq(double x) {
    const double z = std::trunc(x * 16.0) / 16.0;
    const double del = (x - z) * (x + z);
    return std::exp(-z * z) * std::exp(-del);
}

// erfc on [0.46875, inf); caller handles sign.
double erfc_pos(double y) {
    if (y <= 4.0) {
        double num = kErfcP[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kErfcP[i]) * y;
            den = (den + kErfcQ[i]) * y;
        }
        return exp_neg_sq(y) * (num + kErfcP[7]) / (den + kErfcQ[7]);
    }
    if (y >= 26.6) return 0.0;  // below double underflow for erfc
    const double inv2 = 1.0 / (y * y);
    double num = kErfcFarP[5] * inv2;
    double den = inv2;
    for (int i = 0; i < 4; ++i) {
        num = (num + kErfcFarP[i]) * inv2;
        den = (den + kErfcFarQ[i]) * inv2;
    }
    double r = inv2 * (num + kErfcFarP[4]) / (den + kErfcFarQ[4]);
    r = (kInvSqrtPi - r) / y;
    return exp_neg_sq(y) * r;
}

double erf_impl(double x) {
    const double y = std::fabs(x);
    if (y <= 0.46875) {
        const double ysq = (y > 1.11e-16) ? y * y : 0.0;
        double num = kErfP[4] * ysq;
        double den = ysq;
        for (int i = 0; i < 3; ++i) {
            num = (num + kErfP[i]) * ysq;
            den = (den + kErfQ[i]) * ysq;
        }
        return x * (num + kErfP[3]) / (den + kErfQ[3]);
    }
    const double r = 1.0 - erfc_pos(y);
    return x < 0.0 ? -r : r;
}

double erfc_impl(double x) {
    const double y = std::fabs(x);
    if (y <= 0.46875) return 1.0 - erf_impl(x);
    const double r = erfc_pos(y);
    return x < 0.0 ? 2.0 - r : r;
}

// Acklam's rational approximation to the inverse normal CDF (~1.15e-9
// relative before polishing).
double norm_quantile_guess(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_cdf(double x) {
    if (std::isnan(x)) throw std::invalid_argument("normal_cdf: x must be finite");
    return 0.5 * erfc_impl(-x * kInvSqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
    double x = norm_quantile_guess(p);
    // One Halley step against the high-accuracy CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double bs_price(double t, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("bs_price: spot must be > 0");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("bs_price: t must lie in [0,1]");
    const double rem = 1.0 - t;
    if (rem < 1e-12) {
        // Terminal condition; also guards the sqrt(1-t) underflow region.
        const double intrinsic = s - 1.0;
        return intrinsic > 0.0 ? intrinsic : 0.0;
    }
    const double sd = std::sqrt(rem);
    const double ls = std::log(s);
    const double half = 0.5 * rem;
    const double price = s * normal_cdf((ls + half) / sd) - normal_cdf((ls - half) / sd);
    return price > 0.0 ? price : 0.0;
}

double bs_delta(double t, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("bs_delta: spot must be > 0");
    if (!(t >= 0.0 && t < 1.0))
        throw std::invalid_argument("bs_delta: t must lie in [0,1); hedge undefined at maturity");
    const double rem = 1.0 - t;
    const double sd = std::sqrt(rem);
    return normal_cdf((std::log(s) + 0.5 * rem) / sd);
}

double qv_time(double t) {
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("qv_time: t must lie in [0,1)");
    return -std::log1p(-t);
}

double calendar_time(double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("calendar_time: tau must be >= 0");
    return -std::expm1(-tau);
}

double hitting_tail(double a, double tau) {
    if (!(a > 0.0)) throw std::invalid_argument("hitting_tail: level must be > 0");
    if (!(tau >= 0.0)) throw std::invalid_argument("hitting_tail: tau must be >= 0");
    if (tau == 0.0) return 1.0;
    if (std::isinf(tau)) return 0.0;
    return 2.0 * normal_cdf(a / std::sqrt(tau)) - 1.0;
}

double ruin_tail(double a, double L) {
    if (!(a > 0.0)) throw std::invalid_argument("ruin_tail: level must be > 0");
    if (!(L > 0.0)) throw std::invalid_argument("ruin_tail: depth must be > 0");
    return a / (a + L);
}

}  // namespace negcall
