#include "segrad/stats.hpp"

#include <cmath>
#include <limits>

#include "segrad/error.hpp"

namespace segrad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 4.0 * kEps) return h;
    }
    return h;
}

void check_shape(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw Error(ErrorKind::Domain, "incomplete beta parameters must be positive");
}

// x^a (1-x)^b / (a B(a,b)) factor shared by both tails.
double beta_front(double a, double b, double x) {
    return std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    check_shape(a, b);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) return beta_front(a, b, x) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - beta_front(b, a, 1.0 - x) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double incomplete_beta_complement(double a, double b, double x) {
    check_shape(a, b);
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return incomplete_beta(b, a, 1.0 - x);
}

double f_cdf(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw Error(ErrorKind::Domain, "F degrees of freedom must be positive");
    if (f <= 0.0) return 0.0;
    if (std::isinf(f)) return 1.0;
    const double t = d1 * f;
    // Pick the tail whose argument is small so the result keeps full relative precision.
    if (t <= d2) return incomplete_beta(0.5 * d1, 0.5 * d2, t / (t + d2));
    return incomplete_beta_complement(0.5 * d2, 0.5 * d1, d2 / (t + d2));
}

namespace {

// Solve I_x(a, b) = p for x in (0, 1) by Newton steps kept inside a shrinking bracket.
double beta_root(double a, double b, double p) {
    double lo = 0.0;
    double hi = 1.0;
    double x = 0.5;
    const double lb = log_beta(a, b);
    for (int iter = 0; iter < 4000; ++iter) {
        const double g = incomplete_beta(a, b, x) - p;
        if (g == 0.0) return x;
        if (g < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        const double density = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb);
        double next = x - g / density;
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 2.0 * kEps * x || hi - lo <= 2.0 * kEps * hi) return next;
        x = next;
    }
    return x;
}

}  // namespace

double f_quantile(double p, double d1, double d2) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, "F quantile probability must lie in (0, 1)");
    if (!(d1 > 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2))
        throw Error(ErrorKind::Domain, "F degrees of freedom must be positive");
    const double a = 0.5 * d1;
    const double b = 0.5 * d2;
    if (p <= 0.5) {
        const double x = beta_root(a, b, p);
        return d2 * x / (d1 * (1.0 - x));
    }
    // Upper half: solve for y = 1 - x in the mirrored beta, which is small when F is large.
    const double y = beta_root(b, a, 1.0 - p);
    return d2 * (1.0 - y) / (d1 * y);
}

}  // namespace segrad
