#include "tsm/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsm::stats {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
// Converges quickly for x < (a+1)/(a+b+2); the caller applies the
// symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("incomplete beta: a and b must be positive");
    }
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double log_front = a * std::log(x) + b * std::log1p(-x) - std::lgamma(a) -
                             std::lgamma(b) + std::lgamma(a + b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) {
        throw std::invalid_argument("student_t_two_sided_p: dof must be positive");
    }
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double student_t_cdf(double t, double dof) {
    const double half_p = 0.5 * student_t_two_sided_p(t, dof);
    return t >= 0.0 ? 1.0 - half_p : half_p;
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("student_t_quantile: p must be in (0, 1)");
    }
    if (!(dof > 0.0)) {
        throw std::invalid_argument("student_t_quantile: dof must be positive");
    }
    if (p == 0.5) return 0.0;
    // Symmetry keeps the bracket on the positive half-line.
    if (p < 0.5) return -student_t_quantile(1.0 - p, dof);

    double lo = 0.0, hi = 1.0;
    while (student_t_cdf(hi, dof) < p) {
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace tsm::stats
