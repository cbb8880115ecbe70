#include "ablab/bessel.hpp"
#include "ablab/errors.hpp"

#include <cmath>
#include <functional>

namespace ablab {

namespace {

// J_nu(x) = sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!), nu = 0 or 1.
// Alternating series converges fast for the x <= 8 range we use.
long double series_j(int nu, long double x) {
    long double half = x / 2;
    long double term = 1.0L;
    for (int k = 1; k <= nu; ++k) term = term * half / k;
    long double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -(half * half) / ((long double)k * (k + nu));
        sum += term;
        if (fabsl(term) < 1e-22L * fabsl(sum) + 1e-30L) break;
    }
    return sum;
}

double find_root(const std::function<long double(long double)>& f, long double lo,
                 long double hi) {
    long double flo = f(lo), fhi = f(hi);
    if (flo == 0) return (double)lo;
    if (fhi == 0) return (double)hi;
    if ((flo > 0) == (fhi > 0)) throw PreconditionError("root bracket invalid");
    for (int i = 0; i < 200; ++i) {
        long double mid = 0.5L * (lo + hi);
        long double fm = f(mid);
        if (fm == 0 || hi - lo < 1e-19L * fabsl(mid)) return (double)mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return (double)(0.5L * (lo + hi));
}

} // namespace

double bessel_j0(double x) { return (double)series_j(0, (long double)x); }
double bessel_j1(double x) { return (double)series_j(1, (long double)x); }

double j0_zero1() {
    return find_root([](long double x) { return series_j(0, x); }, 2.0L, 3.0L);
}

double j1_zero1() {
    return find_root([](long double x) { return series_j(1, x); }, 3.0L, 4.5L);
}

double j_half_zero1() {
    // J_{1/2}(x) = sqrt(2/(pi x)) sin x; root-find its own series instead of
    // quoting pi: sum_k (-1)^k x^(2k+1)/(2k+1)!
    auto sin_series = [](long double x) {
        long double term = x, sum = x;
        for (int k = 1; k < 100; ++k) {
            term *= -(x * x) / ((long double)(2 * k) * (2 * k + 1));
            sum += term;
            if (fabsl(term) < 1e-22L * fabsl(sum)) break;
        }
        return sum;
    };
    return find_root(sin_series, 3.0L, 3.3L);
}

double disk_ground_origin_value() {
    double j01 = j0_zero1();
    return 1.0 / (std::sqrt(M_PI) * bessel_j1(j01));
}

} // namespace ablab
