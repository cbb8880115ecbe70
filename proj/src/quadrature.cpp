#include "ablab/quadrature.hpp"
#include "ablab/errors.hpp"

#include <cmath>
#include <map>

namespace ablab {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from Chebyshev-like initial guess on [-1, 1]
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = w[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

static QuadratureRule build_duffy(int order) {
    // pullback of degree-d polynomials needs per-axis Gauss exactness d+1
    int n = (order + 2) / 2 + 1;
    std::vector<double> gx, gw;
    gauss_legendre_01(n, gx, gw);
    QuadratureRule rule;
    rule.order = order;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double u = gx[i], v = gx[j];
            double x = u, y = v * (1.0 - u);
            rule.bary.push_back({1.0 - x - y, x, y});
            rule.weights.push_back(2.0 * gw[i] * gw[j] * (1.0 - u));
        }
    return rule;
}

const QuadratureRule& triangle_rule(int order) {
    static const std::map<int, QuadratureRule> rules = {
        {2, build_duffy(2)}, {6, build_duffy(6)}, {10, build_duffy(10)}};
    auto it = rules.find(order);
    if (it == rules.end()) throw PreconditionError("unsupported quadrature order");
    return it->second;
}

} // namespace ablab
