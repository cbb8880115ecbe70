#include "ablab/potential.hpp"
#include "ablab/errors.hpp"

#include <cmath>

namespace ablab {

Vec2 eval_single_A(Vec2 pole, Vec2 x) {
    double dx = x.x - pole.x, dy = x.y - pole.y;
    double r2 = dx * dx + dy * dy;
    if (r2 < 1e-24) throw PreconditionError("potential evaluated at a pole");
    return {-0.5 * dy / r2, 0.5 * dx / r2};
}

Vec2 eval_A(const PoleConfig& cfg, Vec2 x) {
    Vec2 ap = eval_single_A(cfg.pole_plus(), x);
    Vec2 am = eval_single_A(cfg.pole_minus(), x);
    return ap - am;
}

double phase_psi(const PoleConfig& cfg, Vec2 x) {
    if (std::abs(x.y) < 1e-12 && x.x > -cfg.a - 1e-12 && x.x < cfg.a + 1e-12)
        throw PreconditionError("phase undefined on the segment s_a");
    double tp = std::atan2(x.y, x.x - cfg.a);
    double tm = std::atan2(x.y, x.x + cfg.a);
    return 0.5 * (tp - tm);
}

std::complex<double> gauge_double(const PoleConfig& cfg, Vec2 x) {
    if (dist(x, cfg.pole_plus()) < 1e-12 || dist(x, cfg.pole_minus()) < 1e-12)
        throw PreconditionError("gauge evaluated at a pole");
    double tp = std::atan2(x.y, x.x - cfg.a);
    double tm = std::atan2(x.y, x.x + cfg.a);
    return std::exp(std::complex<double>(0.0, tp - tm));
}

// Gauss-Legendre nodes/weights on [0,1], n = 8
static const double GX[8] = {0.019855071751231884, 0.10166676129318664,
                             0.2372337950418355,  0.40828267875217511,
                             0.59171732124782489, 0.7627662049581645,
                             0.89833323870681336, 0.98014492824876812};
static const double GW[8] = {0.050614268145188129, 0.11119051722668724,
                             0.15685332293894364,  0.18134189168918099,
                             0.18134189168918099,  0.15685332293894364,
                             0.11119051722668724,  0.050614268145188129};

static double segment_integral(const PoleConfig& cfg, Vec2 p, Vec2 q, int depth) {
    double len = dist(p, q);
    if (len < 1e-300) return 0.0;
    double d = 1e300;
    for (Vec2 pole : {cfg.pole_minus(), cfg.pole_plus()}) {
        // distance from pole to segment pq
        Vec2 pq = q - p;
        double t = std::clamp(dot(pole - p, pq) / dot(pq, pq), 0.0, 1.0);
        d = std::min(d, dist(p + t * pq, pole));
    }
    if (d < 1e-13) throw PreconditionError("winding path touches a pole");
    bool near = d < 10.0 * cfg.a;
    if (depth < 48 && ((near && len > 0.5 * d) || len > 4.0 * d)) {
        Vec2 m = 0.5 * (p + q);
        return segment_integral(cfg, p, m, depth + 1) + segment_integral(cfg, m, q, depth + 1);
    }
    Vec2 pq = q - p;
    double s = 0.0;
    for (int k = 0; k < 8; ++k) {
        Vec2 x = p + GX[k] * pq;
        s += GW[k] * dot(eval_A(cfg, x), pq);
    }
    return s;
}

double winding_integral(const PoleConfig& cfg, const std::vector<Vec2>& loop) {
    if (loop.size() < 3) throw PreconditionError("winding loop needs >= 3 points");
    double s = 0.0;
    for (size_t i = 0; i < loop.size(); ++i)
        s += segment_integral(cfg, loop[i], loop[(i + 1) % loop.size()], 0);
    return s / (2.0 * M_PI);
}

VectorField two_pole_field(const PoleConfig& cfg) {
    return [cfg](Vec2 x) { return eval_A(cfg, x); };
}

VectorField single_pole_field(Vec2 pole) {
    return [pole](Vec2 x) { return eval_single_A(pole, x); };
}

VectorField gauge_reduced_field(const PoleConfig& cfg) {
    return [cfg](Vec2 x) {
        Vec2 A = eval_A(cfg, x);
        // grad psi_a written out from the half-angle derivatives
        double dxp = x.x - cfg.a, dxm = x.x + cfg.a;
        double rp2 = dxp * dxp + x.y * x.y, rm2 = dxm * dxm + x.y * x.y;
        Vec2 grad_psi = {-0.5 * x.y / rp2 + 0.5 * x.y / rm2, 0.5 * dxp / rp2 - 0.5 * dxm / rm2};
        return A - grad_psi;
    };
}

} // namespace ablab
