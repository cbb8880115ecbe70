#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ablab/bessel.hpp"
#include "ablab/bounds.hpp"
#include "ablab/errors.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace ablab;

namespace {

struct Lab {
    Mesh mesh;
    PoleConfig cfg;
    AssembledSystem magnetic, laplacian;
    SpectrumSlice lap;  // realified
};

// disk with two poles, Laplacian slice aligned to the trivial gauge
Lab make_lab(double a, int count, double h = 0.05) {
    Lab lab;
    lab.cfg.a = a;
    DomainSpec disk;
    std::vector<Vec2> poles = {lab.cfg.pole_minus(), lab.cfg.pole_plus()};
    MeshingOptions mo;
    mo.h_max = h;
    mo.grading.centers = poles;
    mo.grading.target_h_at_center = 0.1 * a;
    mo.grading.growth_ratio = 1.15;
    lab.mesh = generate_mesh(disk, poles, nullptr, mo);
    lab.magnetic = assemble_magnetic(lab.mesh, lab.cfg, {});
    lab.laplacian = assemble_laplacian(lab.mesh, {});
    lab.lap = solve_lowest(lab.laplacian, count, 1e-10);
    std::vector<cd> ones(lab.laplacian.stiffness.n, cd{1.0, 0.0});
    for (int k = 0; k < count; ++k) {
        double gap = k + 1 < count ? lab.lap.pairs[k + 1].value - lab.lap.pairs[k].value
                                   : lab.lap.gap_to_next;
        if (k > 0) gap = std::min(gap, lab.lap.pairs[k].value - lab.lap.pairs[k - 1].value);
        lab.lap.pairs[k] = make_magnetic_real(lab.lap.pairs[k], ones, lab.laplacian.mass,
                                              gap / lab.lap.pairs[k].value);
        fix_sign_at_origin(lab.lap.pairs[k], lab.mesh, lab.laplacian);
    }
    return lab;
}

} // namespace

TEST_CASE("cutoff parameter validation") {
    CHECK_NOTHROW(CutoffParams(0.5, 0.5));
    CHECK_THROWS_AS(CutoffParams(0.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(CutoffParams(1.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(CutoffParams(0.1, 0.0), PreconditionError);
    CHECK_THROWS_AS(CutoffParams(0.1, 1.0), PreconditionError);
}

TEST_CASE("cutoff profile: plateau, ramp, midpoint") {
    CutoffParams p(0.01, 0.5);
    CHECK(rho({0.005, 0.0}, p) == 0.0);
    CHECK(rho({0.01, 0.0}, p) == 0.0);
    CHECK(rho({0.0, 0.2}, p) == 1.0);  // 0.2 > 0.01^0.5 = 0.1
    CHECK(rho({0.1, 0.0}, p) == doctest::Approx(1.0).epsilon(1e-12));
    // log-interpolation: one half at the geometric midpoint of [eps, eps^tau]
    double mid = std::pow(0.01, 0.75);
    CHECK(rho({mid, 0.0}, p) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho({0.0, -mid}, p) == doctest::Approx(0.5).epsilon(1e-12));  // radial
    double prev = -1;
    for (double r = 0.0101; r < 0.1; r *= 1.25) {
        double v = rho({r, 0.0}, p);
        CHECK(v > prev);
        prev = v;
    }

    // exact gradient formula against central differences of rho
    for (Vec2 x : {Vec2{0.03, 0.01}, Vec2{-0.02, 0.04}, Vec2{0.05, -0.06}}) {
        double h = 1e-7;
        double gx = (rho({x.x + h, x.y}, p) - rho({x.x - h, x.y}, p)) / (2 * h);
        double gy = (rho({x.x, x.y + h}, p) - rho({x.x, x.y - h}, p)) / (2 * h);
        CHECK(grad_rho_sq(x, p) == doctest::Approx(gx * gx + gy * gy).epsilon(1e-5));
    }
    CHECK(grad_rho_sq({0.004, 0.0}, p) == 0.0);
    CHECK(grad_rho_sq({0.5, 0.0}, p) == 0.0);
}

TEST_CASE("cutoff energy: closed form equals independent quadrature") {
    for (double eps : {0.1, 0.01}) {
        for (double tau : {0.3, 0.5, 0.7}) {
            CutoffParams p(eps, tau);
            double closed = cutoff_energy_closed(p);
            double quad = cutoff_energy_quadrature(p);
            CHECK(closed == doctest::Approx(2 * M_PI / ((tau - 1) * std::log(eps))).epsilon(1e-14));
            CHECK(std::abs(closed - quad) <= 1e-8 * closed);
            CHECK(cutoff_energy(p) == closed);
            double defect = cutoff_mass_defect(p);
            CHECK(defect > 0);
            CHECK(defect <= M_PI * std::pow(eps, 2 * tau) * (1 + 1e-12));
        }
    }
}

TEST_CASE("one-large-direction matrices: top eigenvalue tracks C*eps") {
    // oracle check on a frozen 2x2 symmetric matrix first
    QuadFormMatrix q;
    q.N = 2;
    q.m = {0.0, 2.0, 2.0, -3.0};
    CHECK(max_eig_quadform(q) == doctest::Approx(1.0).epsilon(1e-12));  // (-3+5)/2

    std::mt19937 rng(20260814);
    const double eps = 1e-3;
    for (int draw = 0; draw < 100; ++draw) {
        oracle::LemmaDraw d = oracle::lemma_matrix(rng, eps);
        QuadFormMatrix m;
        m.N = d.m.n;
        m.m.resize((size_t)m.N * m.N);
        for (int i = 0; i < m.N; ++i)
            for (int j = 0; j < m.N; ++j) m.at(i, j) = d.m.at(i, j).real();
        double top = max_eig_quadform(m);
        CHECK(top / (d.C * eps) > 0.9);
        CHECK(top / (d.C * eps) < 1.1);
        // dual route: the dense Jacobi oracle agrees on the full spectrum top
        auto ev = oracle::jacobi_eigenvalues(d.m);
        CHECK(top == doctest::Approx(ev.back()).epsilon(1e-10));
    }
}

TEST_CASE("test basis: supported off the doubled pole disk, near-orthonormal") {
    Lab lab = make_lab(0.05, 1);
    TestFunctionBasis basis = build_test_basis(lab.mesh, lab.magnetic, lab.laplacian, lab.lap,
                                               lab.cfg, 0.5);
    REQUIRE(basis.N == 1);
    REQUIRE((int)basis.vectors.size() == 1);
    REQUIRE((int)basis.vectors[0].size() == lab.magnetic.stiffness.n);
    double rin = 2 * lab.cfg.a, rout = std::pow(2 * lab.cfg.a, 0.5);
    for (int d = 0; d < lab.magnetic.stiffness.n; ++d) {
        Vec2 x = lab.mesh.vertices[lab.magnetic.dof_to_vertex[d]];
        if (norm(x) <= rin) CHECK(std::abs(basis.vectors[0][d]) == 0.0);
        if (norm(x) >= rout + 1e-9) CHECK(std::abs(basis.vectors[0][d]) > 0.0);
    }

    // Gram deviation shrinks like a^(2 tau) as the poles merge
    auto gram_dev = [](double a) {
        Lab lb = make_lab(a, 1);
        TestFunctionBasis b = build_test_basis(lb.mesh, lb.magnetic, lb.laplacian, lb.lap,
                                               lb.cfg, 0.5);
        double g = m_norm(lb.magnetic.mass, b.vectors[0]);
        return std::abs(g * g - 1.0);
    };
    double d1 = gram_dev(0.05), d2 = gram_dev(0.01);
    CHECK(d1 < 0.5);
    CHECK(d2 < d1);
    CHECK(d2 / d1 < std::pow(0.01 / 0.05, 2 * 0.5) * 2.0);  // within 2x of the scaling law
}

TEST_CASE("quadratic-form matrix: leading log term and N = 2 signs") {
    Lab lab = make_lab(0.01, 1);
    QuadFormMatrix M = assemble_M_matrix(lab.mesh, lab.laplacian, lab.lap, lab.cfg, 0.5);
    REQUIRE(M.N == 1);
    double u0 = value_at_origin(lab.lap.pairs[0], lab.mesh, lab.laplacian);
    double leading = 2 * M_PI * u0 * u0 / ((1 - 0.5) * std::abs(std::log(2 * lab.cfg.a)));
    CHECK(M.at(0, 0) > 0);
    CHECK(M.at(0, 0) / leading > 0.8);
    CHECK(M.at(0, 0) / leading < 1.2);

    // rectangle with a simple second eigenvalue: the (1,1) entry goes negative
    Lab rect;
    rect.cfg.a = 0.01;
    DomainSpec dom;
    dom.kind = DomainSpec::Kind::polygon;
    dom.polygon = {{-1.1, -0.9}, {1.1, -0.9}, {1.1, 0.9}, {-1.1, 0.9}};
    std::vector<Vec2> poles = {rect.cfg.pole_minus(), rect.cfg.pole_plus()};
    MeshingOptions mo;
    mo.h_max = 0.08;
    mo.grading.centers = poles;
    mo.grading.target_h_at_center = 0.002;
    mo.grading.growth_ratio = 1.15;
    rect.mesh = generate_mesh(dom, poles, nullptr, mo);
    rect.laplacian = assemble_laplacian(rect.mesh, {});
    rect.lap = solve_lowest(rect.laplacian, 2, 1e-10);
    double gap01 = rect.lap.pairs[1].value - rect.lap.pairs[0].value;
    REQUIRE(gap01 / rect.lap.pairs[0].value > 0.2);  // simple pair
    std::vector<cd> ones(rect.laplacian.stiffness.n, cd{1.0, 0.0});
    rect.lap.pairs[0] = make_magnetic_real(rect.lap.pairs[0], ones, rect.laplacian.mass,
                                           gap01 / rect.lap.pairs[0].value);
    double gap12 = std::min(gap01, rect.lap.gap_to_next);
    rect.lap.pairs[1] = make_magnetic_real(rect.lap.pairs[1], ones, rect.laplacian.mass,
                                           gap12 / rect.lap.pairs[1].value);
    QuadFormMatrix M2 = assemble_M_matrix(rect.mesh, rect.laplacian, rect.lap, rect.cfg, 0.5);
    REQUIRE(M2.N == 2);
    CHECK(M2.at(0, 0) < 0.0);             // lambda_1 sits well below lambda_2
    CHECK(M2.at(0, 1) == M2.at(1, 0));    // stored symmetric
    CHECK(max_eig_quadform(M2) >= M2.at(1, 1));
}

TEST_CASE("upper bound sandwiches the magnetic eigenvalue") {
    Lab lab = make_lab(0.05, 1);
    double lam = lab.lap.pairs[0].value;
    double lam_a = solve_lowest(lab.magnetic, 1, 1e-10).pairs[0].value;
    for (double tau : {0.25, 0.5, 0.75}) {
        double ub = upper_bound(lab.mesh, lab.magnetic, lab.laplacian, lab.lap, lab.cfg, tau);
        CHECK(lam < lam_a);
        CHECK(lam_a <= ub * (1 + 1e-12));
        CHECK(ub < lam_a + 10.0);  // stays a quantitative bound, not a triviality
    }
}

TEST_CASE("excess over the eigenvalue approaches the predicted log term") {
    Lab lab = make_lab(0.005, 1);
    double lam = lab.lap.pairs[0].value;
    double u0 = value_at_origin(lab.lap.pairs[0], lab.mesh, lab.laplacian);
    double ub = upper_bound(lab.mesh, lab.magnetic, lab.laplacian, lab.lap, lab.cfg, 0.5);
    double excess = ub - lam;
    double leading = 2 * M_PI * u0 * u0 / ((1 - 0.5) * std::abs(std::log(lab.cfg.a)));
    CHECK(excess > 0);
    CHECK(excess / leading <= 1.3);
    CHECK(excess / leading >= 0.7);
}

TEST_CASE("degenerate inputs are refused") {
    Lab lab = make_lab(0.05, 1);
    SpectrumSlice dup = lab.lap;
    dup.pairs.push_back(dup.pairs[0]);  // duplicated vector: singular Gram
    CHECK_THROWS_AS(upper_bound(lab.mesh, lab.magnetic, lab.laplacian, dup, lab.cfg, 0.5),
                    NumericalError);

    SpectrumSlice empty;
    CHECK_THROWS_AS(build_test_basis(lab.mesh, lab.magnetic, lab.laplacian, empty, lab.cfg, 0.5),
                    PreconditionError);

    // cutoff support must stay inside the unit disk: (2a)^tau >= 1 at a = 0.55
    Lab wide = make_lab(0.55, 1, 0.1);
    CHECK_THROWS_AS(build_test_basis(wide.mesh, wide.magnetic, wide.laplacian, wide.lap,
                                     wide.cfg, 0.5),
                    PreconditionError);
}
