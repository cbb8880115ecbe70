// Acceptance gate: every primary requirement of the laboratory checked at its
// pinned tolerance, one verdict line per item. Exit code = number of failures.

#include "ablab/bessel.hpp"
#include "ablab/bounds.hpp"
#include "ablab/eig.hpp"
#include "ablab/errors.hpp"
#include "ablab/harness.hpp"
#include "ablab/nodal.hpp"
#include "ablab/potential.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace ablab;
using clk = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(int idx, const std::string& name, bool pass, double secs,
             const std::string& detail) {
    std::printf("[%s] %2d %-52s %7.2fs  %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(), secs,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void check(int idx, const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    auto t0 = clk::now();
    bool pass = false;
    std::string detail;
    try {
        auto [p, d] = fn();
        pass = p;
        detail = d;
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(clk::now() - t0).count();
    verdict(idx, name, pass, secs, detail);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Mesh graded_disk(const std::vector<Vec2>& poles, double h, double target, const Obstacle* obs = nullptr) {
    DomainSpec disk;
    MeshingOptions mo;
    mo.h_max = h;
    if (!poles.empty()) {
        mo.grading.centers = poles;
        mo.grading.target_h_at_center = target;
        mo.grading.growth_ratio = 1.15;
    }
    return generate_mesh(disk, poles, obs, mo);
}

} // namespace

int main() {
    std::printf("acceptance checks\n=================\n");

    // shared main sweep (items 3, 4, 6, 9)
    SweepConfig sweep_cfg;
    sweep_cfg.h_max = 0.05;
    sweep_cfg.out_dir = "acceptance_out_main";
    SweepResult sweep;
    bool sweep_ok = false;
    double sweep_secs = 0;
    {
        auto t0 = clk::now();
        try {
            sweep = run_sweep(sweep_cfg);
            sweep_ok = sweep.has_fit;
        } catch (const std::exception& e) {
            std::printf("sweep failed: %s\n", e.what());
        }
        sweep_secs = std::chrono::duration<double>(clk::now() - t0).count();
    }

    check(1, "disk ground state, three uniform refinements", [] {
        auto t0 = clk::now();
        DomainSpec disk;
        MeshingOptions mo;
        mo.h_max = 0.2;
        Mesh m = generate_mesh(disk, {}, nullptr, mo);
        for (int r = 0; r < 3; ++r) m = refine_uniform(m);
        AssembledSystem sys = assemble_laplacian(m, {});
        double lam = solve_lowest(sys, 1, 1e-10).pairs[0].value;
        double exact = j0_zero1() * j0_zero1();
        double rel = std::abs(lam - exact) / exact;
        double secs = std::chrono::duration<double>(clk::now() - t0).count();
        return std::make_pair(rel <= 5e-3 && secs <= 120.0,
                              fmt("lambda=%.8f vs %.8f, rel=%.2e (tol 5e-3)", lam, exact, rel));
    });

    check(2, "single pole at the center, half flux", [] {
        Mesh m = graded_disk({{0.0, 0.0}}, 0.05, 0.005);
        AssembledSystem sys = assemble_magnetic_field(m, single_pole_field({0.0, 0.0}), {});
        double lam = solve_lowest(sys, 1, 1e-10).pairs[0].value;
        double exact = M_PI * M_PI;  // j_{1/2,1}^2
        double rel = std::abs(lam - exact) / exact;
        return std::make_pair(rel <= 1e-2,
                              fmt("lambda=%.6f vs pi^2=%.6f, rel=%.2e (tol 1e-2)", lam, exact, rel));
    });

    check(3, "eigenvalue-shift sweep fits the predicted slope", [&] {
        if (!sweep_ok) return std::make_pair(false, std::string("sweep did not complete"));
        bool ok = sweep.fit.relative_error <= 0.15 && sweep_secs <= 1800.0;
        return std::make_pair(ok, fmt("slope=%.4f predicted=%.4f rel=%.2e (tol 0.15), %.1fs",
                                      sweep.fit.slope, sweep.fit.predicted,
                                      sweep.fit.relative_error, sweep_secs));
    });

    check(4, "slit re-solve reproduces the magnetic eigenvalue", [&] {
        if (!sweep_ok) return std::make_pair(false, std::string("sweep did not complete"));
        double worst = 0;
        int counted = 0;
        for (const auto& r : sweep.records) {
            if (r.a > 0.05 + 1e-12) continue;
            if (!r.complete()) return std::make_pair(false, "incomplete record at a=" + fmt("%g", r.a));
            ++counted;
            worst = std::max(worst, std::abs(r.lambda_slit_nodal - r.lambda_N_a) / r.lambda_N_a);
        }
        return std::make_pair(counted >= 3 && worst <= 1e-2,
                              fmt("%d records, worst rel gap %.2e (tol 1e-2)", counted, worst));
    });

    check(5, "gauge reduction on a slit mesh equals the plain Laplacian", [] {
        PoleConfig cfg;
        cfg.a = 0.25;
        Obstacle slit;
        slit.polyline = {cfg.pole_minus(), {0.0, 0.0}, cfg.pole_plus()};
        Mesh m = graded_disk({cfg.pole_minus(), cfg.pole_plus()}, 0.08, 0.025, &slit);
        AssembledSystem red = assemble_magnetic_field(m, gauge_reduced_field(cfg), {});
        AssembledSystem lap = assemble_laplacian(m, {});
        SpectrumSlice a = solve_lowest(red, 5, 1e-10);
        SpectrumSlice b = solve_lowest(lap, 5, 1e-10);
        double worst = 0;
        for (int k = 0; k < 5; ++k)
            worst = std::max(worst, std::abs(a.pairs[k].value - b.pairs[k].value) /
                                        std::max(1.0, b.pairs[k].value));
        return std::make_pair(worst <= 1e-9, fmt("worst rel diff %.2e (tol 1e-9)", worst));
    });

    check(6, "nodal set is a single pole-to-pole arc at small a", [&] {
        if (!sweep_ok) return std::make_pair(false, std::string("sweep did not complete"));
        int counted = 0, good = 0;
        for (const auto& r : sweep.records) {
            if (r.a > 0.05 + 1e-12) continue;
            ++counted;
            if (r.complete() && r.single_arc && r.pole_deg_minus == 1 && r.pole_deg_plus == 1 &&
                r.euler_residual == 0)
                ++good;
        }
        return std::make_pair(counted >= 3 && good == counted,
                              fmt("%d/%d records with arc + degree-1 poles + zero Euler residual",
                                  good, counted));
    });

    check(7, "arc diameter follows the log law as the poles merge", [] {
        SweepConfig cfg;
        cfg.h_max = 0.05;
        cfg.a_values = {0.004, 0.002, 0.001};
        cfg.nodal_only = true;
        cfg.out_dir = "acceptance_out_small";
        SweepResult res = run_sweep(cfg);
        bool ok = res.records.size() == 3;
        std::string vals;
        double prev = 1e9;
        for (const auto& r : res.records) {
            ok = ok && r.complete() && r.log_ratio >= 0.85 && r.log_ratio <= 1.15 &&
                 r.log_ratio < prev;
            prev = r.log_ratio;
            vals += fmt("%.4f ", r.log_ratio);
        }
        return std::make_pair(ok, "log ratios " + vals + "(band [0.85,1.15], decreasing)");
    });

    check(8, "cutoff energy: closed form vs independent quadrature", [] {
        auto t0 = clk::now();
        double worst = 0, worst_defect = -1;
        for (double eps : {0.1, 0.01})
            for (double tau : {0.3, 0.5, 0.7}) {
                CutoffParams p(eps, tau);
                double c = cutoff_energy_closed(p), q = cutoff_energy_quadrature(p);
                worst = std::max(worst, std::abs(c - q) / c);
                double cap = M_PI * std::pow(eps, 2 * tau);
                worst_defect = std::max(worst_defect, cutoff_mass_defect(p) / cap);
            }
        double secs = std::chrono::duration<double>(clk::now() - t0).count();
        bool ok = worst <= 1e-8 && worst_defect <= 1.0 + 1e-12 && secs < 1.0;
        return std::make_pair(ok, fmt("worst rel %.2e (tol 1e-8), defect/cap %.3f (<=1)", worst,
                                      worst_defect));
    });

    check(9, "upper bounds sandwich the eigenvalue and scale in tau", [&] {
        if (!sweep_ok) return std::make_pair(false, std::string("sweep did not complete"));
        auto bound_at = [](const SweepRecord& r, double tau) {
            for (auto& [t, b] : r.upper_bounds)
                if (std::abs(t - tau) < 1e-12) return b;
            return std::nan("");
        };
        double worst_ratio_dev = 0;
        int ratio_records = 0;
        for (const auto& r : sweep.records) {
            if (!r.complete()) return std::make_pair(false, "incomplete record at a=" + fmt("%g", r.a));
            for (auto& [tau, ub] : r.upper_bounds)
                if (!(r.lambda_N <= r.lambda_N_a && r.lambda_N_a <= ub + 1e-9))
                    return std::make_pair(false, fmt("sandwich broken at a=%g tau=%g", r.a, tau));
            if (r.a > 0.05 + 1e-12) continue;
            ++ratio_records;
            double e25 = bound_at(r, 0.25) - r.lambda_N;
            double e50 = bound_at(r, 0.5) - r.lambda_N;
            double dev = std::abs((e25 / e50) / (2.0 / 3.0) - 1.0);
            worst_ratio_dev = std::max(worst_ratio_dev, dev);
        }
        bool ok = ratio_records >= 3 && worst_ratio_dev <= 0.25;
        return std::make_pair(ok, fmt("sandwich on all records; tau-ratio dev %.3f (tol 0.25)",
                                      worst_ratio_dev));
    });

    check(10, "one-large-direction matrices: top eigenvalue is C*eps", [] {
        auto t0 = clk::now();
        std::mt19937 rng(424242);
        const double eps = 1e-3;
        double lo = 1e9, hi = -1e9;
        for (int i = 0; i < 100; ++i) {
            oracle::LemmaDraw d = oracle::lemma_matrix(rng, eps);
            QuadFormMatrix q;
            q.N = d.m.n;
            q.m.resize((size_t)q.N * q.N);
            for (int r = 0; r < q.N; ++r)
                for (int c = 0; c < q.N; ++c) q.at(r, c) = d.m.at(r, c).real();
            double ratio = max_eig_quadform(q) / (d.C * eps);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        double secs = std::chrono::duration<double>(clk::now() - t0).count();
        bool ok = lo >= 0.9 && hi <= 1.1 && secs < 1.0;
        return std::make_pair(ok, fmt("ratio range [%.4f, %.4f] in [0.9, 1.1], 100 draws", lo, hi));
    });

    check(11, "flux integrals on random loops are half-integers", [] {
        PoleConfig cfg;
        cfg.a = 0.3;
        std::mt19937 rng(1789);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst = 0;
        int tested = 0;
        while (tested < 50) {
            Vec2 c = {1.4 * U(rng) - 0.7, 1.4 * U(rng) - 0.7};
            double r0 = 0.05 + 1.0 * U(rng), wob = 0.35 * U(rng), ph = 2 * M_PI * U(rng);
            int turns = 1 + (int)(2 * U(rng));
            double orient = U(rng) < 0.5 ? 1.0 : -1.0;
            int n = 200 * turns;
            std::vector<Vec2> loop(n);
            bool keep = true;
            for (int i = 0; i < n; ++i) {
                double t = orient * 2.0 * M_PI * turns * i / n;
                double rr = r0 * (1.0 + wob * std::sin(3 * t + ph));
                loop[i] = {c.x + rr * std::cos(t), c.y + rr * std::sin(t)};
                if (dist(loop[i], cfg.pole_minus()) < 0.03 ||
                    dist(loop[i], cfg.pole_plus()) < 0.03)
                    keep = false;
            }
            if (!keep) continue;
            ++tested;
            double twice = 2.0 * winding_integral(cfg, loop);
            worst = std::max(worst, std::abs(twice - std::round(twice)));
        }
        return std::make_pair(worst <= 1e-6,
                              fmt("50 loops, worst |2W - round| = %.2e (tol 1e-6)", worst));
    });

    check(12, "sparse solver equals a dense-matrix evaluation", [] {
        DomainSpec sq;
        sq.kind = DomainSpec::Kind::polygon;
        sq.polygon = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
        MeshingOptions mo;
        mo.h_max = 0.35;
        mo.grading.centers = {{-0.3, 0.0}, {0.3, 0.0}};
        mo.grading.target_h_at_center = 0.1;
        mo.grading.growth_ratio = 1.15;
        Mesh m = generate_mesh(sq, {{-0.3, 0.0}, {0.3, 0.0}}, nullptr, mo);
        PoleConfig cfg;
        cfg.a = 0.3;
        AssembledSystem sys = assemble_magnetic(m, cfg, {});
        if (sys.stiffness.n > 300)
            return std::make_pair(false, fmt("system too large: %d dofs", sys.stiffness.n));
        SpectrumSlice sl = solve_lowest(sys, 5, 1e-11);
        auto dense = oracle::pencil_eigenvalues(oracle::from_sparse(sys.stiffness),
                                                oracle::from_sparse(sys.mass));
        double worst = 0;
        for (int k = 0; k < 5; ++k)
            worst = std::max(worst, std::abs(sl.pairs[k].value - dense[k]) /
                                        std::max(1.0, dense[k]));
        return std::make_pair(worst <= 1e-9,
                              fmt("%d dofs, worst rel diff %.2e (tol 1e-9)", sys.stiffness.n,
                                  worst));
    });

    std::error_code ec;
    std::filesystem::remove_all("acceptance_out_main", ec);
    std::filesystem::remove_all("acceptance_out_small", ec);

    std::printf("=================\n%d of 12 passed\n", 12 - failures);
    return failures;
}
