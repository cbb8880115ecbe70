#include "ablab/bessel.hpp"
#include "ablab/bounds.hpp"
#include "ablab/errors.hpp"
#include "ablab/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

using namespace ablab;

namespace {

int cmd_sweep(const std::string& config_path) {
    SweepConfig cfg = parse_config_file(config_path);
    SweepResult res = run_sweep(cfg);
    for (const auto& r : res.records) {
        std::printf("a=%-8g lambda_N=%.10g lambda_N^a=%.10g shift=%.6g u_N0=%.6g", r.a,
                    r.lambda_N, r.lambda_N_a, r.lambda_N_a - r.lambda_N, r.u_N0);
        if (r.has_graph)
            std::printf(" arc=%s d_a=%.4g log_ratio=%.4g", r.single_arc ? "yes" : "no",
                        r.d_a, r.log_ratio);
        if (!r.error.empty()) std::printf("  [%s]", r.error.c_str());
        std::printf("\n");
    }
    if (res.has_fit)
        std::printf("fit: slope=%.6g predicted=%.6g relative_error=%.4g\n", res.fit.slope,
                    res.fit.predicted, res.fit.relative_error);
    else
        std::printf("fit: unavailable (too few complete records)\n");
    emit_report(cfg, res);
    std::printf("report written to %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_mesh(const std::string& domain, double radius, int segments, double h, double a,
             double pole_h_factor, double growth, bool slit, int refine,
             const std::string& out) {
    DomainSpec spec;
    if (domain == "disk") {
        spec.kind = DomainSpec::Kind::disk;
        spec.radius = radius;
        spec.boundary_segments = segments;
    } else if (domain == "square") {
        spec.kind = DomainSpec::Kind::polygon;
        spec.polygon = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    } else {
        throw PreconditionError("mesh: domain must be 'disk' or 'square'");
    }
    MeshingOptions mo;
    mo.h_max = h;
    std::vector<Vec2> poles;
    if (a > 0) {
        PoleConfig pc{a};
        poles = {pc.pole_minus(), pc.pole_plus()};
        mo.grading.centers = poles;
        mo.grading.target_h_at_center = pole_h_factor * a;
        mo.grading.growth_ratio = growth;
    }
    Obstacle seg;
    const Obstacle* obs = nullptr;
    if (slit) {
        if (!(a > 0)) throw PreconditionError("mesh: --slit needs --a > 0");
        seg.polyline = {{-a, 0}, {0, 0}, {a, 0}};
        obs = &seg;
    }
    Mesh mesh = generate_mesh(spec, poles, obs, mo);
    for (int i = 0; i < refine; ++i) mesh = refine_uniform(mesh);
    check_conformity(mesh);
    write_mesh_file(mesh, out);
    MeshQuality q = mesh_quality(mesh);
    std::printf("%zu vertices, %zu triangles, angles [%.2f, %.2f] deg, h [%.4g, %.4g]\n",
                q.num_vertices, q.num_triangles, q.min_angle_deg, q.max_angle_deg, q.h_min,
                q.h_max);
    std::printf("mesh written to %s\n", out.c_str());
    return 0;
}

int cmd_oracle_bessel(const std::string& which) {
    double value;
    if (which == "j0_zero1") value = j0_zero1();
    else if (which == "j1_zero1") value = j1_zero1();
    else if (which == "jhalf_zero1") value = j_half_zero1();
    else if (which == "lambda1_disk") value = j0_zero1() * j0_zero1();
    else if (which == "origin_value") value = disk_ground_origin_value();
    else if (which == "slope") {
        double u0 = disk_ground_origin_value();
        value = 2.0 * M_PI * u0 * u0;
    } else {
        throw PreconditionError(
            "oracle bessel: --which must be one of j0_zero1, j1_zero1, jhalf_zero1, "
            "lambda1_disk, origin_value, slope");
    }
    std::printf("%.15g\n", value);
    return 0;
}

int cmd_check_cutoff(double eps, double tau) {
    CutoffParams p(eps, tau);
    double closed = cutoff_energy_closed(p);
    double quad = cutoff_energy_quadrature(p);
    double defect = cutoff_mass_defect(p);
    double cap = M_PI * std::pow(eps, 2.0 * tau);
    std::printf("closed      = %.15g\n", closed);
    std::printf("quadrature  = %.15g\n", quad);
    std::printf("difference  = %.3g\n", std::abs(closed - quad));
    std::printf("mass_defect = %.15g\n", defect);
    std::printf("defect_cap  = %.15g\n", cap);
    cutoff_energy(p);  // throws NumericalError if the two routes disagree
    if (defect > cap) throw NumericalError("mass defect exceeds pi*eps^(2 tau)");
    std::printf("ok\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-element spectral laboratory for two-pole Aharonov-Bohm operators"};
    app.require_subcommand(1);

    auto* sweep = app.add_subcommand("sweep", "run a pole-separation sweep from a config file");
    std::string config_path;
    sweep->add_option("--config", config_path, "key=value config file")->required();

    auto* meshcmd = app.add_subcommand("mesh", "generate a conforming mesh and write it as text");
    meshcmd->set_help_flag("--help", "print help");  // frees -h so --h can mean edge length
    std::string domain = "disk", out = "mesh.txt";
    double radius = 1.0, h = 0.1, a = 0.0, pole_h_factor = 0.1, growth = 1.15;
    int segments = 256, refine = 0;
    bool slit = false;
    meshcmd->add_option("--domain", domain, "disk or square");
    meshcmd->add_option("--radius", radius, "disk radius");
    meshcmd->add_option("--segments", segments, "disk boundary segments");
    meshcmd->add_option("--h", h, "target edge length");
    meshcmd->add_option("--a", a, "pole half-separation (adds pole vertices and grading)");
    meshcmd->add_option("--pole-h-factor", pole_h_factor, "edge length at the poles, as a fraction of a");
    meshcmd->add_option("--growth", growth, "grading growth ratio");
    meshcmd->add_flag("--slit", slit, "cut the mesh along the segment between the poles");
    meshcmd->add_option("--refine", refine, "uniform refinement steps");
    meshcmd->add_option("--out", out, "output path");

    auto* oracle = app.add_subcommand("oracle", "print independently computed reference values");
    auto* bessel = oracle->add_subcommand("bessel", "Bessel-derived constants");
    std::string which;
    bessel->add_option("--which", which, "which constant")->required();
    oracle->require_subcommand(1);

    auto* check = app.add_subcommand("check", "self-consistency checks");
    auto* cutoff = check->add_subcommand("cutoff", "cutoff energy: closed form vs quadrature");
    double eps = 0.01, tau = 0.5;
    cutoff->add_option("--eps", eps, "inner radius")->required();
    cutoff->add_option("--tau", tau, "outer exponent")->required();
    check->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(config_path);
        if (meshcmd->parsed())
            return cmd_mesh(domain, radius, segments, h, a, pole_h_factor, growth, slit,
                            refine, out);
        if (oracle->parsed() && bessel->parsed()) return cmd_oracle_bessel(which);
        if (check->parsed() && cutoff->parsed()) return cmd_check_cutoff(eps, tau);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
