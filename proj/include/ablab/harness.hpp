#pragma once

#include "ablab/bounds.hpp"
#include "ablab/eig.hpp"
#include "ablab/fem.hpp"
#include "ablab/geometry.hpp"
#include "ablab/nodal.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ablab {

struct SweepConfig {
    DomainSpec domain;
    int N = 1;
    std::vector<double> a_values = {0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> tau_values = {0.25, 0.5, 0.75};
    double h_max = 0.1;
    double pole_h_factor = 0.1;  // grading target at the poles = factor * a
    double growth_ratio = 1.15;
    int refine = 0;
    double solver_tol = 1e-10;
    int quad_order = 6;
    double gap_threshold = 1e-6;
    double origin_threshold = 1e-3;
    double imag_ratio_threshold = 0.05;
    bool nodal_only = false;  // stop each record after nodal stats (diameter runs)
    std::string out_dir = "out";
};

// key=value lines, '#' comments, lists comma-separated; unknown keys error
SweepConfig parse_config(std::istream& is);
SweepConfig parse_config_file(const std::string& path);

struct SweepRecord {
    double a = 0;
    double lambda_N = 0, lambda_N_a = 0, u_N0 = 0;
    double gap_rel_lap = 0, gap_rel_mag = 0;
    double lambda_slit_nodal = 0, lambda_slit_segment = 0;
    std::vector<std::pair<double, double>> upper_bounds;  // (tau, bound)
    double d_a = 0, log_ratio = 0, align_residual = 0;
    bool single_arc = false;
    int euler_residual = 0, pole_deg_minus = 0, pole_deg_plus = 0, b1 = 0;
    int mesh_vertices = 0;
    NodalGraph graph;
    bool has_graph = false;
    std::string error;  // empty when every stage completed
    bool complete() const { return error.empty(); }
};

struct FitResult {
    double slope = 0;
    double predicted = 0;   // 2 pi u_N(0)^2 from the finest record
    double relative_error = 0;
    std::vector<double> fitted_a;
    std::vector<double> residuals;  // y - slope * x per fitted point
};

struct SweepResult {
    std::vector<SweepRecord> records;
    FitResult fit;
    bool has_fit = false;
};

SweepRecord run_single(const SweepConfig& cfg, double a);
SweepResult run_sweep(const SweepConfig& cfg);

// through-origin least squares of lambda_N_a - lambda_N against 1/|log a|
// over the smallest ceil(n/2) a-values among complete records
FitResult fit_asymptotics(const std::vector<SweepRecord>& records, double predicted);

void emit_csv(const SweepResult& res, std::ostream& os);
void emit_json(const SweepConfig& cfg, const SweepResult& res, std::ostream& os);
SweepResult read_json(std::istream& is);  // inverse of emit_json (graphs excluded)
void emit_fit_svg(const SweepResult& res, const std::string& path);
// writes sweep.csv, sweep.json, fit.svg and per-a nodal_<a>.{txt,svg}
void emit_report(const SweepConfig& cfg, const SweepResult& res);

} // namespace ablab
