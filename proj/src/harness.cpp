#include "ablab/harness.hpp"

#include "ablab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace ablab {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- config ---

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw PreconditionError("config: bad number for '" + key + "': " + v);
    return x;
}

int to_int(const std::string& v, const std::string& key) {
    double x = to_double(v, key);
    int i = (int)std::llround(x);
    if (x != (double)i)
        throw PreconditionError("config: expected integer for '" + key + "': " + v);
    return i;
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_double(item, key));
    }
    return out;
}

std::vector<Vec2> to_points(const std::string& v, const std::string& key) {
    std::vector<Vec2> out;
    std::stringstream ss(v);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        pair = trim(pair);
        if (pair.empty()) continue;
        auto xy = to_list(pair, key);
        if (xy.size() != 2)
            throw PreconditionError("config: '" + key + "' wants x,y pairs separated by ';'");
        out.push_back({xy[0], xy[1]});
    }
    return out;
}

} // namespace

SweepConfig parse_config(std::istream& is) {
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("config line " + std::to_string(lineno) +
                                    ": expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw PreconditionError("config line " + std::to_string(lineno) +
                                    ": empty key or value");

        if (key == "domain") {
            if (val == "disk") {
                cfg.domain.kind = DomainSpec::Kind::disk;
            } else if (val == "square") {
                cfg.domain.kind = DomainSpec::Kind::polygon;
                cfg.domain.polygon = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
            } else if (val == "polygon") {
                cfg.domain.kind = DomainSpec::Kind::polygon;
            } else {
                throw PreconditionError("config: unknown domain '" + val + "'");
            }
        } else if (key == "radius") {
            cfg.domain.radius = to_double(val, key);
        } else if (key == "boundary_segments") {
            cfg.domain.boundary_segments = to_int(val, key);
        } else if (key == "polygon") {
            cfg.domain.polygon = to_points(val, key);
        } else if (key == "N") {
            cfg.N = to_int(val, key);
        } else if (key == "a_values") {
            cfg.a_values = to_list(val, key);
        } else if (key == "tau_values") {
            cfg.tau_values = to_list(val, key);
        } else if (key == "h_max") {
            cfg.h_max = to_double(val, key);
        } else if (key == "pole_h_factor") {
            cfg.pole_h_factor = to_double(val, key);
        } else if (key == "growth_ratio") {
            cfg.growth_ratio = to_double(val, key);
        } else if (key == "refine") {
            cfg.refine = to_int(val, key);
        } else if (key == "solver_tol") {
            cfg.solver_tol = to_double(val, key);
        } else if (key == "quad_order") {
            cfg.quad_order = to_int(val, key);
        } else if (key == "gap_threshold") {
            cfg.gap_threshold = to_double(val, key);
        } else if (key == "origin_threshold") {
            cfg.origin_threshold = to_double(val, key);
        } else if (key == "imag_ratio_threshold") {
            cfg.imag_ratio_threshold = to_double(val, key);
        } else if (key == "stages") {
            if (val == "full") cfg.nodal_only = false;
            else if (val == "nodal") cfg.nodal_only = true;
            else throw PreconditionError("config: stages must be 'full' or 'nodal'");
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else {
            throw PreconditionError("config: unknown key '" + key + "'");
        }
    }

    if (cfg.N < 1) throw PreconditionError("config: N must be >= 1");
    if (cfg.a_values.empty()) throw PreconditionError("config: a_values is empty");
    for (size_t i = 0; i < cfg.a_values.size(); ++i) {
        if (!(cfg.a_values[i] > 0))
            throw PreconditionError("config: a_values must be positive");
        if (i > 0 && !(cfg.a_values[i] < cfg.a_values[i - 1]))
            throw PreconditionError("config: a_values must be strictly decreasing");
    }
    if (cfg.domain.kind == DomainSpec::Kind::disk) {
        if (!(cfg.domain.radius > 0)) throw PreconditionError("config: radius must be positive");
        if (cfg.a_values.front() >= cfg.domain.radius)
            throw PreconditionError("config: poles must lie inside the disk (a < radius)");
        if (cfg.domain.boundary_segments < 8)
            throw PreconditionError("config: boundary_segments must be >= 8");
    } else if (cfg.domain.polygon.size() < 3) {
        throw PreconditionError("config: polygon needs at least 3 vertices");
    }
    for (double t : cfg.tau_values)
        if (!(t > 0 && t < 1))
            throw PreconditionError("config: tau_values must lie in (0, 1)");
    if (!(cfg.h_max > 0)) throw PreconditionError("config: h_max must be positive");
    if (!(cfg.pole_h_factor > 0 && cfg.pole_h_factor <= 1))
        throw PreconditionError("config: pole_h_factor must lie in (0, 1]");
    if (!(cfg.growth_ratio > 1 && cfg.growth_ratio <= 2))
        throw PreconditionError("config: growth_ratio must lie in (1, 2]");
    if (cfg.refine < 0 || cfg.refine > 6)
        throw PreconditionError("config: refine must lie in [0, 6]");
    if (!(cfg.solver_tol > 0 && cfg.solver_tol <= 1e-2))
        throw PreconditionError("config: solver_tol must lie in (0, 1e-2]");
    if (cfg.quad_order != 2 && cfg.quad_order != 6 && cfg.quad_order != 10)
        throw PreconditionError("config: quad_order must be one of 2, 6, 10");
    if (!(cfg.gap_threshold >= 0) || !(cfg.origin_threshold >= 0) ||
        !(cfg.imag_ratio_threshold > 0))
        throw PreconditionError("config: thresholds must be nonnegative");
    return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw PreconditionError("cannot open config file: " + path);
    return parse_config(is);
}

// -------------------------------------------------------------- pipeline ---

namespace {

double rel_gap_at(const SpectrumSlice& s, int j) {
    double lam = s.pairs[j].value;
    double scale = std::max(std::abs(lam), 1.0);
    double inf = std::numeric_limits<double>::infinity();
    double lo = j > 0 ? lam - s.pairs[j - 1].value : inf;
    double hi = j + 1 < (int)s.pairs.size() ? s.pairs[j + 1].value - lam : s.gap_to_next;
    return std::min(lo, hi) / scale;
}

double real_m_dot(const SparseHermitian& M, const std::vector<cd>& x,
                  const std::vector<cd>& y) {
    std::vector<cd> my(y.size());
    spmv(M, y.data(), my.data());
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i].real() * my[i].real();
    return s;
}

// A degenerate cluster of a real pencil can come out of the complex solver as
// complex mixtures; rebuild real M-orthonormal vectors from the stacked real
// and imaginary parts of the cluster.
void realify_cluster(SpectrumSlice& slice, int j0, int j1, const SparseHermitian& M) {
    size_t n = slice.pairs[j0].vector.size();
    std::vector<std::vector<cd>> cand;
    for (int j = j0; j < j1; ++j) {
        std::vector<cd> re(n), im(n);
        for (size_t i = 0; i < n; ++i) {
            re[i] = cd(slice.pairs[j].vector[i].real(), 0.0);
            im[i] = cd(slice.pairs[j].vector[i].imag(), 0.0);
        }
        cand.push_back(std::move(re));
        cand.push_back(std::move(im));
    }
    std::vector<std::vector<cd>> kept;
    for (auto& c : cand) {
        if ((int)kept.size() == j1 - j0) break;
        for (auto& k : kept) {
            double proj = real_m_dot(M, k, c);
            for (size_t i = 0; i < n; ++i) c[i] -= proj * k[i];
        }
        double nrm = std::sqrt(std::max(real_m_dot(M, c, c), 0.0));
        if (nrm < 1e-6) continue;
        for (size_t i = 0; i < n; ++i) c[i] = cd(c[i].real() / nrm, 0.0);
        kept.push_back(std::move(c));
    }
    if ((int)kept.size() < j1 - j0)
        throw NumericalError("could not realify a degenerate eigenvalue cluster");
    for (int j = j0; j < j1; ++j) slice.pairs[j].vector = std::move(kept[j - j0]);
}

// Align every Laplacian eigenvector used downstream to a real representative
// with a nonnegative origin value.
void realify_laplacian(SpectrumSlice& slice, int N, const AssembledSystem& lap,
                       const Mesh& mesh) {
    std::vector<cd> ones(lap.dof_to_vertex.size(), cd(1, 0));
    int j = 0;
    while (j < N) {
        int k = j + 1;
        while (k < (int)slice.pairs.size()) {
            double scale = std::max(std::abs(slice.pairs[k].value), 1.0);
            if ((slice.pairs[k].value - slice.pairs[k - 1].value) / scale >= 1e-8) break;
            ++k;
        }
        if (k - j == 1)
            slice.pairs[j] = make_magnetic_real(slice.pairs[j], ones, lap.mass,
                                                rel_gap_at(slice, j), 0.0);
        else
            realify_cluster(slice, j, k, lap.mass);
        for (int m = j; m < k && m < N; ++m)
            fix_sign_at_origin(slice.pairs[m], mesh, lap);
        j = k;
    }
}

int pole_degree(const NodalGraph& g, Vec2 p) {
    for (const auto& nd : g.nodes)
        if (nd.kind == NodeKind::pole && dist(nd.pos, p) < 1e-9) return nd.degree;
    return -1;
}

// The origin is always forced into the mesh; when the measured arc passes
// close by, thread it through the origin exactly so the forced vertex does not
// sit inside the slit's refinement zone.
void thread_through_origin(Obstacle& arc, double sep) {
    auto& P = arc.polyline;
    if (P.size() < 2) return;
    double tol = 1e-3 * sep;
    int best_seg = -1;
    double best_d = tol, best_t = 0;
    for (size_t i = 0; i + 1 < P.size(); ++i) {
        Vec2 d = P[i + 1] - P[i];
        double len2 = dot(d, d);
        if (len2 <= 0) continue;
        double t = std::clamp(-dot(P[i], d) / len2, 0.0, 1.0);
        Vec2 q = P[i] + t * d;
        double dd = norm(q);
        if (dd < best_d) {
            best_d = dd;
            best_seg = (int)i;
            best_t = t;
        }
    }
    if (best_seg < 0) return;
    size_t i = (size_t)best_seg;
    double seg_len = dist(P[i], P[i + 1]);
    double snap = 1e-9 * sep;
    if (best_t * seg_len < snap && i > 0)
        P[i] = {0, 0};
    else if ((1 - best_t) * seg_len < snap && i + 2 < P.size())
        P[i + 1] = {0, 0};
    else
        P.insert(P.begin() + i + 1, Vec2{0, 0});
}

std::string describe(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

SweepRecord run_single(const SweepConfig& cfg, double a) {
    if (!(a > 0)) throw PreconditionError("pole half-separation must be positive");
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    SweepRecord rec;
    rec.a = a;
    rec.lambda_N = rec.lambda_N_a = rec.u_N0 = qnan;
    rec.lambda_slit_nodal = rec.lambda_slit_segment = qnan;
    rec.d_a = rec.log_ratio = qnan;
    rec.gap_rel_lap = rec.gap_rel_mag = rec.align_residual = qnan;

    PoleConfig pc{a};
    MeshingOptions mo;
    mo.h_max = cfg.h_max;
    mo.grading.centers = {pc.pole_minus(), pc.pole_plus()};
    mo.grading.target_h_at_center = cfg.pole_h_factor * a;
    mo.grading.growth_ratio = cfg.growth_ratio;

    Mesh mesh = generate_mesh(cfg.domain, {pc.pole_minus(), pc.pole_plus()}, nullptr, mo);
    for (int r = 0; r < cfg.refine; ++r) mesh = refine_uniform(mesh);
    rec.mesh_vertices = (int)mesh.vertices.size();

    AssemblyOptions ao;
    ao.quad_order = cfg.quad_order;

    // Gates: the study needs lambda_N simple and u_N(0) != 0; a violation
    // invalidates the whole run, not just this record.
    AssembledSystem lap = assemble_laplacian(mesh, ao);
    SpectrumSlice lap_slice = solve_lowest(lap, cfg.N + 1, cfg.solver_tol);
    rec.lambda_N = lap_slice.pairs[cfg.N - 1].value;
    rec.gap_rel_lap = rel_gap_at(lap_slice, cfg.N - 1);
    if (rec.gap_rel_lap < cfg.gap_threshold)
        throw PreconditionError("lambda_" + std::to_string(cfg.N) +
                                " is not simple: relative gap " + describe(rec.gap_rel_lap) +
                                " < " + describe(cfg.gap_threshold) + " at a = " + describe(a));
    realify_laplacian(lap_slice, cfg.N, lap, mesh);
    rec.u_N0 = value_at_origin(lap_slice.pairs[cfg.N - 1], mesh, lap);
    if (std::abs(rec.u_N0) < cfg.origin_threshold)
        throw PreconditionError("u_" + std::to_string(cfg.N) + "(0) = " + describe(rec.u_N0) +
                                " is below the origin threshold " +
                                describe(cfg.origin_threshold) + " at a = " + describe(a));

    auto guarded = [&rec](const char* stage, auto&& fn) -> bool {
        try {
            fn();
            return true;
        } catch (const std::exception& e) {
            if (!rec.error.empty()) rec.error += "; ";
            rec.error += std::string(stage) + ": " + e.what();
            return false;
        }
    };

    AssembledSystem mag;
    SpectrumSlice mag_slice;
    EigenPair aligned;
    bool ok_mag = guarded("magnetic", [&] {
        mag = assemble_magnetic(mesh, pc, ao);
        mag_slice = solve_lowest(mag, cfg.N + 1, cfg.solver_tol);
        rec.lambda_N_a = mag_slice.pairs[cfg.N - 1].value;
        rec.gap_rel_mag = rel_gap_at(mag_slice, cfg.N - 1);
        auto gauge = gauge_vector(mesh, mag, pc);
        aligned = make_magnetic_real(mag_slice.pairs[cfg.N - 1], gauge, mag.mass,
                                     rec.gap_rel_mag, cfg.gap_threshold);
        rec.align_residual = aligned.residual;
    });

    bool ok_nodal = false;
    if (ok_mag)
        ok_nodal = guarded("nodal", [&] {
            ExtractOptions xo;
            xo.imag_ratio_threshold = cfg.imag_ratio_threshold;
            rec.graph = extract_nodal_set(mesh, mag, aligned, pc, xo);
            rec.has_graph = true;
            rec.euler_residual = euler_check(rec.graph);
            rec.b1 = rec.graph.b1;
            rec.pole_deg_minus = pole_degree(rec.graph, pc.pole_minus());
            rec.pole_deg_plus = pole_degree(rec.graph, pc.pole_plus());
            NodalStats st = nodal_stats(rec.graph, pc);
            rec.d_a = st.d_a;
            rec.single_arc = st.single_arc;
            rec.log_ratio = st.log_ratio;
        });

    if (cfg.nodal_only) return rec;

    if (ok_nodal)
        guarded("slit_nodal", [&] {
            Obstacle arc = export_curve(rec.graph, pc);
            thread_through_origin(arc, 2 * a);
            Mesh m2 = generate_mesh(cfg.domain, {pc.pole_minus(), pc.pole_plus()}, &arc, mo);
            AssembledSystem l2 = assemble_laplacian(m2, ao);
            SpectrumSlice s2 = solve_lowest(l2, cfg.N, cfg.solver_tol);
            rec.lambda_slit_nodal = s2.pairs[cfg.N - 1].value;
        });

    guarded("slit_segment", [&] {
        Obstacle seg;
        seg.polyline = {pc.pole_minus(), {0, 0}, pc.pole_plus()};
        Mesh m3 = generate_mesh(cfg.domain, {pc.pole_minus(), pc.pole_plus()}, &seg, mo);
        AssembledSystem l3 = assemble_laplacian(m3, ao);
        SpectrumSlice s3 = solve_lowest(l3, cfg.N, cfg.solver_tol);
        rec.lambda_slit_segment = s3.pairs[cfg.N - 1].value;
    });

    if (ok_mag && !cfg.tau_values.empty())
        guarded("bounds", [&] {
            SpectrumSlice lapN = lap_slice;
            lapN.pairs.resize(cfg.N);
            for (double tau : cfg.tau_values) {
                try {
                    rec.upper_bounds.emplace_back(tau, upper_bound(mesh, mag, lap, lapN, pc, tau));
                } catch (const std::exception& e) {
                    rec.upper_bounds.emplace_back(tau, qnan);
                    throw NumericalError("tau = " + describe(tau) + ": " + e.what());
                }
            }
        });

    return rec;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    SweepResult out;
    out.records.reserve(cfg.a_values.size());
    for (double a : cfg.a_values) out.records.push_back(run_single(cfg, a));

    double u0 = out.records.back().u_N0;  // a_values are decreasing: finest last
    double predicted = 2.0 * M_PI * u0 * u0;
    try {
        out.fit = fit_asymptotics(out.records, predicted);
        out.has_fit = true;
    } catch (const std::exception&) {
        out.has_fit = false;
    }
    return out;
}

FitResult fit_asymptotics(const std::vector<SweepRecord>& records, double predicted) {
    std::vector<const SweepRecord*> valid;
    for (const auto& r : records)
        if (r.complete() && std::isfinite(r.lambda_N) && std::isfinite(r.lambda_N_a) &&
            r.a > 0 && r.a != 1.0)
            valid.push_back(&r);
    std::sort(valid.begin(), valid.end(),
              [](const SweepRecord* x, const SweepRecord* y) { return x->a < y->a; });
    size_t want = std::max<size_t>((records.size() + 1) / 2, 3);
    if (valid.size() < 3)
        throw PreconditionError("fit needs at least 3 complete records, have " +
                                std::to_string(valid.size()));
    if (valid.size() > want) valid.resize(want);

    FitResult fit;
    fit.predicted = predicted;
    double sxy = 0, sxx = 0;
    for (const auto* r : valid) {
        double x = 1.0 / std::abs(std::log(r->a));
        double y = r->lambda_N_a - r->lambda_N;
        sxy += x * y;
        sxx += x * x;
    }
    if (sxx <= 0) throw NumericalError("degenerate abscissae in fit");
    fit.slope = sxy / sxx;
    for (const auto* r : valid) {
        double x = 1.0 / std::abs(std::log(r->a));
        fit.fitted_a.push_back(r->a);
        fit.residuals.push_back((r->lambda_N_a - r->lambda_N) - fit.slope * x);
    }
    fit.relative_error = std::abs(fit.slope - predicted) /
                         std::max(std::abs(predicted), 1e-300);
    return fit;
}

// --------------------------------------------------------------- reports ---

namespace {

std::string fnum(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double bound_at(const SweepRecord& r, double tau) {
    for (const auto& [t, b] : r.upper_bounds)
        if (std::abs(t - tau) < 1e-12) return b;
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

void emit_csv(const SweepResult& res, std::ostream& os) {
    os << "a,lambda_N,lambda_N_a,u_N0,lambda_slit_nodal,lambda_slit_segment,"
          "upper_bound_tau_0.5,d_a,log_ratio\n";
    for (const auto& r : res.records) {
        os << fnum(r.a) << ',' << fnum(r.lambda_N) << ',' << fnum(r.lambda_N_a) << ','
           << fnum(r.u_N0) << ',' << fnum(r.lambda_slit_nodal) << ','
           << fnum(r.lambda_slit_segment) << ',' << fnum(bound_at(r, 0.5)) << ','
           << fnum(r.d_a) << ',' << fnum(r.log_ratio) << '\n';
    }
}

void emit_json(const SweepConfig& cfg, const SweepResult& res, std::ostream& os) {
    ojson j;
    ojson dom;
    dom["kind"] = cfg.domain.kind == DomainSpec::Kind::disk ? "disk" : "polygon";
    if (cfg.domain.kind == DomainSpec::Kind::disk) {
        dom["radius"] = cfg.domain.radius;
        dom["boundary_segments"] = cfg.domain.boundary_segments;
    } else {
        ojson poly = ojson::array();
        for (auto p : cfg.domain.polygon) poly.push_back({p.x, p.y});
        dom["polygon"] = poly;
    }
    j["config"] = {{"domain", dom},
                   {"N", cfg.N},
                   {"a_values", cfg.a_values},
                   {"tau_values", cfg.tau_values},
                   {"h_max", cfg.h_max},
                   {"pole_h_factor", cfg.pole_h_factor},
                   {"growth_ratio", cfg.growth_ratio},
                   {"refine", cfg.refine},
                   {"solver_tol", cfg.solver_tol},
                   {"quad_order", cfg.quad_order},
                   {"gap_threshold", cfg.gap_threshold},
                   {"origin_threshold", cfg.origin_threshold},
                   {"imag_ratio_threshold", cfg.imag_ratio_threshold},
                   {"stages", cfg.nodal_only ? "nodal" : "full"},
                   {"out_dir", cfg.out_dir}};

    ojson recs = ojson::array();
    for (const auto& r : res.records) {
        ojson jr;
        jr["a"] = r.a;
        jr["lambda_N"] = r.lambda_N;
        jr["lambda_N_a"] = r.lambda_N_a;
        jr["u_N0"] = r.u_N0;
        jr["gap_rel_lap"] = r.gap_rel_lap;
        jr["gap_rel_mag"] = r.gap_rel_mag;
        jr["align_residual"] = r.align_residual;
        jr["lambda_slit_nodal"] = r.lambda_slit_nodal;
        jr["lambda_slit_segment"] = r.lambda_slit_segment;
        ojson ub = ojson::array();
        for (const auto& [t, b] : r.upper_bounds) ub.push_back({{"tau", t}, {"bound", b}});
        jr["upper_bounds"] = ub;
        jr["d_a"] = r.d_a;
        jr["log_ratio"] = r.log_ratio;
        jr["single_arc"] = r.single_arc;
        jr["euler_residual"] = r.euler_residual;
        jr["pole_degrees"] = {r.pole_deg_minus, r.pole_deg_plus};
        jr["b1"] = r.b1;
        jr["mesh_vertices"] = r.mesh_vertices;
        jr["error"] = r.error;
        recs.push_back(jr);
    }
    j["records"] = recs;

    if (res.has_fit) {
        j["fit"] = {{"slope", res.fit.slope},
                    {"predicted", res.fit.predicted},
                    {"relative_error", res.fit.relative_error},
                    {"fitted_a", res.fit.fitted_a},
                    {"residuals", res.fit.residuals}};
    } else {
        j["fit"] = nullptr;
    }
    os << j.dump(2) << '\n';
}

SweepResult read_json(std::istream& is) {
    ojson j = ojson::parse(is);
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    auto jd = [&](const ojson& o, const char* key) -> double {
        if (!o.contains(key) || o[key].is_null()) return qnan;
        return o[key].get<double>();
    };
    SweepResult res;
    for (const auto& jr : j.at("records")) {
        SweepRecord r;
        r.a = jd(jr, "a");
        r.lambda_N = jd(jr, "lambda_N");
        r.lambda_N_a = jd(jr, "lambda_N_a");
        r.u_N0 = jd(jr, "u_N0");
        r.gap_rel_lap = jd(jr, "gap_rel_lap");
        r.gap_rel_mag = jd(jr, "gap_rel_mag");
        r.align_residual = jd(jr, "align_residual");
        r.lambda_slit_nodal = jd(jr, "lambda_slit_nodal");
        r.lambda_slit_segment = jd(jr, "lambda_slit_segment");
        for (const auto& ub : jr.at("upper_bounds"))
            r.upper_bounds.emplace_back(jd(ub, "tau"), jd(ub, "bound"));
        r.d_a = jd(jr, "d_a");
        r.log_ratio = jd(jr, "log_ratio");
        r.single_arc = jr.at("single_arc").get<bool>();
        r.euler_residual = jr.at("euler_residual").get<int>();
        r.pole_deg_minus = jr.at("pole_degrees")[0].get<int>();
        r.pole_deg_plus = jr.at("pole_degrees")[1].get<int>();
        r.b1 = jr.at("b1").get<int>();
        r.mesh_vertices = jr.at("mesh_vertices").get<int>();
        r.error = jr.at("error").get<std::string>();
        res.records.push_back(std::move(r));
    }
    if (!j.at("fit").is_null()) {
        const auto& jf = j["fit"];
        res.fit.slope = jd(jf, "slope");
        res.fit.predicted = jd(jf, "predicted");
        res.fit.relative_error = jd(jf, "relative_error");
        res.fit.fitted_a = jf.at("fitted_a").get<std::vector<double>>();
        res.fit.residuals = jf.at("residuals").get<std::vector<double>>();
        res.has_fit = true;
    }
    return res;
}

void emit_fit_svg(const SweepResult& res, const std::string& path) {
    if (!res.has_fit) throw PreconditionError("no fit available for the plot");
    std::ofstream os(path);
    if (!os) throw PreconditionError("cannot write " + path);

    const double W = 720, H = 480, ml = 70, mr = 24, mt = 24, mb = 56;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : res.records)
        if (std::isfinite(r.lambda_N) && std::isfinite(r.lambda_N_a) && r.a > 0)
            pts.emplace_back(1.0 / std::abs(std::log(r.a)), r.lambda_N_a - r.lambda_N);
    double xmax = 1e-9, ymax = 1e-9;
    for (auto [x, y] : pts) {
        xmax = std::max(xmax, x);
        ymax = std::max(ymax, y);
    }
    ymax = std::max({ymax, res.fit.slope * xmax, res.fit.predicted * xmax});
    xmax *= 1.08;
    ymax *= 1.12;
    auto X = [&](double x) { return ml + (W - ml - mr) * x / xmax; };
    auto Y = [&](double y) { return H - mb - (H - mt - mb) * y / ymax; };
    auto put = [&](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << put(X(0)) << "\" y1=\"" << put(Y(0)) << "\" x2=\"" << put(X(xmax))
       << "\" y2=\"" << put(Y(0)) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << put(X(0)) << "\" y1=\"" << put(Y(0)) << "\" x2=\"" << put(X(0))
       << "\" y2=\"" << put(Y(ymax)) << "\" stroke=\"black\"/>\n";
    os << "<line class=\"ref\" x1=\"" << put(X(0)) << "\" y1=\"" << put(Y(0)) << "\" x2=\""
       << put(X(xmax)) << "\" y2=\"" << put(Y(res.fit.slope * xmax))
       << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    os << "<line class=\"ref\" x1=\"" << put(X(0)) << "\" y1=\"" << put(Y(0)) << "\" x2=\""
       << put(X(xmax)) << "\" y2=\"" << put(Y(res.fit.predicted * xmax))
       << "\" stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    for (auto [x, y] : pts)
        os << "<circle cx=\"" << put(X(x)) << "\" cy=\"" << put(Y(y))
           << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    os << "<text x=\"" << put(W / 2) << "\" y=\"" << put(H - 14)
       << "\" text-anchor=\"middle\" font-size=\"14\">1 / |log a|</text>\n";
    os << "<text x=\"18\" y=\"" << put(H / 2)
       << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
       << put(H / 2) << ")\">eigenvalue shift</text>\n";
    os << "<text x=\"" << put(ml + 8) << "\" y=\"" << put(mt + 16)
       << "\" font-size=\"13\" fill=\"#d62728\">fit slope " << fnum(res.fit.slope)
       << "</text>\n";
    os << "<text x=\"" << put(ml + 8) << "\" y=\"" << put(mt + 34)
       << "\" font-size=\"13\" fill=\"#2ca02c\">predicted " << fnum(res.fit.predicted)
       << "</text>\n";
    os << "<text x=\"" << put(X(0)) << "\" y=\"" << put(Y(0) + 16)
       << "\" text-anchor=\"middle\" font-size=\"12\">0</text>\n";
    os << "<text x=\"" << put(X(xmax)) << "\" y=\"" << put(Y(0) + 16)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << fnum(xmax) << "</text>\n";
    os << "<text x=\"" << put(X(0) - 6) << "\" y=\"" << put(Y(ymax) + 4)
       << "\" text-anchor=\"end\" font-size=\"12\">" << fnum(ymax) << "</text>\n";
    os << "</svg>\n";
}

void emit_report(const SweepConfig& cfg, const SweepResult& res) {
    std::filesystem::create_directories(cfg.out_dir);
    auto open = [&](const std::string& name) {
        std::ofstream os(cfg.out_dir + "/" + name);
        if (!os) throw PreconditionError("cannot write " + cfg.out_dir + "/" + name);
        return os;
    };
    {
        auto os = open("sweep.csv");
        emit_csv(res, os);
    }
    {
        auto os = open("sweep.json");
        emit_json(cfg, res, os);
    }
    if (res.has_fit) emit_fit_svg(res, cfg.out_dir + "/fit.svg");

    auto outline = cfg.domain.boundary_polygon();
    for (const auto& r : res.records) {
        if (!r.has_graph) continue;
        char suf[32];
        std::snprintf(suf, sizeof suf, "%g", r.a);
        {
            auto os = open(std::string("nodal_") + suf + ".txt");
            write_graph(r.graph, os);
        }
        write_nodal_svg(r.graph, outline, cfg.out_dir + "/nodal_" + suf + ".svg");
    }
}

} // namespace ablab
