#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "rnsift/csvio.hpp"
#include "rnsift/kernels.hpp"
#include "rnsift/pgm.hpp"
#include "rnsift/power.hpp"
#include "rnsift/sift.hpp"
#include "rnsift/solver.hpp"
#include "rnsift/transient.hpp"
#include "rnsift/units.hpp"
#include "rnsift/version.hpp"

namespace fs = std::filesystem;
using namespace rnsift;

namespace {

std::string g_outdir;

std::string out_path(const std::string& name) {
    fs::create_directories(g_outdir);
    return (fs::path(g_outdir) / name).string();
}

Boundary parse_boundary(const std::string& s) {
    if (s == "mirror") return Boundary::mirror;
    if (s == "periodic") return Boundary::periodic;
    if (s == "truncate") return Boundary::truncate;
    throw CLI::ValidationError("boundary must be mirror, periodic or truncate");
}

Stencil2D parse_stencil(const std::string& s) {
    if (s == "axis") return Stencil2D::axis_only;
    if (s == "diag") return Stencil2D::diagonal_augmented;
    throw CLI::ValidationError("stencil must be axis or diag");
}

std::vector<double> parse_number_list(const std::string& text) {
    return parse_quantity_list(text, "");
}

void write_summary(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write summary: " + path);
    for (const auto& [k, v] : kv) out << k << ": " << v << "\n";
}

// ---------------------------------------------------------------- impulse --

struct ImpulseArgs {
    int dim = 1;
    int nodes = 45;
    int rows = 33, cols = 33;
    double lambda = 36.0;
    std::string boundary = "mirror";
    std::string stencil = "diag";
};

int cmd_impulse(const ImpulseArgs& a) {
    cli::RunManifest manifest("impulse");
    manifest.config("dim", a.dim);
    manifest.config("lambda", a.lambda);
    manifest.config("boundary", a.boundary);

    if (a.dim == 1) {
        manifest.config("nodes", a.nodes);
        const DeviationReport1D rep = deviation_report_1d(a.nodes, a.lambda, parse_boundary(a.boundary));
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < rep.node_count; ++i) {
            const auto k = static_cast<std::size_t>(i);
            rows.push_back({static_cast<double>(i), static_cast<double>(i - rep.center),
                            rep.response[k], rep.fit.fitted[k], rep.fit.per_node_error_pct[k],
                            static_cast<double>(rep.fit.in_support[k])});
        }
        const std::string csv = out_path("impulse_1d.csv");
        write_csv(csv, {"node", "offset", "response", "fitted_gaussian", "error_pct", "in_support"},
                  rows);
        const std::string sum = out_path("impulse_1d_summary.txt");
        write_summary(sum, {
            {"nodes", std::to_string(rep.node_count)},
            {"lambda", format_number(rep.lambda)},
            {"center", std::to_string(rep.center)},
            {"degenerate_identity", rep.fit.degenerate_identity ? "yes" : "no"},
            {"sigma_star", format_number(rep.fit.sigma_star)},
            {"mean_error_pct", format_number(rep.fit.mean_relative_error_pct)},
            {"max_error_pct", format_number(rep.fit.max_relative_error_pct)},
        });
        manifest.output(csv);
        manifest.output(sum);
        manifest.write(out_path("impulse_manifest.json"));
        std::cout << "mean deviation: " << format_number(rep.fit.mean_relative_error_pct)
                  << " %  (sigma* = " << format_number(rep.fit.sigma_star) << ")\n";
        return 0;
    }

    manifest.config("rows", a.rows);
    manifest.config("cols", a.cols);
    manifest.config("stencil", a.stencil);
    Smoother2DSpec spec{a.rows, a.cols, a.lambda, parse_stencil(a.stencil), parse_boundary(a.boundary)};
    const DeviationReport2D rep = deviation_report_2d(spec);
    std::vector<std::vector<double>> rows;
    for (const auto& ring : rep.rings)
        rows.push_back({static_cast<double>(ring.circle_index),
                        static_cast<double>(ring.chebyshev_distance), ring.mean_error_pct,
                        ring.mean_response});
    const std::string csv = out_path("impulse_2d_rings.csv");
    write_csv(csv, {"circle_index", "chebyshev_distance", "mean_error_pct", "mean_response"}, rows);
    const std::string sum = out_path("impulse_2d_summary.txt");
    write_summary(sum, {
        {"rows", std::to_string(a.rows)},
        {"cols", std::to_string(a.cols)},
        {"lambda", format_number(a.lambda)},
        {"stencil", a.stencil},
        {"degenerate_identity", rep.fit.degenerate_identity ? "yes" : "no"},
        {"sigma_star", format_number(rep.fit.sigma_star)},
        {"first_circle_error_pct", format_number(rep.rings.front().mean_error_pct)},
        {"mean_error_pct", format_number(rep.fit.mean_relative_error_pct)},
    });
    manifest.output(csv);
    manifest.output(sum);
    manifest.write(out_path("impulse_manifest.json"));
    std::cout << "first circle deviation: " << format_number(rep.rings.front().mean_error_pct)
              << " %\n";
    return 0;
}

// ----------------------------------------------------------------- filter --

int cmd_filter(const std::string& input, const std::string& backend, double lambda, double sigma,
               const std::string& boundary, const std::string& stencil,
               const std::string& output) {
    const Image img = read_pgm(input);
    Image out(1, 1);
    double sigma_used = 0.0;
    if (backend == "network") {
        Smoother2DSpec spec{img.height(), img.width(), lambda, parse_stencil(stencil),
                            parse_boundary(boundary)};
        out = filter_image(img, spec);
    } else if (backend == "ideal") {
        // same behavior, ideal smoothing: width given or matched to lambda
        sigma_used = sigma > 0.0 ? sigma : (lambda > 0.0 ? sigma_for_lambda(lambda) : 0.0);
        out = sigma_used > 0.0 ? gaussian_blur(img, sigma_used, parse_boundary(boundary))
                               : img; // zero width: identity, mirroring the lambda = 0 rule
    } else {
        throw CLI::ValidationError("--backend must be ideal or network");
    }
    const std::string path = output.empty() ? out_path("filtered.pgm") : out_path(output);
    write_pgm(out, path);

    cli::RunManifest manifest("filter");
    manifest.config("backend", backend);
    manifest.config("lambda", lambda);
    manifest.config("sigma", sigma_used);
    manifest.config("boundary", boundary);
    manifest.config("stencil", stencil);
    manifest.config("rows", img.height());
    manifest.config("cols", img.width());
    manifest.input(input);
    manifest.output(path);
    manifest.write(out_path("filter_manifest.json"));
    std::cout << "filtered " << img.width() << "x" << img.height() << " -> " << path << "\n";
    return 0;
}

// ------------------------------------------------------- pyramid and sift --

PyramidConfig pyramid_config_from(const std::string& backend, const std::string& lambdas,
                                  const std::string& sigmas, bool match_sigmas,
                                  const std::string& boundary, const std::string& stencil) {
    PyramidConfig cfg;
    cfg.backend = backend == "network" ? FilterBackend::resistor_network
                                       : FilterBackend::ideal_gaussian;
    if (backend != "network" && backend != "ideal")
        throw CLI::ValidationError("--backend must be ideal or network");
    if (!lambdas.empty()) cfg.lambdas = parse_number_list(lambdas);
    cfg.boundary = parse_boundary(boundary);
    cfg.stencil = parse_stencil(stencil);
    if (!sigmas.empty()) cfg.sigmas = parse_number_list(sigmas);
    if (match_sigmas) {
        cfg.sigmas.clear();
        for (double lam : cfg.lambdas) cfg.sigmas.push_back(sigma_for_lambda(lam));
    }
    cfg.scales_per_octave = static_cast<int>(
        cfg.backend == FilterBackend::resistor_network ? cfg.lambdas.size()
        : cfg.sigmas.empty() ? 6
                             : cfg.sigmas.size());
    return cfg;
}

void record_pyramid_config(cli::RunManifest& m, const PyramidConfig& cfg) {
    m.config("resolved_backend", to_string(cfg.backend));
    m.config("resolved_octaves", cfg.octaves);
    m.config("resolved_scales_per_octave", cfg.scales_per_octave);
    m.config("resolved_boundary", to_string(cfg.boundary));
    m.config("resolved_stencil", to_string(cfg.stencil));
    m.config("resolved_solve_tolerance", cfg.solve_tolerance);
    if (cfg.backend == FilterBackend::resistor_network)
        m.config("resolved_lambdas", cfg.lambdas);
    else
        m.config("resolved_sigmas", cfg.resolved_sigmas());
}

int cmd_pyramid(const std::string& input, const PyramidConfig& cfg, cli::RunManifest manifest) {
    const Image img = read_pgm(input);
    record_pyramid_config(manifest, cfg);
    const GaussianPyramid pyr = build_pyramid(img, cfg);
    manifest.input(input);
    int count = 0;
    for (std::size_t o = 0; o < pyr.octaves.size(); ++o) {
        for (std::size_t s = 0; s < pyr.octaves[o].size(); ++s) {
            const std::string name =
                "pyr_o" + std::to_string(o) + "_s" + std::to_string(s) + ".pgm";
            const std::string path = out_path(name);
            write_pgm(pyr.octaves[o][s], path);
            manifest.output(path);
            ++count;
        }
    }
    manifest.write(out_path("pyramid_manifest.json"));
    std::cout << "wrote " << count << " pyramid images\n";
    return 0;
}

int cmd_sift(const std::string& input, const PyramidConfig& pcfg, double contrast,
             cli::RunManifest manifest) {
    const Image img = read_pgm(input);
    SiftConfig cfg;
    cfg.pyramid = pcfg;
    cfg.contrast_threshold = contrast;
    record_pyramid_config(manifest, pcfg);
    manifest.config("resolved_orientation_bins", cfg.orientation.bins);
    manifest.config("resolved_orientation_radius", cfg.orientation.radius);
    manifest.config("resolved_orientation_sigma_weight", cfg.orientation.sigma_weight);
    manifest.config("resolved_orientation_peak_ratio", cfg.orientation.peak_ratio);
    manifest.config("resolved_descriptor_window", cfg.descriptor.window);
    manifest.config("resolved_descriptor_clamp", cfg.descriptor.clamp);
    manifest.config("resolved_gradient_source_offset", cfg.gradient_source_offset);
    const SiftResult res = run_sift(img, cfg);
    manifest.config("resolved_contrast_threshold", res.contrast_threshold_used);

    std::vector<std::vector<double>> krows;
    for (std::size_t i = 0; i < res.keypoints.size(); ++i) {
        const Keypoint& kp = res.keypoints[i];
        const double scale_factor = static_cast<double>(1 << kp.octave);
        krows.push_back({static_cast<double>(i), static_cast<double>(kp.octave),
                         static_cast<double>(kp.scale), static_cast<double>(kp.x),
                         static_cast<double>(kp.y), kp.x * scale_factor, kp.y * scale_factor,
                         kp.is_maximum ? 1.0 : -1.0, kp.theta, kp.value});
    }
    const std::string kcsv = out_path("keypoints.csv");
    write_csv(kcsv,
              {"index", "octave", "scale", "x", "y", "base_x", "base_y", "polarity", "theta",
               "value"},
              krows);

    std::vector<std::vector<double>> drows;
    for (const Descriptor& d : res.descriptors) {
        std::vector<double> row;
        row.reserve(129);
        row.push_back(static_cast<double>(d.keypoint));
        row.insert(row.end(), d.values.begin(), d.values.end());
        drows.push_back(std::move(row));
    }
    std::vector<std::string> dheader{"keypoint"};
    for (int i = 0; i < 128; ++i) dheader.push_back("d" + std::to_string(i));
    const std::string dcsv = out_path("descriptors.csv");
    write_csv(dcsv, dheader, drows);

    const double total = res.timings.total_s;
    auto pct = [&](double t) { return format_number(total > 0 ? 100.0 * t / total : 0.0); };
    const std::string sum = out_path("sift_summary.txt");
    write_summary(sum, {
        {"backend", to_string(pcfg.backend)},
        {"keypoints", std::to_string(res.keypoints.size())},
        {"descriptor_matrix", "128x" + std::to_string(res.descriptors.size())},
        {"raw_extrema", std::to_string(res.raw_keypoint_count)},
        {"contrast_threshold", format_number(res.contrast_threshold_used)},
        {"dropped_orientation_border", std::to_string(res.drops.orientation_border)},
        {"dropped_orientation_zero_gradient", std::to_string(res.drops.orientation_zero_gradient)},
        {"dropped_descriptor_border", std::to_string(res.drops.descriptor_border)},
        {"dropped_descriptor_zero_gradient", std::to_string(res.drops.descriptor_zero_gradient)},
        {"stage_pyramid_s", format_number(res.timings.pyramid_s)},
        {"stage_pyramid_pct", pct(res.timings.pyramid_s)},
        {"stage_dog_s", format_number(res.timings.dog_s)},
        {"stage_dog_pct", pct(res.timings.dog_s)},
        {"stage_detection_s", format_number(res.timings.detection_s)},
        {"stage_detection_pct", pct(res.timings.detection_s)},
        {"stage_orientation_s", format_number(res.timings.orientation_s)},
        {"stage_orientation_pct", pct(res.timings.orientation_s)},
        {"stage_descriptor_s", format_number(res.timings.descriptor_s)},
        {"stage_descriptor_pct", pct(res.timings.descriptor_s)},
        {"total_s", format_number(total)},
    });

    manifest.input(input);
    manifest.output(kcsv);
    manifest.output(dcsv);
    manifest.output(sum);
    manifest.write(out_path("sift_manifest.json"));
    std::cout << "keypoints: " << res.keypoints.size() << "  descriptor matrix: 128x"
              << res.descriptors.size() << "\n";
    return 0;
}

// -------------------------------------------------------------- transient --

int cmd_transient(const std::string& c_list, int nodes, double lambda, const std::string& r1_text,
                  const std::string& integrator) {
    const std::vector<double> cs = parse_quantity_list(c_list, "F");
    for (double c : cs)
        if (!(c > 0.0)) throw CLI::ValidationError("capacitances must be positive");
    const double r1 = parse_quantity(r1_text, "ohm");

    const ConductanceSet g = conductances_from_lambda(lambda, r1);
    const LinearOperator op = assemble_1d({nodes, lambda, Boundary::mirror});
    std::vector<double> v(static_cast<std::size_t>(nodes), 0.0);
    v[static_cast<std::size_t>(nodes / 2)] = 1.0;

    TransientConfig cfg;
    cfg.integrator = integrator == "scale" ? Integrator::exponential_scaling
                                           : Integrator::implicit_trapezoidal;
    const auto rows = settle_time_vs_capacitance(op, v, g, cs, cfg);

    // published settling times for the same capacitance sweep, for side-by-side reading
    auto reference_ns = [](double c_pf) {
        if (std::abs(c_pf - 0.1) < 1e-9) return 0.479;
        if (std::abs(c_pf - 1.0) < 1e-9) return 4.77;
        if (std::abs(c_pf - 10.0) < 1e-9) return 36.18;
        if (std::abs(c_pf - 100.0) < 1e-9) return 521.37;
        return -1.0;
    };

    const std::string csv = out_path("settle_times.csv");
    {
        std::ofstream out(csv);
        out << "capacitance_pf,settle_ns,reference_ns\n";
        for (const auto& row : rows) {
            const double c_pf = row.capacitance_f * 1e12;
            const double ref = reference_ns(c_pf);
            out << format_number(c_pf) << "," << format_number(row.settle_time_s * 1e9) << ",";
            if (ref > 0) out << format_number(ref);
            out << "\n";
        }
    }

    // distance traces per capacitance
    cli::RunManifest manifest("transient");
    manifest.config("capacitances_f", cs);
    manifest.config("nodes", nodes);
    manifest.config("lambda", lambda);
    manifest.config("r1_ohms", r1);
    manifest.config("integrator", integrator);
    manifest.config("resolved_settle_fraction", cfg.settle_fraction);
    manifest.config("resolved_step_fraction", cfg.step_fraction);
    manifest.config("resolved_boundary", "mirror");
    manifest.config("resolved_input", "unit impulse at the center node");
    manifest.output(csv);
    if (cfg.integrator == Integrator::implicit_trapezoidal) {
        for (std::size_t i = 0; i < cs.size(); ++i) {
            TransientConfig one = cfg;
            one.stray_capacitance_f = cs[i];
            const TransientTrace tr = simulate(op, v, g, one);
            std::vector<std::vector<double>> trows;
            const std::size_t stride = std::max<std::size_t>(1, tr.times_s.size() / 2000);
            for (std::size_t k = 0; k < tr.times_s.size(); k += stride)
                trows.push_back({tr.times_s[k], tr.distance[k]});
            const std::string tpath = out_path("transient_trace_" + std::to_string(i) + ".csv");
            write_csv(tpath, {"time_s", "distance"}, trows);
            manifest.output(tpath);
        }
    }
    manifest.write(out_path("transient_manifest.json"));

    for (const auto& row : rows)
        std::cout << format_number(row.capacitance_f * 1e12) << " pF -> "
                  << format_number(row.settle_time_s * 1e9) << " ns\n";
    return 0;
}

// ------------------------------------------------------------------ power --

int cmd_power(const std::string& input, const std::string& lambdas_text,
              const std::string& settle_text, const std::string& full_scale_text,
              const std::string& r1_text) {
    const Image img = read_pgm(input);
    const std::vector<double> lambdas =
        lambdas_text.empty() ? std::vector<double>{4, 20, 40, 80, 100, 120}
                             : parse_number_list(lambdas_text);
    const double settle = parse_quantity(settle_text, "s");
    const double full_scale = parse_quantity(full_scale_text, "V");
    const double r1 = parse_quantity(r1_text, "ohm");

    const PyramidEnergyReport rep = pyramid_energy(img, lambdas, settle, full_scale, r1);

    std::vector<std::vector<double>> rows;
    for (const auto& lvl : rep.levels)
        rows.push_back({lvl.lambda, static_cast<double>(lvl.octave),
                        static_cast<double>(lvl.pixels), lvl.power_w, lvl.energy_j,
                        lvl.report.per_pixel_w, lvl.report.negative_branch_w,
                        lvl.report.conservation_rel_error});
    const std::string csv = out_path("power_levels.csv");
    write_csv(csv,
              {"lambda", "octave", "pixels", "power_w", "energy_j", "per_pixel_w",
               "active_element_w", "conservation_rel_error"},
              rows);

    const std::string sum = out_path("power_summary.txt");
    write_summary(sum, {
        {"pixels_per_lambda", std::to_string(rep.pixels_per_lambda)},
        {"settle_time_s", format_number(rep.settle_time_s)},
        {"full_scale_volts", format_number(rep.full_scale_volts)},
        {"r1_ohms", format_number(rep.r1_ohms)},
        {"total_energy_j", format_number(rep.total_energy_j)},
        {"total_energy_pj", format_number(rep.total_energy_j * 1e12)},
        {"reference_energy_pj", format_number(PyramidEnergyReport::reference_energy_j * 1e12)},
        {"ratio_to_reference", format_number(rep.ratio_to_reference())},
    });

    cli::RunManifest manifest("power");
    manifest.config("lambdas", lambdas);
    manifest.config("settle_time_s", settle);
    manifest.config("full_scale_volts", full_scale);
    manifest.config("r1_ohms", r1);
    manifest.config("resolved_octaves", 3);
    manifest.config("resolved_stencil", "diagonal_augmented");
    manifest.config("resolved_boundary", "mirror");
    manifest.config("resolved_solve_tolerance", 1e-12);
    manifest.input(input);
    manifest.output(csv);
    manifest.output(sum);
    manifest.write(out_path("power_manifest.json"));

    std::cout << "pixels per lambda: " << rep.pixels_per_lambda << "\n"
              << "pyramid energy: " << format_number(rep.total_energy_j * 1e12)
              << " pJ (reference 669.6 pJ, ratio "
              << format_number(rep.ratio_to_reference()) << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"active resistor-network Gaussian filter simulator with a SIFT pipeline"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    const char* env_outdir = std::getenv("RNSIFT_OUTDIR");
    g_outdir = env_outdir ? env_outdir : ".";
    app.add_option("--outdir", g_outdir, "output directory (default: $RNSIFT_OUTDIR or .)");

    // impulse
    ImpulseArgs ia;
    auto* imp = app.add_subcommand("impulse", "impulse-response deviation experiments");
    imp->add_option("--dim", ia.dim, "1 or 2")->check(CLI::IsMember({1, 2}));
    imp->add_option("--nodes", ia.nodes, "1-D node count");
    imp->add_option("--rows", ia.rows, "2-D rows");
    imp->add_option("--cols", ia.cols, "2-D cols");
    imp->add_option("--lambda", ia.lambda, "penalty weight");
    imp->add_option("--boundary", ia.boundary, "mirror|periodic|truncate");
    imp->add_option("--stencil", ia.stencil, "diag|axis (2-D)");

    // filter
    std::string f_input, f_out, f_backend = "network", f_boundary = "mirror", f_stencil = "diag";
    double f_lambda = 36.0, f_sigma = 0.0;
    auto* flt = app.add_subcommand("filter", "smooth one image (network or ideal backend)");
    flt->add_option("input", f_input, "input PGM")->required();
    flt->add_option("--backend", f_backend, "network|ideal");
    flt->add_option("--lambda", f_lambda, "penalty weight");
    flt->add_option("--sigma", f_sigma, "ideal width (default: matched to lambda)");
    flt->add_option("--boundary", f_boundary, "mirror|periodic|truncate");
    flt->add_option("--stencil", f_stencil, "diag|axis");
    flt->add_option("--out", f_out, "output PGM name");

    // pyramid
    std::string p_input, p_backend = "ideal", p_lambdas, p_sigmas, p_boundary = "mirror",
                p_stencil = "diag";
    bool p_match = false;
    auto* pyr = app.add_subcommand("pyramid", "build and write the Gaussian pyramid");
    pyr->add_option("input", p_input, "input PGM")->required();
    pyr->add_option("--backend", p_backend, "ideal|network");
    pyr->add_option("--lambdas", p_lambdas, "network weights, comma separated");
    pyr->add_option("--sigmas", p_sigmas, "ideal widths, comma separated");
    pyr->add_flag("--sigmas-from-lambdas", p_match, "derive ideal widths from the lambda list");
    pyr->add_option("--boundary", p_boundary, "mirror|periodic|truncate");
    pyr->add_option("--stencil", p_stencil, "diag|axis");

    // sift
    std::string s_input, s_backend = "ideal", s_lambdas, s_sigmas, s_boundary = "mirror",
                s_stencil = "diag";
    bool s_match = false;
    double s_contrast = -1.0;
    auto* sft = app.add_subcommand("sift", "full feature extraction");
    sft->add_option("input", s_input, "input PGM")->required();
    sft->add_option("--backend", s_backend, "ideal|network");
    sft->add_option("--lambdas", s_lambdas, "network weights, comma separated");
    sft->add_option("--sigmas", s_sigmas, "ideal widths, comma separated");
    sft->add_flag("--sigmas-from-lambdas", s_match, "derive ideal widths from the lambda list");
    sft->add_option("--contrast", s_contrast, "contrast threshold (default 0.5% of range)");
    sft->add_option("--boundary", s_boundary, "mirror|periodic|truncate");
    sft->add_option("--stencil", s_stencil, "diag|axis");

    // transient
    std::string t_c = "0.1pF,1pF,10pF,100pF", t_r1 = "250ohm", t_integrator = "trapezoidal";
    int t_nodes = 45;
    double t_lambda = 36.0;
    auto* tr = app.add_subcommand("transient", "settling time vs stray capacitance");
    tr->add_option("--c", t_c, "capacitance list, unit suffixes allowed (fF, pF)");
    tr->add_option("--nodes", t_nodes, "1-D node count");
    tr->add_option("--lambda", t_lambda, "penalty weight");
    tr->add_option("--r1", t_r1, "reference resistor");
    tr->add_option("--integrator", t_integrator, "trapezoidal|scale");

    // power
    std::string w_input, w_lambdas, w_settle = "1ns", w_full = "255mV", w_r1 = "250ohm";
    auto* pw = app.add_subcommand("power", "steady power and pyramid energy");
    pw->add_option("input", w_input, "input PGM (256x256 for the reference configuration)")
        ->required();
    pw->add_option("--lambdas", w_lambdas, "weights, comma separated");
    pw->add_option("--settle", w_settle, "settle time, e.g. 1ns");
    pw->add_option("--full-scale", w_full, "voltage of luminance 255, e.g. 255mV");
    pw->add_option("--r1", w_r1, "reference resistor");

    CLI11_PARSE(app, argc, argv);

    try {
        if (imp->parsed()) return cmd_impulse(ia);
        if (flt->parsed())
            return cmd_filter(f_input, f_backend, f_lambda, f_sigma, f_boundary, f_stencil, f_out);
        if (pyr->parsed()) {
            cli::RunManifest m("pyramid");
            m.config("backend", p_backend);
            m.config("lambdas", p_lambdas);
            m.config("sigmas", p_sigmas);
            m.config("sigmas_from_lambdas", p_match);
            m.config("boundary", p_boundary);
            m.config("stencil", p_stencil);
            return cmd_pyramid(p_input,
                               pyramid_config_from(p_backend, p_lambdas, p_sigmas, p_match,
                                                   p_boundary, p_stencil),
                               std::move(m));
        }
        if (sft->parsed()) {
            cli::RunManifest m("sift");
            m.config("backend", s_backend);
            m.config("lambdas", s_lambdas);
            m.config("sigmas", s_sigmas);
            m.config("sigmas_from_lambdas", s_match);
            m.config("contrast", s_contrast);
            m.config("boundary", s_boundary);
            m.config("stencil", s_stencil);
            return cmd_sift(s_input,
                            pyramid_config_from(s_backend, s_lambdas, s_sigmas, s_match,
                                                s_boundary, s_stencil),
                            s_contrast, std::move(m));
        }
        if (tr->parsed()) return cmd_transient(t_c, t_nodes, t_lambda, t_r1, t_integrator);
        if (pw->parsed()) return cmd_power(w_input, w_lambdas, w_settle, w_full, w_r1);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
