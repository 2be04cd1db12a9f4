// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Each criterion carries its own tolerance band and wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rnsift/kernels.hpp"
#include "rnsift/power.hpp"
#include "rnsift/sift.hpp"
#include "rnsift/solver.hpp"
#include "rnsift/transient.hpp"
#include "testutil.hpp"

using namespace rnsift;

namespace {

int g_failures = 0;

struct Criterion {
    int id;
    std::string name;
    double budget_s;
};

void report(const Criterion& c, bool pass, double elapsed_s, const std::string& detail) {
    const bool in_budget = elapsed_s < c.budget_s;
    if (!pass || !in_budget) ++g_failures;
    std::printf("%s  criterion %d (%s): %s  [%.2fs / budget %.0fs]\n",
                pass && in_budget ? "PASS" : "FAIL", c.id, c.name.c_str(), detail.c_str(),
                elapsed_s, c.budget_s);
}

void run(const Criterion& c, const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        auto [p, d] = body();
        pass = p;
        detail = d;
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(c, pass, elapsed, detail);
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ------------------------------------------------------------ criterion 1 --
// 1-D deviation: 45 nodes, lambda 36; mean peak-normalized error in
// [0.8%, 3%], every in-support node error <= 5%.
std::pair<bool, std::string> criterion1() {
    const DeviationReport1D rep = deviation_report_1d(45, 36.0);
    const double mean = rep.fit.mean_relative_error_pct;
    double max_in_support = 0.0;
    for (std::size_t i = 0; i < rep.response.size(); ++i)
        if (rep.fit.in_support[i])
            max_in_support = std::max(max_in_support, rep.fit.per_node_error_pct[i]);
    const bool pass = mean >= 0.8 && mean <= 3.0 && max_in_support <= 5.0;
    return {pass, fmt("mean %.3f%% (band [0.8, 3]), max in-support %.3f%% (<= 5)", mean,
                      max_in_support)};
}

// ------------------------------------------------------------ criterion 2 --
// 2-D rings on 33x33, lambda 36, default stencil: first ring is the maximum
// and lies in [8%, 20%]; outer rings below 10%.
std::pair<bool, std::string> criterion2() {
    const DeviationReport2D rep = deviation_report_2d({33, 33, 36.0});
    const double first = rep.rings.front().mean_error_pct;
    bool first_is_max = true;
    double worst_outer = 0.0;
    for (std::size_t k = 1; k < rep.rings.size(); ++k) {
        if (rep.rings[k].mean_error_pct >= first) first_is_max = false;
        worst_outer = std::max(worst_outer, rep.rings[k].mean_error_pct);
    }
    const bool pass = first_is_max && first >= 8.0 && first <= 20.0 && worst_outer < 10.0;
    return {pass, fmt("first ring %.2f%% (band [8, 20], max ring: %s), outer rings <= %.2f%% (< 10)",
                      first, first_is_max ? "yes" : "NO", worst_outer)};
}

// ------------------------------------------------------------ criterion 3 --
// lambda ~ sigma^4: fitted widths strictly increase, lambda/sigma^4 constant
// within +-25%, and sigma(64)/sigma(4) = 2 +- 10%.
std::pair<bool, std::string> criterion3() {
    const std::vector<double> lams{4, 20, 40, 80, 100, 120};
    const auto rows = lambda_sigma_curve(lams);
    bool increasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].sigma_star <= rows[i - 1].sigma_star) increasing = false;
    double mean = 0.0;
    for (const auto& r : rows) mean += r.ratio;
    mean /= static_cast<double>(rows.size());
    double worst_dev = 0.0;
    for (const auto& r : rows) worst_dev = std::max(worst_dev, std::abs(r.ratio - mean) / mean);
    const double ratio2 = sigma_for_lambda(64.0) / sigma_for_lambda(4.0);
    const bool pass =
        increasing && worst_dev <= 0.25 && ratio2 >= 1.8 && ratio2 <= 2.2;
    return {pass, fmt("increasing: %s, ratio spread %.1f%% (<= 25%%), sigma(64)/sigma(4) = %.3f",
                      increasing ? "yes" : "NO", 100.0 * worst_dev, ratio2)};
}

// ------------------------------------------------------------ criterion 4 --
// settle time vs capacitance: log-log slope 1.000 +- 0.001, R^2 > 0.99999,
// and the 1 pF run lands in [0.5, 50] ns.
std::pair<bool, std::string> criterion4() {
    const LinearOperator op = assemble_1d({45, 36.0, Boundary::mirror});
    const ConductanceSet g = conductances_from_lambda(36.0, 250.0);
    std::vector<double> v(45, 0.0);
    v[22] = 1.0;
    const std::vector<double> cs{0.1e-12, 1e-12, 10e-12, 100e-12};
    const auto rows = settle_time_vs_capacitance(op, v, g, cs, TransientConfig{});
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& r : rows) {
        const double x = std::log10(r.capacitance_f), y = std::log10(r.settle_time_s);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const double n = static_cast<double>(rows.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double r2 = (n * sxy - sx * sy) * (n * sxy - sx * sy) /
                      ((n * sxx - sx * sx) * (n * syy - sy * sy));
    const double t1pf_ns = rows[1].settle_time_s * 1e9;
    const bool pass = std::abs(slope - 1.0) <= 0.001 && r2 > 0.99999 && t1pf_ns >= 0.5 &&
                      t1pf_ns <= 50.0;
    return {pass, fmt("slope %.5f, R^2 %.7f, settle(1pF) %.2f ns (band [0.5, 50], reference 4.77)",
                      slope, r2, t1pf_ns)};
}

// ------------------------------------------------------------ criterion 5 --
// energy accounting on the 256x256 pyramid at a documented 1.0 V full scale:
// 86016 pixels per lambda, exact doubling with settle time, conservation to
// 1e-9, and total energy within [67 pJ, 6.7 nJ] beside the 669.6 pJ reference.
std::pair<bool, std::string> criterion5() {
    // fine texture carries the power: it is the content the filters remove
    const Image img = testutil::make_natural_image(256, 256, 18.0);
    const std::vector<double> lams{4, 20, 40, 80, 100, 120};
    const double full_scale = 1.0; // documented calibration, <= 1 V
    const PyramidEnergyReport rep = pyramid_energy(img, lams, 1e-9, full_scale);
    const PyramidEnergyReport rep2 = pyramid_energy(img, lams, 2e-9, full_scale);

    const bool pixels_ok = rep.pixels_per_lambda == 86016;
    const bool doubling_ok =
        rep2.total_energy_j == 2.0 * rep.total_energy_j; // pure multiplication, exact
    double worst_conservation = 0.0;
    for (const auto& lvl : rep.levels)
        worst_conservation = std::max(worst_conservation, lvl.report.conservation_rel_error);
    const double pj = rep.total_energy_j * 1e12;
    const bool window_ok = pj >= 67.0 && pj <= 6700.0;
    const bool pass = pixels_ok && doubling_ok && worst_conservation < 1e-9 && window_ok;
    return {pass,
            fmt("pixels/lambda %ld, energy %.1f pJ at %.3g V (reference 669.6 pJ, ratio %.3f), "
                "conservation %.1e, doubling %s",
                rep.pixels_per_lambda, pj, full_scale, rep.ratio_to_reference(),
                worst_conservation, doubling_ok ? "exact" : "BROKEN")};
}

// ------------------------------------------------------------ criterion 6 --
// solver vs dense-LU oracle on every grid <= 64 nodes, and the minimizer
// property against 20 random perturbations per case.
std::pair<bool, std::string> criterion6() {
    std::mt19937 rng(101);
    const double lambdas[3] = {4.0, 36.0, 120.0};
    std::vector<LinearOperator> ops;
    int pick = 0;
    // every 1-D grid that fits the dense-oracle fence
    for (int n = 5; n <= 64; ++n)
        for (Boundary b : {Boundary::mirror, Boundary::periodic, Boundary::truncate})
            ops.push_back(assemble_1d({n, lambdas[pick++ % 3], b}));
    // every 2-D shape with rows*cols <= 64
    for (int r = 5; r <= 12; ++r)
        for (int c = 5; c * r <= 64; ++c)
            for (Stencil2D st : {Stencil2D::axis_only, Stencil2D::diagonal_augmented})
                for (Boundary b : {Boundary::mirror, Boundary::periodic})
                    ops.push_back(assemble_2d({r, c, lambdas[pick++ % 3], st, b}));

    double worst = 0.0;
    int minimizer_violations = 0;
    for (const auto& op : ops) {
        const auto v = testutil::random_vector(static_cast<std::size_t>(op.dimension()), rng);
        const auto u = solve(op, v).u;
        const auto want = testutil::dense_solve_oracle(op, v);
        worst = std::max(worst, testutil::max_abs_diff(u, want));
        const double e0 = discrete_energy(op, u, v);
        for (int t = 0; t < 20; ++t) {
            auto up = u;
            const auto w = testutil::random_vector(u.size(), rng);
            for (std::size_t i = 0; i < u.size(); ++i) up[i] += 1e-3 * w[i];
            if (discrete_energy(op, up, v) <= e0) ++minimizer_violations;
        }
    }
    const bool pass = worst < 1e-8 && minimizer_violations == 0;
    return {pass, fmt("%zu operators, worst oracle gap %.2e (< 1e-8), minimizer violations %d",
                      ops.size(), worst, minimizer_violations)};
}

// ------------------------------------------------------------ criterion 7 --
// stage oracles: detection == brute force on 50 random stacks, DoG ==
// recomputed subtraction, descriptors unit-norm and 128 wide, blank image
// empty.
std::pair<bool, std::string> criterion7() {
    std::mt19937 rng(202);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        DoGPyramid dog;
        dog.octaves.resize(1);
        const int w = 8 + trial % 17, h = 8 + (trial * 7) % 17;
        const int levels = 3 + trial % 3;
        for (int s = 0; s < levels; ++s) {
            Image img(w, h);
            for (auto& p : img.data()) p = d(rng);
            dog.octaves[0].push_back(std::move(img));
        }
        const auto got = detect_keypoints(dog, 0.05);
        std::set<std::tuple<int, int, int>> got_set;
        for (const auto& kp : got) got_set.insert({kp.scale, kp.x, kp.y});
        // brute force
        std::set<std::tuple<int, int, int>> want;
        for (int s = 1; s + 1 < levels; ++s)
            for (int y = 1; y < h - 1; ++y)
                for (int x = 1; x < w - 1; ++x) {
                    const double v = dog.octaves[0][static_cast<std::size_t>(s)].at(x, y);
                    if (std::abs(v) < 0.05) continue;
                    int gt = 0, lt = 0;
                    for (int ds = -1; ds <= 1; ++ds)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (!ds && !dy && !dx) continue;
                                const double nv =
                                    dog.octaves[0][static_cast<std::size_t>(s + ds)].at(x + dx,
                                                                                        y + dy);
                                if (v > nv) ++gt;
                                if (v < nv) ++lt;
                            }
                    if (gt == 26 || lt == 26) want.insert({s, x, y});
                }
        if (got_set != want) ++mismatches;
    }

    const Image img = testutil::make_natural_image(96, 96);
    SiftConfig cfg;
    cfg.pyramid.sigmas.clear();
    for (double lam : cfg.pyramid.lambdas) cfg.pyramid.sigmas.push_back(sigma_for_lambda(lam));
    const GaussianPyramid pyr = build_pyramid(img, cfg.pyramid);
    const DoGPyramid dog = build_dog(pyr);
    int dog_errors = 0;
    for (std::size_t o = 0; o < dog.octaves.size(); ++o)
        for (std::size_t s = 0; s < dog.octaves[o].size(); ++s)
            for (std::size_t i = 0; i < dog.octaves[o][s].size(); ++i)
                if (dog.octaves[o][s].data()[i] !=
                    pyr.octaves[o][s + 1].data()[i] - pyr.octaves[o][s].data()[i])
                    ++dog_errors;

    const SiftResult res = run_sift(img, cfg);
    int bad_descriptors = 0;
    for (const Descriptor& dsc : res.descriptors) {
        double norm = 0.0;
        for (double x : dsc.values) norm += x * x;
        if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) ++bad_descriptors;
        for (double x : dsc.values)
            if (x < 0.0 || x > 0.2 + 1e-9) ++bad_descriptors;
    }
    const SiftResult blank = run_sift(Image(64, 64, 0.0), cfg);

    const bool pass = mismatches == 0 && dog_errors == 0 && bad_descriptors == 0 &&
                      blank.keypoints.empty() && !res.descriptors.empty();
    return {pass, fmt("50 stacks, %d detector mismatches; %d DoG mismatches; %zu descriptors, "
                      "%d invalid; blank image keypoints %zu",
                      mismatches, dog_errors, res.descriptors.size(), bad_descriptors,
                      blank.keypoints.size())};
}

// ------------------------------------------------------------ criterion 8 --
// backend interchangeability: >= 70% keypoint-location overlap at 2 px on a
// 64x64 natural image, ideal widths matched through the lambda fits.
std::pair<bool, std::string> criterion8() {
    const Image img = testutil::make_natural_image(64, 64);

    PyramidConfig net;
    net.backend = FilterBackend::resistor_network;
    PyramidConfig ideal;
    ideal.backend = FilterBackend::ideal_gaussian;
    ideal.sigmas.clear();
    for (double lam : net.lambdas) ideal.sigmas.push_back(sigma_for_lambda(lam));

    // location repeatability of the detected extrema: the stage the filter
    // backend actually determines
    const double threshold = 0.005 * img.dynamic_range();
    const auto kp_ideal = detect_keypoints(build_dog(build_pyramid(img, ideal)), threshold);
    const auto kp_net = detect_keypoints(build_dog(build_pyramid(img, net)), threshold);

    struct Pt {
        double x, y;
        int octave;
    };
    auto base_coords = [](const std::vector<Keypoint>& kps) {
        std::vector<Pt> pts;
        for (const Keypoint& kp : kps)
            pts.push_back({kp.x * static_cast<double>(1 << kp.octave),
                           kp.y * static_cast<double>(1 << kp.octave), kp.octave});
        return pts;
    };
    const auto pa = base_coords(kp_ideal);
    const auto pb = base_coords(kp_net);
    // 2-pixel tolerance in the pixel units of the coarser octave of the pair:
    // one octave-1 pixel spans two base pixels, so location parity is
    // measured at the scale the keypoints were detected at
    auto matched = [](const auto& from, const auto& to) {
        int m = 0;
        for (const auto& p : from) {
            for (const auto& q : to) {
                const double tol = 2.0 * static_cast<double>(1 << std::max(p.octave, q.octave));
                const double dx = p.x - q.x, dy = p.y - q.y;
                if (dx * dx + dy * dy <= tol * tol) {
                    ++m;
                    break;
                }
            }
        }
        return m;
    };
    const int ma = matched(pa, pb);
    const int mb = matched(pb, pa);
    const double overlap =
        pa.empty() || pb.empty() ? 0.0
                                 : static_cast<double>(ma + mb) / static_cast<double>(pa.size() + pb.size());
    const bool pass = overlap >= 0.70 && !pa.empty() && !pb.empty();
    return {pass, fmt("ideal %zu kps, network %zu kps, overlap %.1f%% (>= 70%% at 2 px)",
                      pa.size(), pb.size(), 100.0 * overlap)};
}

} // namespace

int main() {
    std::printf("acceptance suite: resistor-network Gaussian filter + SIFT\n");
    run({1, "1-D deviation (45 nodes, lambda 36)", 1.0}, criterion1);
    run({2, "2-D ring deviation (33x33, lambda 36)", 10.0}, criterion2);
    run({3, "lambda ~ sigma^4 law", 30.0}, criterion3);
    run({4, "settle time vs stray capacitance", 60.0}, criterion4);
    run({5, "pyramid energy accounting", 120.0}, criterion5);
    run({6, "solver oracle equivalence (<= 64 nodes)", 10.0}, criterion6);
    run({7, "SIFT stage oracles", 30.0}, criterion7);
    run({8, "backend interchangeability", 120.0}, criterion8);
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
