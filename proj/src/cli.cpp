#include "sbf/cli.hpp"

#include "sbf/engine.hpp"
#include "sbf/image.hpp"
#include "sbf/kernels.hpp"
#include "sbf/oracle.hpp"
#include "sbf/recipes.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sbf::cli {

namespace {

struct Crop {
    int x = 0, y = 0, w = 0, h = 0;
};

Crop parse_crop(const std::string& text) {
    Crop c;
    char s1 = 0, s2 = 0, s3 = 0;
    std::istringstream in(text);
    if (!(in >> c.x >> s1 >> c.y >> s2 >> c.w >> s3 >> c.h) || s1 != ',' || s2 != ',' || s3 != ',' ||
        in.peek() != std::char_traits<char>::eof()) {
        throw std::invalid_argument("--crop expects x,y,w,h, got '" + text + "'");
    }
    return c;
}

/// Flags shared by every subcommand that builds a graph.
struct GraphFlags {
    double sigma_d = 2.0;
    double sigma_r = 0.035;
    int radius = 0;
    std::string graph = "bilateral";
    std::string crop;

    void attach(CLI::App& app, double default_sigma_r) {
        sigma_r = default_sigma_r;
        app.add_option("--sigma-d", sigma_d, "spatial scale (pixels)")->capture_default_str();
        app.add_option("--sigma-r", sigma_r, "range scale (intensity units)")->capture_default_str();
        app.add_option("--radius", radius, "window radius; 0 selects ceil(2*sigma_d)")->capture_default_str();
        app.add_option("--graph", graph, "edge weights: bilateral or gaussian (spatial only)")
            ->check(CLI::IsMember({"bilateral", "gaussian"}))
            ->capture_default_str();
        app.add_option("--crop", crop, "process only the x,y,w,h sub-rectangle")->capture_default_str();
    }

    GraphParams params() const {
        GraphParams p{sigma_d, sigma_r, radius, graph == "gaussian" ? GraphMode::gaussian : GraphMode::bilateral};
        if (radius < 0) throw std::invalid_argument("--radius must be >= 0");
        p.validate();
        return p;
    }

    ImageGrid load(const std::string& path) const {
        ImageGrid img = load_image(path);
        if (crop.empty()) return img;
        const Crop c = parse_crop(crop);
        return img.crop(c.x, c.y, c.w, c.h);
    }
};

Strategy parse_strategy(const std::string& s) { return s == "cascade" ? Strategy::cascade : Strategy::chebyshev; }

std::string strategy_name(Strategy s) { return s == Strategy::cascade ? "cascade" : "cheb"; }

/// Polynomial to run for a resolved kernel argument: roots when the strategy
/// is a cascade, otherwise a Chebyshev fit (or the expanded roots).
PolyFilter select_filter(const KernelSpec& spec, int degree, Strategy strategy) {
    if (strategy == Strategy::cascade) {
        if (!spec.roots_filter) {
            throw std::invalid_argument("--strategy cascade needs a kernel given by roots (bf, iterated-bf, roots); "
                                        "use --strategy cheb");
        }
        return *spec.roots_filter;
    }
    if (spec.roots_filter) return roots_to_coeffs(*spec.roots_filter);
    return fit_chebyshev(*spec.kernel, degree);
}

void write_two_column_csv(const std::string& path, const std::string& header,
                          const std::vector<std::pair<double, double>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << header << '\n';
    for (const auto& [a, b] : rows) out << format_g12(a) << ',' << format_g12(b) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::filesystem::path output_in(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return std::filesystem::path(dir) / name;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral bilateral filtering: BF-graph spectral kernels applied as iterated bilateral passes",
                 "sbf"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::function<void()> action;

    // bf ---------------------------------------------------------------
    GraphFlags bf_graph;
    std::string bf_in, bf_out;
    auto* bf = app.add_subcommand("bf", "one bilateral filter pass");
    bf->add_option("input", bf_in, "input image (PGM/PNG)")->required();
    bf->add_option("output", bf_out, "output image (.pgm or .png)")->required();
    bf_graph.attach(*bf, 0.035);
    bf->callback([&] {
        action = [&] {
            const ImageGrid img = bf_graph.load(bf_in);
            const BilateralGraph graph = build_graph(img, bf_graph.params());
            save_image(ImageGrid(img.width(), img.height(), graph.apply_bf(img.pixels())), bf_out);
        };
    });

    // iterate ----------------------------------------------------------
    GraphFlags it_graph;
    std::string it_in, it_out;
    int it_k = 20;
    bool it_reweight = false;
    auto* it = app.add_subcommand("iterate", "k bilateral passes on the fixed input graph");
    it->add_option("input", it_in, "input image")->required();
    it->add_option("output", it_out, "output image")->required();
    it->add_option("--k", it_k, "number of passes")->check(CLI::NonNegativeNumber)->capture_default_str();
    it->add_flag("--reweight", it_reweight, "rebuild the graph from the current image before every pass (baseline)")
        ->capture_default_str();
    it_graph.attach(*it, 0.035);
    it->callback([&] {
        action = [&] {
            const ImageGrid img = it_graph.load(it_in);
            const GraphParams params = it_graph.params();
            if (it_reweight) {
                save_image(iterate_bf_reweighted(img, params, it_k), it_out);
            } else {
                const BilateralGraph graph = build_graph(img, params);
                save_image(ImageGrid(img.width(), img.height(), iterate_bf(graph, img.pixels(), it_k)), it_out);
            }
        };
    });

    // design -----------------------------------------------------------
    std::string de_kernel = "denoise", de_emit;
    int de_degree = 5;
    auto* de = app.add_subcommand("design", "fit a polynomial to a spectral kernel and report its sup-norm error");
    de->add_option("--kernel", de_kernel, "kernel file, kind name, or inline key=value list")->capture_default_str();
    de->add_option("--degree", de_degree, "Chebyshev degree")->check(CLI::NonNegativeNumber)->capture_default_str();
    de->add_option("--emit-response", de_emit, "write lambda,h,p rows at 1001 points")->capture_default_str();
    de->callback([&] {
        action = [&] {
            const KernelSpec spec = resolve_kernel_argument(de_kernel);
            const PolyFilter filter =
                spec.kernel ? fit_chebyshev(*spec.kernel, de_degree) : roots_to_coeffs(*spec.roots_filter);
            const double sup = spec.kernel ? poly_sup_error(*spec.kernel, filter, 10001) : 0.0;
            out << "kernel=" << (spec.kernel ? spec.kernel->describe() : std::string("roots"))
                << " degree=" << filter.degree() << " sup_error=" << format_g12(sup) << '\n';
            out << "coeffs=";
            const auto& c = filter.chebyshev().coeffs;
            for (std::size_t j = 0; j < c.size(); ++j) out << (j ? "," : "") << format_g12(c[j]);
            out << '\n';
            if (!de_emit.empty()) write_response_csv(de_emit, sample_response(spec.kernel, filter));
        };
    });

    // apply ------------------------------------------------------------
    GraphFlags ap_graph;
    std::string ap_in, ap_out, ap_kernel = "denoise", ap_strategy = "cheb";
    int ap_degree = 5;
    auto* ap = app.add_subcommand("apply", "apply a spectral kernel as iterated bilateral passes");
    ap->add_option("input", ap_in, "input image")->required();
    ap->add_option("output", ap_out, "output image")->required();
    ap->add_option("--kernel", ap_kernel, "kernel file, kind name, or inline key=value list")->capture_default_str();
    ap->add_option("--degree", ap_degree, "Chebyshev degree for fitted kernels (root-form kernels keep their own)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    ap->add_option("--strategy", ap_strategy, "cascade (root stages) or cheb (three-term recurrence)")
        ->check(CLI::IsMember({"cascade", "cheb"}))
        ->capture_default_str();
    ap_graph.attach(*ap, 0.035);
    ap->callback([&] {
        action = [&] {
            const Strategy strategy = parse_strategy(ap_strategy);
            const PolyFilter filter = select_filter(resolve_kernel_argument(ap_kernel), ap_degree, strategy);
            const GraphParams params = ap_graph.params();
            const ImageGrid img = ap_graph.load(ap_in);
            const BilateralGraph graph = build_graph(img, params);
            const FilterPlan plan(graph, filter, strategy);
            ApplyStats stats;
            const Signal y = plan.apply(img.pixels(), &stats);
            save_image(ImageGrid(img.width(), img.height(), y), ap_out);
            out << "strategy=" << strategy_name(strategy) << " degree=" << filter.degree()
                << " passes=" << stats.sparse_passes << '\n';
        };
    });

    // denoise ----------------------------------------------------------
    GraphFlags dn_graph;
    std::string dn_in, dn_dir = "denoise_out", dn_kernel = "denoise", dn_ext = "pgm";
    double dn_snr = 20.0;
    std::optional<double> dn_sigma;
    std::uint64_t dn_seed = 1;
    int dn_degree = 5;
    auto* dn = app.add_subcommand("denoise", "noise a clean image, then compare one BF pass with the spectral filter");
    dn->add_option("input", dn_in, "clean image")->required();
    dn->add_option("--out-dir", dn_dir, "directory for noisy/bf/proposed images and response CSVs")
        ->capture_default_str();
    auto* snr_opt = dn->add_option("--snr", dn_snr, "input SNR in dB")->capture_default_str();
    dn->add_option("--sigma", dn_sigma, "noise standard deviation (overrides --snr)")->excludes(snr_opt);
    dn->add_option("--seed", dn_seed, "noise seed")->capture_default_str();
    dn->add_option("--kernel", dn_kernel, "spectral kernel for the proposed filter")->capture_default_str();
    dn->add_option("--degree", dn_degree, "Chebyshev degree")->check(CLI::NonNegativeNumber)->capture_default_str();
    dn->add_option("--format", dn_ext, "image format of the outputs")
        ->check(CLI::IsMember({"pgm", "png"}))
        ->capture_default_str();
    dn_graph.attach(*dn, 0.035);
    dn->callback([&] {
        action = [&] {
            const KernelSpec spec = resolve_kernel_argument(dn_kernel);
            if (!spec.kernel) throw std::invalid_argument("denoise needs a kernel to fit, not a root list");
            DenoiseConfig cfg{dn_graph.params(), dn_snr, dn_sigma, dn_seed, *spec.kernel, dn_degree};
            const ImageGrid clean = dn_graph.load(dn_in);
            const DenoiseResult r = recipe_denoise(clean, cfg);
            save_image(r.noisy, output_in(dn_dir, "noisy." + dn_ext));
            save_image(r.bf, output_in(dn_dir, "bf." + dn_ext));
            save_image(r.proposed, output_in(dn_dir, "proposed." + dn_ext));
            write_response_csv(output_in(dn_dir, "response_bf.csv"),
                               sample_response(make_bf_kernel(), iterated_bf_filter(1)));
            write_response_csv(output_in(dn_dir, "response_proposed.csv"), sample_response(cfg.kernel, r.filter));
            out << r.report_line() << '\n';
        };
    });

    // segment-prep -----------------------------------------------------
    GraphFlags sg_graph;
    std::string sg_in, sg_dir = "segment_out", sg_kernel = "lowpass", sg_ext = "pgm";
    int sg_k = 20, sg_degree = 20;
    auto* sg = app.add_subcommand("segment-prep",
                                  "reweighted vs fixed iterated BF vs sharp low-pass spectral filter");
    sg->add_option("input", sg_in, "input image")->required();
    sg->add_option("--out-dir", sg_dir, "output directory")->capture_default_str();
    sg->add_option("--k", sg_k, "BF iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
    sg->add_option("--kernel", sg_kernel, "spectral kernel for the proposed filter")->capture_default_str();
    sg->add_option("--degree", sg_degree, "Chebyshev degree")->check(CLI::NonNegativeNumber)->capture_default_str();
    sg->add_option("--format", sg_ext, "image format of the outputs")
        ->check(CLI::IsMember({"pgm", "png"}))
        ->capture_default_str();
    sg_graph.attach(*sg, 0.05);
    sg->callback([&] {
        action = [&] {
            const KernelSpec spec = resolve_kernel_argument(sg_kernel);
            if (!spec.kernel) throw std::invalid_argument("segment-prep needs a kernel to fit, not a root list");
            SegmentConfig cfg{sg_graph.params(), sg_k, *spec.kernel, sg_degree};
            const SegmentResult r = recipe_segment_preproc(sg_graph.load(sg_in), cfg);
            save_image(r.reweighted, output_in(sg_dir, "iterated_reweighted." + sg_ext));
            save_image(r.fixed, output_in(sg_dir, "iterated_fixed." + sg_ext));
            save_image(r.proposed, output_in(sg_dir, "proposed." + sg_ext));
            write_response_csv(output_in(sg_dir, "response_iterated.csv"), r.iterated_response);
            write_response_csv(output_in(sg_dir, "response_proposed.csv"), r.proposed_response);
            const auto& p = r.proposed_response;
            out << "iterations=" << sg_k << " degree=" << sg_degree << " proposed_h0=" << format_g12(p.front().kernel)
                << " iterated_h0.1=" << format_g12(r.iterated_response[50].kernel) << '\n';
        };
    });

    // spectrum ---------------------------------------------------------
    GraphFlags sp_graph;
    std::string sp_in, sp_eigs, sp_comp, sp_resp;
    bool sp_energy = false;
    auto* sp = app.add_subcommand("spectrum", "dense eigendecomposition of the BF-graph Laplacian of a block");
    sp->add_option("input", sp_in, "input image")->required();
    sp_graph.attach(*sp, 0.035);
    sp_graph.crop = "0,0,64,64";
    sp->get_option("--crop")->default_str("0,0,64,64 (clipped to the image)");
    sp->add_option("--emit-eigs", sp_eigs, "CSV of k,lambda")->capture_default_str();
    sp->add_option("--emit-compaction", sp_comp, "CSV of k,E_k for the normalized image signal")
        ->capture_default_str();
    sp->add_option("--emit-response", sp_resp, "CSV of lambda,h for one BF pass measured on the eigenvectors")
        ->capture_default_str();
    sp->add_flag("--signal-energy", sp_energy, "print energy and compaction summary of the block")
        ->capture_default_str();
    sp->callback([&] {
        action = [&] {
            ImageGrid img = load_image(sp_in);
            Crop c = parse_crop(sp_graph.crop);
            c.w = std::min(c.w, img.width() - c.x);
            c.h = std::min(c.h, img.height() - c.y);
            img = img.crop(c.x, c.y, c.w, c.h);
            const BilateralGraph graph = build_graph(img, sp_graph.params());
            const DenseSpectrum spec = eigendecompose(graph);
            out << "nodes=" << spec.n << " lambda_min=" << format_g12(spec.eigenvalues(0))
                << " lambda_max=" << format_g12(spec.eigenvalues(spec.eigenvalues.size() - 1)) << '\n';
            if (!sp_eigs.empty()) {
                std::vector<std::pair<double, double>> rows;
                for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
                    rows.emplace_back(static_cast<double>(i + 1), spec.eigenvalues(i));
                }
                write_two_column_csv(sp_eigs, "k,lambda", rows);
            }
            if (!sp_comp.empty() || sp_energy) {
                const Signal x_hat = graph.normalize_signal(img.pixels());
                const auto curve = energy_compaction(spec, x_hat);
                if (!sp_comp.empty()) {
                    std::vector<std::pair<double, double>> rows;
                    for (std::size_t k = 0; k < curve.size(); ++k) rows.emplace_back(static_cast<double>(k + 1), curve[k]);
                    write_two_column_csv(sp_comp, "k,E_k", rows);
                }
                if (sp_energy) {
                    double energy = 0.0;
                    for (double v : x_hat) energy += v * v;
                    const auto first_reaching = [&curve](double level) {
                        return static_cast<std::size_t>(
                                   std::find_if(curve.begin(), curve.end(), [level](double e) { return e >= level; }) -
                                   curve.begin()) +
                               1;
                    };
                    out << "signal_energy=" << format_g12(energy) << " E_1=" << format_g12(curve.front())
                        << " k_90=" << first_reaching(0.90) << " k_99=" << first_reaching(0.99) << '\n';
                }
            }
            if (!sp_resp.empty()) {
                std::vector<std::pair<double, double>> rows;
                for (const auto& s : empirical_spectral_response(graph, spec)) rows.emplace_back(s.lambda, s.response);
                write_two_column_csv(sp_resp, "lambda,h", rows);
            }
        };
    });

    // snr --------------------------------------------------------------
    std::string sn_ref, sn_test;
    auto* sn = app.add_subcommand("snr", "energy SNR of a test image against a reference, in dB");
    sn->add_option("reference", sn_ref, "clean image")->required();
    sn->add_option("test", sn_test, "image to score")->required();
    sn->callback([&] {
        action = [&] { out << format_db(snr_db(load_image(sn_ref), load_image(sn_test))) << '\n'; };
    });

    // noise ------------------------------------------------------------
    std::string no_in, no_out;
    double no_snr = 20.0;
    std::optional<double> no_sigma;
    std::uint64_t no_seed = 1;
    auto* no = app.add_subcommand("noise", "add seeded white Gaussian noise");
    no->add_option("input", no_in, "clean image")->required();
    no->add_option("output", no_out, "noisy image")->required();
    auto* no_snr_opt = no->add_option("--snr", no_snr, "target SNR in dB")->capture_default_str();
    no->add_option("--sigma", no_sigma, "noise standard deviation (overrides --snr)")->excludes(no_snr_opt);
    no->add_option("--seed", no_seed, "noise seed")->capture_default_str();
    no->callback([&] {
        action = [&] {
            const ImageGrid img = load_image(no_in);
            const double sigma = no_sigma ? *no_sigma : sigma_for_snr(img, no_snr);
            const ImageGrid noisy = add_white_noise(img, NoiseSpec{sigma, no_seed});
            save_image(noisy, no_out);
            out << "sigma=" << format_g12(sigma) << " snr=" << format_db(snr_db(img, noisy)) << '\n';
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (action) action();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace sbf::cli
