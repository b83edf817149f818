#include "bsdlab/catalog.hpp"
#include "bsdlab/frames.hpp"
#include "bsdlab/report.hpp"
#include "bsdlab/vmrt.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace bsd;
using nlohmann::json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_violation = 2;
constexpr int exit_input = 3;

bool is_property_error(ErrorKind k) {
    switch (k) {
        case ErrorKind::MonotonicityViolation:
        case ErrorKind::InconsistentDependence:
        case ErrorKind::DegenerateJet:
        case ErrorKind::OrthogonalityResidual:
        case ErrorKind::RegimeViolation:
        case ErrorKind::ChartFailure:
            return true;
        default:
            return false;
    }
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InputError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::InputError, path + ": " + e.what());
    }
}

// "III:3", "I:4" (kind and rank) or a full domain spec such as "I:5:3"
std::pair<DomainKind, int> parse_kind_rank(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) fail(ErrorKind::InputError, "expected KIND:RANK, got " + s);
    if (s.find(':', colon + 1) != std::string::npos) {
        DomainSpec d = parse_spec(s);
        return {d.kind, d.rank()};
    }
    std::string k = s.substr(0, colon);
    int r = 0;
    try {
        r = std::stoi(s.substr(colon + 1));
    } catch (const std::exception&) {
        fail(ErrorKind::InputError, "bad rank in " + s);
    }
    if (k == "I") return {DomainKind::I, r};
    if (k == "II") return {DomainKind::II, r};
    if (k == "III") return {DomainKind::III, r};
    fail(ErrorKind::InputError, "unknown domain type " + k);
}

Level parse_level(double v) {
    Level lv;
    lv.r = static_cast<int>(std::floor(v));
    lv.half = std::abs(v - lv.r - 0.5) < 1e-9;
    if (!lv.half && std::abs(v - lv.r) > 1e-9) fail(ErrorKind::InputError, "level must be an integer or r + 0.5");
    return lv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bsd-lab: moduli maps and rigidity of proper maps between bounded symmetric domains"};
    app.require_subcommand(1);
    int code = exit_pass;

    // moduli sample
    auto* moduli = app.add_subcommand("moduli", "flag manifolds");
    moduli->require_subcommand(1);
    auto* msample = moduli->add_subcommand("sample", "random flags per level, as JSON");
    std::string dual = "I:3:2";
    int count = 2;
    std::uint64_t seed = 1;
    bool on_sigma = false;
    msample->add_option("--dual", dual, "domain, e.g. I:3:2, II:6, III:3")->capture_default_str();
    msample->add_option("--count", count, "flags per level")->capture_default_str()->check(CLI::PositiveNumber);
    msample->add_option("--seed", seed)->capture_default_str();
    msample->add_flag("--sigma", on_sigma, "sample Sigma points (Hermitian isotropic V1)");
    msample->callback([&] {
        DomainSpec spec = parse_spec(dual);
        Rng rng = make_rng(seed);
        json out = json::array();
        for (Level lv : levels(spec))
            for (int i = 0; i < count; ++i) {
                if (on_sigma && lv.r == spec.rank()) continue;
                out.push_back(to_json(on_sigma ? random_sigma_flag(spec, lv, rng) : random_flag(spec, lv, rng)));
            }
        std::cout << out.dump(2) << "\n";
    });

    // frames selftest
    auto* frames = app.add_subcommand("frames", "Sigma frames and Maurer-Cartan forms");
    frames->require_subcommand(1);
    auto* fself = frames->add_subcommand("selftest", "worst residuals as CSV");
    std::string group = "su";
    int fp = 3, fq = 2, ell = 1, trials = 200;
    fself->add_option("--group", group, "su, so or sp")->capture_default_str();
    fself->add_option("--p", fp)->capture_default_str();
    fself->add_option("--q", fq)->capture_default_str();
    fself->add_option("--ell", ell)->capture_default_str();
    fself->add_option("--trials", trials)->capture_default_str()->check(CLI::PositiveNumber);
    fself->add_option("--seed", seed)->capture_default_str();
    fself->callback([&] {
        FrameShape s = frame_shape(parse_frame_group(group), fp, fq, ell);
        FrameSelftest r = frame_selftest(s, trials, seed);
        std::cout << "check,max_residual,threshold,pass\n";
        auto row = [&](const char* name, double v, double thr) {
            std::cout << name << "," << v << "," << thr << "," << (v < thr ? 1 : 0) << "\n";
            if (!(v < thr)) code = exit_violation;
        };
        row("relations", r.relations, 1e-10);
        row("symmetry", r.symmetry, 1e-10);
        row("structure", r.structure, 1e-6);
        row("position", r.position, 1e-10);
        row("dilation", r.dilation, 1e-10);
        row("rotation", r.rotation, 1e-10);
        row("final", r.final, 1e-10);
        row("real_vectors", r.real_vectors, 1e-10);
    });

    // vmrt classify
    auto* vmrt = app.add_subcommand("vmrt", "varieties of minimal rational tangents");
    vmrt->require_subcommand(1);
    auto* vclass = vmrt->add_subcommand("classify", "classifier against the curve oracle, CSV");
    int vn = 3, vq = 2, vsamples = 30;
    vclass->add_option("--n", vn)->capture_default_str();
    vclass->add_option("--q", vq)->capture_default_str();
    vclass->add_option("--samples", vsamples)->capture_default_str()->check(CLI::PositiveNumber);
    vclass->add_option("--seed", seed)->capture_default_str();
    vclass->callback([&] {
        auto rows = vmrt_classify_samples(vn, vq, vsamples, seed);
        std::cout << "id,classification,oracle,zeta_surjective\n";
        for (const auto& r : rows) {
            std::cout << r.id << "," << to_string(r.classified) << "," << to_string(r.oracle) << ",";
            if (r.zeta_surjective) std::cout << (*r.zeta_surjective ? 1 : 0);
            std::cout << "\n";
            if (r.classified != r.oracle) code = exit_violation;
        }
    });

    // modulimap run
    auto* mm = app.add_subcommand("modulimap", "moduli maps f#");
    mm->require_subcommand(1);
    auto* mrun = mm->add_subcommand("run", "f# at one level: jets against the intersection oracle");
    std::string map_file, map_id, report_path;
    double level = 1;
    int msamples = 10;
    auto* opt_map = mrun->add_option("--map", map_file, "map JSON file");
    mrun->add_option("--catalog", map_id, "catalog id instead of a file")->excludes(opt_map);
    mrun->add_option("--r", level, "level")->capture_default_str();
    mrun->add_option("--samples", msamples)->capture_default_str()->check(CLI::PositiveNumber);
    mrun->add_option("--seed", seed)->capture_default_str();
    mrun->add_option("--report", report_path, "write the JSON report here");
    mrun->callback([&] {
        if (map_file.empty() && map_id.empty()) fail(ErrorKind::InputError, "need --map or --catalog");
        PolyMatrixMap f;
        if (!map_id.empty()) {
            f = catalog_entry(map_id).map;
        } else {
            try {
                f = poly_map_from_json(read_json(map_file));
            } catch (const Error& e) {
                fail(ErrorKind::InputError, "map: " + e.message());
            }
        }
        Level lv = parse_level(level);
        bool valid = false;
        for (Level l : proper_levels(f.source())) valid = valid || l == lv;
        if (!valid) fail(ErrorKind::InputError, "level " + lv.str() + " is not a proper level of " + f.source().name());
        json out = modulimap_run(f, lv, msamples, seed);
        if (!report_path.empty()) write_atomic(report_path, out.dump(2) + "\n");
        std::cout << "level " << lv.str() << ": " << out["agreeing"] << "/" << msamples
                  << " oracle agreements, worst distance " << out["worst_distance"] << ", "
                  << (out["flat"].is_null() ? "inconsistent leg dependence" : out["flat"].get<std::string>())
                  << ", status " << out["status"].get<std::string>() << "\n";
        if (out["status"] != "pass") code = exit_violation;
    });

    // report
    auto* rep = app.add_subcommand("report", "full pipeline: JSON, CSV and summary");
    std::string config_path, out_dir;
    rep->add_option("--config", config_path, "config JSON")->required();
    rep->add_option("--out", out_dir, "output directory")->required();
    rep->add_option("--seed", seed)->capture_default_str();
    rep->callback([&] {
        json cfg = read_json(config_path);
        ReportOutcome o = run_report(cfg, out_dir, seed, std::filesystem::path(config_path).parent_path());
        std::cout << summary_text(o.report);
        if (!o.pass) code = exit_violation;
    });

    // catalog list
    auto* cat = app.add_subcommand("catalog", "built-in maps");
    cat->require_subcommand(1);
    auto* clist = cat->add_subcommand("list", "list catalog ids");
    clist->callback([&] {
        for (const auto& e : catalog()) {
            std::cout << e.id << "  " << e.map.source().name() << " -> " << e.map.target().name() << "  index [";
            for (std::size_t i = 0; i < e.expected_index.size(); ++i)
                std::cout << (i ? "," : "") << e.expected_index[i];
            std::cout << "]  " << e.description << "\n";
        }
    });

    // rankgap
    auto* rg = app.add_subcommand("rankgap", "index sequence arithmetic");
    std::string src, tgt;
    int qmax = 0;
    rg->add_option("--src", src, "source, e.g. III:3");
    rg->add_option("--tgt", tgt, "target, e.g. I:4");
    rg->add_option("--table", qmax, "print the full table for source ranks up to this value");
    rg->callback([&] {
        if (qmax > 0) {
            std::cout << "source,q,target,qp,admissible,with_engine,rigid_pattern,verdict\n";
            for (const auto& r : rank_gap_table(qmax))
                std::cout << kind_name(r.source) << "," << r.q << "," << kind_name(r.target) << "," << r.qp << ","
                          << r.admissible << "," << r.with_engine << "," << r.rigid_pattern << "," << r.verdict << "\n";
            return;
        }
        if (src.empty() || tgt.empty()) fail(ErrorKind::InputError, "need --src and --tgt, or --table");
        auto [sk, q] = parse_kind_rank(src);
        auto [tk, qp] = parse_kind_rank(tgt);
        if (q < 2 || qp < 1) fail(ErrorKind::InputError, "source rank must be at least 2");
        std::cout << to_json(rank_gap_analysis(sk, q, tk, qp)).dump(2) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.message() << "\n";
        return is_property_error(e.kind()) ? exit_violation : exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return code;
}
