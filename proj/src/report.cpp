#include "bsdlab/report.hpp"

#include "bsdlab/catalog.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace bsd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json error_json(const std::string& stage, const Error& e) {
    return json{{"stage", stage}, {"kind", to_string(e.kind())}, {"message", e.message()}};
}

std::string lvl(const json& v) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
}

std::vector<Level> integer_levels(const DomainSpec& s) {
    std::vector<Level> out;
    for (auto lv : proper_levels(s))
        if (!lv.half) out.push_back(lv);
    return out;
}

int oracle_samples(const PolyMatrixMap& f) { return 2 * f.target().ambient() + 4; }

}  // namespace

json to_json(const IndexSequence& s) {
    json entries = json::array();
    for (const auto& e : s.entries)
        entries.push_back({{"level", e.level.value()}, {"index", e.index}, {"a", e.a}, {"k0", e.k0}});
    return json{{"entries", entries}, {"values", s.values()}, {"unit_step", s.has_unit_step()}};
}

json to_json(const RespectsReport& r) {
    json inc = json::array();
    for (const auto& s : r.inclusions)
        inc.push_back({{"kind", std::string(1, s.kind)}, {"s", s.s.value()}, {"pass", s.pass}, {"residual", s.residual}});
    json fits = json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"s", f.s.value()},
                        {"accepted", f.accepted},
                        {"residual", f.residual},
                        {"w0_dim", f.w0_dim},
                        {"samples", f.samples}});
    return json{{"level", r.r.value()},
                {"kind", to_string(r.kind)},
                {"via_transpose", r.via_transpose},
                {"consistent", r.consistent},
                {"z_failed", r.z_failed()},
                {"q_failed", r.q_failed()},
                {"standard_verdict", r.standard_verdict()},
                {"all_pass", r.all_pass()},
                {"inclusions", inc},
                {"fits", fits}};
}

json to_json(const RankGapReport& r) {
    return json{{"source", kind_name(r.source)},
                {"q", r.q},
                {"target", kind_name(r.target)},
                {"qp", r.qp},
                {"admissible", r.admissible},
                {"with_engine", r.with_engine},
                {"rigid_pattern", r.rigid_pattern},
                {"regime_pair", r.regime_pair},
                {"all_engine", r.all_engine()},
                {"verdict", r.verdict},
                {"example_escape", r.example_escape}};
}

ReportConfig parse_report_config(const json& j, const fs::path& base) {
    if (!j.is_object()) fail(ErrorKind::InputError, "config: expected a JSON object");
    ReportConfig cfg;
    try {
        if (j.contains("catalog")) {
            const CatalogEntry& e = catalog_entry(j.at("catalog").get<std::string>());
            cfg.label = e.id;
            cfg.map = e.map;
            cfg.expected_index = e.expected_index;
        } else if (j.contains("map")) {
            cfg.map = poly_map_from_json(j.at("map"));
            cfg.label = cfg.map.name.empty() ? "user map" : cfg.map.name;
        } else if (j.contains("map_file")) {
            fs::path p = j.at("map_file").get<std::string>();
            if (p.is_relative() && !base.empty()) p = base / p;
            std::ifstream in(p);
            if (!in) fail(ErrorKind::InputError, "cannot open " + p.string());
            cfg.map = poly_map_from_json(json::parse(in));
            cfg.label = cfg.map.name.empty() ? p.filename().string() : cfg.map.name;
        } else {
            fail(ErrorKind::InputError, "needs one of catalog, map, map_file");
        }
        if (j.contains("expected_index")) cfg.expected_index = j.at("expected_index").get<std::vector<int>>();
        cfg.samples = j.value("samples", cfg.samples);
        cfg.grid = j.value("grid", cfg.grid);
    } catch (const Error& e) {
        fail(ErrorKind::InputError, "config: " + e.message());
    } catch (const json::exception& e) {
        fail(ErrorKind::InputError, std::string("config: ") + e.what());
    }
    if (cfg.samples < 1 || cfg.grid < 1) fail(ErrorKind::InputError, "config: samples and grid must be positive");
    return cfg;
}

ReportOutcome run_pipeline(const ReportConfig& cfg, std::uint64_t seed) {
    const PolyMatrixMap& f = cfg.map;
    json rep;
    rep["schema"] = 1;
    rep["label"] = cfg.label;
    rep["source"] = spec_to_json(f.source());
    rep["target"] = spec_to_json(f.target());
    rep["degree"] = f.degree();
    rep["seed"] = seed;
    rep["samples"] = cfg.samples;
    json errors = json::array();
    json violations = json::array();
    json stages;

    // index
    {
        json st;
        try {
            IndexSequence s = index_sequence(f, derive_seed(seed, 1));
            st = to_json(s);
            if (!cfg.expected_index.empty()) {
                st["expected"] = cfg.expected_index;
                if (s.values() != cfg.expected_index) violations.push_back("index: sequence differs from expected");
            }
        } catch (const Error& e) {
            errors.push_back(error_json("index", e));
            violations.push_back(std::string("index: ") + e.what());
        }
        stages["index"] = st;
    }

    // flat + respects, per integer level
    json flat = json::array();
    json resp = json::array();
    for (Level lv : integer_levels(f.source())) {
        std::uint64_t ls = derive_seed(seed, 100 + static_cast<std::uint64_t>(lv.r));
        try {
            FlatReport fr = f_flat_classify(f, lv, std::max(cfg.samples, 5), ls);
            flat.push_back({{"level", lv.value()},
                            {"kind", to_string(fr.kind)},
                            {"agreeing", fr.agreeing},
                            {"samples", fr.samples.size()}});
        } catch (const Error& e) {
            errors.push_back(error_json("flat", e));
            violations.push_back("flat r=" + lv.str() + ": " + e.what());
            flat.push_back({{"level", lv.value()}, {"kind", nullptr}, {"error", to_string(e.kind())}});
        }
        try {
            RespectsReport rr = respects_check(f, lv, cfg.samples, derive_seed(ls, 7));
            resp.push_back(to_json(rr));
            if (!rr.all_pass())
                violations.push_back("respects r=" + lv.str() + ": " + std::to_string(rr.z_failed()) + " Z / " +
                                     std::to_string(rr.q_failed()) + " Q inclusion failures" +
                                     (rr.standard_verdict() ? "" : ", trivial fit rejected"));
        } catch (const Error& e) {
            errors.push_back(error_json("respects", e));
            violations.push_back("respects r=" + lv.str() + ": " + e.what());
        }
    }
    stages["flat"] = flat;
    stages["respects"] = resp;

    // standard
    {
        json st;
        try {
            StandardVerdict v = detect_standard(f, derive_seed(seed, 2));
            st = {{"standard", v.standard},
                  {"hull_rank", v.hull_rank},
                  {"source_rank", v.source_rank},
                  {"degree", v.degree},
                  {"hull", to_json(v.hull)}};
        } catch (const Error& e) {
            errors.push_back(error_json("standard", e));
            st = {{"error", to_string(e.kind())}};
        }
        stages["standard"] = st;
    }

    // decompose
    {
        json st;
        try {
            DecompositionResult d = decompose(f, derive_seed(seed, 3), cfg.grid);
            st = {{"applicable", true},
                  {"unit_step", d.unit_step},
                  {"via_transpose", d.via_transpose},
                  {"f1_standard", d.f1_standard},
                  {"f1_residual", d.f1_residual},
                  {"cross_residual", d.cross_residual},
                  {"reassembly_residual", d.reassembly_residual},
                  {"grid", d.grid},
                  {"F1", to_json(d.F1)},
                  {"F2", d.F2 ? to_json(*d.F2) : json(nullptr)},
                  {"A", matrix_to_json(d.A)},
                  {"D", matrix_to_json(d.D)},
                  {"W0_dim", d.model.W0.dim()}};
            if (d.reassembly_residual >= 1e-7) violations.push_back("decompose: reassembly residual too large");
            if (!d.f1_standard) violations.push_back("decompose: F1 is not standard");
        } catch (const Error& e) {
            errors.push_back(error_json("decompose", e));
            st = {{"applicable", false}, {"reason", e.what()}};
            if (e.kind() == ErrorKind::OrthogonalityResidual) violations.push_back(std::string("decompose: ") + e.what());
        }
        stages["decompose"] = st;
    }

    rep["stages"] = stages;
    rep["errors"] = errors;
    rep["violations"] = violations;
    rep["status"] = violations.empty() ? "pass" : "violation";
    return {rep, violations.empty()};
}

ReportOutcome run_report(const json& config, const fs::path& out, std::uint64_t seed, const fs::path& base) {
    ReportConfig cfg = parse_report_config(config, base);
    ReportOutcome o = run_pipeline(cfg, seed);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::InputError, "output: cannot create " + out.string());
    write_atomic(out / "report.json", o.report.dump(2) + "\n");
    write_atomic(out / "report.csv", report_csv(o.report));
    write_atomic(out / "summary.txt", summary_text(o.report));
    return o;
}

json modulimap_run(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed) {
    json rows = json::array();
    double worst = 0.0;
    int agree = 0;
    for (int i = 0; i < samples; ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        GenericSharp g = generic_sharp(f, r, rng);
        TargetFlag o = sharp_oracle(f, g.sigma, g.point, oracle_samples(f), rng);
        double d = target_flag_distance(g.result.flag, o);
        bool ok = target_flag_equals(g.result.flag, o);
        worst = std::max(worst, d);
        agree += ok ? 1 : 0;
        rows.push_back({{"sample", i},
                        {"a", g.result.a},
                        {"index", g.result.index},
                        {"k0", g.result.k0},
                        {"gr_dim", g.result.gr_dim},
                        {"attempts", g.attempts},
                        {"oracle_distance", d},
                        {"agree", ok},
                        {"image", to_json(g.result.flag)}});
    }
    json out{{"schema", 1},
             {"source", spec_to_json(f.source())},
             {"target", spec_to_json(f.target())},
             {"level", r.value()},
             {"seed", seed},
             {"samples", rows},
             {"agreeing", agree},
             {"worst_distance", worst}};
    bool pass = agree == samples;
    try {
        FlatReport fr = f_flat_classify(f, r, std::max(samples, 5), derive_seed(seed, 1000));
        out["flat"] = to_string(fr.kind);
    } catch (const Error& e) {
        out["flat"] = nullptr;
        out["flat_error"] = e.what();
        pass = false;
    }
    RespectsReport rr = respects_check(f, r, samples, derive_seed(seed, 1001));
    out["respects"] = to_json(rr);
    pass = pass && rr.all_pass();
    out["status"] = pass ? "pass" : "violation";
    return out;
}

std::string report_csv(const json& rep) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "stage,level,quantity,value,pass\n";
    const json& st = rep.at("stages");
    if (st.contains("index") && st["index"].contains("entries"))
        for (const auto& e : st["index"]["entries"])
            os << "index," << lvl(e["level"]) << ",i," << e["index"] << ",1\n";
    for (const auto& f : st.value("flat", json::array()))
        os << "flat," << lvl(f["level"]) << ",kind," << (f["kind"].is_null() ? "inconsistent" : f["kind"].get<std::string>())
           << "," << (f["kind"].is_null() ? 0 : 1) << "\n";
    for (const auto& r : st.value("respects", json::array())) {
        os << "respects," << lvl(r["level"]) << ",z_failed," << r["z_failed"] << "," << (r["z_failed"] == 0 ? 1 : 0) << "\n";
        os << "respects," << lvl(r["level"]) << ",q_failed," << r["q_failed"] << "," << (r["q_failed"] == 0 ? 1 : 0) << "\n";
        os << "respects," << lvl(r["level"]) << ",trivial_fit," << r["standard_verdict"] << ","
           << (r["standard_verdict"].get<bool>() ? 1 : 0) << "\n";
    }
    if (st.contains("standard") && st["standard"].contains("standard"))
        os << "standard,," << "standard," << st["standard"]["standard"] << ",1\n";
    if (st.contains("decompose") && st["decompose"].value("applicable", false)) {
        const json& d = st["decompose"];
        os << "decompose,,reassembly_residual," << d["reassembly_residual"].get<double>() << ","
           << (d["reassembly_residual"].get<double>() < 1e-7 ? 1 : 0) << "\n";
        os << "decompose,,f1_residual," << d["f1_residual"].get<double>() << ",1\n";
        os << "decompose,,cross_residual," << d["cross_residual"].get<double>() << ",1\n";
    }
    return os.str();
}

std::string summary_text(const json& rep) {
    std::ostringstream os;
    const json& st = rep.at("stages");
    os << "map: " << rep.value("label", std::string("?")) << "\n";
    os << "status: " << rep.value("status", std::string("?")) << "\n";
    if (st.contains("index") && st["index"].contains("values")) os << "index sequence: " << st["index"]["values"].dump() << "\n";
    for (const auto& f : st.value("flat", json::array()))
        os << "r=" << lvl(f["level"]) << ": " << (f["kind"].is_null() ? "inconsistent leg dependence" : f["kind"].get<std::string>())
           << "\n";
    for (const auto& r : st.value("respects", json::array()))
        os << "r=" << lvl(r["level"]) << ": " << r["z_failed"] << " Z / " << r["q_failed"] << " Q inclusion failures, trivial fits "
           << (r["standard_verdict"].get<bool>() ? "accepted" : "rejected") << "\n";
    if (st.contains("standard") && st["standard"].contains("standard"))
        os << "standard: " << (st["standard"]["standard"].get<bool>() ? "yes" : "no") << " (hull rank "
           << st["standard"]["hull_rank"] << ")\n";
    if (st.contains("decompose")) {
        const json& d = st["decompose"];
        if (d.value("applicable", false))
            os << "decomposition: F1 " << (d["f1_standard"].get<bool>() ? "standard" : "not standard") << ", F2 "
               << (d["F2"].is_null() ? "a point" : "nontrivial") << ", reassembly residual " << d["reassembly_residual"]
               << "\n";
        else
            os << "decomposition: not applicable (" << d.value("reason", std::string()) << ")\n";
    }
    for (const auto& v : rep.value("violations", json::array())) os << "violation: " << v.get<std::string>() << "\n";
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::InputError, "cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) fail(ErrorKind::InputError, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::InputError, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace bsd
