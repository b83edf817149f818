// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "bsdlab/catalog.hpp"
#include "bsdlab/frames.hpp"
#include "bsdlab/rigidity.hpp"
#include "bsdlab/vmrt.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bsd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---- 1: diagonal map, end to end ----
Outcome diagonal_decomposition() {
    auto t0 = Clock::now();
    const PolyMatrixMap& f = catalog_entry("diagonal-I22-I33").map;
    DecompositionResult d = decompose(f, 1001, 200);
    const double secs = seconds_since(t0);
    bool ok = d.grid == 200 && d.reassembly_residual < 1e-7 && d.f1_standard && d.F2.has_value();
    ok = ok && detect_standard(d.F1, 1002).standard;
    // Kobayashi distances through F1
    Rng rng = make_rng(1003);
    double kob = 0.0;
    for (int i = 0; i < 100; ++i) {
        Mat z = random_interior_point(f.source(), rng, 0.9), w = random_interior_point(f.source(), rng, 0.9);
        kob = std::max(kob, std::abs(kobayashi_distance(d.F1.eval(z), d.F1.eval(w)) - kobayashi_distance(z, w)));
    }
    ok = ok && kob < 1e-6 && secs < 60.0;
    std::ostringstream os;
    os << "reassembly " << d.reassembly_residual << " over " << d.grid << " points, F1 "
       << (d.f1_standard ? "standard" : "NOT standard") << ", Kobayashi drift " << kob << ", " << secs << " s";
    return {ok, os.str()};
}

// ---- 2: holomorphic vs anti-holomorphic ----
Outcome holomorphy() {
    FlatReport id = f_flat_classify(catalog_entry("identity-I33").map, Level{1, false}, 50, 2001);
    FlatReport tr = f_flat_classify(catalog_entry("transpose-I33").map, Level{1, false}, 50, 2002);
    const bool ok = id.kind == FlatKind::Holomorphic && tr.kind == FlatKind::AntiHolomorphic && id.agreeing == 50 &&
                    tr.agreeing == 50 && id.samples.size() == 50 && tr.samples.size() == 50;
    std::ostringstream os;
    os << "identity " << to_string(id.kind) << " " << id.agreeing << "/50, transpose " << to_string(tr.kind) << " "
       << tr.agreeing << "/50";
    return {ok, os.str()};
}

// ---- 3: index monotonicity ----
Outcome monotonicity() {
    int checked = 0;
    std::ostringstream os;
    bool ok = true;
    for (const auto& e : catalog()) {
        try {
            IndexSequence s = index_sequence(e.map, 3001);
            int prev = 0;
            for (int v : s.values()) {
                ok = ok && v > prev;
                prev = v;
            }
            ++checked;
        } catch (const Error& x) {
            ok = false;
            os << e.id << ": " << x.what() << "; ";
        }
    }
    os << checked << " catalog maps strictly increasing";
    return {ok, os.str()};
}

// ---- 4: jet route vs intersection oracle ----
Outcome oracle_agreement() {
    int pairs = 0, flags = 0, bad = 0;
    double worst = 0.0;
    for (const auto& e : catalog()) {
        if (e.map.source().rank() > 3) continue;
        for (Level lv : proper_levels(e.map.source())) {
            Rng rng = make_rng(derive_seed(4001, static_cast<std::uint64_t>(pairs)));
            ++pairs;
            for (int i = 0; i < 30; ++i) {
                GenericSharp g = generic_sharp(e.map, lv, rng);
                TargetFlag o = sharp_oracle(e.map, g.sigma, g.point, 2 * e.map.target().ambient() + 4, rng);
                worst = std::max(worst, target_flag_distance(g.result.flag, o));
                bad += target_flag_equals(g.result.flag, o, 1e-8) ? 0 : 1;
                ++flags;
            }
        }
    }
    std::ostringstream os;
    os << flags << " flags over " << pairs << " (map, level) pairs, " << bad << " disagreements, worst " << worst;
    return {bad == 0 && pairs > 0, os.str()};
}

// ---- 5: Sigma_r CR suite ----
Outcome sigma_suite() {
    const std::vector<DomainSpec> duals{DomainSpec::type1(3, 2), DomainSpec::type1(3, 3), DomainSpec::type2(4),
                                        DomainSpec::type2(6), DomainSpec::type3(3)};
    Rng rng = make_rng(5001);
    int round_trip_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const DomainSpec& spec = duals[static_cast<std::size_t>(i) % duals.size()];
        auto lvls = levels(spec);
        Level lv = lvls[rng() % (lvls.size() - 1)];
        Subspace v1 = random_sigma_v1(spec, lv, rng);
        FlagPair s = sigma_point(spec, lv, v1);
        FlagPair s2 = sigma_point(spec, lv, canonicalize(v1.orth() * random_unitary(rng, v1.dim())));
        if (!equals(pr_project(s), v1, 1e-10) || flag_distance(s, s2) > 1e-9) ++round_trip_bad;
    }

    int equiv_bad = 0, equiv = 0;
    while (equiv < 500) {
        for (const auto& spec : duals) {
            auto lv = proper_levels(spec);
            lv.insert(lv.begin(), Level{0, false});
            if (lv.size() < 2) continue;
            std::size_t i = rng() % (lv.size() - 1);
            std::size_t j = i + 1 + rng() % (lv.size() - i - 1);
            const bool iso = equiv % 2 == 0;
            FlagPair tau = iso ? random_sigma_flag(spec, lv[i], rng) : random_flag(spec, lv[i], rng);
            Subspace w = canonicalize(tau.V1().orth() * gaussian(rng, tau.V1().dim(), level_dim(spec, lv[j])));
            const bool tau_iso = is_isotropic(tau.V1(), spec.hermitian());
            if (!z_tau_contains(tau, lv[j], w) || sigma_contains(spec, lv[j], w) != tau_iso || tau_iso != iso)
                ++equiv_bad;
            ++equiv;
        }
    }

    // bracket generation on Sigma_1(LGr_3)
    const int n = 3, r = 1;
    const DomainSpec lgr = DomainSpec::type3(n);
    int tangents = 0, generated = 0;
    double weakest = 1e300;
    for (int pt = 0; pt < 10; ++pt) {
        LgrChartPoint p = LgrChartPoint::from_subspace(n, r, random_sigma_v1(lgr, Level{r, false}, rng));
        auto real = lgr_sigma_tangents(p);
        auto hol = lgr_holomorphic_tangents(p);
        for (int t = 0; t < 10; ++t) {
            ChartTangent v{Mat::Zero(p.x.rows(), p.x.cols()), Mat::Zero(p.y.rows(), p.y.cols()),
                           Mat::Zero(p.z.rows(), p.z.cols())};
            for (const auto& b : real) {
                const double c = uniform(rng, -1.0, 1.0);
                v.dx += c * b.dx;
                v.dy += c * b.dy;
                v.dz += c * b.dz;
            }
            ++tangents;
            double best = 0.0;
            for (const auto& w1 : hol)
                for (const auto& w2 : hol) best = std::max(best, max_abs(levi_bracket_check(n, r, p, v, w1, w2).theta_dtheta));
            weakest = std::min(weakest, best);
            generated += best > 1e-6 ? 1 : 0;
        }
    }
    std::ostringstream os;
    os << "round trip " << 1000 - round_trip_bad << "/1000, equivalence " << equiv - equiv_bad << "/" << equiv
       << ", bracket generation " << generated << "/" << tangents << " (weakest " << weakest << ")";
    return {round_trip_bad == 0 && equiv_bad == 0 && generated == tangents && tangents == 100, os.str()};
}

// ---- 6: frames ----
Outcome frame_suite() {
    const std::vector<FrameShape> shapes{
        frame_shape(FrameGroup::SU, 3, 2, 1), frame_shape(FrameGroup::SU, 3, 2, 2), frame_shape(FrameGroup::SU, 4, 3, 2),
        frame_shape(FrameGroup::SO, 3, 3, 2), frame_shape(FrameGroup::SO, 4, 4, 2), frame_shape(FrameGroup::SO, 4, 4, 4),
        frame_shape(FrameGroup::Sp, 2, 2, 1), frame_shape(FrameGroup::Sp, 3, 3, 2), frame_shape(FrameGroup::Sp, 3, 3, 3)};
    double rel = 0, sym = 0, str = 0, laws = 0;
    std::uint64_t seed = 6001;
    for (const auto& s : shapes) {
        FrameSelftest r = frame_selftest(s, 200, seed++);
        rel = std::max(rel, r.relations);
        sym = std::max(sym, r.symmetry);
        str = std::max(str, r.structure);
        laws = std::max({laws, r.position, r.dilation, r.rotation, r.final, r.real_vectors});
    }
    std::ostringstream os;
    os << shapes.size() << " shapes x 200 trials: relations " << rel << ", symmetry " << sym << ", structure " << str << ", change laws " << laws;
    return {rel < 1e-10 && sym < 1e-10 && str < 1e-6 && laws < 1e-10, os.str()};
}

// ---- 7: VMRT ----
Mat sgr_relation(const LgrChartPoint& p) {
    return p.y - p.y.transpose() + p.x.transpose() * p.z - p.z.transpose() * p.x;
}

Outcome vmrt_suite() {
    auto rows = vmrt_classify_samples(3, 2, 2400, 7001);
    int disagree = 0;
    for (const auto& r : rows) disagree += r.classified != r.oracle;

    Rng rng = make_rng(7002);
    int sff_bad = 0;
    for (int i = 0; i < 500; ++i) {
        VmrtClass k = i % 2 ? VmrtClass::OpenOrbit : VmrtClass::SpecialLocus;
        SgrTangent t = random_sgr_tangent(3, 2, k, rng);
        if (sgr_vmrt_member(t) != k || second_fundamental_surjective(t) != (k == VmrtClass::OpenOrbit)) ++sff_bad;
    }

    PlueckerContraction w = linear_section_witness(3, 2);
    const DomainSpec sgr = DomainSpec::type3(3);
    int witness_bad = 0;
    for (int i = 0; i < 100; ++i) {
        Subspace iso = random_dual_v1(sgr, Level{1, false}, rng);
        Subspace gen = canonicalize(gaussian(rng, 6, 2));
        const bool iso_ok = iso.dim() == 2 && w.eval(iso).norm() < 1e-12 * std::max(1.0, w.pluecker(iso.basis()).norm());
        const bool gen_ok = !is_isotropic(gen, sgr.bilinear()) && w.eval(gen).norm() > 1e-6;
        witness_bad += (iso_ok && gen_ok) ? 0 : 1;
    }

    double psi_rel = 0.0, psi_group = 0.0, psi_scale = 0.0;
    for (int i = 0; i < 100; ++i) {
        LgrChartPoint p = LgrChartPoint::reference(3, 1);
        p.x = gaussian(rng, 1, 2);
        p.z = gaussian(rng, 1, 2);
        Mat sym = gaussian(rng, 2, 2);
        p.y = 0.5 * (sym + sym.transpose()) + 0.5 * (p.z.transpose() * p.x - p.x.transpose() * p.z);
        const cd s(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)), t(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
        psi_rel = std::max(psi_rel, max_abs(sgr_relation(dilation_psi(p, s))));
        LgrChartPoint a = dilation_psi(dilation_psi(p, s), t), b = dilation_psi(p, s * t);
        psi_group = std::max(psi_group, max_abs(a.x - b.x) + max_abs(a.y - b.y) + max_abs(a.z - b.z));
        // off the relation the residual scales by s^2
        LgrChartPoint q = p;
        q.y += gaussian(rng, 2, 2);
        psi_scale = std::max(psi_scale, max_abs(sgr_relation(dilation_psi(q, s)) - s * s * sgr_relation(q)));
    }
    std::ostringstream os;
    os << disagree << " classifier disagreements in " << rows.size() << ", " << sff_bad
       << " surjectivity mismatches in 500, " << witness_bad << " witness failures in 100, Psi relation " << psi_rel
       << ", group law " << psi_group;
    return {disagree == 0 && rows.size() >= 2000 && sff_bad == 0 && witness_bad == 0 && psi_rel < 1e-12 &&
                psi_group < 1e-12 && psi_scale < 1e-12,
            os.str()};
}

// ---- 8: rank gaps ----
Outcome rank_gaps() {
    auto t0 = Clock::now();
    auto table = rank_gap_table(6);
    const double secs = seconds_since(t0);
    int regime = 0, escapes = 0, nonexist = 0, bad = 0;
    for (const auto& r : table) {
        const bool starts = [&](const char* p) { return r.verdict.rfind(p, 0) == 0; }("nonexistent");
        if (r.regime_pair && r.qp >= 2 && r.qp < 2 * r.q - 1 && r.admissible > 0) {
            ++regime;
            bad += r.all_engine() ? 0 : 1;
        }
        if (r.regime_pair && r.qp == 2 * r.q - 1) {
            ++escapes;
            bad += r.escape() && r.verdict.rfind("whitney", 0) == 0 ? 0 : 1;
        }
        const bool i_to_iii = r.source == DomainKind::I && r.target == DomainKind::III;
        const bool ii_to_i_iii = r.source == DomainKind::II && r.target != DomainKind::II;
        if ((i_to_iii || ii_to_i_iii) && r.qp >= 2 && r.qp < 2 * r.q - 1) {
            ++nonexist;
            bad += starts ? 0 : 1;
        }
    }
    std::ostringstream os;
    os << table.size() << " pairs in " << secs << " s; forced unit step " << regime << ", Whitney escape " << escapes
       << ", nonexistence " << nonexist << ", mismatches " << bad;
    return {bad == 0 && secs < 5.0 && regime > 0 && escapes > 0 && nonexist > 0, os.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"diagonal map decomposition", diagonal_decomposition},
        {"holomorphy classification", holomorphy},
        {"index monotonicity", monotonicity},
        {"moduli map oracle agreement", oracle_agreement},
        {"Sigma_r CR suite", sigma_suite},
        {"frame suite", frame_suite},
        {"VMRT suite", vmrt_suite},
        {"rank-gap arithmetic", rank_gaps},
    };
    int failed = 0;
    int idx = 1;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << idx++ << "] " << name << ": " << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria pass")
              << std::endl;
    return failed ? 1 : 0;
}
