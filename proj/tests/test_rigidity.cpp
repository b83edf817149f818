#include "doctest.h"

#include "bsdlab/catalog.hpp"
#include "bsdlab/rigidity.hpp"

#include <chrono>

using namespace bsd;

namespace {

Subspace random_plane(int n, int k, Rng& rng) { return canonicalize(gaussian(rng, n, k)); }

// model samples H(V) = W0 + iota(V)
std::vector<std::pair<Subspace, Subspace>> model_samples(const Subspace& w0, const Mat& iota, int n, int a, int count,
                                                         Rng& rng) {
    std::vector<std::pair<Subspace, Subspace>> out;
    for (int i = 0; i < count; ++i) {
        Subspace v = random_plane(n, a, rng);
        out.emplace_back(v, canonicalize(hconcat(w0.orth(), iota * v.orth())));
    }
    return out;
}

// v -> v (x) v inside C^{n^2}: lines go to lines, not affinely
Subspace veronese(const Subspace& v) {
    const Vec x = v.orth().col(0);
    const int n = static_cast<int>(x.size());
    Mat out(n * n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i * n + j, 0) = x(i) * x(j);
    return canonicalize(out);
}

}  // namespace

TEST_CASE("detect_trivial: round trip on 100 random models") {
    Rng rng = make_rng(601);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 2, a = 1 + trial % 2, w = trial % 3;
        const int np = n + w + 1;
        Subspace w0 = w ? random_plane(np, w, rng) : Subspace::zero(np);
        Mat iota = gaussian(rng, np, n);
        const int gdim = a * (n - a);
        auto samples = model_samples(w0, iota, n, a, gdim * (gdim + 1) + 2, rng);
        TrivialFit fit = detect_trivial(samples);
        REQUIRE(fit.accepted);
        CHECK(fit.residual < 1e-7);
        REQUIRE(fit.model.has_value());
        CHECK(equals(fit.model->W0, w0, 1e-8));
        for (int i = 0; i < 5; ++i) {
            Subspace v = random_plane(n, a, rng);
            Subspace expect = canonicalize(hconcat(w0.orth(), iota * v.orth()));
            CHECK(distance(fit.model->apply(v), expect) < 1e-7);
        }
    }
}

TEST_CASE("detect_trivial: identity, nonlinear maps, sample counts") {
    Rng rng = make_rng(602);
    std::vector<std::pair<Subspace, Subspace>> id;
    for (int i = 0; i < 30; ++i) {
        Subspace v = random_plane(4, 2, rng);
        id.emplace_back(v, v);
    }
    TrivialFit f = detect_trivial(id);
    REQUIRE(f.accepted);
    CHECK(f.model->W0.dim() == 0);
    // iota is a multiple of the identity (phase fixed, top singular value 1)
    CHECK(max_abs(f.model->iota - identity(4)) < 1e-8);

    std::vector<std::pair<Subspace, Subspace>> ver;
    for (int i = 0; i < 30; ++i) {
        Subspace v = random_plane(3, 1, rng);
        ver.emplace_back(v, veronese(v));
    }
    TrivialFit r = detect_trivial(ver);
    CHECK_FALSE(r.accepted);
    CHECK(r.residual > 1e-3);
    CHECK_FALSE(r.reason.empty());

    // 2-planes in C^4: dim Gr = 4, so 20 samples are needed
    std::vector<std::pair<Subspace, Subspace>> few(id.begin(), id.begin() + 19);
    try {
        detect_trivial(few);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientSamples);
    }
    few.push_back(id[19]);
    CHECK(detect_trivial(few).accepted);

    // H(V) of the wrong dimension
    std::vector<std::pair<Subspace, Subspace>> wrong;
    for (int i = 0; i < 30; ++i) {
        Subspace v = random_plane(4, 2, rng);
        wrong.emplace_back(v, random_plane(6, i % 2 ? 3 : 4, rng));
    }
    CHECK_FALSE(detect_trivial(wrong).accepted);
}

TEST_CASE("detect_standard") {
    CHECK(detect_standard(catalog_entry("identity-I33").map, 603).standard);
    CHECK(detect_standard(catalog_entry("block-I32-I42").map, 603).standard);
    CHECK(detect_standard(catalog_entry("transpose-I33").map, 603).standard);
    CHECK(detect_standard(catalog_entry("identity-III3").map, 603).standard);
    StandardVerdict d = detect_standard(catalog_entry("diagonal-I22-I33").map, 603);
    CHECK_FALSE(d.standard);
    CHECK(d.degree == 1);
    CHECK(d.hull_rank == 3);
    CHECK(d.source_rank == 2);
    // the block embedding has a proper hull: V1' = 0 and V2' = C^3 + first 2 rows of C^4
    StandardVerdict b = detect_standard(catalog_entry("block-I32-I42").map, 603);
    CHECK(b.hull_rank == 2);
    CHECK(b.hull.V1.dim() == 0);
    CHECK(b.hull.V2.dim() == 5);
    // a quadratic map into a rank-2 hull is not standard either
    PolyMatrixMap sq = PolyMatrixMap::identity(DomainSpec::type1(2, 2));
    sq.at(0, 0) += Poly::variable(sq.nvars(), 0) * Poly::variable(sq.nvars(), 1) * cd(0.1);
    CHECK_FALSE(detect_standard(sq, 603).standard);
}

TEST_CASE("decompose: diagonal map") {
    const PolyMatrixMap& f = catalog_entry("diagonal-I22-I33").map;
    DecompositionResult d = decompose(f, 604, 200);
    CHECK(d.grid == 200);
    CHECK(d.reassembly_residual < 1e-7);
    CHECK(d.f1_residual < 1e-7);
    CHECK(d.cross_residual < 1e-7);
    CHECK(d.f1_standard);
    CHECK_FALSE(d.via_transpose);
    CHECK_FALSE(d.unit_step);
    REQUIRE(d.F2.has_value());
    CHECK(d.F2->out_rows() == 1);
    CHECK(d.F2->out_cols() == 1);
    // F2 = 0.3 z11 up to a unimodular constant
    Rng rng = make_rng(605);
    cd ratio0 = 0.0;
    for (int i = 0; i < 20; ++i) {
        Mat z = random_interior_point(f.source(), rng);
        cd ratio = d.eval_F2(z)(0, 0) / z(0, 0);
        CHECK(std::abs(std::abs(ratio) - 0.3) < 1e-9);
        if (i == 0) ratio0 = ratio;
        CHECK(std::abs(ratio - ratio0) < 1e-9);
        CHECK(max_abs(d.reassemble(z) - f.eval(z)) < 1e-9);
    }
    // F1 preserves Kobayashi distances
    for (int i = 0; i < 20; ++i) {
        Mat z = random_interior_point(f.source(), rng), w = random_interior_point(f.source(), rng);
        CHECK(std::abs(kobayashi_distance(d.F1.eval(z), d.F1.eval(w)) - kobayashi_distance(z, w)) < 1e-6);
    }
}

TEST_CASE("decompose: identity, transpose and rotated diagonal") {
    DecompositionResult id = decompose(catalog_entry("identity-I33").map, 606, 50);
    CHECK_FALSE(id.F2.has_value());
    CHECK(id.reassembly_residual < 1e-7);
    CHECK(id.f1_standard);
    CHECK(id.unit_step);

    DecompositionResult tr = decompose(catalog_entry("transpose-I33").map, 607, 50);
    CHECK(tr.via_transpose);
    CHECK(tr.reassembly_residual < 1e-7);
    CHECK_FALSE(tr.F2.has_value());

    const PolyMatrixMap& rot = catalog_entry("rotated-diagonal-I22-I33").map;
    DecompositionResult rd = decompose(rot, 608, 200);
    CHECK(rd.reassembly_residual < 1e-7);
    CHECK(rd.cross_residual < 1e-7);
    CHECK(rd.f1_standard);
    REQUIRE(rd.F2.has_value());
    CHECK(rd.F2->degree() == 1);
    // F2 = 0.3 (D Z A^H)_11 up to a phase: a rank-one linear form of norm 0.3
    CHECK(std::abs(rd.eval_F2(Mat::Zero(2, 2))(0, 0)) < 1e-12);
    Mat coef(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Mat e = Mat::Zero(2, 2);
            e(i, j) = 1.0;
            coef(i, j) = rd.eval_F2(e)(0, 0);
        }
    RVec sv = singular_values(coef);
    CHECK(std::abs(sv(0) - 0.3) < 1e-9);
    CHECK(sv(1) < 1e-9);
    Rng rng = make_rng(609);
    for (int i = 0; i < 10; ++i) {
        Mat z = random_interior_point(rot.source(), rng);
        CHECK(max_abs(rd.reassemble(z) - rot.eval(z)) < 1e-9);
    }

    for (const auto& e : catalog()) {
        if (!e.decomposable) continue;
        CAPTURE(e.id);
        DecompositionResult r = decompose(e.map, 610, 200);
        CHECK(r.reassembly_residual < 1e-7);
        CHECK(r.f1_standard);
    }
}

TEST_CASE("decompose: the corrupted map is rejected") {
    try {
        decompose(corrupted_identity(), 611, 50);
        CHECK(false);
    } catch (const Error& e) {
        const bool expected = e.kind() == ErrorKind::RegimeViolation || e.kind() == ErrorKind::InconsistentDependence ||
                              e.kind() == ErrorKind::OrthogonalityResidual || e.kind() == ErrorKind::ChartFailure;
        CHECK(expected);
    }
    PolyMatrixMap disc = PolyMatrixMap::identity(DomainSpec::type1(3, 1));
    CHECK_THROWS_AS(decompose(disc, 612, 10), Error);
}

TEST_CASE("rank-gap analysis: examples") {
    RankGapReport a = rank_gap_analysis(DomainKind::III, 3, DomainKind::I, 4);
    CHECK(a.regime_pair);
    CHECK(a.admissible > 0);
    CHECK(a.all_engine());
    CHECK(a.verdict.rfind("rigid", 0) == 0);

    RankGapReport w = rank_gap_analysis(DomainKind::I, 2, DomainKind::I, 3);
    CHECK(w.escape());
    CHECK(w.verdict.rfind("whitney", 0) == 0);
    REQUIRE_FALSE(w.example_escape.empty());
    CHECK(w.example_escape.front() == 2);

    for (int n = 4; n <= 12; ++n) {
        const int q = n / 2;
        for (int qp = 2; qp < 2 * q - 1; ++qp) {
            CAPTURE(n);
            CAPTURE(qp);
            CHECK(rank_gap_analysis(DomainKind::II, q, DomainKind::I, qp).verdict.rfind("nonexistent", 0) == 0);
            CHECK(rank_gap_analysis(DomainKind::II, q, DomainKind::III, qp).verdict.rfind("nonexistent", 0) == 0);
        }
    }
    for (int q = 2; q <= 6; ++q)
        for (int qp = 2; qp < 2 * q - 1; ++qp)
            CHECK(rank_gap_analysis(DomainKind::I, q, DomainKind::III, qp).verdict.rfind("nonexistent", 0) == 0);
}

TEST_CASE("rank-gap analysis: counts against brute force") {
    // independent count: all subsets of {lo..cap} of size q-1 (type I / III targets, integer chains)
    auto choose = [](int n, int k) {
        long long c = 1;
        for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
        return k < 0 || k > n ? 0LL : c;
    };
    for (int q = 2; q <= 6; ++q)
        for (int qp = 2; qp <= 2 * q + 1; ++qp) {
            RankGapReport r = rank_gap_analysis(DomainKind::I, q, DomainKind::I, qp);
            CHECK(r.admissible == choose(qp - 1, q - 1));
            // sequences with no unit step: i_1 >= 2 and gaps >= 2, i.e. choose(qp - 1 - (q - 1), q - 1)
            CHECK(r.admissible - r.with_engine == choose(qp - 1 - (q - 1), q - 1));
        }
}

TEST_CASE("rank-gap table: properties") {
    auto t0 = std::chrono::steady_clock::now();
    auto table = rank_gap_table(6);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 5.0);
    auto again = rank_gap_table(6);
    REQUIRE(again.size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(again[i].admissible == table[i].admissible);
        CHECK(again[i].verdict == table[i].verdict);
    }
    for (const auto& r : table) {
        CAPTURE(kind_name(r.source));
        CAPTURE(r.q);
        CAPTURE(kind_name(r.target));
        CAPTURE(r.qp);
        CHECK(r.with_engine <= r.admissible);
        CHECK(r.rigid_pattern <= r.with_engine);
        if (r.regime_pair && r.qp >= 2 && r.qp < 2 * r.q - 1 && r.admissible > 0) CHECK(r.all_engine());
        if (r.regime_pair && r.qp == 2 * r.q - 1) CHECK(r.escape());
    }
}
