#include "doctest.h"

#include "bsdlab/moduli.hpp"

using namespace bsd;

namespace {

std::vector<DomainSpec> duals() {
    return {DomainSpec::type1(3, 2), DomainSpec::type1(3, 3), DomainSpec::type2(4), DomainSpec::type2(6),
            DomainSpec::type3(3)};
}

// random W in D_r(X) inside a given subspace (bilinear isotropy inherited)
Subspace random_sub(const Subspace& v, int dim, Rng& rng) {
    return canonicalize(v.orth() * gaussian(rng, v.dim(), dim));
}

}  // namespace

TEST_CASE("make_flag: examples and errors") {
    DomainSpec lgr2 = DomainSpec::type3(2);
    FlagPair f = make_flag(lgr2, Level{1, false}, Subspace::coords(4, {0}));
    CHECK(f.V2().dim() == 3);
    CHECK(equals(f.V2(), perp(Subspace::coords(4, {0}), antisymmetric_form(2))));

    DomainSpec ogr4 = DomainSpec::type2(4);
    // e1, e2 span an S-isotropic plane
    FlagPair g = make_flag(ogr4, Level{1, false}, Subspace::coords(8, {0, 1}));
    CHECK(g.V2().dim() == 6);
    Mat bad(8, 2);
    bad.setZero();
    bad(0, 0) = 1.0;
    bad(4, 0) = 1.0;
    bad(1, 1) = 1.0;
    CHECK_THROWS_AS(make_flag(ogr4, Level{1, false}, canonicalize(bad)), Error);

    DomainSpec gr = DomainSpec::type1(3, 2);
    CHECK_THROWS_AS(make_flag(gr, Level{1, false}, Subspace::coords(5, {0}), Subspace::coords(5, {1, 2, 3, 4})),
                    Error);
    CHECK_THROWS_AS(make_flag(gr, Level{1, false}, Subspace::coords(5, {0, 1})), Error);
    CHECK_NOTHROW(make_flag(gr, Level{1, false}, Subspace::coords(5, {0}), Subspace::coords(5, {0, 1, 2, 3})));
}

TEST_CASE("pr_project: round trip on Sigma points (1000 per dual)") {
    Rng rng = make_rng(31);
    for (const auto& spec : duals())
        for (int i = 0; i < 1000; ++i) {
            auto lvls = levels(spec);
            Level lv = lvls[rng() % (lvls.size() - 1)];
            Subspace v1 = random_sigma_v1(spec, lv, rng);
            CHECK(is_isotropic(v1, spec.hermitian()));
            FlagPair s = sigma_point(spec, lv, v1);
            CHECK(equals(pr_project(s), v1, 1e-10));
            // the flag is determined by V1
            FlagPair s2 = sigma_point(spec, lv, canonicalize(v1.orth() * random_unitary(rng, v1.dim())));
            CHECK(flag_distance(s, s2) < 1e-9);
        }
}

TEST_CASE("z_tau_contains and q_mu_contains: tables") {
    Rng rng = make_rng(32);
    for (const auto& spec : duals()) {
        auto lv = levels(spec);
        for (std::size_t i = 0; i < lv.size(); ++i)
            for (std::size_t j = i + 1; j < lv.size(); ++j) {
                Level s = lv[i], r = lv[j];
                FlagPair tau = random_flag(spec, s, rng);
                Subspace w = random_sub(tau.V1(), level_dim(spec, r), rng);
                CHECK(z_tau_contains(tau, r, w));
                CHECK_FALSE(z_tau_contains(tau, r, tau.V1()));
                CHECK_THROWS_AS(z_tau_contains(tau, s, w), Error);

                FlagPair mu = random_flag(spec, r, rng);
                // W = mu.V1 + (subspace of V2 / V1) of the right size, isotropic for II/III
                Subspace wq;
                if (spec.has_bilinear()) {
                    // extend mu.V1 inside a maximal isotropic subspace containing it
                    Subspace big = random_dual_v1(spec, Level{0, false}, rng);
                    (void)big;
                    Mat g = random_complex_group_element(spec, rng, 0.7);
                    FlagPair t = transform_flag(standard_flag(spec, s), g);
                    FlagPair m2 = transform_flag(standard_flag(spec, r), g);
                    CHECK(q_mu_contains(m2, s, t.V1()));
                    wq = t.V1();
                    mu = m2;
                } else {
                    Mat v2 = mu.V2().orth();
                    Mat extra = v2 * gaussian(rng, v2.cols(), level_dim(spec, s) - mu.V1().dim());
                    wq = canonicalize(hconcat(mu.V1().orth(), extra));
                }
                CHECK(q_mu_contains(mu, s, wq));
                Subspace other = random_dual_v1(spec, s, rng);
                if (mu.V1().dim() > 0) CHECK_FALSE(q_mu_contains(mu, s, other));
                CHECK_THROWS_AS(q_mu_contains(mu, r, wq), Error);
            }
    }
}

TEST_CASE("Z_tau lies in Sigma_r iff tau is isotropic (500 pairs)") {
    Rng rng = make_rng(33);
    int count = 0;
    while (count < 500) {
        for (const auto& spec : duals()) {
            auto lv = proper_levels(spec);
            lv.insert(lv.begin(), Level{0, false});
            if (lv.size() < 2) continue;
            std::size_t i = rng() % (lv.size() - 1);
            std::size_t j = i + 1 + rng() % (lv.size() - i - 1);
            Level s = lv[i], r = lv[j];
            const bool iso = (count % 2) == 0;
            FlagPair tau = iso ? random_sigma_flag(spec, s, rng) : random_flag(spec, s, rng);
            Subspace w = random_sub(tau.V1(), level_dim(spec, r), rng);
            CHECK(z_tau_contains(tau, r, w));
            CHECK(sigma_contains(spec, r, w) == is_isotropic(tau.V1(), spec.hermitian()));
            CHECK(is_isotropic(tau.V1(), spec.hermitian()) == iso);
            ++count;
        }
    }
}

TEST_CASE("sigma_contains: examples and boundary limits") {
    DomainSpec d = DomainSpec::type1(3, 2);
    Mat v = Mat::Zero(5, 1);
    v(0, 0) = 1.0;
    v(2, 0) = 1.0;
    CHECK(sigma_contains(d, Level{1, false}, canonicalize(v)));
    CHECK_FALSE(sigma_contains(d, Level{1, false}, Subspace::coords(5, {0})));
    CHECK_THROWS_AS(sigma_contains(d, Level{1, false}, Subspace::coords(5, {0, 1})), Error);

    // radial limits of boundary points of stratum r carry an isotropic V of dim q - r
    Rng rng = make_rng(34);
    for (int trial = 0; trial < 50; ++trial) {
        Mat u = random_unitary(rng, 3), w = random_unitary(rng, 2);
        Mat s = Mat::Zero(3, 2);
        s(0, 0) = 1.0;
        s(1, 1) = 0.4;
        Mat zb = u * s * w.adjoint();
        REQUIRE(boundary_stratum(d, zb) == 1);
        // along t -> 1 the vector of the unit singular direction becomes null
        Mat zt = 0.999999999 * zb;
        Subspace e = embed_point(d, zt);
        Mat g = d.hermitian().gram(e.orth());
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.adjoint()));
        Vec nullvec = e.orth() * es.eigenvectors().col(0);
        Subspace wnull = canonicalize(nullvec);
        CHECK(sigma_contains(d, Level{1, false}, canonicalize(vconcat(w.col(0), zb * w.col(0)))));
        CHECK(distance(wnull, canonicalize(vconcat(w.col(0), zb * w.col(0)))) < 1e-4);
    }
}

TEST_CASE("chain_connect: examples and self-check") {
    Rng rng = make_rng(35);
    DomainSpec gr = DomainSpec::type1(3, 2);
    Level r{1, false};
    Subspace a = random_dual_v1(gr, r, rng);
    CHECK(chain_connect(gr, r, a, a, ChainMode::Z, rng).empty());
    Subspace b = random_dual_v1(gr, r, rng);
    auto one = chain_connect(gr, r, a, b, ChainMode::Z, rng);
    REQUIRE(one.size() == 1);
    CHECK(equals(one[0].V1(), sum(a, b)));

    DomainSpec g25 = DomainSpec::type1(3, 2);
    Level r0{0, false};
    for (int trial = 0; trial < 30; ++trial) {
        // Gr(2, C^5) at level 0: planes
        Subspace x = random_dual_v1(g25, r0, rng), y = random_dual_v1(g25, r0, rng);
        // one-step pair
        Subspace x1 = canonicalize(hconcat(x.orth().leftCols(1), y.orth().leftCols(1)));
        auto qchain = chain_connect(g25, r0, x, x1, ChainMode::Q, rng);
        REQUIRE(qchain.size() == 1);
        CHECK(q_mu_contains(qchain[0], r0, x));
        CHECK(q_mu_contains(qchain[0], r0, x1));
        auto qq = chain_connect(g25, r0, x, y, ChainMode::Q, rng);
        CHECK(q_mu_contains(qq.front(), r0, x));
        CHECK(q_mu_contains(qq.back(), r0, y));
    }
    for (const auto& spec : duals())
        for (Level lv : proper_levels(spec))
            for (int trial = 0; trial < 10; ++trial) {
                CAPTURE(spec.name());
                CAPTURE(lv.str());
                Subspace x = random_dual_v1(spec, lv, rng), y = random_dual_v1(spec, lv, rng);
                const int a_dim = level_dim(spec, lv);
                auto zc = chain_connect(spec, lv, x, y, ChainMode::Z, rng);
                REQUIRE(!zc.empty());
                CHECK(z_tau_contains(zc.front(), lv, x));
                CHECK(z_tau_contains(zc.back(), lv, y));
                for (std::size_t i = 0; i + 1 < zc.size(); ++i)
                    CHECK(intersect(zc[i].V1(), zc[i + 1].V1(), 1e-7).dim() >= a_dim);
                auto qc = chain_connect(spec, lv, x, y, ChainMode::Q, rng);
                REQUIRE(!qc.empty());
                CHECK(q_mu_contains(qc.front(), lv, x));
                CHECK(q_mu_contains(qc.back(), lv, y));
                for (std::size_t i = 0; i + 1 < qc.size(); ++i) {
                    Subspace lo = sum(qc[i].V1(), qc[i + 1].V1());
                    Subspace hi = intersect(qc[i].V2(), qc[i + 1].V2(), 1e-7);
                    CHECK(lo.dim() <= a_dim);
                    CHECK(contained_in(lo, hi, 1e-7));
                }
            }
}

TEST_CASE("subgrassmannian dimensions match the closed forms (ambient <= 8)") {
    Rng rng = make_rng(36);
    std::vector<DomainSpec> all;
    for (int q = 1; q <= 4; ++q)
        for (int p = q; p + q <= 8; ++p) all.push_back(DomainSpec::type1(p, q));
    for (int n = 2; n <= 4; ++n) all.push_back(DomainSpec::type2(n));
    for (int n = 1; n <= 4; ++n) all.push_back(DomainSpec::type3(n));
    int checked = 0;
    for (const auto& spec : all) {
        auto lv = levels(spec);
        for (std::size_t i = 0; i < lv.size(); ++i)
            for (std::size_t j = i + 1; j < lv.size(); ++j) {
                Level s = lv[i], r = lv[j];
                FlagPair tau = random_flag(spec, s, rng);
                Subspace w = random_sub(tau.V1(), level_dim(spec, r), rng);
                CHECK(z_tau_dim_numeric(tau, r, w) == z_tau_dim_closed(spec, s, r));
                // Q_mu at level r (above s): mu at r, W at s
                Mat g = spec.has_bilinear() ? random_complex_group_element(spec, rng, 0.7)
                                            : expm(0.3 * gaussian(rng, spec.ambient(), spec.ambient()));
                FlagPair mu = transform_flag(standard_flag(spec, r), g);
                FlagPair t = transform_flag(standard_flag(spec, s), g);
                CHECK(q_mu_dim_numeric(mu, s, t.V1()) == q_mu_dim_closed(spec, r, s));
                checked += 2;
            }
    }
    CHECK(checked > 100);
}

TEST_CASE("Q_mu cap Sigma_r is a real hyperquadric on LGr") {
    Rng rng = make_rng(37);
    for (int n = 2; n <= 4; ++n) {
        DomainSpec d = DomainSpec::type3(n);
        for (int r = 0; r + 1 < n; ++r)
            for (int trial = 0; trial < 5; ++trial) {
                FlagPair mu = random_sigma_flag(d, Level{r + 1, false}, rng);
                // admissible directions w: W = mu.V1 + w must also be Hermitian-orthogonal to mu.V1
                Subspace lin = intersect(mu.V2(), perp(mu.V1(), d.hermitian()), 1e-8);
                Signature sig = restrict_signature(lin, d.hermitian(), 1e-8);
                CHECK(sig.zero == mu.V1().dim());
                CHECK(sig.plus >= 1);
                CHECK(sig.minus >= 1);
                CHECK(sig.plus == sig.minus);
                // a null direction gives a point of Sigma_r, a positive one does not
                Mat g = d.hermitian().gram(lin.orth());
                Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.adjoint()));
                Vec neg = lin.orth() * es.eigenvectors().col(0);
                Vec pos = lin.orth() * es.eigenvectors().col(lin.dim() - 1);
                double a = std::sqrt(-es.eigenvalues()(0)), b = std::sqrt(es.eigenvalues()(lin.dim() - 1));
                Vec null = neg / a + pos / b;
                Subspace wn = canonicalize(hconcat(mu.V1().orth(), null));
                Subspace wp = canonicalize(hconcat(mu.V1().orth(), pos));
                CHECK(q_mu_contains(mu, Level{r, false}, wn));
                CHECK(sigma_contains(d, Level{r, false}, wn));
                CHECK_FALSE(sigma_contains(d, Level{r, false}, wp));
            }
    }
}

TEST_CASE("LGr chart: reference point, Levi bracket examples") {
    const int n = 3, r = 1;
    LgrChartPoint p = LgrChartPoint::reference(n, r);
    CHECK(max_abs(lgr_bilinear_residual(p)) == 0.0);
    CHECK(max_abs(lgr_hermitian_residual(p)) == 0.0);
    const int k = n - r;
    ChartTangent v{Mat::Zero(r, k), Mat::Zero(k, k), Mat::Zero(r, k)};
    v.dy(0, 0) = cd(0.0, 1.0);
    ChartTangent w1{Mat::Zero(r, k), Mat::Zero(k, k), Mat::Zero(r, k)};
    w1.dx(0, 0) = 1.0;
    ChartTangent w2{Mat::Zero(r, k), Mat::Zero(k, k), Mat::Zero(r, k)};
    w2.dz(0, 0) = 1.0;
    LeviValue lv = levi_bracket_check(n, r, p, v, w1, w2);
    // dy ^ (dx^t ^ dz - dz^t ^ dx) evaluated on (v, w1, w2)
    Mat expect = v.dy * (w1.dx.transpose() * w2.dz - w2.dx.transpose() * w1.dz - w1.dz.transpose() * w2.dx +
                         w2.dz.transpose() * w1.dx);
    CHECK(max_abs(lv.tilde - expect) < 1e-14);
    CHECK(max_abs(lv.tilde) > 0.5);
    // real Levi form: w1 = w2 = dx direction
    LeviValue lx = levi_bracket_check(n, r, p, v, w1, w1);
    CHECK(std::abs(lx.scalar) > 0.5);

    // CR vector v with CR w1: the value vanishes
    ChartTangent vcr{Mat::Zero(r, k), Mat::Zero(k, k), Mat::Zero(r, k)};
    vcr.dx(0, 1) = cd(0.3, 0.2);
    LeviValue l0 = levi_bracket_check(n, r, p, vcr, w1, w2);
    CHECK(std::abs(l0.scalar) < 1e-14);

    ChartTangent bad = v;
    bad.dy(0, 0) = 1.0;
    CHECK_THROWS_AS(levi_bracket_check(n, r, p, bad, w1, w2), Error);
    LgrChartPoint off = p;
    off.y(0, 0) = 2.0;
    CHECK_THROWS_AS(levi_bracket_check(n, r, off, v, w1, w2), Error);
}

TEST_CASE("Sigma_r is generic: CR tangents span the holomorphic tangent") {
    Rng rng = make_rng(38);
    for (int n = 2; n <= 4; ++n)
        for (int r = 1; r < n; ++r)
            for (int trial = 0; trial < 3; ++trial) {
                DomainSpec d = DomainSpec::type3(n);
                Subspace v1 = random_sigma_v1(d, Level{r, false}, rng);
                LgrChartPoint p = LgrChartPoint::from_subspace(n, r, v1);
                CHECK(max_abs(lgr_bilinear_residual(p)) < 1e-9);
                CHECK(max_abs(lgr_hermitian_residual(p)) < 1e-9);
                auto hol = lgr_holomorphic_tangents(p);
                auto real = lgr_sigma_tangents(p);
                // real codimension k(k+1)/2, k = n - r (for n = 2, r = 0 this is U(2)/O(2))
                const int k = n - r;
                CHECK(static_cast<int>(real.size()) == 2 * static_cast<int>(hol.size()) - k * (k + 1) / 2);
                Mat span(2 * r * (n - r) + (n - r) * (n - r), static_cast<int>(real.size()));
                for (std::size_t j = 0; j < real.size(); ++j) {
                    Vec c(span.rows());
                    int idx = 0;
                    for (auto* m : {&real[j].dx, &real[j].dy, &real[j].dz})
                        for (int b = 0; b < m->cols(); ++b)
                            for (int a = 0; a < m->rows(); ++a) c(idx++) = (*m)(a, b);
                    span.col(static_cast<int>(j)) = c;
                }
                CHECK(numeric_rank(span) == static_cast<int>(hol.size()));
            }
}
