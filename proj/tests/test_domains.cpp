#include "doctest.h"

#include "bsdlab/moduli.hpp"

using namespace bsd;

namespace {

std::vector<DomainSpec> sample_specs() {
    return {DomainSpec::type1(2, 2), DomainSpec::type1(3, 2), DomainSpec::type1(4, 3),
            DomainSpec::type2(4),    DomainSpec::type2(5),    DomainSpec::type3(2),
            DomainSpec::type3(3)};
}

// boundary point with exactly `units` unit singular values
Mat boundary_point(const DomainSpec& spec, int units, Rng& rng) {
    const int m = spec.rows(), k = spec.cols();
    Mat u = random_unitary(rng, m);
    Mat v = random_unitary(rng, k);
    if (spec.kind == DomainKind::I) {
        Mat s = Mat::Zero(m, k);
        for (int i = 0; i < k; ++i) s(i, i) = i < units ? 1.0 : uniform(rng, 0.0, 0.9);
        return u * s * v.adjoint();
    }
    if (spec.kind == DomainKind::III) {
        Mat s = Mat::Zero(k, k);
        for (int i = 0; i < k; ++i) s(i, i) = i < units ? 1.0 : uniform(rng, 0.0, 0.9);
        return v * s * v.transpose();
    }
    // skew normal form: 2x2 blocks, units counts blocks with value 1
    Mat s = Mat::Zero(k, k);
    for (int b = 0; 2 * b + 1 < k; ++b) {
        double val = b < units ? 1.0 : uniform(rng, 0.0, 0.9);
        s(2 * b, 2 * b + 1) = val;
        s(2 * b + 1, 2 * b) = -val;
    }
    return v * s * v.transpose();
}

}  // namespace

TEST_CASE("contains: examples") {
    DomainSpec d = DomainSpec::type1(2, 2);
    CHECK(contains(d, Mat::Zero(2, 2)) == Membership::Interior);
    Mat b = Mat::Zero(2, 2);
    b(0, 0) = 1.0;
    CHECK(contains(d, b) == Membership::Boundary);
    b(0, 0) = 2.0;
    CHECK(contains(d, b) == Membership::Outside);
    CHECK_THROWS_AS(contains(d, Mat::Zero(3, 2)), Error);
    Mat ns = Mat::Zero(2, 2);
    ns(0, 1) = 0.3;
    CHECK_THROWS_AS(contains(DomainSpec::type2(2), ns), Error);
    CHECK_THROWS_AS(contains(DomainSpec::type3(2), ns), Error);
}

TEST_CASE("boundary_stratum: examples") {
    DomainSpec d = DomainSpec::type1(2, 2);
    Mat z = Mat::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = 0.5;
    CHECK(boundary_stratum(d, z) == 1);
    z(1, 1) = 1.0;
    CHECK(boundary_stratum(d, z) == 0);
    Mat w = Mat::Zero(2, 2);
    w(0, 1) = 1.0;
    w(1, 0) = -1.0;
    CHECK(boundary_stratum(DomainSpec::type2(2), w) == 0);
    CHECK_THROWS_AS(boundary_stratum(d, Mat::Zero(2, 2)), Error);
}

TEST_CASE("boundary_stratum agrees with the isotropic-part oracle") {
    // the null part of I restricted to [I; Z] is the isotropic subspace of the boundary component
    Rng rng = make_rng(21);
    for (const auto& spec : sample_specs())
        for (int trial = 0; trial < 40; ++trial) {
            const int maxunits = spec.kind == DomainKind::II ? spec.rank() : spec.rank();
            const int units = 1 + static_cast<int>(rng() % maxunits);
            Mat z = boundary_point(spec, units, rng);
            int r = boundary_stratum(spec, z);
            Signature sig = restrict_signature(embed_point(spec, z), spec.hermitian(), 1e-7);
            const int level_dim_expected = spec.kind == DomainKind::II ? 2 * (spec.rank() - r) : spec.rank() - r;
            CHECK(sig.zero == level_dim_expected);
            CHECK(sig.minus == 0);
            // mobius invariance of the stratum
            Mat g = random_group_element(spec, rng, 0.4);
            CHECK(boundary_stratum(spec, mobius(spec, g, z)) == r);
        }
}

TEST_CASE("embed_point: examples and positivity") {
    DomainSpec d = DomainSpec::type1(3, 2);
    CHECK(equals(embed_point(d, Mat::Zero(3, 2)), Subspace::coords(5, {0, 1})));
    Rng rng = make_rng(22);
    DomainSpec d3 = DomainSpec::type3(3);
    for (int trial = 0; trial < 100; ++trial) {
        Mat z = project_symmetry(d3, gaussian(rng, 3, 3));
        CHECK(is_isotropic(embed_point(d3, z), d3.bilinear()));
    }
    for (const auto& spec : sample_specs())
        for (int trial = 0; trial < 20; ++trial) {
            Mat z = random_interior_point(spec, rng, 0.95);
            Signature s = restrict_signature(embed_point(spec, z), spec.hermitian());
            CHECK(s == Signature{spec.cols(), 0, 0});
            Mat back = chart_of(spec, embed_point(spec, z));
            CHECK(max_abs(back - z) < 1e-10);
        }
}

TEST_CASE("mobius: identity, isotropy and equivariance") {
    Rng rng = make_rng(23);
    for (const auto& spec : sample_specs()) {
        Mat z = random_interior_point(spec, rng);
        CHECK(max_abs(mobius(spec, identity(spec.ambient()), z) - z) < 1e-12);
        Mat k = random_isotropy(spec, rng);
        Mat zk = mobius(spec, k, z);
        Mat u = k.topLeftCorner(spec.cols(), spec.cols());
        Mat v = k.bottomRightCorner(spec.rows(), spec.rows());
        CHECK(max_abs(zk - v * z * u.inverse()) < 1e-10);
        CHECK(contains(spec, zk) == Membership::Interior);
        for (int trial = 0; trial < 100 / 7 + 1; ++trial) {
            Mat g = random_group_element(spec, rng, 0.6);
            Mat zz = random_interior_point(spec, rng);
            Mat zp = mobius(spec, g, zz);
            Subspace lhs = embed_point(spec, zp);
            Subspace rhs = canonicalize(g * embed_point(spec, zz).orth());
            CHECK(distance(lhs, rhs) < 1e-9);
        }
    }
    DomainSpec d = DomainSpec::type1(2, 2);
    Mat bad = identity(4);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(mobius(d, bad, Mat::Zero(2, 2)), Error);
}

TEST_CASE("contains is invariant under mobius (500 trials per type)") {
    Rng rng = make_rng(24);
    for (DomainSpec spec : {DomainSpec::type1(3, 2), DomainSpec::type2(4), DomainSpec::type3(2)})
        for (int trial = 0; trial < 500; ++trial) {
            Mat g = random_group_element(spec, rng, 0.5);
            Mat z;
            Membership expect;
            if (trial % 3 == 2) {
                z = boundary_point(spec, 1, rng);
                expect = Membership::Boundary;
            } else {
                z = random_interior_point(spec, rng, 0.9);
                expect = Membership::Interior;
            }
            CHECK(contains(spec, mobius(spec, g, z)) == expect);
        }
}

TEST_CASE("type II odd n: rank and maximal isotropic dimension") {
    DomainSpec d = DomainSpec::type2(5);
    CHECK(d.rank() == 2);
    Rng rng = make_rng(25);
    Subspace v = random_sigma_v1(d, Level{0, false}, rng);
    CHECK(v.dim() == 4);
    CHECK(is_isotropic(v, d.bilinear()));
    CHECK(is_isotropic(v, d.hermitian()));
}

TEST_CASE("characteristic_slice: examples") {
    DomainSpec d = DomainSpec::type1(2, 2);
    FlagPair full = make_flag(d, Level{2, false}, Subspace::zero(4), Subspace::full(4));
    auto pred = characteristic_slice(d, full);
    Rng rng = make_rng(26);
    for (int i = 0; i < 20; ++i) {
        Mat z = random_interior_point(d, rng, 1.3);
        CHECK(pred(z) == (contains(d, z) == Membership::Interior));
    }
    // V1 = e1 + z0 e3, V2 = span(e1, e2, e3): first column of Z fixed to (z0, 0), second row zero
    const cd z0(0.3, 0.1);
    Mat v1 = Mat::Zero(4, 1);
    v1(0, 0) = 1.0;
    v1(2, 0) = z0;
    FlagPair f = make_flag(d, Level{1, false}, canonicalize(v1), Subspace::coords(4, {0, 1, 2}));
    auto pf = characteristic_slice(d, f);
    Mat zin = Mat::Zero(2, 2);
    zin(0, 0) = z0;
    zin(0, 1) = 0.4;
    CHECK(pf(zin));
    Mat zout = zin;
    zout(1, 1) = 0.2;
    CHECK_FALSE(pf(zout));
    AffineSlice sl = slice_chart(f);
    CHECK(sl.dim() == 1);
    CHECK(level_rank(d, f.level()) == 1);
}
