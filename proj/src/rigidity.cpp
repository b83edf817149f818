#include "bsdlab/rigidity.hpp"

#include <cmath>
#include <functional>

namespace bsd {

// ---- trivial embeddings ----

Subspace TrivialEmbeddingModel::apply(const Subspace& v) const {
    Mat img = iota * v.orth();
    return canonicalize(hconcat(W0.orth(), img));
}

TrivialFit detect_trivial(const std::vector<std::pair<Subspace, Subspace>>& samples, double threshold) {
    if (samples.empty()) fail(ErrorKind::InsufficientSamples, "no samples");
    const int n = samples.front().first.ambient();
    const int np = samples.front().second.ambient();
    const int a = samples.front().first.dim();
    Mat vs(n, 0);
    for (const auto& [v, h] : samples) {
        if (v.ambient() != n || h.ambient() != np || v.dim() != a)
            fail(ErrorKind::DimensionMismatch, "samples mix Grassmannians");
        vs = hconcat(vs, v.orth());
    }
    Subspace dom = canonicalize(vs, 1e-8);
    const int s = dom.dim();
    const long long gdim = static_cast<long long>(a) * (s - a);
    if (static_cast<long long>(samples.size()) < std::max(1LL, gdim * (gdim + 1)))
        fail(ErrorKind::InsufficientSamples, "need " + std::to_string(gdim * (gdim + 1)) + " samples, got " +
                                                 std::to_string(samples.size()));
    TrivialFit out;
    Subspace w0 = samples.front().second;
    for (const auto& [v, h] : samples) w0 = intersect(w0, h, 1e-8);
    for (const auto& [v, h] : samples)
        if (h.dim() != w0.dim() + a) {
            out.reason = "dim H(V) differs from dim W0 + dim V";
            out.residual = 1.0;
            return out;
        }
    const Mat qc = w0.dim() ? null_space(w0.orth().adjoint()) : identity(np);
    const Mat qs = dom.orth();
    const int c = static_cast<int>(qc.cols());
    if (c == 0 || s == 0) {
        out.reason = "nothing left to embed";
        out.residual = 1.0;
        return out;
    }
    // normal equations of (I - P_H) Qc X (Qs^H v) = 0 in vec(X)
    Mat g = Mat::Zero(c * s, c * s);
    for (const auto& [v, h] : samples) {
        const Mat ah = (identity(np) - h.projector()) * qc;
        const Mat bs = qs.adjoint() * v.orth();
        for (int j = 0; j < bs.cols(); ++j) {
            Mat blk(np, c * s);
            for (int k = 0; k < s; ++k) blk.middleCols(k * c, c) = bs(k, j) * ah;
            g += blk.adjoint() * blk;
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    Vec x = es.eigenvectors().col(0);
    Mat m = Eigen::Map<const Mat>(x.data(), c, s);
    RVec sv = singular_values(m);
    m /= sv(0);
    Mat iota = qc * m * qs.adjoint();
    Eigen::Index bi = 0, bj = 0;
    iota.cwiseAbs().maxCoeff(&bi, &bj);
    iota *= std::abs(iota(bi, bj)) / iota(bi, bj);
    double worst = 0.0;
    for (const auto& [v, h] : samples) {
        const Mat img = iota * v.orth();
        const Mat res = img - h.projector() * img;
        for (int j = 0; j < img.cols(); ++j) {
            const double nv = img.col(j).norm();
            worst = std::max(worst, nv > 0 ? res.col(j).norm() / nv : 1.0);
        }
    }
    out.residual = worst;
    TrivialEmbeddingModel model{w0, iota, dom};
    out.model = model;
    if (sv(sv.size() - 1) < 1e-6 * sv(0)) {
        out.reason = "fitted map is not injective";
        return out;
    }
    out.accepted = worst < threshold;
    if (!out.accepted) out.reason = "residual above threshold";
    return out;
}

// ---- standard embeddings ----

namespace {

int hull_rank(const DomainSpec& tgt, const TargetFlag& h) {
    switch (tgt.kind) {
        case DomainKind::I: return std::min(tgt.q - h.V1.dim(), h.V2.dim() - tgt.q);
        case DomainKind::II: return (2 * tgt.rank() - h.V1.dim()) / 2;
        case DomainKind::III: return tgt.n - h.V1.dim();
    }
    return 0;
}

TargetFlag image_hull(const PolyMatrixMap& f, int samples, Rng& rng) {
    const int cols = f.out_cols();
    Subspace v1, v2;
    for (int j = 0; j < samples; ++j) {
        Mat z = random_interior_point(f.source(), rng, 0.8);
        Subspace e = canonicalize(vconcat(identity(cols), f.eval(z)));
        if (j == 0) {
            v1 = e;
            v2 = e;
        } else {
            v1 = intersect(v1, e);
            v2 = sum(v2, e);
        }
    }
    TargetFlag h;
    h.V1 = v1;
    h.V2 = f.target().has_bilinear() ? perp(v1, f.target().bilinear()) : v2;
    return h;
}

}  // namespace

StandardVerdict detect_standard(const PolyMatrixMap& f, std::uint64_t seed, int samples) {
    if (!f.has_target()) fail(ErrorKind::ChartFailure, "map has no target chart");
    Rng rng = make_rng(seed);
    StandardVerdict v;
    v.hull = image_hull(f, samples > 0 ? samples : 2 * f.source().chart_dim() + 4, rng);
    v.hull_rank = hull_rank(f.target(), v.hull);
    v.source_rank = f.source().rank();
    v.degree = f.degree();
    v.standard = v.hull_rank == v.source_rank && v.degree <= 1;
    return v;
}

// ---- decomposition ----

Mat DecompositionResult::eval_F2(const Mat& z) const {
    if (!F2) return Mat(0, 0);
    return F2->eval(z);
}

Mat DecompositionResult::reassemble(const Mat& z0) const {
    const Mat z = via_transpose ? Mat(z0.transpose()) : z0;
    Mat mid = Mat::Zero(D.cols(), A.cols());
    mid.topLeftCorner(F1.out_rows(), F1.out_cols()) = F1.eval(z);
    if (F2) mid.bottomRightCorner(F2->out_rows(), F2->out_cols()) = F2->eval(z);
    return D * mid * A.adjoint();
}

DecompositionResult decompose(const PolyMatrixMap& f, std::uint64_t seed, int grid) {
    const DomainSpec& src = f.source();
    const DomainSpec& tgt = f.target();
    if (src.rank() < 2) fail(ErrorKind::RegimeViolation, "source rank must be at least 2");
    DecompositionResult res;
    res.indices = index_sequence(f, derive_seed(seed, 1));
    res.unit_step = res.indices.has_unit_step();
    const Level top{src.rank() - 1, false};
    FlatReport cls = f_flat_classify(f, top, 6, derive_seed(seed, 2));
    PolyMatrixMap g = f;
    if (cls.kind == FlatKind::AntiHolomorphic) {
        if (src.rows() != src.cols()) fail(ErrorKind::RegimeViolation, "anti-holomorphic moduli map on a non-square source");
        g = f.compose_after(PolyMatrixMap::transpose(src));
        res.via_transpose = true;
    }
    // f-flat at the top level against the trivial-embedding model
    const int a = level_dim(src, top);
    const int n = src.ambient();
    const int gdim = a * (n - a);
    Rng rng = make_rng(derive_seed(seed, 3));
    std::vector<std::pair<Subspace, Subspace>> pairs;
    for (int i = 0; i < gdim * (gdim + 1) + 4; ++i) {
        Subspace w = random_dual_v1(src, top, rng);
        pairs.emplace_back(w, f_flat(g, top, FlatKind::Holomorphic, w, rng));
    }
    TrivialFit fit = detect_trivial(pairs);
    if (!fit.accepted)
        fail(ErrorKind::RegimeViolation, "f-flat at the top level is not a trivial embedding (" + fit.reason + ")");
    res.model = *fit.model;
    const Mat& iota = res.model.iota;
    const int kq = src.cols(), kp = src.rows();
    const int tq = g.out_cols(), tp = g.out_rows();
    const double big = max_abs(iota);
    if (max_abs(iota.topRightCorner(tq, kp)) > 1e-7 * big || max_abs(iota.bottomLeftCorner(tp, kq)) > 1e-7 * big)
        fail(ErrorKind::ChartFailure, "fitted embedding mixes the positive and negative blocks");
    Mat ip = iota.topLeftCorner(tq, kq), im = iota.bottomRightCorner(tp, kp);
    const double c = std::sqrt(ip.squaredNorm() / kq);
    const Mat a1 = ip / c, d1 = im / c;
    if (max_abs(a1.adjoint() * a1 - identity(kq)) > 1e-6 || max_abs(d1.adjoint() * d1 - identity(kp)) > 1e-6)
        fail(ErrorKind::ChartFailure, "fitted embedding is not a multiple of an isometry");
    const Mat a2 = null_space(a1.adjoint()), d2 = null_space(d1.adjoint());
    res.A = hconcat(a1, a2);
    res.D = hconcat(d1, d2);
    res.F1 = g.transform_output(d1.adjoint(), a1, src);
    res.F1.name = "F1";
    if (a2.cols() > 0 && d2.cols() > 0) {
        std::optional<DomainSpec> s2;
        if (d2.cols() >= a2.cols()) s2 = DomainSpec::type1(static_cast<int>(d2.cols()), static_cast<int>(a2.cols()));
        res.F2 = g.transform_output(d2.adjoint(), a2, s2);
        res.F2->name = "F2";
    }
    double cross = 0.0;
    if (a2.cols() > 0) {
        PolyMatrixMap c12 = g.transform_output(d1.adjoint(), a2);
        for (int i = 0; i < c12.out_rows(); ++i)
            for (int j = 0; j < c12.out_cols(); ++j) cross = std::max(cross, c12.at(i, j).max_coeff());
    }
    if (d2.cols() > 0) {
        PolyMatrixMap c21 = g.transform_output(d2.adjoint(), a1);
        for (int i = 0; i < c21.out_rows(); ++i)
            for (int j = 0; j < c21.out_cols(); ++j) cross = std::max(cross, c21.at(i, j).max_coeff());
    }
    res.cross_residual = cross;
    if (cross > 1e-7) fail(ErrorKind::OrthogonalityResidual, "off-diagonal blocks do not vanish");
    Rng grng = make_rng(derive_seed(seed, 4));
    res.grid = grid;
    for (int i = 0; i < grid; ++i) {
        Mat z = random_interior_point(src, grng, 0.95);
        res.f1_residual = std::max(res.f1_residual, max_abs(res.F1.eval(res.via_transpose ? Mat(z.transpose()) : z) -
                                                            (res.via_transpose ? Mat(z.transpose()) : z)));
        res.reassembly_residual = std::max(res.reassembly_residual, max_abs(f.eval(z) - res.reassemble(z)));
    }
    res.f1_standard = detect_standard(res.F1, derive_seed(seed, 5)).standard;
    (void)tgt;
    return res;
}

// ---- rank-gap arithmetic ----

const char* kind_name(DomainKind k) {
    switch (k) {
        case DomainKind::I: return "I";
        case DomainKind::II: return "II";
        case DomainKind::III: return "III";
    }
    return "?";
}

RankGapReport rank_gap_analysis(DomainKind source, int q, DomainKind target, int qp) {
    if (q < 2 || qp < 1) fail(ErrorKind::InputError, "need q >= 2 and q' >= 1");
    RankGapReport rep;
    rep.source = source;
    rep.target = target;
    rep.q = q;
    rep.qp = qp;
    rep.regime_pair = source == target || (source == DomainKind::III && target == DomainKind::I);
    // chain: integer levels 1..q-1, with the interior half levels between them for type II sources
    const bool halves = source == DomainKind::II;
    const int len = halves ? 2 * q - 3 : q - 1;
    const int lo = target == DomainKind::II ? 2 : 1;
    const int hi = target == DomainKind::II ? 2 * qp - 2 : qp - 1;
    std::vector<int> chain;
    std::function<void(int)> rec = [&](int next) {
        if (static_cast<int>(chain.size()) == len) {
            ++rep.admissible;
            bool engine = chain.front() == lo;
            for (std::size_t i = 1; i < chain.size() && !engine; ++i) engine = chain[i] == chain[i - 1] + 1;
            if (engine) {
                ++rep.with_engine;
            } else if (rep.example_escape.empty()) {
                rep.example_escape = chain;
            }
            const std::size_t stride = halves ? 2 : 1;
            bool rigid = chain.front() == 1;
            for (std::size_t i = stride; i < chain.size() && rigid; i += stride) rigid = chain[i] == chain[i - stride] + 2;
            if (rigid) ++rep.rigid_pattern;
            return;
        }
        const int remaining = len - static_cast<int>(chain.size());
        for (int v = next; v <= hi - remaining + 1; ++v) {
            chain.push_back(v);
            rec(v + 1);
            chain.pop_back();
        }
    };
    rec(lo);
    const bool below = qp < 2 * q - 1;
    if (rep.admissible == 0) {
        rep.verdict = "nonexistent: no admissible index sequence";
    } else if (source == DomainKind::I && target == DomainKind::III && below) {
        rep.verdict = "nonexistent: forced unit step from a type I source into a type III target";
    } else if (source == DomainKind::II && target != DomainKind::II && below && rep.rigid_pattern == rep.admissible) {
        rep.verdict = "nonexistent: only the rigid pattern i_1 = 1, steps of 2 remains";
    } else if (rep.regime_pair && qp >= 2 && below && rep.all_engine()) {
        rep.verdict = "rigid: every sequence has a unit step";
    } else if (qp == 2 * q - 1 && rep.escape()) {
        rep.verdict = "whitney escape: a sequence without a unit step exists";
    } else {
        rep.verdict = "not forced";
    }
    return rep;
}

std::vector<RankGapReport> rank_gap_table(int qmax) {
    std::vector<RankGapReport> out;
    const DomainKind kinds[] = {DomainKind::I, DomainKind::II, DomainKind::III};
    for (DomainKind s : kinds)
        for (DomainKind t : kinds)
            for (int q = 2; q <= qmax; ++q)
                for (int qp = 2; qp <= 2 * q + 1; ++qp) out.push_back(rank_gap_analysis(s, q, t, qp));
    return out;
}

}  // namespace bsd
