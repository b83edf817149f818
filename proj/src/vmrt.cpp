#include "bsdlab/vmrt.hpp"

#include <functional>
#include <map>

namespace bsd {

const char* to_string(VmrtClass c) {
    switch (c) {
        case VmrtClass::SpecialLocus: return "special";
        case VmrtClass::OpenOrbit: return "open";
        case VmrtClass::NotInVMRT: return "none";
    }
    return "?";
}

namespace {

constexpr double kEps = 1e-8;

// exactly one singular value above eps * scale
bool rank_one(const Mat& m, double scale) {
    if (m.size() == 0) return false;
    RVec sv = singular_values(m);
    if (sv(0) <= kEps * scale) return false;
    return sv.size() < 2 || sv(1) <= kEps * std::max(scale, sv(0));
}

int rank_at(const Mat& m, double scale) {
    if (m.size() == 0) return 0;
    RVec sv = singular_values(m);
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > kEps * std::max(scale, sv(0))) ++r;
    return r;
}

}  // namespace

bool is_rank_one_tangent(const DomainSpec& dual, const Mat& hom) {
    if (hom.rows() != dual.rows() || hom.cols() != dual.cols()) fail(ErrorKind::ShapeMismatch, "tangent shape");
    const double s = std::max(1.0, max_abs(hom));
    switch (dual.kind) {
        case DomainKind::I: return rank_at(hom, s) == 1;
        case DomainKind::III:
            if (max_abs(hom - hom.transpose()) > kEps * s) fail(ErrorKind::ShapeMismatch, "LGr tangent must be symmetric");
            return rank_at(hom, s) == 1;
        case DomainKind::II:
            if (max_abs(hom + hom.transpose()) > kEps * s) fail(ErrorKind::ShapeMismatch, "OGr tangent must be skew");
            return rank_at(hom, s) == 2;
    }
    return false;
}

// ---- SGr chart ----

Mat SgrTangent::hom() const {
    const int m = n - q;
    Mat h(2 * n - q, q);
    h.topRows(m) = g1.topRows(m);
    h.middleRows(m, q) = g2;
    h.bottomRows(m) = g1.bottomRows(m);
    return h;
}

SgrTangent SgrTangent::from_hom(int n, int q, const Mat& h) {
    if (h.rows() != 2 * n - q || h.cols() != q) fail(ErrorKind::ShapeMismatch, "SGr tangent shape");
    const int m = n - q;
    SgrTangent t;
    t.n = n;
    t.q = q;
    t.g1 = vconcat(h.topRows(m), h.bottomRows(m));
    t.g2 = h.middleRows(m, q);
    return t;
}

Subspace sgr_reference(int n, int q) {
    std::vector<int> idx;
    for (int i = 0; i < q; ++i) idx.push_back(i);
    return Subspace::coords(2 * n, idx);
}

Mat sgr_chart(int n, int q, const Subspace& v) {
    if (v.ambient() != 2 * n || v.dim() != q) fail(ErrorKind::ShapeMismatch, "not a q-plane in C^{2n}");
    const Mat b = v.orth();
    const Mat top = b.topRows(q);
    if (singular_values(top)(q - 1) < 1e-10) fail(ErrorKind::ChartFailure, "plane is off the big cell");
    return b.bottomRows(2 * n - q) * top.inverse();
}

Subspace sgr_from_chart(int n, int q, const Mat& hom) {
    if (hom.rows() != 2 * n - q || hom.cols() != q) fail(ErrorKind::ShapeMismatch, "chart shape");
    return canonicalize(vconcat(identity(q), hom));
}

// ---- classifier ----

VmrtClass sgr_vmrt_member(const SgrTangent& t) {
    const int m = t.n - t.q;
    if (t.g1.rows() != 2 * m || t.g1.cols() != t.q || t.g2.rows() != t.q || t.g2.cols() != t.q)
        fail(ErrorKind::ShapeMismatch, "graded tangent shape");
    const double s = std::max(max_abs(t.g1), max_abs(t.g2));
    if (s == 0.0) return VmrtClass::NotInVMRT;
    if (max_abs(t.g2 - t.g2.transpose()) > kEps * s) fail(ErrorKind::ShapeMismatch, "g2 part must be symmetric");
    if (max_abs(t.g2) <= kEps * s) return rank_one(t.g1, s) ? VmrtClass::SpecialLocus : VmrtClass::NotInVMRT;
    if (!rank_one(t.g2, s)) return VmrtClass::NotInVMRT;
    // the rows of g2 are multiples of lambda; g1 must share the same row
    int best = 0;
    t.g2.rowwise().norm().maxCoeff(&best);
    Mat lam = t.g2.row(best);
    Mat stacked = m > 0 ? vconcat(t.g1, lam) : lam;
    return rank_one(stacked, s) ? VmrtClass::OpenOrbit : VmrtClass::NotInVMRT;
}

VmrtFactors vmrt_factors(const SgrTangent& t) {
    VmrtClass c = sgr_vmrt_member(t);
    if (c == VmrtClass::NotInVMRT) fail(ErrorKind::NotOnVMRT, "tangent is not on the VMRT");
    VmrtFactors f;
    if (c == VmrtClass::SpecialLocus) {
        Eigen::JacobiSVD<Mat> svd(t.g1, Eigen::ComputeThinU | Eigen::ComputeThinV);
        f.mu = svd.singularValues()(0) * svd.matrixU().col(0);
        f.lambda = svd.matrixV().col(0).conjugate();
        f.c = 0.0;
        return f;
    }
    int best = 0;
    t.g2.rowwise().norm().maxCoeff(&best);
    Vec lam = t.g2.row(best).transpose();
    lam /= lam.norm();
    int i = 0;
    lam.cwiseAbs().maxCoeff(&i);
    f.lambda = lam;
    f.c = t.g2(i, i) / (lam(i) * lam(i));
    f.mu = t.g1 * lam.conjugate();
    return f;
}

namespace {

// cone parametrization (lambda, mu, c) -> (mu lambda^t, c lambda lambda^t), as a full hom vector
struct ConeParam {
    int n, q;
    int nparams() const { return q + 2 * (n - q) + 1; }
    Vec operator()(const Vec& u) const {
        const int m = 2 * (n - q);
        Vec lam = u.head(q), mu = u.segment(q, m);
        cd c = u(q + m);
        SgrTangent t;
        t.n = n;
        t.q = q;
        t.g1 = mu * lam.transpose();
        t.g2 = c * lam * lam.transpose();
        Mat h = t.hom();
        return Eigen::Map<const Vec>(h.data(), h.size());
    }
};

Vec factors_to_params(const VmrtFactors& f) {
    Vec u(f.lambda.size() + f.mu.size() + 1);
    u << f.lambda, f.mu, f.c;
    return u;
}

// central-difference derivatives, exact for the cubic parametrization up to roundoff
std::vector<Vec> first_derivatives(const ConeParam& p, const Vec& u, double h) {
    std::vector<Vec> out;
    for (int i = 0; i < p.nparams(); ++i) {
        Vec e = Vec::Zero(u.size());
        e(i) = h;
        out.push_back((-p(u + 2.0 * e) + 8.0 * p(u + e) - 8.0 * p(u - e) + p(u - 2.0 * e)) / (12.0 * h));
    }
    return out;
}

std::vector<Vec> second_derivatives(const ConeParam& p, const Vec& u, double h) {
    std::vector<Vec> out;
    const int k = p.nparams();
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            Vec ei = Vec::Zero(u.size()), ej = Vec::Zero(u.size());
            ei(i) = h;
            ej(j) = h;
            if (i == j) {
                out.push_back((p(u + ei) - 2.0 * p(u) + p(u - ei)) / (h * h));
            } else {
                out.push_back((p(u + ei + ej) - p(u + ei - ej) - p(u - ei + ej) + p(u - ei - ej)) / (4.0 * h * h));
            }
        }
    return out;
}

Mat columns(const std::vector<Vec>& vs, int rows) {
    Mat m(rows, static_cast<int>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<int>(i)) = vs[i];
    return m;
}

// T(SGr) at the reference point inside the full hom space: s symmetric
Mat sgr_tangent_basis(int n, int q) {
    const int rows = 2 * n - q, m = n - q;
    std::vector<Vec> out;
    auto put = [&](const Mat& h) { out.push_back(Eigen::Map<const Vec>(h.data(), h.size())); };
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < rows; ++i) {
            const bool in_s = i >= m && i < m + q;
            if (in_s && i - m > j) continue;
            Mat h = Mat::Zero(rows, q);
            h(i, j) = 1.0;
            if (in_s) h(m + j, i - m) = 1.0;
            put(h);
        }
    return columns(out, rows * q);
}

}  // namespace

bool second_fundamental_surjective(const SgrTangent& t) {
    VmrtFactors f = vmrt_factors(t);
    ConeParam p{t.n, t.q};
    Vec u = factors_to_params(f);
    const double h = 1e-2;
    auto d1 = first_derivatives(p, u, h);
    auto d2 = second_derivatives(p, u, h);
    const int dim = static_cast<int>(p(u).size());
    std::vector<Vec> all = d1;
    all.insert(all.end(), d2.begin(), d2.end());
    // all derivatives live in T(SGr); surjective onto the normal space iff they fill it
    const int full = 2 * (t.n - t.q) * t.q + t.q * (t.q + 1) / 2;
    const double scale = std::max(1.0, u.norm() * u.norm());
    return rank_at(columns(all, dim), scale) == full;
}

ConditionTReport condition_T(const SgrTangent& alpha) {
    VmrtClass cls = sgr_vmrt_member(alpha);
    if (cls == VmrtClass::NotInVMRT) fail(ErrorKind::SingularPoint, "alpha is not a smooth point of the VMRT");
    VmrtFactors f = vmrt_factors(alpha);
    if (f.lambda.norm() < kEps) fail(ErrorKind::SingularPoint, "vertex of the cone");
    const int n = alpha.n, q = alpha.q, rows = 2 * n - q;
    ConeParam p{n, q};
    Mat lhs_span = columns(first_derivatives(p, factors_to_params(f), 1e-2), rows * q);
    // tangent of the rank-one cone of Gr at H = w lambda^t: w' lambda^t + w lambda'^t
    Mat hfull = alpha.hom();
    Vec w = hfull * f.lambda.conjugate() / f.lambda.squaredNorm();
    std::vector<Vec> rhs_gen;
    for (int k = 0; k < rows; ++k) {
        Mat e = Mat::Zero(rows, q);
        e.row(k) = f.lambda.transpose();
        rhs_gen.push_back(Eigen::Map<const Vec>(e.data(), e.size()));
    }
    for (int i = 0; i < q; ++i) {
        Mat e = Mat::Zero(rows, q);
        e.col(i) = w;
        rhs_gen.push_back(Eigen::Map<const Vec>(e.data(), e.size()));
    }
    Subspace gr_cone = canonicalize(columns(rhs_gen, rows * q), 1e-8);
    Subspace lhs = canonicalize(lhs_span, 1e-8);
    Subspace rhs = intersect(gr_cone, canonicalize(sgr_tangent_basis(n, q)), 1e-8);
    ConditionTReport r;
    r.lhs_dim = lhs.dim();
    r.rhs_dim = rhs.dim();
    r.holds = equals(lhs, rhs, 1e-6);
    return r;
}

// ---- minimal curves ----

MinimalCurve::MinimalCurve(int n, const MinimalCurveSeed& seed, Vec v0, Vec w, bool special)
    : n_(n), seed_(seed), v0_(std::move(v0)), w_(std::move(w)), special_(special) {}

Subspace MinimalCurve::at(cd t) const {
    Vec v = v0_ + t * w_;
    if (seed_.A.dim() == 0) return canonicalize(v);
    return canonicalize(hconcat(seed_.A.orth(), v));
}

SgrTangent MinimalCurve::tangent() const {
    const int q = seed_.V.dim();
    Mat b = seed_.A.dim() > 0 ? hconcat(seed_.A.orth(), v0_) : Mat(v0_);
    Mat db = Mat::Zero(b.rows(), b.cols());
    db.col(q - 1) = w_;
    const Mat top = b.topRows(q);
    if (singular_values(top)(q - 1) < 1e-10) fail(ErrorKind::ChartFailure, "base point is off the reference chart");
    const Mat ti = top.inverse();
    const Mat rest = b.bottomRows(2 * n_ - q);
    const Mat hom = db.bottomRows(2 * n_ - q) * ti - rest * ti * db.topRows(q) * ti;
    return SgrTangent::from_hom(n_, q, hom);
}

MinimalCurve minimal_curve(int n, const MinimalCurveSeed& seed) {
    const int q = seed.V.dim();
    if (seed.V.ambient() != 2 * n || seed.A.ambient() != 2 * n || seed.B.ambient() != 2 * n)
        fail(ErrorKind::BadSeed, "ambient dimension");
    if (seed.A.dim() != q - 1 || seed.B.dim() != q + 1) fail(ErrorKind::BadSeed, "need dim A = q-1, dim B = q+1");
    if (!contained_in(seed.A, seed.V, 1e-8) || !contained_in(seed.V, seed.B, 1e-8))
        fail(ErrorKind::BadSeed, "need A in V in B");
    Form j = antisymmetric_form(n);
    if (!is_isotropic(seed.V, j)) fail(ErrorKind::BadSeed, "V is not isotropic");
    // every plane A + line in B is isotropic iff B lies in the annihilator of A
    if (seed.A.dim() > 0 && max_abs(j.gram(seed.A.orth(), seed.B.orth())) > 1e-8)
        fail(ErrorKind::BadSeed, "B is not orthogonal to A; the line leaves SGr");
    // v0 spans V mod A, w spans B mod V
    Mat pa = seed.A.projector(), pv = seed.V.projector();
    Mat cv = col_space(seed.V.orth() - pa * seed.V.orth(), 1e-8);
    Mat cb = col_space(seed.B.orth() - pv * seed.B.orth(), 1e-8);
    if (cv.cols() != 1 || cb.cols() != 1) fail(ErrorKind::BadSeed, "complements are not lines");
    return MinimalCurve(n, seed, cv.col(0), cb.col(0), is_isotropic(seed.B, j));
}

MinimalCurveSeed random_curve_seed(int n, int q, bool special, Rng& rng) {
    const int N = 2 * n;
    Form j = antisymmetric_form(n);
    MinimalCurveSeed s;
    s.V = sgr_reference(n, q);
    Mat a = Mat::Zero(N, q - 1);
    if (q > 1) a.topRows(q) = gaussian(rng, q, q - 1);
    s.A = q > 1 ? canonicalize(a) : Subspace::zero(N);
    // w in the annihilator of A (special: of V), off V
    const Mat& base = special ? s.V.orth() : (q > 1 ? s.A.orth() : Mat(Mat::Zero(N, 0)));
    Mat room = base.cols() > 0 ? null_space(base.transpose() * j.matrix) : identity(N);
    Vec w = room * gaussian_vec(rng, static_cast<int>(room.cols()));
    s.B = canonicalize(hconcat(s.V.orth(), w));
    return s;
}

VmrtClass curve_oracle_classify(const SgrTangent& t) {
    const int n = t.n, q = t.q;
    const Mat h = t.hom();
    const double scale = max_abs(h);
    if (scale == 0.0 || !rank_one(h, scale)) return VmrtClass::NotInVMRT;
    Eigen::JacobiSVD<Mat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vec w = svd.singularValues()(0) * svd.matrixU().col(0);
    Vec lam = svd.matrixV().col(0).conjugate();  // h = w lam^t
    const int N = 2 * n;
    // A = ker(lam) inside E, v0 with lam(v0) = 1, B = E + w
    Mat a = Mat::Zero(N, q - 1);
    if (q > 1) a.topRows(q) = null_space(lam.transpose());
    Vec v0 = Vec::Zero(N);
    v0.head(q) = lam.conjugate() / lam.squaredNorm();
    Vec wf = Vec::Zero(N);
    wf.tail(N - q) = w;
    MinimalCurveSeed seed;
    seed.V = sgr_reference(n, q);
    seed.A = q > 1 ? canonicalize(a) : Subspace::zero(N);
    seed.B = canonicalize(hconcat(seed.V.orth(), wf));
    // the line of planes A + span(v0 + t w) must stay isotropic; test a few points and the point at infinity
    Form j = antisymmetric_form(n);
    MinimalCurve curve(n, seed, v0, wf, is_isotropic(seed.B, j));
    for (cd tt : {cd(0.7, 0.0), cd(-1.3, 0.4), cd(0.0, 2.1), cd(3.0, -1.0)})
        if (!is_isotropic(curve.at(tt), j, 1e-7)) return VmrtClass::NotInVMRT;
    if (!is_isotropic(curve.at(cd(1e6, 0.0)), j, 1e-6)) return VmrtClass::NotInVMRT;
    // and its tangent must reproduce t up to scale
    Mat th = curve.tangent().hom();
    Mat pair(h.size(), 2);
    pair.col(0) = Eigen::Map<const Vec>(h.data(), h.size());
    pair.col(1) = Eigen::Map<const Vec>(th.data(), th.size());
    if (!rank_one(pair, scale)) return VmrtClass::NotInVMRT;
    return curve.special() ? VmrtClass::SpecialLocus : VmrtClass::OpenOrbit;
}

SgrTangent random_sgr_tangent(int n, int q, VmrtClass kind, Rng& rng) {
    const int m = 2 * (n - q);
    SgrTangent t;
    t.n = n;
    t.q = q;
    Vec lam = gaussian_vec(rng, q), mu = gaussian_vec(rng, m);
    cd c = gaussian_vec(rng, 1)(0);
    switch (kind) {
        case VmrtClass::OpenOrbit:
            t.g1 = mu * lam.transpose();
            t.g2 = c * lam * lam.transpose();
            break;
        case VmrtClass::SpecialLocus:
            t.g1 = mu * lam.transpose();
            t.g2 = Mat::Zero(q, q);
            break;
        case VmrtClass::NotInVMRT: {
            Vec lam2 = gaussian_vec(rng, q), mu2 = gaussian_vec(rng, m);
            const int pattern = static_cast<int>(rng() % 5);
            Mat g1a = mu * lam.transpose();
            Mat g1b = g1a + mu2 * lam2.transpose();
            switch (pattern) {
                case 0:  // lambda x mu + lambda' . lambda'
                    t.g1 = g1a;
                    t.g2 = lam2 * lam2.transpose();
                    break;
                case 1:  // rank two g1
                    t.g1 = g1b;
                    t.g2 = Mat::Zero(q, q);
                    break;
                case 2:
                    t.g1 = g1b;
                    t.g2 = c * lam * lam.transpose();
                    break;
                case 3:  // rank two g2
                    t.g1 = g1a;
                    t.g2 = lam * lam.transpose() + lam2 * lam2.transpose();
                    break;
                default: {
                    t.g1 = gaussian(rng, m, q);
                    Mat s = gaussian(rng, q, q);
                    t.g2 = s + s.transpose();
                }
            }
            break;
        }
    }
    return t;
}

// ---- Pluecker witness ----

namespace {

void subsets(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

}  // namespace

PlueckerContraction::PlueckerContraction(int n, int q) : n_(n), q_(q) {
    subsets(2 * n, q, src_);
    subsets(2 * n, q - 2, tgt_);
}

Vec PlueckerContraction::pluecker(const Mat& basis) const {
    if (basis.rows() != 2 * n_ || basis.cols() != q_) fail(ErrorKind::ShapeMismatch, "basis shape");
    Vec out(static_cast<int>(src_.size()));
    Mat sub(q_, q_);
    for (std::size_t k = 0; k < src_.size(); ++k) {
        for (int i = 0; i < q_; ++i) sub.row(i) = basis.row(src_[k][static_cast<std::size_t>(i)]);
        out(static_cast<int>(k)) = sub.determinant();
    }
    return out;
}

Vec PlueckerContraction::apply(const Vec& pl) const {
    if (pl.size() != static_cast<int>(src_.size())) fail(ErrorKind::ShapeMismatch, "Pluecker vector length");
    std::map<std::vector<int>, int> index;
    for (std::size_t k = 0; k < tgt_.size(); ++k) index[tgt_[k]] = static_cast<int>(k);
    Vec out = Vec::Zero(static_cast<int>(tgt_.size()));
    for (std::size_t k = 0; k < src_.size(); ++k) {
        const auto& s = src_[k];
        for (int a = 0; a < q_; ++a)
            for (int b = a + 1; b < q_; ++b) {
                // J(e_i, f_i) = 1 with f_i at position n + i; sorted, so only (i, n + i) occurs
                if (s[static_cast<std::size_t>(b)] != s[static_cast<std::size_t>(a)] + n_ ||
                    s[static_cast<std::size_t>(a)] >= n_)
                    continue;
                std::vector<int> rest;
                for (int c = 0; c < q_; ++c)
                    if (c != a && c != b) rest.push_back(s[static_cast<std::size_t>(c)]);
                const double sign = ((a + b - 1) % 2 == 0) ? 1.0 : -1.0;
                out(index[rest]) += sign * pl(static_cast<int>(k));
            }
    }
    return out;
}

PlueckerContraction linear_section_witness(int n, int q, long long cap) {
    if (q < 2 || q > n) fail(ErrorKind::InputError, "need 2 <= q <= n");
    if (binomial(2 * n, q) > static_cast<std::uint64_t>(cap))
        fail(ErrorKind::DimensionTooLarge, "binomial(2n, q) exceeds the Pluecker cap");
    return PlueckerContraction(n, q);
}

// ---- dilation ----

LgrChartPoint dilation_psi(const LgrChartPoint& p, cd s) {
    if (s == cd(0.0)) fail(ErrorKind::ZeroParameter, "s must be nonzero");
    LgrChartPoint out = p;
    const int k = static_cast<int>(p.y.rows());
    out.x = s * p.x;
    out.z = s * p.z;
    out.y = s * s * (p.y - identity(k)) + identity(k);
    return out;
}

// ---- sampling driver ----

std::vector<VmrtSampleRow> vmrt_classify_samples(int n, int q, int samples, std::uint64_t seed) {
    if (q < 1 || q >= n) fail(ErrorKind::InputError, "need 1 <= q < n");
    std::vector<VmrtSampleRow> rows;
    const VmrtClass kinds[] = {VmrtClass::OpenOrbit, VmrtClass::SpecialLocus, VmrtClass::NotInVMRT};
    for (int i = 0; i < samples; ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        VmrtSampleRow r;
        r.id = i;
        r.expected = kinds[i % 3];
        SgrTangent t = random_sgr_tangent(n, q, r.expected, rng);
        r.classified = sgr_vmrt_member(t);
        r.oracle = curve_oracle_classify(t);
        if (r.classified != VmrtClass::NotInVMRT) r.zeta_surjective = second_fundamental_surjective(t);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace bsd
