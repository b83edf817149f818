#include "bsdlab/modulimap.hpp"

#include "bsdlab/rigidity.hpp"

#include <algorithm>
#include <sstream>

namespace bsd {

double target_flag_distance(const TargetFlag& a, const TargetFlag& b) {
    return std::max(distance(a.V1, b.V1), distance(a.V2, b.V2));
}

bool target_flag_equals(const TargetFlag& a, const TargetFlag& b, double eps) {
    if (a.V1.dim() != b.V1.dim() || a.V2.dim() != b.V2.dim()) return false;
    return target_flag_distance(a, b) < eps;
}

nlohmann::json to_json(const TargetFlag& f) {
    return {{"V1", to_json(f.V1)}, {"V2", to_json(f.V2)}, {"dim_V1", f.V1.dim()}, {"dim_V2", f.V2.dim()}};
}

namespace {

Mat vec_of(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

int v2_dim(const DomainSpec& spec, Level lv) {
    if (spec.kind == DomainKind::I) return spec.p + lv.r;
    return spec.ambient() - level_dim(spec, lv);
}

Subspace random_sub(const Subspace& big, int d, Rng& rng) {
    if (d == 0) return Subspace::zero(big.ambient());
    return canonicalize(big.orth() * gaussian(rng, big.dim(), d));
}

Subspace random_super(const Subspace& small, int d, Rng& rng) {
    Mat b = small.orth();
    const int n = small.ambient();
    if (d > b.cols()) b = hconcat(b, gaussian(rng, n, d - static_cast<int>(b.cols())));
    Subspace s = canonicalize(b);
    if (s.dim() != d) fail(ErrorKind::Degenerate, "random extension lost rank");
    return s;
}

bool on_slice(const FlagPair& sigma, const Mat& p) {
    Subspace e = canonicalize(vconcat(identity(static_cast<int>(p.cols())), p));
    return contained_in(sigma.V1(), e, 1e-7) && contained_in(e, sigma.V2(), 1e-7);
}

Mat slice_point(const AffineSlice& sl, const Mat& base, double scale, Rng& rng) {
    if (sl.dim() == 0) return base;
    Mat d = sl.at(gaussian_vec(rng, sl.dim())) - sl.base;
    return base + scale * d;
}

}  // namespace

int JetSpan::gr_dim() const { return (kernel.ambient() - kernel.dim()) * image.dim(); }

JetSpan jet_span(const PolyMatrixMap& f, const FlagPair& sigma, const Mat& p, int k) {
    if (!(sigma.spec() == f.source())) fail(ErrorKind::InvalidFlag, "flag is not in the source moduli space");
    AffineSlice sl = slice_chart(sigma);
    if (p.rows() != f.source().rows() || p.cols() != f.source().cols()) fail(ErrorKind::ShapeMismatch, "point shape");
    if (!on_slice(sigma, p)) fail(ErrorKind::PointNotOnSlice, "P does not lie on the characteristic slice");
    const int maxk = k > 0 ? k : std::max(1, f.degree());
    const int rows = f.out_rows(), cols = f.out_cols();
    auto jets = slice_jets(f, p, sl.dirs, maxk);
    JetSpan js;
    js.sigma = sigma;
    js.point = p;
    js.k = maxk;
    Mat gens(rows * cols, 0);
    for (int ord = 1; ord <= maxk; ++ord) {
        for (const auto& j : jets)
            if (j.order == ord) gens = hconcat(gens, vec_of(j.value));
        js.dims.push_back(numeric_rank(gens));
    }
    js.k0 = 1;
    for (int ord = 1; ord <= maxk; ++ord)
        if (js.dims[static_cast<std::size_t>(ord - 1)] == js.dims.back()) {
            js.k0 = ord;
            break;
        }
    js.span = canonicalize(gens);
    Mat stack(0, cols), wide(rows, 0);
    for (const auto& j : jets) {
        stack = vconcat(stack, j.value);
        wide = hconcat(wide, j.value);
    }
    js.kernel = stack.rows() ? canonicalize(null_space(stack)) : Subspace::full(cols);
    js.image = wide.cols() ? canonicalize(col_space(wide)) : Subspace::zero(rows);
    return js;
}

int target_index(const DomainSpec& target, int a) {
    switch (target.kind) {
        case DomainKind::I: return target.q - a;
        case DomainKind::II: return 2 * target.rank() - a;
        case DomainKind::III: return target.n - a;
    }
    return 0;
}

SharpResult sharp_from_jets(const PolyMatrixMap& f, const JetSpan& js) {
    const DomainSpec& tgt = f.target();
    const Mat w = f.eval(js.point);
    const int cols = f.out_cols(), rows = f.out_rows();
    SharpResult r;
    const Mat kb = js.kernel.orth();
    r.flag.V1 = canonicalize(vconcat(kb, w * kb));
    if (tgt.has_bilinear()) {
        r.flag.V2 = perp(r.flag.V1, tgt.bilinear());
    } else {
        Mat e = vconcat(identity(cols), w);
        Mat ext = vconcat(Mat::Zero(cols, js.image.dim()), js.image.orth());
        r.flag.V2 = canonicalize(hconcat(e, ext));
    }
    (void)rows;
    r.a = r.flag.V1.dim();
    r.index = target_index(tgt, r.a);
    r.k0 = js.k0;
    r.gr_dim = js.gr_dim();
    return r;
}

SharpResult f_sharp(const PolyMatrixMap& f, const FlagPair& sigma, Rng& rng, const std::optional<Mat>& anchor) {
    AffineSlice sl = slice_chart(sigma);
    std::vector<Mat> pts;
    for (int i = 0; i < 5; ++i) {
        if (anchor) {
            Mat p = *anchor;
            double scale = 0.05;
            for (int tries = 0; tries < 30; ++tries) {
                p = slice_point(sl, *anchor, scale, rng);
                if (contains(f.source(), p) == Membership::Interior) break;
                scale *= 0.5;
                p = *anchor;
            }
            pts.push_back(p);
        } else {
            pts.push_back(slice_point(sl, sl.base, 1.0, rng));
        }
    }
    SharpResult first;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        JetSpan js = jet_span(f, sigma, pts[i]);
        SharpResult r = sharp_from_jets(f, js);
        if (i == 0) {
            first = r;
        } else if (r.gr_dim != first.gr_dim || r.a != first.a) {
            fail(ErrorKind::DegenerateJet, "dim Gr(P, sigma) varies over the sampled points");
        }
    }
    return first;
}

GenericSharp generic_sharp(const PolyMatrixMap& f, Level r, Rng& rng) {
    for (int attempt = 1; attempt <= 20; ++attempt) {
        InteriorSample s = random_interior_flag(f.source(), r, rng);
        try {
            GenericSharp g{s.flag, s.point, f_sharp(f, s.flag, rng, s.point), attempt};
            return g;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateJet) throw;
        }
    }
    fail(ErrorKind::DegenerateJet, "no generic flag found in 20 draws at level " + r.str());
}

TargetFlag sharp_oracle(const PolyMatrixMap& f, const FlagPair& sigma, const Mat& anchor, int samples, Rng& rng) {
    AffineSlice sl = slice_chart(sigma);
    const DomainSpec& tgt = f.target();
    const int cols = f.out_cols();
    Subspace v1, v2;
    for (int j = 0; j < samples; ++j) {
        Mat z = anchor;
        if (j > 0) {
            double scale = 0.3;
            for (int tries = 0; tries < 30; ++tries) {
                z = slice_point(sl, anchor, scale, rng);
                if (contains(f.source(), z) == Membership::Interior) break;
                scale *= 0.5;
                z = anchor;
            }
        }
        Subspace e = canonicalize(vconcat(identity(cols), f.eval(z)));
        if (j == 0) {
            v1 = e;
            v2 = e;
        } else {
            v1 = intersect(v1, e);
            v2 = sum(v2, e);
        }
    }
    TargetFlag out;
    out.V1 = v1;
    out.V2 = tgt.has_bilinear() ? perp(v1, tgt.bilinear()) : v2;
    return out;
}

// ---- index sequence ----

std::vector<int> IndexSequence::values() const {
    std::vector<int> v;
    for (const auto& e : entries) v.push_back(e.index);
    return v;
}

bool IndexSequence::has_unit_step() const {
    int prev = 0;
    for (const auto& e : entries) {
        if (e.level.half) continue;
        if (e.index == prev + 1) return true;
        prev = e.index;
    }
    return false;
}

std::string IndexSequence::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) os << ", ";
        os << "i_" << entries[i].level.str() << "=" << entries[i].index;
    }
    os << "]";
    return os.str();
}

IndexSequence index_sequence(const PolyMatrixMap& f, std::uint64_t seed, int sigma_per_level) {
    const DomainSpec& src = f.source();
    {
        // the hull of the whole image must have V1' = 0
        Rng rng = make_rng(derive_seed(seed, 0));
        FlagPair full = standard_flag(src, Level{src.rank(), false});
        SharpResult h = f_sharp(f, full, rng, random_interior_point(src, rng, 0.5));
        if (h.a != 0) fail(ErrorKind::DegenerateJet, "image lies in a proper characteristic subspace");
    }
    IndexSequence seq;
    std::uint64_t k = 1;
    for (Level lv : proper_levels(src)) {
        IndexEntry ent;
        ent.level = lv;
        for (int i = 0; i < sigma_per_level; ++i) {
            Rng rng = make_rng(derive_seed(seed, k++));
            GenericSharp g = generic_sharp(f, lv, rng);
            if (i == 0) {
                ent.index = g.result.index;
                ent.a = g.result.a;
                ent.k0 = g.result.k0;
            } else if (g.result.index != ent.index) {
                fail(ErrorKind::DegenerateJet, "index at level " + lv.str() + " depends on the sampled flag");
            }
            ent.k0 = std::max(ent.k0, g.result.k0);
        }
        seq.entries.push_back(ent);
    }
    int prev = 0;
    for (const auto& e : seq.entries) {
        if (e.index <= prev) fail(ErrorKind::MonotonicityViolation, "index sequence is not increasing: " + seq.str());
        prev = e.index;
    }
    return seq;
}

// ---- holomorphy ----

const char* to_string(FlatKind k) { return k == FlatKind::Holomorphic ? "holomorphic" : "anti-holomorphic"; }

namespace {

Subspace leg_value(const PolyMatrixMap& f, Level r, const Subspace& a, const Subspace& b, Rng& rng) {
    FlagPair fl = make_flag(f.source(), r, a, b);
    return f_sharp(f, fl, rng).flag.V1;
}

}  // namespace

FlatReport f_flat_classify(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed) {
    const DomainSpec& src = f.source();
    FlatReport rep;
    rep.level = r;
    rep.kind = FlatKind::Holomorphic;
    if (src.kind != DomainKind::I) {
        rep.agreeing = samples;
        return rep;
    }
    const int a = level_dim(src, r), b = v2_dim(src, r);
    int holo = 0, anti = 0;
    for (int i = 0; i < samples; ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        FlagPair base = random_flag(src, r, rng);
        Subspace a1 = random_sub(base.V2(), a, rng);
        Subspace b1 = random_super(base.V1(), b, rng);
        Subspace f0 = leg_value(f, r, base.V1(), base.V2(), rng);
        Subspace fa = leg_value(f, r, a1, base.V2(), rng);
        Subspace fb = leg_value(f, r, base.V1(), b1, rng);
        FlatSample s;
        s.dist_a = distance(f0, fa);
        s.dist_b = distance(f0, fb);
        s.depends_on_a = s.dist_a > 1e-6;
        s.depends_on_b = s.dist_b > 1e-6;
        if (s.depends_on_a && s.depends_on_b)
            fail(ErrorKind::InconsistentDependence,
                 "F(A, B) moves with both legs at level " + r.str() + " (sample " + std::to_string(i) + ")");
        if (s.depends_on_a) ++holo;
        if (s.depends_on_b) ++anti;
        rep.samples.push_back(s);
    }
    if (holo > 0 && anti > 0)
        fail(ErrorKind::InconsistentDependence, "samples disagree on which leg F depends on");
    rep.kind = anti > 0 ? FlatKind::AntiHolomorphic : FlatKind::Holomorphic;
    for (const auto& s : rep.samples) {
        const bool ok = rep.kind == FlatKind::Holomorphic ? !s.depends_on_b : !s.depends_on_a;
        if (ok) ++rep.agreeing;
    }
    return rep;
}

Subspace f_flat(const PolyMatrixMap& f, Level r, FlatKind kind, const Subspace& w, Rng& rng) {
    const DomainSpec& src = f.source();
    if (src.has_bilinear()) return f_sharp(f, make_flag(src, r, w), rng).flag.V1;
    const int b = v2_dim(src, r);
    if (kind == FlatKind::Holomorphic) return leg_value(f, r, w, random_super(w, b, rng), rng);
    Subspace bb = perp(w, src.hermitian());
    return leg_value(f, r, random_sub(bb, w.dim(), rng), bb, rng);
}

// ---- subgrassmannian inclusions ----

int RespectsReport::z_failed() const {
    int n = 0;
    for (const auto& s : inclusions)
        if (s.kind == 'Z' && !s.pass) ++n;
    return n;
}

int RespectsReport::q_failed() const {
    int n = 0;
    for (const auto& s : inclusions)
        if (s.kind == 'Q' && !s.pass) ++n;
    return n;
}

bool RespectsReport::standard_verdict() const {
    for (const auto& f : fits)
        if (!f.accepted) return false;
    return true;
}

namespace {

double excess(const Subspace& a, const Subspace& b) {
    if (a.dim() == 0) return 0.0;
    if (b.dim() == 0) return 1.0;
    return max_abs(a.orth() - b.orth() * (b.orth().adjoint() * a.orth()));
}

}  // namespace

RespectsReport respects_check(const PolyMatrixMap& f0, Level r, int samples, std::uint64_t seed) {
    RespectsReport rep;
    rep.r = r;
    PolyMatrixMap f = f0;
    const DomainSpec& src = f0.source();
    FlatReport cls;
    try {
        cls = f_flat_classify(f0, r, 6, derive_seed(seed, 1000));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InconsistentDependence) throw;
        // keep going with the A-leg; the inclusions below then show the damage
        rep.consistent = false;
    }
    rep.kind = cls.kind;
    if (cls.kind == FlatKind::AntiHolomorphic && src.rows() == src.cols()) {
        // conjugate by the transpose of the source to get the holomorphic case
        f = f0.compose_after(PolyMatrixMap::transpose(src));
        rep.via_transpose = true;
        rep.kind = FlatKind::Holomorphic;
    }
    const int ar = level_dim(src, r);
    std::uint64_t k = 0;
    for (Level s : levels(src)) {
        if (s.value() == r.value()) continue;
        const int as = level_dim(src, s);
        for (int i = 0; i < samples; ++i) {
            Rng rng = make_rng(derive_seed(seed, k++));
            InclusionSample out;
            out.s = s;
            if (s.value() < r.value()) {
                out.kind = 'Z';
                FlagPair tau = random_flag(src, s, rng);
                Subspace w = random_sub(tau.V1(), ar, rng);
                Subspace img = f_flat(f, r, rep.kind, w, rng);
                Subspace tv1 = f_sharp(f, tau, rng).flag.V1;
                out.residual = excess(img, tv1);
            } else {
                out.kind = 'Q';
                Subspace w = random_dual_v1(src, r, rng);
                Subspace m1 = random_sub(w, as, rng);
                FlagPair mu = src.has_bilinear() ? make_flag(src, s, m1)
                                                 : make_flag(src, s, m1, random_super(w, v2_dim(src, s), rng));
                Subspace img = f_flat(f, r, rep.kind, w, rng);
                TargetFlag tm = f_sharp(f, mu, rng).flag;
                out.residual = std::max(excess(tm.V1, img), excess(img, tm.V2));
            }
            out.pass = out.residual < unit_band;
            rep.inclusions.push_back(out);
        }
        // restriction of f-flat to one Z_tau against the trivial-embedding model
        if (s.value() < r.value() && ar > 0 && as > ar) {
            Rng rng = make_rng(derive_seed(seed, 5000 + k));
            FlagPair tau = random_flag(src, s, rng);
            const int dim = ar * (as - ar);
            TrivialFitSummary t;
            t.s = s;
            std::vector<std::pair<Subspace, Subspace>> pairs;
            for (int i = 0; i < dim * (dim + 1) + 4; ++i) {
                Subspace w = random_sub(tau.V1(), ar, rng);
                pairs.emplace_back(w, f_flat(f, r, rep.kind, w, rng));
            }
            t.samples = static_cast<int>(pairs.size());
            TrivialFit fit = detect_trivial(pairs);
            t.accepted = fit.accepted;
            t.residual = fit.residual;
            if (fit.model) t.w0_dim = fit.model->W0.dim();
            rep.fits.push_back(t);
        }
    }
    return rep;
}

std::vector<Signature> sigma_image_signatures(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed) {
    std::vector<Signature> out;
    for (int i = 0; i < samples; ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        FlagPair sigma = random_sigma_flag(f.source(), r, rng);
        SharpResult s = f_sharp(f, sigma, rng);
        out.push_back(restrict_signature(s.flag.V1, f.target().hermitian(), 1e-7));
    }
    return out;
}

}  // namespace bsd
