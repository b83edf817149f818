#include "bsdlab/moduli.hpp"

#include <cmath>
#include <sstream>

namespace bsd {

std::string Level::str() const {
    std::ostringstream os;
    os << r;
    if (half) os << ".5";
    return os.str();
}

int level_dim(const DomainSpec& spec, Level lv) {
    const int rk = spec.rank();
    if (lv.r < 0 || lv.r > rk || (lv.half && lv.r >= rk))
        fail(ErrorKind::BadDimension, "level " + lv.str() + " out of range for " + spec.name());
    switch (spec.kind) {
        case DomainKind::I:
            if (lv.half) fail(ErrorKind::BadDimension, "half levels exist for type II only");
            return spec.q - lv.r;
        case DomainKind::II: return lv.half ? 2 * (rk - lv.r) - 1 : 2 * (rk - lv.r);
        case DomainKind::III:
            if (lv.half) fail(ErrorKind::BadDimension, "half levels exist for type II only");
            return spec.n - lv.r;
    }
    return 0;
}

std::vector<Level> levels(const DomainSpec& spec) {
    std::vector<Level> out;
    for (int r = 0; r <= spec.rank(); ++r) {
        out.push_back({r, false});
        if (spec.kind == DomainKind::II && r < spec.rank()) out.push_back({r, true});
    }
    return out;
}

std::vector<Level> proper_levels(const DomainSpec& spec) {
    std::vector<Level> out;
    const int q = spec.rank();
    for (int r = 1; r <= q - 1; ++r) {
        out.push_back({r, false});
        if (spec.kind == DomainKind::II && r <= q - 2) out.push_back({r, true});
    }
    return out;
}

int level_rank(const DomainSpec& spec, Level lv) {
    level_dim(spec, lv);
    return lv.r;
}

namespace {

int v2_dim(const DomainSpec& spec, Level lv) {
    if (spec.kind == DomainKind::I) return spec.p + lv.r;
    return spec.ambient() - level_dim(spec, lv);
}

std::optional<Level> level_for_dim(const DomainSpec& spec, int d) {
    for (Level lv : levels(spec))
        if (level_dim(spec, lv) == d) return lv;
    return std::nullopt;
}

Subspace extend_random(const Subspace& base, int target_dim, Rng& rng) {
    const int n = base.ambient();
    Mat b = base.orth();
    while (b.cols() < target_dim) {
        Vec v = gaussian_vec(rng, n);
        v -= b * (b.adjoint() * v);
        b = hconcat(b, v.normalized());
    }
    return canonicalize(b);
}

}  // namespace

Subspace FlagPair::V2() const {
    if (v2_) return *v2_;
    return perp(v1_, spec_.bilinear());
}

FlagPair make_flag(const DomainSpec& spec, Level lv, const Subspace& v1, const std::optional<Subspace>& v2) {
    if (v1.ambient() != spec.ambient()) fail(ErrorKind::DimensionMismatch, "V1 ambient");
    const int d1 = level_dim(spec, lv);
    if (v1.dim() != d1)
        fail(ErrorKind::BadDimension, "dim V1 = " + std::to_string(v1.dim()) + ", expected " + std::to_string(d1));
    FlagPair f;
    f.spec_ = spec;
    f.level_ = lv;
    f.v1_ = v1;
    if (spec.has_bilinear()) {
        if (!is_isotropic(v1, spec.bilinear()))
            fail(ErrorKind::NotIsotropic, "V1 is not isotropic for the bilinear form");
        return f;
    }
    if (!v2) fail(ErrorKind::InvalidFlag, "type I flags need V2");
    if (v2->ambient() != spec.ambient()) fail(ErrorKind::DimensionMismatch, "V2 ambient");
    if (v2->dim() != v2_dim(spec, lv))
        fail(ErrorKind::BadDimension, "dim V2 = " + std::to_string(v2->dim()) + ", expected " +
                                          std::to_string(v2_dim(spec, lv)));
    if (!contained_in(v1, *v2)) fail(ErrorKind::InvalidFlag, "V1 is not contained in V2");
    f.v2_ = *v2;
    return f;
}

FlagPair sigma_point(const DomainSpec& spec, Level lv, const Subspace& v1) {
    if (!is_isotropic(v1, spec.hermitian()))
        fail(ErrorKind::NotIsotropic, "V1 is not isotropic for the Hermitian form");
    if (spec.has_bilinear()) return make_flag(spec, lv, v1);
    return make_flag(spec, lv, v1, perp(v1, spec.hermitian()));
}

Subspace pr_project(const FlagPair& f) { return f.V1(); }

bool flag_equals(const FlagPair& a, const FlagPair& b, double eps) {
    if (!(a.spec() == b.spec()) || !(a.level() == b.level())) return false;
    return flag_distance(a, b) < eps;
}

nlohmann::json to_json(const FlagPair& f) {
    return nlohmann::json{{"dual", spec_to_json(f.spec())},
                          {"level", f.level().value()},
                          {"V1", to_json(f.V1())},
                          {"V2", to_json(f.V2())}};
}

double flag_distance(const FlagPair& a, const FlagPair& b) {
    double d1 = distance(a.V1(), b.V1());
    double d2 = distance(a.V2(), b.V2());
    return std::max(d1, d2);
}

bool z_tau_contains(const FlagPair& tau, Level r, const Subspace& w) {
    if (!(tau.level().value() < r.value()))
        fail(ErrorKind::LevelOrderViolation, "tau level must be below r");
    if (w.ambient() != tau.spec().ambient()) fail(ErrorKind::DimensionMismatch, "W ambient");
    if (w.dim() != level_dim(tau.spec(), r)) return false;
    return contained_in(w, tau.V1());
}

bool q_mu_contains(const FlagPair& mu, Level r, const Subspace& w) {
    if (!(mu.level().value() > r.value()))
        fail(ErrorKind::LevelOrderViolation, "mu level must be above r");
    if (w.ambient() != mu.spec().ambient()) fail(ErrorKind::DimensionMismatch, "W ambient");
    if (w.dim() != level_dim(mu.spec(), r)) return false;
    return contained_in(mu.V1(), w) && contained_in(w, mu.V2());
}

bool sigma_contains(const DomainSpec& spec, Level r, const Subspace& w) {
    if (w.ambient() != spec.ambient() || w.dim() != level_dim(spec, r))
        fail(ErrorKind::BadDimension, "W does not have the D_r dimension");
    if (spec.has_bilinear() && !is_isotropic(w, spec.bilinear()))
        fail(ErrorKind::NotIsotropic, "W is not a point of D_r");
    return is_isotropic(w, spec.hermitian());
}

std::function<bool(const Mat&)> characteristic_slice(const DomainSpec& spec, const FlagPair& sigma) {
    if (!(sigma.spec() == spec)) fail(ErrorKind::InvalidFlag, "flag belongs to another compact dual");
    Subspace v1 = sigma.V1();
    Subspace v2 = sigma.V2();
    return [spec, v1, v2](const Mat& z) {
        if (contains(spec, z) != Membership::Interior) return false;
        Subspace e = embed_point(spec, z);
        return contained_in(v1, e, 1e-7) && contained_in(e, v2, 1e-7);
    };
}

// ---- chart coordinates ----

namespace {

std::vector<Mat> chart_basis(const DomainSpec& spec) {
    std::vector<Mat> out;
    const int m = spec.rows();
    const int k = spec.cols();
    if (spec.kind == DomainKind::I) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < k; ++j) {
                Mat e = Mat::Zero(m, k);
                e(i, j) = 1.0;
                out.push_back(e);
            }
    } else {
        const bool skew = spec.kind == DomainKind::II;
        for (int i = 0; i < m; ++i)
            for (int j = skew ? i + 1 : i; j < k; ++j) {
                Mat e = Mat::Zero(m, k);
                e(i, j) = 1.0;
                if (i != j) e(j, i) = skew ? -1.0 : 1.0;
                out.push_back(e);
            }
    }
    return out;
}

}  // namespace

Vec chart_coords(const DomainSpec& spec, const Mat& z) {
    check_point(spec, z);
    Vec c(spec.chart_dim());
    int idx = 0;
    const int m = spec.rows();
    const int k = spec.cols();
    if (spec.kind == DomainKind::I) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < k; ++j) c(idx++) = z(i, j);
    } else {
        const bool skew = spec.kind == DomainKind::II;
        for (int i = 0; i < m; ++i)
            for (int j = skew ? i + 1 : i; j < k; ++j) c(idx++) = z(i, j);
    }
    return c;
}

Mat chart_from_coords(const DomainSpec& spec, const Vec& c) {
    auto basis = chart_basis(spec);
    if (c.size() != static_cast<int>(basis.size())) fail(ErrorKind::ShapeMismatch, "coordinate count");
    Mat z = Mat::Zero(spec.rows(), spec.cols());
    for (std::size_t i = 0; i < basis.size(); ++i) z += c(static_cast<int>(i)) * basis[i];
    return z;
}

Mat AffineSlice::at(const Vec& t) const {
    Mat z = base;
    for (int i = 0; i < dim(); ++i) z += t(i) * dirs[static_cast<std::size_t>(i)];
    return z;
}

AffineSlice slice_chart(const FlagPair& sigma) {
    const DomainSpec& spec = sigma.spec();
    const int k = spec.cols();
    const int m = spec.rows();
    auto basis = chart_basis(spec);
    const int nv = static_cast<int>(basis.size());
    Mat v1 = sigma.V1().orth();
    Mat ann;  // rows annihilating V2 (type I only)
    if (spec.kind == DomainKind::I) {
        Mat v2 = sigma.V2().orth();
        ann = null_space(v2.transpose()).transpose();
    }
    const int neq = static_cast<int>(v1.cols()) * m + static_cast<int>(ann.rows()) * k;
    Mat a = Mat::Zero(neq, nv);
    Vec rhs = Vec::Zero(neq);
    for (int var = 0; var < nv; ++var) {
        const Mat& e = basis[static_cast<std::size_t>(var)];
        int row = 0;
        for (int c = 0; c < v1.cols(); ++c) {
            a.block(row, var, m, 1) = e * v1.col(c).head(k);
            row += m;
        }
        for (int l = 0; l < ann.rows(); ++l) {
            a.block(row, var, k, 1) = (ann.row(l).tail(m) * e).transpose();
            row += k;
        }
    }
    {
        int row = 0;
        for (int c = 0; c < v1.cols(); ++c) {
            rhs.segment(row, m) = v1.col(c).tail(m);
            row += m;
        }
        for (int l = 0; l < ann.rows(); ++l) {
            rhs.segment(row, k) = -ann.row(l).head(k).transpose();
            row += k;
        }
    }
    AffineSlice s;
    Vec c0 = neq ? Vec(a.completeOrthogonalDecomposition().solve(rhs)) : Vec(Vec::Zero(nv));
    if (neq && (a * c0 - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
        fail(ErrorKind::PointNotOnSlice, "flag slice misses the big cell of the chart");
    s.base = chart_from_coords(spec, c0);
    Mat ns = null_space(a);
    for (int j = 0; j < ns.cols(); ++j) s.dirs.push_back(chart_from_coords(spec, ns.col(j)));
    return s;
}

// ---- samplers ----

Subspace random_sigma_v1(const DomainSpec& spec, Level lv, Rng& rng) {
    const int a = level_dim(spec, lv);
    const int k = spec.cols();
    const int m = spec.rows();
    Mat u;             // isometry from the positive block to the negative block
    Mat alpha_basis;   // allowed alpha directions
    switch (spec.kind) {
        case DomainKind::I:
            u = random_unitary(rng, m).leftCols(k);
            alpha_basis = identity(k);
            break;
        case DomainKind::III: {
            Mat w = random_unitary(rng, k);
            u = w * w.transpose();
            alpha_basis = w.conjugate().leftCols(a);
            break;
        }
        case DomainKind::II: {
            Mat w = random_unitary(rng, k);
            Mat kb = Mat::Zero(k, k);
            for (int i = 0; i + 1 < k; i += 2) {
                kb(i, i + 1) = 1.0;
                kb(i + 1, i) = -1.0;
            }
            u = w * kb * w.transpose();
            alpha_basis = w.conjugate().leftCols(a);
            break;
        }
    }
    Mat coeff = gaussian(rng, static_cast<int>(alpha_basis.cols()), a);
    Mat alpha = alpha_basis * coeff;
    return canonicalize(vconcat(alpha, u * alpha));
}

Subspace random_dual_v1(const DomainSpec& spec, Level lv, Rng& rng) {
    const int a = level_dim(spec, lv);
    if (spec.kind == DomainKind::I) return canonicalize(gaussian(rng, spec.ambient(), a));
    Mat g = random_complex_group_element(spec, rng, 0.8);
    return canonicalize(g.leftCols(a));
}

FlagPair random_flag(const DomainSpec& spec, Level lv, Rng& rng) {
    Subspace v1 = random_dual_v1(spec, lv, rng);
    if (spec.has_bilinear()) return make_flag(spec, lv, v1);
    return make_flag(spec, lv, v1, extend_random(v1, v2_dim(spec, lv), rng));
}

FlagPair random_sigma_flag(const DomainSpec& spec, Level lv, Rng& rng) {
    return sigma_point(spec, lv, random_sigma_v1(spec, lv, rng));
}

FlagPair standard_flag(const DomainSpec& spec, Level lv) {
    const int a = level_dim(spec, lv);
    std::vector<int> idx1;
    for (int i = 0; i < a; ++i) idx1.push_back(i);
    Subspace v1 = Subspace::coords(spec.ambient(), idx1);
    if (spec.has_bilinear()) return make_flag(spec, lv, v1);
    std::vector<int> idx2;
    for (int i = 0; i < v2_dim(spec, lv); ++i) idx2.push_back(i);
    return make_flag(spec, lv, v1, Subspace::coords(spec.ambient(), idx2));
}

FlagPair transform_flag(const FlagPair& f, const Mat& g) {
    Subspace v1 = canonicalize(g * f.V1().orth());
    if (f.spec().has_bilinear()) return make_flag(f.spec(), f.level(), v1);
    return make_flag(f.spec(), f.level(), v1, canonicalize(g * f.V2().orth()));
}

InteriorSample random_interior_flag(const DomainSpec& spec, Level lv, Rng& rng) {
    FlagPair f0 = standard_flag(spec, lv);
    AffineSlice sl = slice_chart(f0);
    Mat z0 = sl.base;
    if (sl.dim() > 0) {
        Mat dz = sl.at(gaussian_vec(rng, sl.dim())) - sl.base;
        RVec sv = singular_values(dz);
        if (sv(0) > 0) dz *= uniform(rng, 0.1, 0.6) / sv(0);
        z0 += dz;
    }
    Mat g = random_group_element(spec, rng, 0.5);
    InteriorSample s;
    s.flag = transform_flag(f0, g);
    s.point = mobius(spec, g, z0);
    return s;
}

// ---- chains ----

namespace {

Subspace span_of(const Subspace& c, const std::vector<Vec>& vs) {
    Mat b = c.orth();
    for (const auto& v : vs) b = hconcat(b, v);
    return canonicalize(b);
}

FlagPair chain_flag(const DomainSpec& spec, const Subspace& v1, const Subspace& must_contain, Rng& rng) {
    auto lv = level_for_dim(spec, v1.dim());
    if (!lv) fail(ErrorKind::BadDimension, "no level has dim " + std::to_string(v1.dim()));
    if (spec.has_bilinear()) return make_flag(spec, *lv, v1);
    Subspace base = sum(v1, must_contain);
    return make_flag(spec, *lv, v1, extend_random(base, v2_dim(spec, *lv), rng));
}

// a null vector of the bilinear form orthogonal to every column of `orth_to`, outside `avoid`
Vec isotropic_companion(const DomainSpec& spec, const Mat& orth_to, const Subspace& avoid, Rng& rng) {
    Form b = spec.bilinear();
    Mat lin = null_space(orth_to.transpose() * b.matrix);
    if (lin.cols() == 0) fail(ErrorKind::Degenerate, "no room for an intermediate subspace");
    Mat pa = avoid.projector();
    for (int attempt = 0; attempt < 50; ++attempt) {
        Vec u = lin * gaussian_vec(rng, static_cast<int>(lin.cols()));
        Vec d = u;
        if (b.kind != FormKind::Antisymmetric) {
            Vec w = lin * gaussian_vec(rng, static_cast<int>(lin.cols()));
            cd a2 = b.eval(w, w), a1 = 2.0 * b.eval(u, w), a0 = b.eval(u, u);
            cd t;
            if (std::abs(a2) < 1e-12) {
                if (std::abs(a1) < 1e-12) continue;
                t = -a0 / a1;
            } else {
                t = (-a1 + std::sqrt(a1 * a1 - 4.0 * a2 * a0)) / (2.0 * a2);
            }
            d = u + t * w;
        }
        if (d.norm() < 1e-6) continue;
        d.normalize();
        if ((d - pa * d).norm() > 1e-3) return d;
    }
    fail(ErrorKind::Degenerate, "could not find an isotropic companion vector");
}

}  // namespace

std::vector<FlagPair> chain_connect(const DomainSpec& spec, Level r, const Subspace& a, const Subspace& b,
                                    ChainMode mode, Rng& rng) {
    const int dim = level_dim(spec, r);
    if (a.dim() != dim || b.dim() != dim) fail(ErrorKind::BadDimension, "endpoints are not in D_r");
    std::vector<FlagPair> out;
    Subspace c = intersect(a, b, 1e-7);
    const int m = dim - c.dim();
    if (m == 0) return out;
    Mat pc = c.projector();
    Mat ac = col_space(a.orth() - pc * a.orth(), 1e-7);
    Mat bc = col_space(b.orth() - pc * b.orth(), 1e-7);
    if (ac.cols() != m || bc.cols() != m) fail(ErrorKind::Degenerate, "complement dimension");
    if (spec.has_bilinear()) {
        // make the cross pairing diagonal so mixed spans stay isotropic
        Mat cross = bc.transpose() * spec.bilinear().matrix * ac;
        Eigen::JacobiSVD<Mat> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
        ac = ac * svd.matrixV();
        bc = bc * svd.matrixU().conjugate();
    }
    // V_i = C + span(b_1..b_i, a_{i+1}..a_m)
    std::vector<Subspace> vs;
    for (int i = 0; i <= m; ++i) {
        std::vector<Vec> cols;
        for (int j = 0; j < i; ++j) cols.push_back(bc.col(j));
        for (int j = i; j < m; ++j) cols.push_back(ac.col(j));
        vs.push_back(span_of(c, cols));
    }
    if (mode == ChainMode::Q) {
        for (int i = 0; i < m; ++i) {
            Subspace lower = intersect(vs[i], vs[i + 1], 1e-7);
            out.push_back(chain_flag(spec, lower, sum(vs[i], vs[i + 1]), rng));
        }
        return out;
    }
    if (!level_for_dim(spec, dim + 1)) fail(ErrorKind::LevelOrderViolation, "no level below r for Z-chains");
    std::vector<Subspace> path{vs[0]};
    for (int i = 0; i < m; ++i) {
        Subspace up = sum(vs[i], vs[i + 1]);
        if (spec.has_bilinear() && !is_isotropic(up, spec.bilinear(), 1e-7)) {
            // route through V' = (V_i cap V_{i+1}) + d with d paired to neither step
            Subspace common = intersect(vs[i], vs[i + 1], 1e-7);
            Vec d = isotropic_companion(spec, up.orth(), up, rng);
            Subspace mid = span_of(common, {d});
            path.push_back(mid);
        }
        path.push_back(vs[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        Subspace up = sum(path[i], path[i + 1]);
        out.push_back(chain_flag(spec, up, up, rng));
    }
    return out;
}

// ---- dimension bookkeeping ----

int z_tau_dim_closed(const DomainSpec& spec, Level s, Level r) {
    if (!(s.value() < r.value())) fail(ErrorKind::LevelOrderViolation, "need s < r");
    const int ar = level_dim(spec, r), as = level_dim(spec, s);
    return ar * (as - ar);
}

int q_mu_dim_closed(const DomainSpec& spec, Level s, Level r) {
    if (!(s.value() > r.value())) fail(ErrorKind::LevelOrderViolation, "need s > r");
    const int ar = level_dim(spec, r), as = level_dim(spec, s);
    const int k = ar - as;
    switch (spec.kind) {
        case DomainKind::I: {
            const int mdim = v2_dim(spec, s) - as;
            return k * (mdim - k);
        }
        case DomainKind::III: {
            const int mdim = spec.ambient() - 2 * as;
            return k * (mdim - k) - k * (k - 1) / 2;
        }
        case DomainKind::II: {
            const int mdim = spec.ambient() - 2 * as;
            return k * (mdim - k) - k * (k + 1) / 2;
        }
    }
    return 0;
}

namespace {

// nullity of a complex-linear constraint on M ((N-a) x a), given as a callback returning stacked residuals
int tangent_nullity(int rows, int cols, const std::function<Vec(const Mat&)>& cons) {
    const int nv = rows * cols;
    if (nv == 0) return 0;
    std::vector<Vec> outs;
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            Mat e = Mat::Zero(rows, cols);
            e(i, j) = 1.0;
            outs.push_back(cons(e));
        }
    const int ne = static_cast<int>(outs[0].size());
    if (ne == 0) return nv;
    Mat a(ne, nv);
    for (int v = 0; v < nv; ++v) a.col(v) = outs[static_cast<std::size_t>(v)];
    return nv - numeric_rank(a, 1e-9);
}

Vec flatten(const Mat& m) {
    Vec v(m.size());
    int k = 0;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i) v(k++) = m(i, j);
    return v;
}

Vec stack(const std::vector<Vec>& parts) {
    int n = 0;
    for (const auto& p : parts) n += static_cast<int>(p.size());
    Vec out(n);
    int k = 0;
    for (const auto& p : parts) {
        out.segment(k, p.size()) = p;
        k += static_cast<int>(p.size());
    }
    return out;
}

}  // namespace

int z_tau_dim_numeric(const FlagPair& tau, Level r, const Subspace& w) {
    if (!z_tau_contains(tau, r, w)) fail(ErrorKind::InvalidFlag, "W is not in Z_tau");
    const DomainSpec& spec = tau.spec();
    Mat wo = w.orth();
    Mat wc = null_space(wo.adjoint());
    Mat outside = identity(spec.ambient()) - tau.V1().projector();
    return tangent_nullity(static_cast<int>(wc.cols()), w.dim(), [&](const Mat& m) {
        Mat phi = wc * m;
        std::vector<Vec> parts{flatten(outside * phi)};
        if (spec.has_bilinear()) {
            Mat bm = spec.bilinear().matrix;
            parts.push_back(flatten(wo.transpose() * bm * phi + phi.transpose() * bm * wo));
        }
        return stack(parts);
    });
}

int q_mu_dim_numeric(const FlagPair& mu, Level r, const Subspace& w) {
    if (!q_mu_contains(mu, r, w)) fail(ErrorKind::InvalidFlag, "W is not in Q_mu");
    const DomainSpec& spec = mu.spec();
    // basis of W adapted to mu.V1
    Mat v1 = mu.V1().orth();
    Mat rest = col_space(w.orth() - v1 * (v1.adjoint() * w.orth()), 1e-8);
    Mat wo = hconcat(v1, rest);
    Mat wc = null_space(wo.adjoint());
    Mat outside = identity(spec.ambient()) - mu.V2().projector();
    const int a1 = static_cast<int>(v1.cols());
    return tangent_nullity(static_cast<int>(wc.cols()), static_cast<int>(wo.cols()), [&](const Mat& m) {
        Mat phi = wc * m;
        std::vector<Vec> parts{flatten(outside * phi), flatten(m.leftCols(a1))};
        if (spec.has_bilinear()) {
            Mat bm = spec.bilinear().matrix;
            parts.push_back(flatten(wo.transpose() * bm * phi + phi.transpose() * bm * wo));
        }
        return stack(parts);
    });
}

// ---- LGr chart ----

Mat LgrChartPoint::basis() const {
    const int k = n - r;
    Mat b(2 * n, k);
    b << identity(k), x, y, z;
    return b;
}

LgrChartPoint LgrChartPoint::reference(int n, int r) {
    LgrChartPoint p;
    p.n = n;
    p.r = r;
    p.x = Mat::Zero(r, n - r);
    p.y = identity(n - r);
    p.z = Mat::Zero(r, n - r);
    return p;
}

LgrChartPoint LgrChartPoint::from_subspace(int n, int r, const Subspace& v) {
    const int k = n - r;
    if (v.ambient() != 2 * n || v.dim() != k) fail(ErrorKind::BadDimension, "subspace is not in D_r");
    Mat b = v.orth();
    Mat top = b.topRows(k);
    RVec sv = singular_values(top);
    if (sv(k - 1) < 1e-8) fail(ErrorKind::ChartFailure, "subspace is off the chart");
    Mat c = b * top.inverse();
    LgrChartPoint p;
    p.n = n;
    p.r = r;
    p.x = c.block(k, 0, r, k);
    p.y = c.block(n, 0, k, k);
    p.z = c.block(n + k, 0, r, k);
    return p;
}

Mat lgr_bilinear_residual(const LgrChartPoint& p) {
    return p.y - p.y.transpose() + p.x.transpose() * p.z - p.z.transpose() * p.x;
}

Mat lgr_hermitian_residual(const LgrChartPoint& p) {
    return identity(p.n - p.r) + p.x.adjoint() * p.x - p.y.adjoint() * p.y - p.z.adjoint() * p.z;
}

Mat lgr_tangent_residual(const LgrChartPoint& p, const ChartTangent& t) {
    return t.dy - t.dy.transpose() + t.dx.transpose() * p.z + p.x.transpose() * t.dz -
           t.dz.transpose() * p.x - p.z.transpose() * t.dx;
}

namespace {

Mat theta_of(const LgrChartPoint& p, const Mat& dx, const Mat& dy, const Mat& dz) {
    return p.x.adjoint() * dx - p.y.adjoint() * dy - p.z.adjoint() * dz;
}

}  // namespace

Mat lgr_sigma_tangent_residual(const LgrChartPoint& p, const ChartTangent& t) {
    Mat th = theta_of(p, t.dx, t.dy, t.dz);
    return th + th.adjoint();
}

namespace {

int lgr_var_count(int n, int r) { return 2 * r * (n - r) + (n - r) * (n - r); }

ChartTangent unpack(int n, int r, const Vec& v) {
    const int k = n - r;
    ChartTangent t;
    t.dx = Mat(r, k);
    t.dy = Mat(k, k);
    t.dz = Mat(r, k);
    int idx = 0;
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < r; ++i) t.dx(i, j) = v(idx++);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) t.dy(i, j) = v(idx++);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < r; ++i) t.dz(i, j) = v(idx++);
    return t;
}

}  // namespace

std::vector<ChartTangent> lgr_holomorphic_tangents(const LgrChartPoint& p) {
    const int nv = lgr_var_count(p.n, p.r);
    const int k = p.n - p.r;
    Mat a(k * k, nv);
    for (int v = 0; v < nv; ++v) {
        Vec e = Vec::Zero(nv);
        e(v) = 1.0;
        a.col(v) = flatten(lgr_tangent_residual(p, unpack(p.n, p.r, e)));
    }
    Mat ns = null_space(a);
    std::vector<ChartTangent> out;
    for (int j = 0; j < ns.cols(); ++j) out.push_back(unpack(p.n, p.r, ns.col(j)));
    return out;
}

std::vector<ChartTangent> lgr_sigma_tangents(const LgrChartPoint& p) {
    const int nv = lgr_var_count(p.n, p.r);
    const int k = p.n - p.r;
    RMat a(4 * k * k, 2 * nv);
    for (int v = 0; v < 2 * nv; ++v) {
        Vec e = Vec::Zero(nv);
        e(v % nv) = v < nv ? cd(1.0) : cd(0.0, 1.0);
        ChartTangent t = unpack(p.n, p.r, e);
        Vec r1 = flatten(lgr_tangent_residual(p, t));
        Vec r2 = flatten(lgr_sigma_tangent_residual(p, t));
        RVec col(4 * k * k);
        col << r1.real(), r1.imag(), r2.real(), r2.imag();
        a.col(v) = col;
    }
    RMat ns = real_null_space(a);
    std::vector<ChartTangent> out;
    for (int j = 0; j < ns.cols(); ++j) {
        Vec c(nv);
        for (int i = 0; i < nv; ++i) c(i) = cd(ns(i, j), ns(nv + i, j));
        out.push_back(unpack(p.n, p.r, c));
    }
    return out;
}

namespace {

// values of dx, dy, dz and of their conjugates on one complexified tangent vector
struct Eval {
    Mat dx, dy, dz;
    Mat cx, cy, cz;
};

Eval real_vec(const ChartTangent& t) {
    return {t.dx, t.dy, t.dz, t.dx.conjugate(), t.dy.conjugate(), t.dz.conjugate()};
}

Eval hol_vec(const ChartTangent& t) {
    return {t.dx, t.dy, t.dz, Mat::Zero(t.dx.rows(), t.dx.cols()), Mat::Zero(t.dy.rows(), t.dy.cols()),
            Mat::Zero(t.dz.rows(), t.dz.cols())};
}

Eval antihol_vec(const ChartTangent& t) {
    return {Mat::Zero(t.dx.rows(), t.dx.cols()), Mat::Zero(t.dy.rows(), t.dy.cols()),
            Mat::Zero(t.dz.rows(), t.dz.cols()), t.dx.conjugate(), t.dy.conjugate(), t.dz.conjugate()};
}

Mat theta(const LgrChartPoint& p, const Eval& u) { return theta_of(p, u.dx, u.dy, u.dz); }

Mat dtheta(const Eval& a, const Eval& b) {
    return a.cx.transpose() * b.dx - b.cx.transpose() * a.dx - a.cy.transpose() * b.dy +
           b.cy.transpose() * a.dy - a.cz.transpose() * b.dz + b.cz.transpose() * a.dz;
}

Mat theta_t(const LgrChartPoint& p, const Eval& u) {
    return u.dy + p.x.transpose() * u.dz - p.z.transpose() * u.dx;
}

Mat dtheta_t(const Eval& a, const Eval& b) {
    return a.dx.transpose() * b.dz - b.dx.transpose() * a.dz - a.dz.transpose() * b.dx +
           b.dz.transpose() * a.dx;
}

}  // namespace

LeviValue levi_bracket_check(int n, int r, const LgrChartPoint& p, const ChartTangent& v,
                             const ChartTangent& w1, const ChartTangent& w2) {
    if (p.n != n || p.r != r) fail(ErrorKind::BadDimension, "chart point has other (n, r)");
    if (max_abs(lgr_bilinear_residual(p)) > 1e-8 || max_abs(lgr_hermitian_residual(p)) > 1e-8)
        fail(ErrorKind::PointNotOnSigma, "chart point violates the defining equations");
    auto scale = [](const ChartTangent& t) {
        return std::max({1.0, max_abs(t.dx), max_abs(t.dy), max_abs(t.dz)});
    };
    if (max_abs(lgr_tangent_residual(p, v)) > 1e-8 * scale(v) ||
        max_abs(lgr_sigma_tangent_residual(p, v)) > 1e-8 * scale(v))
        fail(ErrorKind::TangentNotTangent, "v is not tangent to Sigma_r");
    if (max_abs(lgr_tangent_residual(p, w1)) > 1e-8 * scale(w1) ||
        max_abs(lgr_tangent_residual(p, w2)) > 1e-8 * scale(w2))
        fail(ErrorKind::TangentNotTangent, "w is not tangent to D_r");
    Eval a = real_vec(v), b = hol_vec(w1), c = antihol_vec(w2), c2 = hol_vec(w2);
    LeviValue out;
    out.theta_dtheta = theta(p, a) * dtheta(b, c) - theta(p, b) * dtheta(a, c) + theta(p, c) * dtheta(a, b);
    out.tilde = theta_t(p, a) * dtheta_t(b, c2) - theta_t(p, b) * dtheta_t(a, c2) +
                theta_t(p, c2) * dtheta_t(a, b);
    Eigen::Index i = 0, j = 0;
    out.theta_dtheta.cwiseAbs().maxCoeff(&i, &j);
    out.scalar = out.theta_dtheta(i, j);
    return out;
}

}  // namespace bsd
