#include "bsdlab/frames.hpp"

#include <cmath>

namespace bsd {

const char* to_string(FrameGroup g) {
    switch (g) {
        case FrameGroup::SU: return "su";
        case FrameGroup::SO: return "so";
        case FrameGroup::Sp: return "sp";
    }
    return "?";
}

FrameGroup parse_frame_group(const std::string& s) {
    if (s == "su" || s == "SU") return FrameGroup::SU;
    if (s == "so" || s == "SO") return FrameGroup::SO;
    if (s == "sp" || s == "Sp" || s == "SP") return FrameGroup::Sp;
    fail(ErrorKind::InputError, "unknown group '" + s + "'");
}

const char* to_string(FrameChange k) {
    switch (k) {
        case FrameChange::Position: return "position";
        case FrameChange::RealVectors: return "real-vectors";
        case FrameChange::Dilation: return "dilation";
        case FrameChange::Rotation: return "rotation";
        case FrameChange::Final: return "final";
    }
    return "?";
}

FrameShape frame_shape(FrameGroup g, int p, int q, int ell) {
    if (q < 1 || p < q) fail(ErrorKind::InputError, "need 1 <= q <= p");
    if (ell < 1 || ell > q) fail(ErrorKind::InputError, "need 1 <= ell <= q");
    if (g != FrameGroup::SU && p != q) fail(ErrorKind::InputError, "SO and Sp frames need p = q");
    // odd ell has no real-structure pairing between Z and Y for the symmetric form
    if (g == FrameGroup::SO && ell % 2 != 0) fail(ErrorKind::InputError, "SO frames need even ell");
    return FrameShape{g, p, q, ell};
}

Form frame_hermitian(const FrameShape& s) { return hermitian_form(s.p, s.q); }

Form frame_bilinear(const FrameShape& s) {
    if (s.group == FrameGroup::SO) return symmetric_form(s.p);
    if (s.group == FrameGroup::Sp) return antisymmetric_form(s.p);
    fail(ErrorKind::InputError, "SU frames carry no bilinear form");
}

RVec x_signs(const FrameShape& s) {
    RVec d(s.xdim());
    for (int j = 0; j < s.xdim(); ++j) d(j) = j < s.q - s.ell ? 1.0 : -1.0;
    return d;
}

Mat frame_gram(const FrameShape& s) {
    const int l = s.ell, n = s.n();
    Mat g = Mat::Zero(n, n);
    g.topRightCorner(l, l) = identity(l);
    g.bottomLeftCorner(l, l) = identity(l);
    RVec d = x_signs(s);
    for (int j = 0; j < s.xdim(); ++j) g(l + j, l + j) = d(j);
    return g;
}

namespace {

Mat reference_rows(const FrameShape& s) {
    const int n = s.n(), l = s.ell, q = s.q, p = s.p;
    const double r2 = 1.0 / std::sqrt(2.0);
    auto e = [&](int i) {  // i-th positive basis vector, 0-based
        Vec v = Vec::Zero(n);
        v(i) = 1.0;
        return v;
    };
    auto f = [&](int i) {
        Vec v = Vec::Zero(n);
        v(q + i) = 1.0;
        return v;
    };
    Mat m(n, n);
    std::vector<int> used_f(static_cast<std::size_t>(p), 0);
    for (int a = 0; a < l; ++a) {
        Vec z, y;
        if (s.group == FrameGroup::SO) {
            // pair e_{2k-1} with f_{2k} and e_{2k} with -f_{2k-1}
            const int partner = a % 2 == 0 ? a + 1 : a - 1;
            const double sg = a % 2 == 0 ? 1.0 : -1.0;
            z = r2 * (e(a) + sg * f(partner));
            y = r2 * (e(a) - sg * f(partner));
            used_f[static_cast<std::size_t>(partner)] = 1;
        } else {
            z = r2 * (e(a) + f(a));
            y = r2 * (e(a) - f(a));
            used_f[static_cast<std::size_t>(a)] = 1;
        }
        m.row(a) = z.transpose();
        m.row(n - l + a) = y.transpose();
    }
    int row = l;
    for (int i = l; i < q; ++i) m.row(row++) = e(i).transpose();
    for (int i = 0; i < p; ++i)
        if (!used_f[static_cast<std::size_t>(i)]) m.row(row++) = f(i).transpose();
    return m;
}

Mat bilinear_of(const FrameShape& s, const Mat& rows) {
    return rows * frame_bilinear(s).matrix * rows.transpose();
}

double rel(const Mat& a, const Mat& b) { return max_abs(a - b); }

}  // namespace

SigmaFrame reference_frame(const FrameShape& s) {
    Mat m = reference_rows(s);
    cd d = m.determinant();
    if (s.group == FrameGroup::SU) {
        // rescale the pair (Z_1, Y_1) by a unit c, c^2 det = 1
        cd c = std::sqrt(1.0 / d);
        m.row(0) *= c;
        m.row(s.n() - s.ell) *= c;
    } else if (s.group == FrameGroup::Sp && std::abs(d + 1.0) < 1e-12 && s.ell % 2 == 1) {
        // i (Z, Y) keeps both pairings up to the sign of B(Y, Z) and multiplies det by (-1)^ell
        m.topRows(s.ell) *= cd(0.0, 1.0);
        m.bottomRows(s.ell) *= cd(0.0, 1.0);
    }
    if (std::abs(m.determinant() - 1.0) > 1e-12) fail(ErrorKind::Degenerate, "reference frame has det != 1");
    return SigmaFrame{s, m};
}

Mat frame_bilinear_gram(const FrameShape& s) {
    if (s.group == FrameGroup::SU) return Mat();
    return bilinear_of(s, reference_frame(s).rows);
}

double FrameResidual::max() const { return std::max({pairing, bilinear, det}); }

FrameResidual frame_residual(const FrameShape& s, const Mat& rows) {
    if (rows.rows() != s.n() || rows.cols() != s.n()) fail(ErrorKind::ShapeMismatch, "frame matrix shape");
    FrameResidual r;
    r.pairing = rel(rows * frame_hermitian(s).matrix * rows.adjoint(), frame_gram(s));
    if (s.group != FrameGroup::SU) r.bilinear = rel(bilinear_of(s, rows), frame_bilinear_gram(s));
    r.det = std::abs(rows.determinant() - 1.0);
    return r;
}

SigmaFrame make_frame(const FrameShape& s, const Mat& guess) {
    const int n = s.n();
    if (guess.rows() != n || guess.cols() != n) fail(ErrorKind::ShapeMismatch, "guess shape");
    if (numeric_rank(guess) < n) fail(ErrorKind::Degenerate, "guess is not of full rank");
    const Mat m0 = reference_frame(s).rows;
    const Mat h = frame_hermitian(s).matrix;
    // frames are m0 g^t with g in the group; correct g by Newton-Schulz steps
    Mat g = (m0.inverse() * guess).transpose();
    const Mat id = identity(n);
    Mat bm, bminv;
    if (s.group != FrameGroup::SU) {
        bm = frame_bilinear(s).matrix;
        bminv = bm.inverse();
    }
    auto herm_defect = [&](const Mat& x) { return Mat(h * x.adjoint() * h * x - id); };
    auto bil_defect = [&](const Mat& x) { return Mat(bminv * x.transpose() * bm * x - id); };
    double r0 = max_abs(herm_defect(g));
    if (s.group != FrameGroup::SU) r0 = std::max(r0, max_abs(bil_defect(g)));
    if (r0 > 0.5) fail(ErrorKind::Degenerate, "guess too far from the frame bundle (defect " + std::to_string(r0) + ")");
    for (int it = 0; it < 200; ++it) {
        g = g - 0.5 * g * herm_defect(g);
        if (s.group != FrameGroup::SU) g = g - 0.5 * g * bil_defect(g);
        double r = max_abs(herm_defect(g));
        if (s.group != FrameGroup::SU) r = std::max(r, max_abs(bil_defect(g)));
        if (r < 1e-15) break;
    }
    cd d = g.determinant();
    if (s.group == FrameGroup::SU) {
        g *= std::pow(d, -1.0 / n);
    } else if (std::abs(d - 1.0) > 1e-6) {
        fail(ErrorKind::Degenerate, "guess lies in the wrong component (det " + std::to_string(d.real()) + ")");
    }
    SigmaFrame f{s, m0 * g.transpose()};
    if (frame_residual(s, f.rows).max() > 1e-9) fail(ErrorKind::Degenerate, "frame correction did not converge");
    return f;
}

SigmaFrame act(const Mat& g, const SigmaFrame& f) { return SigmaFrame{f.shape, f.rows * g.transpose()}; }

Mat random_frame_algebra(const FrameShape& s, Rng& rng, double scale) {
    const int n = s.n();
    const Mat h = frame_hermitian(s).matrix;
    Mat x = gaussian(rng, n, n);
    for (int round = 0; round < 3; ++round) {
        x = 0.5 * (x - h * x.adjoint() * h);
        if (s.group != FrameGroup::SU) {
            const Mat b = frame_bilinear(s).matrix;
            x = 0.5 * (x - b.inverse() * x.transpose() * b);
        }
    }
    if (s.group == FrameGroup::SU) x -= (x.trace() / static_cast<double>(n)) * identity(n);
    const double nrm = x.norm();
    if (nrm > 0) x *= scale * std::sqrt(static_cast<double>(n)) / nrm;
    return x;
}

Mat project_frame_algebra(const FrameShape& s, const Mat& x0) {
    const Mat q = frame_gram(s);
    Mat x = x0;
    Mat qb, qbinv;
    if (s.group != FrameGroup::SU) {
        qb = frame_bilinear_gram(s);
        qbinv = qb.inverse();
    }
    for (int round = 0; round < 4; ++round) {
        x = 0.5 * (x - q * x.adjoint() * q);
        if (s.group != FrameGroup::SU) x = 0.5 * (x - qb * x.transpose() * qbinv);
    }
    return x;
}

Mat MaurerCartanSlice::block(int i, int j) const {
    const int l = shape.ell, m = shape.xdim();
    const int off[3] = {0, l, l + m};
    const int sz[3] = {l, m, l};
    return pi.block(off[i], off[j], sz[i], sz[j]);
}

SymmetryResidual symmetry_residual(const MaurerCartanSlice& m) {
    const FrameShape& s = m.shape;
    SymmetryResidual r;
    const Mat q = frame_gram(s);
    r.hermitian = max_abs(m.pi * q + q * m.pi.adjoint());
    if (s.group != FrameGroup::SU) {
        const Mat qb = frame_bilinear_gram(s);
        r.bilinear = max_abs(m.pi * qb + qb * m.pi.transpose());
        const int l = s.ell;
        // K = B(Y, Z); differentiating B(Z, Z) = 0 gives phi K + eps (phi K)^t = 0
        const Mat k = qb.bottomLeftCorner(l, l);
        const double eps = s.group == FrameGroup::SO ? 1.0 : -1.0;
        const Mat pk = m.phi() * k;
        r.phi = max_abs(pk + eps * pk.transpose());
    }
    return r;
}

double phi_literal_residual(const MaurerCartanSlice& m) {
    const Mat phi = m.phi();
    if (m.shape.group == FrameGroup::Sp) return max_abs(phi - phi.transpose());
    if (m.shape.group == FrameGroup::SO) return max_abs(phi + phi.transpose());
    return 0.0;
}

MaurerCartanSlice maurer_cartan_from(const FrameShape& s, const Mat& rows, const Mat& drows) {
    return MaurerCartanSlice{s, drows * rows.inverse()};
}

MaurerCartanSlice maurer_cartan(const FrameShape& s, const FrameCurve& path, double t, double h) {
    const Mat m = path(t);
    const double drift = frame_residual(s, m).max();
    if (drift > 1e-6) fail(ErrorKind::FrameDriftTooLarge, "path leaves the frame bundle (" + std::to_string(drift) + ")");
    const Mat dm = (-path(t + 2 * h) + 8.0 * path(t + h) - 8.0 * path(t - h) + path(t - 2 * h)) / (12.0 * h);
    return maurer_cartan_from(s, m, dm);
}

MaurerCartanSlice maurer_cartan_exp(const SigmaFrame& frame0, const Mat& a, double t) {
    const Mat e = expm(t * a);
    const Mat m = frame0.rows * e.transpose();
    const Mat dm = frame0.rows * (a * e).transpose();
    return maurer_cartan_from(frame0.shape, m, dm);
}

double structure_residual(const SigmaFrame& frame0, const Mat& a, const Mat& b, double h) {
    const Mat f = frame0.rows;
    // exact pi_s and pi_t of M(s, t) = F (e^{sA} e^{tB})^t
    auto pis = [&](double s, double t) {
        const Mat g = expm(s * a) * expm(t * b);
        const Mat m = f * g.transpose();
        const Mat dm = f * (a * g).transpose();
        return Mat(dm * m.inverse());
    };
    auto pit = [&](double s, double t) {
        const Mat ea = expm(s * a), eb = expm(t * b);
        const Mat m = f * (ea * eb).transpose();
        const Mat dm = f * (ea * b * eb).transpose();
        return Mat(dm * m.inverse());
    };
    const Mat dsdt = (pit(h, 0) - pit(-h, 0)) / (2 * h);
    const Mat dtds = (pis(0, h) - pis(0, -h)) / (2 * h);
    const Mat ps = pis(0, 0), pt = pit(0, 0);
    return max_abs(dsdt - dtds - (ps * pt - pt * ps));
}

// ---- frame changes ----

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::InvalidParams, what);
}

void require_shape(const Mat& m, int r, int c, const std::string& name) {
    require(m.rows() == r && m.cols() == c,
            name + " must be " + std::to_string(r) + "x" + std::to_string(c));
}

Mat mask(const FrameShape& s, std::initializer_list<std::pair<int, int>> blocks, Rng& rng) {
    const int l = s.ell, m = s.xdim();
    const int off[3] = {0, l, l + m};
    const int sz[3] = {l, m, l};
    Mat x = Mat::Zero(s.n(), s.n());
    for (auto [i, j] : blocks)
        if (sz[i] > 0 && sz[j] > 0) x.block(off[i], off[j], sz[i], sz[j]) = gaussian(rng, sz[i], sz[j]);
    return x;
}

Mat rescale(Mat x, double scale) {
    const double nrm = x.norm();
    if (nrm > 0) x *= scale / nrm;
    return x;
}

}  // namespace

Mat frame_change_matrix(const FrameShape& s, FrameChange kind, const FrameChangeParams& prm) {
    const int l = s.ell, m = s.xdim(), n = s.n();
    const double tol = 1e-9;
    Mat u = identity(n);
    switch (kind) {
        case FrameChange::Position: {
            require_shape(prm.W, l, l, "W");
            require_shape(prm.V, l, l, "V");
            require(max_abs(prm.V.adjoint() * prm.W - identity(l)) < tol * (1 + max_abs(prm.W)),
                    "position change needs conj(V)^t W = I");
            u.topLeftCorner(l, l) = prm.W;
            u.bottomRightCorner(l, l) = prm.V;
            break;
        }
        case FrameChange::RealVectors: {
            require_shape(prm.H, l, l, "H");
            // Y~ = Y + H Z keeps <Y~, Y~> = 0 only for H + H^* = 0
            require(max_abs(prm.H + prm.H.adjoint()) < tol * (1 + max_abs(prm.H)),
                    "real-vector change needs H + H^* = 0");
            u.bottomLeftCorner(l, l) = prm.H;
            break;
        }
        case FrameChange::Dilation: {
            require(prm.lambda.size() == l, "lambda must have ell entries");
            for (int a = 0; a < l; ++a) {
                require(prm.lambda(a) > 0, "dilation needs lambda > 0");
                u(a, a) = 1.0 / prm.lambda(a);
                u(n - l + a, n - l + a) = prm.lambda(a);
            }
            break;
        }
        case FrameChange::Rotation: {
            require_shape(prm.U, m, m, "U");
            if (m > 0) {
                Mat dx = Mat::Zero(m, m);
                dx.diagonal() = x_signs(s).cast<cd>();
                require(max_abs(prm.U * dx * prm.U.adjoint() - dx) < tol * (1 + max_abs(prm.U)),
                        "rotation needs U in U(q-ell, p-ell)");
                require(std::abs(prm.U.determinant() - 1.0) < tol, "rotation needs det U = 1");
                u.block(l, l, m, m) = prm.U;
            }
            break;
        }
        case FrameChange::Final: {
            require_shape(prm.A, l, l, "A");
            require_shape(prm.B, l, m, "B");
            require_shape(prm.C, m, l, "C");
            Mat dx = Mat::Zero(m, m);
            if (m > 0) dx.diagonal() = x_signs(s).cast<cd>();
            const double sc = 1 + max_abs(prm.A) + max_abs(prm.B) * max_abs(prm.B);
            require(m == 0 || max_abs(prm.C + dx * prm.B.adjoint()) < tol * sc, "final change needs C + B^* = 0");
            require(max_abs(prm.A + prm.A.adjoint() + prm.B * dx * prm.B.adjoint()) < tol * sc,
                    "final change needs A + A^* + B B^* = 0");
            if (m > 0) {
                u.block(l, 0, m, l) = prm.C;
                u.block(l + m, l, l, m) = prm.B;
            }
            u.bottomLeftCorner(l, l) = prm.A;
            break;
        }
    }
    const double sc = 1 + max_abs(u) * max_abs(u);
    const Mat q = frame_gram(s);
    require(max_abs(u * q * u.adjoint() - q) < tol * sc, "change does not preserve the Hermitian pairing");
    if (s.group != FrameGroup::SU) {
        const Mat qb = frame_bilinear_gram(s);
        require(max_abs(u * qb * u.transpose() - qb) < tol * sc, "change does not preserve the bilinear pairing");
    }
    require(std::abs(u.determinant() - 1.0) < tol * sc, "change does not have det 1");
    return u;
}

SigmaFrame frame_change(const SigmaFrame& f, FrameChange kind, const FrameChangeParams& prm) {
    return SigmaFrame{f.shape, frame_change_matrix(f.shape, kind, prm) * f.rows};
}

FrameChangeParams random_change_params(const FrameShape& s, FrameChange kind, Rng& rng, double scale) {
    const int l = s.ell, m = s.xdim(), n = s.n();
    FrameChangeParams prm;
    switch (kind) {
        case FrameChange::Position: {
            Mat x = project_frame_algebra(s, mask(s, {{0, 0}, {2, 2}}, rng));
            if (s.group == FrameGroup::SU) {
                const cd im(0.0, x.topLeftCorner(l, l).trace().imag() / l);
                x.topLeftCorner(l, l) -= im * identity(l);
                x.bottomRightCorner(l, l) -= im * identity(l);
            }
            const Mat u = expm(rescale(x, scale));
            prm.W = u.topLeftCorner(l, l);
            prm.V = u.bottomRightCorner(l, l);
            break;
        }
        case FrameChange::RealVectors: {
            const Mat x = rescale(project_frame_algebra(s, mask(s, {{2, 0}}, rng)), scale);
            prm.H = x.bottomLeftCorner(l, l);
            break;
        }
        case FrameChange::Dilation: {
            Mat x = Mat::Zero(n, n);
            for (int a = 0; a < l; ++a) {
                const double d = std::normal_distribution<double>(0.0, 1.0)(rng);
                x(a, a) = -d;
                x(n - l + a, n - l + a) = d;
            }
            x = rescale(project_frame_algebra(s, x), scale);
            prm.lambda.resize(l);
            for (int a = 0; a < l; ++a) prm.lambda(a) = std::exp(x(n - l + a, n - l + a).real());
            break;
        }
        case FrameChange::Rotation: {
            if (m == 0) {
                prm.U = Mat(0, 0);
                break;
            }
            Mat x = project_frame_algebra(s, mask(s, {{1, 1}}, rng));
            if (s.group == FrameGroup::SU) x.block(l, l, m, m) -= (x.trace() / static_cast<double>(m)) * identity(m);
            prm.U = expm(rescale(x, scale)).block(l, l, m, m);
            break;
        }
        case FrameChange::Final: {
            const Mat x = rescale(project_frame_algebra(s, mask(s, {{1, 0}, {2, 0}, {2, 1}}, rng)), scale);
            const Mat u = expm(x);
            prm.C = u.block(l, 0, m, l);
            prm.B = u.block(l + m, l, l, m);
            prm.A = u.bottomLeftCorner(l, l);
            break;
        }
    }
    return prm;
}

Mat transform_pi(const Mat& u, const Mat& du, const Mat& pi) {
    const Mat ui = u.inverse();
    return du * ui + u * pi * ui;
}

FrameSelftest frame_selftest(const FrameShape& s, int trials, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    FrameSelftest out;
    out.trials = trials;
    const int l = s.ell;
    for (int t = 0; t < trials; ++t) {
        SigmaFrame f = act(expm(random_frame_algebra(s, rng, 0.6)), reference_frame(s));
        Mat a = random_frame_algebra(s, rng, 0.7);
        MaurerCartanSlice m = maurer_cartan_exp(f, a, 0.0);
        out.relations = std::max(out.relations, frame_residual(s, f.rows).max());
        out.symmetry = std::max(out.symmetry, symmetry_residual(m).max());
        if (t < 5) {
            Mat b = random_frame_algebra(s, rng, 0.5);
            out.structure = std::max(out.structure, structure_residual(f, 0.7 * a, b, 1e-4));
        }

        FrameChangeParams pos = random_change_params(s, FrameChange::Position, rng);
        MaurerCartanSlice mp = maurer_cartan_exp(frame_change(f, FrameChange::Position, pos), a, 0.0);
        out.position = std::max({out.position, max_abs(mp.phi() - pos.W * m.phi() * pos.W.adjoint()),
                                 max_abs(mp.theta() - pos.W * m.theta())});

        FrameChangeParams dil = random_change_params(s, FrameChange::Dilation, rng);
        MaurerCartanSlice md = maurer_cartan_exp(frame_change(f, FrameChange::Dilation, dil), a, 0.0);
        Mat phi = m.phi(), theta = m.theta();
        for (int i = 0; i < l; ++i) {
            for (int j = 0; j < l; ++j) phi(i, j) /= dil.lambda(i) * dil.lambda(j);
            theta.row(i) /= dil.lambda(i);
        }
        out.dilation = std::max({out.dilation, max_abs(md.phi() - phi), max_abs(md.theta() - theta)});

        if (s.xdim() > 0) {
            FrameChangeParams rot = random_change_params(s, FrameChange::Rotation, rng);
            MaurerCartanSlice mr = maurer_cartan_exp(frame_change(f, FrameChange::Rotation, rot), a, 0.0);
            out.rotation = std::max({out.rotation, max_abs(mr.phi() - m.phi()),
                                     max_abs(mr.theta() - m.theta() * rot.U.inverse())});
        }

        FrameChangeParams fin = random_change_params(s, FrameChange::Final, rng);
        MaurerCartanSlice mf = maurer_cartan_exp(frame_change(f, FrameChange::Final, fin), a, 0.0);
        out.final = std::max(out.final, max_abs(mf.phi() - m.phi()));
        if (s.xdim() > 0) out.final = std::max(out.final, max_abs(mf.theta() - (m.theta() - m.phi() * fin.B)));

        FrameChangeParams rv = random_change_params(s, FrameChange::RealVectors, rng);
        MaurerCartanSlice mv = maurer_cartan_exp(frame_change(f, FrameChange::RealVectors, rv), a, 0.0);
        out.real_vectors =
            std::max({out.real_vectors, max_abs(mv.phi() - m.phi()), max_abs(mv.theta() - m.theta())});
    }
    return out;
}

}  // namespace bsd
