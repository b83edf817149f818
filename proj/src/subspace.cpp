#include "bsdlab/subspace.hpp"

#include <cmath>

namespace bsd {

namespace {

constexpr double pivot_residual = 1e-6;

void check_same_ambient(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient())
        fail(ErrorKind::DimensionMismatch,
             "ambient " + std::to_string(a.ambient()) + " vs " + std::to_string(b.ambient()));
}

}  // namespace

Subspace Subspace::zero(int ambient) { return canonicalize(Mat(ambient, 0)); }

Subspace Subspace::full(int ambient) { return canonicalize(identity(ambient)); }

Subspace Subspace::coords(int ambient, const std::vector<int>& idx) {
    Mat b = Mat::Zero(ambient, static_cast<int>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) b(idx[j], static_cast<int>(j)) = 1.0;
    return canonicalize(b);
}

Subspace canonicalize(const Mat& basis, double t) {
    Subspace s;
    const int n = static_cast<int>(basis.rows());
    s.ambient_ = n;
    if (basis.cols() == 0 || n == 0) {
        s.canon_ = Mat(n, 0);
        s.orth_ = Mat(n, 0);
        return s;
    }
    Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeThinU);
    RVec sv = svd.singularValues();
    const double scale = std::max(1.0, sv(0));
    const double thr = t * scale;
    int k = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++k;
    // gap between the last kept and first dropped value must be clear
    const double next = k < sv.size() ? sv(k) : 0.0;
    if (k > 0 && sv(k - 1) - next <= 10.0 * t * scale)
        fail(ErrorKind::AmbiguousRank, "singular value gap below threshold");
    Mat q = svd.matrixU().leftCols(k);

    // greedy top-down pivot rows; row residuals are invariant under q -> q U
    std::vector<int> piv;
    Mat rows(0, k);
    for (int i = 0; i < n && static_cast<int>(piv.size()) < k; ++i) {
        Eigen::RowVectorXcd r = q.row(i);
        if (rows.rows() > 0) {
            // orthogonal projection of r onto the span of previously chosen rows
            Mat ro = col_space(rows.transpose(), 1e-12);
            Eigen::RowVectorXcd proj = (ro * (ro.adjoint() * r.transpose())).transpose();
            r -= proj;
        }
        if (r.norm() > pivot_residual) {
            piv.push_back(i);
            Mat nr(rows.rows() + 1, k);
            if (rows.rows() > 0) nr.topRows(rows.rows()) = rows;
            nr.row(rows.rows()) = q.row(i);
            rows = nr;
        }
    }
    if (static_cast<int>(piv.size()) != k) fail(ErrorKind::AmbiguousRank, "pivot selection failed");
    Mat c = q * rows.inverse();
    for (int j = 0; j < k; ++j) {
        for (int jj = 0; jj < k; ++jj) c(piv[j], jj) = (j == jj) ? cd(1.0) : cd(0.0);
    }
    s.canon_ = c;
    s.orth_ = q;
    s.pivots_ = piv;
    return s;
}

Subspace intersect(const Subspace& a, const Subspace& b, double t) {
    check_same_ambient(a, b);
    const int n = a.ambient();
    if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(n);
    Mat m = hconcat(a.orth(), -b.orth());
    Mat ns = null_space(m, t);
    if (ns.cols() == 0) return Subspace::zero(n);
    Mat v = a.orth() * ns.topRows(a.dim());
    return canonicalize(col_space(v, 1e-6));
}

Subspace sum(const Subspace& a, const Subspace& b, double t) {
    check_same_ambient(a, b);
    return canonicalize(hconcat(a.orth(), b.orth()), t);
}

bool equals(const Subspace& a, const Subspace& b, double eps) {
    if (a.ambient() != b.ambient() || a.dim() != b.dim()) return false;
    if (a.pivots() != b.pivots()) return distance(a, b) < eps;
    return max_abs(a.basis() - b.basis()) < eps;
}

double distance(const Subspace& a, const Subspace& b) {
    check_same_ambient(a, b);
    if (a.dim() != b.dim()) return 1.0;
    Mat d = a.projector() - b.projector();
    if (d.size() == 0) return 0.0;
    RVec sv = singular_values(d);
    return sv.size() ? sv(0) : 0.0;
}

bool contained_in(const Subspace& a, const Subspace& b, double eps) {
    check_same_ambient(a, b);
    if (a.dim() == 0) return true;
    if (a.dim() > b.dim()) return false;
    Mat r = a.orth() - b.orth() * (b.orth().adjoint() * a.orth());
    return max_abs(r) < eps;
}

// ---- forms ----

cd Form::eval(const Vec& u, const Vec& v) const {
    if (kind == FormKind::Hermitian) return (v.adjoint() * matrix * u)(0, 0);
    return (u.transpose() * matrix * v)(0, 0);
}

Mat Form::gram(const Mat& a) const { return gram(a, a); }

Mat Form::gram(const Mat& a, const Mat& b) const {
    if (kind == FormKind::Hermitian) return b.adjoint() * matrix * a;
    return a.transpose() * matrix * b;
}

Form hermitian_form(int p, int q) {
    Form f;
    f.kind = FormKind::Hermitian;
    f.p = p;
    f.q = q;
    f.matrix = Mat::Zero(p + q, p + q);
    for (int i = 0; i < q; ++i) f.matrix(i, i) = 1.0;
    for (int i = 0; i < p; ++i) f.matrix(q + i, q + i) = -1.0;
    return f;
}

Form symmetric_form(int n) {
    Form f;
    f.kind = FormKind::Symmetric;
    f.n = n;
    f.matrix = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        f.matrix(i, n + i) = 1.0;
        f.matrix(n + i, i) = 1.0;
    }
    return f;
}

Form antisymmetric_form(int n) {
    Form f;
    f.kind = FormKind::Antisymmetric;
    f.n = n;
    f.matrix = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        f.matrix(i, n + i) = 1.0;
        f.matrix(n + i, i) = -1.0;
    }
    return f;
}

Subspace perp(const Subspace& a, const Form& f) {
    if (f.ambient() != a.ambient())
        fail(ErrorKind::DimensionMismatch, "form and subspace ambient differ");
    const int n = a.ambient();
    if (a.dim() == 0) return Subspace::full(n);
    Mat rows = f.bilinear() ? Mat(a.orth().transpose() * f.matrix)
                            : Mat(a.orth().adjoint() * f.matrix);
    return canonicalize(null_space(rows, 1e-9));
}

bool is_isotropic(const Subspace& a, const Form& f, double eps) {
    if (f.ambient() != a.ambient())
        fail(ErrorKind::DimensionMismatch, "form and subspace ambient differ");
    if (a.dim() == 0) return true;
    return max_abs(f.gram(a.orth())) < eps;
}

Signature restrict_signature(const Subspace& a, const Form& f, double t) {
    if (f.ambient() != a.ambient())
        fail(ErrorKind::DimensionMismatch, "form and subspace ambient differ");
    if (f.kind != FormKind::Hermitian)
        fail(ErrorKind::ShapeMismatch, "signature needs a Hermitian form");
    Signature s;
    if (a.dim() == 0) return s;
    Mat g = a.orth().adjoint() * f.matrix * a.orth();
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double e = es.eigenvalues()(i);
        if (e > t)
            ++s.plus;
        else if (e < -t)
            ++s.minus;
        else
            ++s.zero;
    }
    return s;
}

// ---- JSON ----

nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

Mat matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) fail(ErrorKind::InputError, "matrix must be an array of rows");
    const int r = static_cast<int>(j.size());
    const int c = r ? static_cast<int>(j[0].size()) : 0;
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(j[i].size()) != c) fail(ErrorKind::InputError, "ragged matrix");
        for (int k = 0; k < c; ++k) {
            const auto& e = j[i][k];
            if (e.is_number())
                m(i, k) = e.get<double>();
            else
                m(i, k) = cd(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

nlohmann::json to_json(const Subspace& s) {
    nlohmann::json basis = nlohmann::json::array();
    for (int j = 0; j < s.dim(); ++j)
        for (int i = 0; i < s.ambient(); ++i)
            basis.push_back({s.basis()(i, j).real(), s.basis()(i, j).imag()});
    return {{"ambient", s.ambient()}, {"dim", s.dim()}, {"basis", basis}};
}

Subspace subspace_from_json(const nlohmann::json& j) {
    const int n = j.at("ambient").get<int>();
    const auto& b = j.at("basis");
    if (n <= 0 || b.size() % static_cast<std::size_t>(n) != 0)
        fail(ErrorKind::InputError, "basis length is not a multiple of ambient");
    const int k = static_cast<int>(b.size()) / n;
    Mat m(n, k);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < n; ++i) {
            const auto& e = b[static_cast<std::size_t>(c * n + i)];
            m(i, c) = cd(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return canonicalize(m);
}

nlohmann::json form_to_json(const Form& f) {
    switch (f.kind) {
        case FormKind::Hermitian: return {{"kind", "hermitian"}, {"p", f.p}, {"q", f.q}};
        case FormKind::Symmetric: return {{"kind", "symmetric"}, {"n", f.n}};
        case FormKind::Antisymmetric: return {{"kind", "antisymmetric"}, {"n", f.n}};
    }
    return {};
}

Form form_from_json(const nlohmann::json& j) {
    const auto k = j.at("kind").get<std::string>();
    if (k == "hermitian") return hermitian_form(j.at("p").get<int>(), j.at("q").get<int>());
    if (k == "symmetric") return symmetric_form(j.at("n").get<int>());
    if (k == "antisymmetric") return antisymmetric_form(j.at("n").get<int>());
    fail(ErrorKind::InputError, "unknown form kind " + k);
}

}  // namespace bsd
