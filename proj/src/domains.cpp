#include "bsdlab/domains.hpp"

#include <cmath>
#include <sstream>

namespace bsd {

DomainSpec DomainSpec::type1(int p, int q) {
    if (q < 1 || q > p) fail(ErrorKind::InputError, "type I needs 1 <= q <= p");
    DomainSpec s;
    s.kind = DomainKind::I;
    s.p = p;
    s.q = q;
    return s;
}

DomainSpec DomainSpec::type2(int n) {
    if (n < 2) fail(ErrorKind::InputError, "type II needs n >= 2");
    DomainSpec s;
    s.kind = DomainKind::II;
    s.n = n;
    return s;
}

DomainSpec DomainSpec::type3(int n) {
    if (n < 1) fail(ErrorKind::InputError, "type III needs n >= 1");
    DomainSpec s;
    s.kind = DomainKind::III;
    s.n = n;
    return s;
}

int DomainSpec::rank() const {
    switch (kind) {
        case DomainKind::I: return q;
        case DomainKind::II: return n / 2;
        case DomainKind::III: return n;
    }
    return 0;
}

int DomainSpec::ambient() const { return kind == DomainKind::I ? p + q : 2 * n; }
int DomainSpec::rows() const { return kind == DomainKind::I ? p : n; }
int DomainSpec::cols() const { return kind == DomainKind::I ? q : n; }

int DomainSpec::chart_dim() const {
    switch (kind) {
        case DomainKind::I: return p * q;
        case DomainKind::II: return n * (n - 1) / 2;
        case DomainKind::III: return n * (n + 1) / 2;
    }
    return 0;
}

std::string DomainSpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case DomainKind::I: os << "I(" << p << "," << q << ")"; break;
        case DomainKind::II: os << "II(" << n << ")"; break;
        case DomainKind::III: os << "III(" << n << ")"; break;
    }
    return os.str();
}

Form DomainSpec::hermitian() const {
    if (kind == DomainKind::I) return hermitian_form(p, q);
    return hermitian_form(n, n);
}

Form DomainSpec::bilinear() const {
    if (kind == DomainKind::II) return symmetric_form(n);
    if (kind == DomainKind::III) return antisymmetric_form(n);
    fail(ErrorKind::InputError, "type I has no bilinear form");
}

DomainSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type")) fail(ErrorKind::InputError, "domain spec needs a type");
    const auto t = j.at("type").get<std::string>();
    if (t == "I") return DomainSpec::type1(j.at("p").get<int>(), j.at("q").get<int>());
    if (t == "II") return DomainSpec::type2(j.at("n").get<int>());
    if (t == "III") return DomainSpec::type3(j.at("n").get<int>());
    fail(ErrorKind::InputError, "unknown domain type " + t);
}

nlohmann::json spec_to_json(const DomainSpec& s) {
    switch (s.kind) {
        case DomainKind::I: return {{"type", "I"}, {"p", s.p}, {"q", s.q}};
        case DomainKind::II: return {{"type", "II"}, {"n", s.n}};
        case DomainKind::III: return {{"type", "III"}, {"n", s.n}};
    }
    return {};
}

DomainSpec parse_spec(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    try {
        if (parts.size() == 3 && parts[0] == "I")
            return DomainSpec::type1(std::stoi(parts[1]), std::stoi(parts[2]));
        if (parts.size() == 2 && parts[0] == "II") return DomainSpec::type2(std::stoi(parts[1]));
        if (parts.size() == 2 && parts[0] == "III") return DomainSpec::type3(std::stoi(parts[1]));
    } catch (const std::logic_error&) {
    }
    fail(ErrorKind::InputError, "cannot parse domain '" + s + "'");
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::Interior: return "Interior";
        case Membership::Boundary: return "Boundary";
        case Membership::Outside: return "Outside";
    }
    return "?";
}

void check_point(const DomainSpec& spec, const Mat& z) {
    if (z.rows() != spec.rows() || z.cols() != spec.cols())
        fail(ErrorKind::ShapeMismatch, "point shape does not match " + spec.name());
    const double scale = std::max(1.0, max_abs(z));
    if (spec.kind == DomainKind::II && max_abs(z + z.transpose()) > 1e-8 * scale)
        fail(ErrorKind::SymmetryViolation, "type II point must be skew");
    if (spec.kind == DomainKind::III && max_abs(z - z.transpose()) > 1e-8 * scale)
        fail(ErrorKind::SymmetryViolation, "type III point must be symmetric");
}

Membership contains(const DomainSpec& spec, const Mat& z) {
    check_point(spec, z);
    RVec sv = singular_values(z);
    double top = sv.size() ? sv(0) : 0.0;
    if (top < 1.0 - unit_band) return Membership::Interior;
    if (top <= 1.0 + unit_band) return Membership::Boundary;
    return Membership::Outside;
}

int boundary_stratum(const DomainSpec& spec, const Mat& z) {
    if (contains(spec, z) != Membership::Boundary)
        fail(ErrorKind::NotOnBoundary, "point is not on the boundary of " + spec.name());
    RVec sv = singular_values(z);
    int units = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (std::abs(sv(i) - 1.0) <= unit_band) ++units;
    if (spec.kind == DomainKind::II) {
        if (units % 2 != 0)
            fail(ErrorKind::SymmetryViolation, "odd count of unit singular values on a type II point");
        return spec.rank() - units / 2;
    }
    return spec.rank() - units;
}

Subspace embed_point(const DomainSpec& spec, const Mat& z) {
    check_point(spec, z);
    return canonicalize(vconcat(identity(spec.cols()), z));
}

Mat chart_of(const DomainSpec& spec, const Subspace& e) {
    const int k = spec.cols();
    if (e.ambient() != spec.ambient() || e.dim() != k)
        fail(ErrorKind::ShapeMismatch, "subspace is not a point of the compact dual");
    Mat b = e.orth();
    Mat top = b.topRows(k);
    RVec sv = singular_values(top);
    if (sv(k - 1) < 1e-8 * std::max(1.0, sv(0)))
        fail(ErrorKind::ChartFailure, "point is off the big Schubert cell");
    Mat z = b.bottomRows(spec.rows()) * top.inverse();
    return z;
}

void check_group_element(const DomainSpec& spec, const Mat& g, double eps) {
    const int n = spec.ambient();
    if (g.rows() != n || g.cols() != n) fail(ErrorKind::ShapeMismatch, "group element shape");
    Form h = spec.hermitian();
    double scale = std::max(1.0, g.norm() * g.norm());
    if (max_abs(g.adjoint() * h.matrix * g - h.matrix) > eps * scale)
        fail(ErrorKind::NotAnIsometry, "g does not preserve the Hermitian form");
    if (spec.has_bilinear()) {
        Form b = spec.bilinear();
        if (max_abs(g.transpose() * b.matrix * g - b.matrix) > eps * scale)
            fail(ErrorKind::NotAnIsometry, "g does not preserve the bilinear form");
    }
}

Mat project_symmetry(const DomainSpec& spec, const Mat& z) {
    if (spec.kind == DomainKind::II) return 0.5 * (z - z.transpose());
    if (spec.kind == DomainKind::III) return 0.5 * (z + z.transpose());
    return z;
}

Mat mobius(const DomainSpec& spec, const Mat& g, const Mat& z) {
    check_point(spec, z);
    check_group_element(spec, g);
    const int k = spec.cols();
    const int m = spec.rows();
    Mat a = g.topLeftCorner(k, k);
    Mat b = g.topRightCorner(k, m);
    Mat c = g.bottomLeftCorner(m, k);
    Mat d = g.bottomRightCorner(m, m);
    Mat den = a + b * z;
    RVec sv = singular_values(den);
    if (sv(k - 1) < 1e-10 * std::max(1.0, sv(0)))
        fail(ErrorKind::SingularDenominator, "A + B Z is singular");
    Mat zp = (c + d * z) * den.inverse();
    return project_symmetry(spec, zp);
}

namespace {

// X -> -B^{-1} X^T B fixes the Lie algebra of the bilinear form B
Mat bilinear_reflect(const Mat& x, const Mat& b) { return -b.inverse() * x.transpose() * b; }
// X -> -H X^H H fixes the Lie algebra of the Hermitian form H (H^2 = 1)
Mat hermitian_reflect(const Mat& x, const Mat& h) { return -h * x.adjoint() * h; }

}  // namespace

Mat random_lie_algebra(const DomainSpec& spec, Rng& rng, double scale) {
    const int n = spec.ambient();
    Mat h = spec.hermitian().matrix;
    Mat x = gaussian(rng, n, n);
    // the two reflections commute, so one averaging round each lands in the intersection
    x = 0.5 * (x + hermitian_reflect(x, h));
    if (spec.has_bilinear()) {
        Mat b = spec.bilinear().matrix;
        x = 0.5 * (x + bilinear_reflect(x, b));
    }
    double nrm = x.norm();
    if (nrm > 0) x *= scale * std::sqrt(static_cast<double>(n)) / nrm;
    return x;
}

Mat random_group_element(const DomainSpec& spec, Rng& rng, double scale) {
    return expm(random_lie_algebra(spec, rng, scale));
}

Mat random_complex_group_element(const DomainSpec& spec, Rng& rng, double scale) {
    const int n = spec.ambient();
    Mat x = gaussian(rng, n, n);
    if (spec.has_bilinear()) x = 0.5 * (x + bilinear_reflect(x, spec.bilinear().matrix));
    double nrm = x.norm();
    if (nrm > 0) x *= scale * std::sqrt(static_cast<double>(n)) / nrm;
    return expm(x);
}

Mat random_isotropy(const DomainSpec& spec, Rng& rng) {
    const int k = spec.cols();
    const int m = spec.rows();
    Mat g = Mat::Zero(k + m, k + m);
    Mat u = random_unitary(rng, k);
    g.topLeftCorner(k, k) = u;
    if (spec.kind == DomainKind::I)
        g.bottomRightCorner(m, m) = random_unitary(rng, m);
    else
        g.bottomRightCorner(m, m) = u.conjugate();
    return g;
}

Mat random_interior_point(const DomainSpec& spec, Rng& rng, double radius) {
    Mat z = project_symmetry(spec, gaussian(rng, spec.rows(), spec.cols()));
    RVec sv = singular_values(z);
    if (sv.size() == 0 || sv(0) == 0.0) return z;
    double target = radius * uniform(rng, 0.2, 1.0);
    return z * (target / sv(0));
}

namespace {

Mat herm_pow(const Mat& a, double e) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
    RVec ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev(i) = std::pow(std::max(ev(i), 0.0), e);
    return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double kobayashi_distance(const Mat& z, const Mat& w) {
    if (z.rows() != w.rows() || z.cols() != w.cols())
        fail(ErrorKind::ShapeMismatch, "points of different shape");
    const int p = static_cast<int>(z.rows());
    const int q = static_cast<int>(z.cols());
    Mat a = herm_pow(identity(p) - w * w.adjoint(), -0.5);
    Mat b = (identity(q) - w.adjoint() * z).inverse();
    Mat c = herm_pow(identity(q) - w.adjoint() * w, 0.5);
    Mat phi = a * (z - w) * b * c;
    RVec sv = singular_values(phi);
    double s = sv.size() ? sv(0) : 0.0;
    return std::atanh(std::min(s, 1.0 - 1e-16));
}

}  // namespace bsd
