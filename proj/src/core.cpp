#include "bsdlab/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsd {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::AmbiguousRank: return "AmbiguousRank";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::SymmetryViolation: return "SymmetryViolation";
        case ErrorKind::NotOnBoundary: return "NotOnBoundary";
        case ErrorKind::NotAnIsometry: return "NotAnIsometry";
        case ErrorKind::SingularDenominator: return "SingularDenominator";
        case ErrorKind::InvalidFlag: return "InvalidFlag";
        case ErrorKind::BadDimension: return "BadDimension";
        case ErrorKind::NotIsotropic: return "NotIsotropic";
        case ErrorKind::LevelOrderViolation: return "LevelOrderViolation";
        case ErrorKind::PointNotOnSigma: return "PointNotOnSigma";
        case ErrorKind::TangentNotTangent: return "TangentNotTangent";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::FrameDriftTooLarge: return "FrameDriftTooLarge";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::NotOnVMRT: return "NotOnVMRT";
        case ErrorKind::SingularPoint: return "SingularPoint";
        case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorKind::ZeroParameter: return "ZeroParameter";
        case ErrorKind::BadSeed: return "BadSeed";
        case ErrorKind::PointNotOnSlice: return "PointNotOnSlice";
        case ErrorKind::ChartFailure: return "ChartFailure";
        case ErrorKind::DegenerateJet: return "DegenerateJet";
        case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
        case ErrorKind::InconsistentDependence: return "InconsistentDependence";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::RegimeViolation: return "RegimeViolation";
        case ErrorKind::OrthogonalityResidual: return "OrthogonalityResidual";
        case ErrorKind::InputError: return "InputError";
    }
    return "Unknown";
}

Error::Error(ErrorKind k, const std::string& msg)
    : std::runtime_error(std::string(to_string(k)) + ": " + msg), kind_(k), msg_(msg) {}

void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    // splitmix64 step on the pair
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Mat gaussian(Rng& rng, int rows, int cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            double re = nd(rng);
            double im = nd(rng);
            m(i, j) = cd(re, im) / std::sqrt(2.0);
        }
    return m;
}

Vec gaussian_vec(Rng& rng, int n) { return gaussian(rng, n, 1).col(0); }

Mat random_unitary(Rng& rng, int n) {
    Mat g = gaussian(rng, n, n);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        cd d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> ud(lo, hi);
    return ud(rng);
}

RVec singular_values(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return RVec(0);
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues();
}

double rank_threshold(const RVec& sv, double t) {
    double top = sv.size() ? sv(0) : 0.0;
    return t * std::max(1.0, top);
}

int numeric_rank(const Mat& a, double t) {
    RVec sv = singular_values(a);
    double thr = rank_threshold(sv, t);
    int k = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++k;
    return k;
}

Mat null_space(const Mat& a, double t) {
    const int n = static_cast<int>(a.cols());
    if (a.rows() == 0) return identity(n);
    if (n == 0) return Mat(0, 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    RVec sv = svd.singularValues();
    double thr = rank_threshold(sv, t);
    int k = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++k;
    return svd.matrixV().rightCols(n - k);
}

Mat col_space(const Mat& a, double t) {
    const int m = static_cast<int>(a.rows());
    if (a.cols() == 0 || m == 0) return Mat(m, 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    RVec sv = svd.singularValues();
    double thr = rank_threshold(sv, t);
    int k = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++k;
    return svd.matrixU().leftCols(k);
}

RMat real_null_space(const RMat& a, double t) {
    const int n = static_cast<int>(a.cols());
    if (a.rows() == 0) return RMat::Identity(n, n);
    Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeFullV);
    RVec sv = svd.singularValues();
    double thr = rank_threshold(sv, t);
    int k = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++k;
    return svd.matrixV().rightCols(n - k);
}

Mat identity(int n) { return Mat::Identity(n, n); }

Mat hconcat(const Mat& a, const Mat& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    Mat m(a.rows(), a.cols() + b.cols());
    m << a, b;
    return m;
}

Mat vconcat(const Mat& a, const Mat& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    Mat m(a.rows() + b.rows(), a.cols());
    m << a, b;
    return m;
}

double max_abs(const Mat& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

Mat expm(const Mat& a) { return a.exp(); }

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n - k + i))
            return std::numeric_limits<std::uint64_t>::max();
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

}  // namespace bsd
