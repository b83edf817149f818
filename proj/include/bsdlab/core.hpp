#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsd {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Rng = std::mt19937_64;

// single knob for rank and zero decisions
inline constexpr double tol = 1e-9;
// singular values this close to 1 count as unit (boundary detection)
inline constexpr double unit_band = 1e-6;

enum class ErrorKind {
    AmbiguousRank,
    DimensionMismatch,
    ShapeMismatch,
    SymmetryViolation,
    NotOnBoundary,
    NotAnIsometry,
    SingularDenominator,
    InvalidFlag,
    BadDimension,
    NotIsotropic,
    LevelOrderViolation,
    PointNotOnSigma,
    TangentNotTangent,
    Degenerate,
    FrameDriftTooLarge,
    InvalidParams,
    NotOnVMRT,
    SingularPoint,
    DimensionTooLarge,
    ZeroParameter,
    BadSeed,
    PointNotOnSlice,
    ChartFailure,
    DegenerateJet,
    MonotonicityViolation,
    InconsistentDependence,
    InsufficientSamples,
    RegimeViolation,
    OrthogonalityResidual,
    InputError,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& msg);
    ErrorKind kind() const { return kind_; }
    // the message without the kind prefix
    const std::string& message() const { return msg_; }

private:
    ErrorKind kind_;
    std::string msg_;
};

[[noreturn]] void fail(ErrorKind k, const std::string& msg);

// ---- random draws ----

Rng make_rng(std::uint64_t seed);
// deterministic child seed, used to give each sample its own stream
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

Mat gaussian(Rng& rng, int rows, int cols);
Vec gaussian_vec(Rng& rng, int n);
Mat random_unitary(Rng& rng, int n);
double uniform(Rng& rng, double lo, double hi);

// ---- dense helpers ----

// singular values in decreasing order
RVec singular_values(const Mat& a);
// threshold used for numerical rank of a given matrix
double rank_threshold(const RVec& sv, double t = tol);
int numeric_rank(const Mat& a, double t = tol);
// orthonormal basis of the kernel / column space
Mat null_space(const Mat& a, double t = tol);
Mat col_space(const Mat& a, double t = tol);
// real-linear kernel of a complex-valued real-linear map given as a real matrix
RMat real_null_space(const RMat& a, double t = tol);

Mat identity(int n);
Mat hconcat(const Mat& a, const Mat& b);
Mat vconcat(const Mat& a, const Mat& b);
double max_abs(const Mat& a);

// matrix exponential
Mat expm(const Mat& a);

// n choose k as 64-bit, saturating
std::uint64_t binomial(int n, int k);

}  // namespace bsd
