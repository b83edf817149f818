#pragma once

#include "bsdlab/domains.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bsd {

// sparse multivariate polynomial with complex coefficients
class Poly {
public:
    using Exponent = std::vector<int>;

    Poly() = default;
    explicit Poly(int nvars) : nvars_(nvars) {}
    static Poly constant(int nvars, cd c);
    static Poly variable(int nvars, int i);

    int nvars() const { return nvars_; }
    // -1 for the zero polynomial
    int degree() const;
    const std::map<Exponent, cd>& terms() const { return terms_; }
    cd coeff(const Exponent& e) const;
    void add_term(const Exponent& e, cd c);
    bool is_zero(double eps = 0.0) const;
    double max_coeff() const;

    cd eval(const Vec& x) const;
    Poly homogeneous_part(int d) const;
    Poly truncated(int max_degree) const;
    // substitute x_i -> vals[i]; terms above max_degree are dropped when max_degree >= 0
    Poly substitute(const std::vector<Poly>& vals, int max_degree = -1) const;
    Poly pow(int k, int max_degree = -1) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(cd s) const;
    Poly& operator+=(const Poly& o);

    Poly mul_truncated(const Poly& o, int max_degree) const;

private:
    int nvars_ = 0;
    std::map<Exponent, cd> terms_;
};

// matrix-valued polynomial map between domains; variables are the source matrix
// entries in row-major order (all rows*cols of them, also for II/III sources)
class PolyMatrixMap {
public:
    PolyMatrixMap() = default;
    PolyMatrixMap(const DomainSpec& source, const DomainSpec& target);

    const DomainSpec& source() const { return source_; }
    const DomainSpec& target() const { return target_; }
    int nvars() const { return source_.rows() * source_.cols(); }
    int out_rows() const { return rows_; }
    int out_cols() const { return cols_; }
    int var(int i, int j) const { return i * source_.cols() + j; }

    Poly& at(int i, int j) { return entries_[static_cast<std::size_t>(i * cols_ + j)]; }
    const Poly& at(int i, int j) const { return entries_[static_cast<std::size_t>(i * cols_ + j)]; }

    int degree() const;
    Mat eval(const Mat& z) const;

    bool claimed_proper = true;
    std::string name;

    // L f(Z) R; without a new target the result only carries its shape
    PolyMatrixMap transform_output(const Mat& l, const Mat& r,
                                   const std::optional<DomainSpec>& new_target = std::nullopt) const;
    bool has_target() const { return has_target_; }
    // Z -> f(L Z R) with L, R square of the source shape
    PolyMatrixMap precompose_linear(const Mat& l, const Mat& r) const;
    // f o g, g a polynomial map whose target equals our source
    PolyMatrixMap compose_after(const PolyMatrixMap& g) const;
    PolyMatrixMap homogeneous_part(int d) const;
    // rewrite in the independent chart coordinates of the source (z_ji = +-z_ij folded)
    std::vector<Poly> in_chart_coords() const;
    // output symmetry and shape checks; throws SymmetryViolation / ShapeMismatch
    void validate() const;

    static PolyMatrixMap identity(const DomainSpec& s);
    static PolyMatrixMap transpose(const DomainSpec& s);
    static PolyMatrixMap constant(const DomainSpec& source, const DomainSpec& target, const Mat& value);

private:
    DomainSpec source_, target_;
    int rows_ = 0, cols_ = 0;
    bool has_target_ = false;
    std::vector<Poly> entries_;
};

nlohmann::json to_json(const PolyMatrixMap& f);
PolyMatrixMap poly_map_from_json(const nlohmann::json& j);

// f(base + sum t_i dirs_i) as polynomials in t, one per output entry (row-major)
std::vector<Poly> compose_affine(const PolyMatrixMap& f, const Mat& base, const std::vector<Mat>& dirs);

// partial derivative d^alpha at t = 0 of an output-entry polynomial list
struct Jet {
    Poly::Exponent alpha;
    int order = 0;
    Mat value;
};
// every jet of order 1..max_order of f along the slice
std::vector<Jet> slice_jets(const PolyMatrixMap& f, const Mat& base, const std::vector<Mat>& dirs, int max_order);

}  // namespace bsd
