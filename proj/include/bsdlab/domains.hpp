#pragma once

#include "bsdlab/subspace.hpp"

#include <functional>
#include <string>

namespace bsd {

enum class DomainKind { I, II, III };

// D^I_{p,q} (Z is p x q, q <= p), D^II_n (Z skew n x n), D^III_n (Z symmetric n x n)
struct DomainSpec {
    DomainKind kind = DomainKind::I;
    int p = 0;
    int q = 0;
    int n = 0;

    static DomainSpec type1(int p, int q);
    static DomainSpec type2(int n);
    static DomainSpec type3(int n);

    int rank() const;
    int ambient() const;  // p+q or 2n
    int rows() const;     // Z shape
    int cols() const;
    // number of free complex coordinates of the chart
    int chart_dim() const;
    // E-dimension of points of the compact dual (q or n)
    int plane_dim() const { return cols(); }
    std::string name() const;
    bool operator==(const DomainSpec&) const = default;

    // forms of the compact dual
    Form hermitian() const;
    // S_n for type II, J_n for type III; undefined for type I
    Form bilinear() const;
    bool has_bilinear() const { return kind != DomainKind::I; }
};

DomainSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const DomainSpec& s);
// "I:3:2", "II:6", "III:3"
DomainSpec parse_spec(const std::string& s);

enum class Membership { Interior, Boundary, Outside };
const char* to_string(Membership m);

void check_point(const DomainSpec& spec, const Mat& z);
Membership contains(const DomainSpec& spec, const Mat& z);
int boundary_stratum(const DomainSpec& spec, const Mat& z);

// [I; Z] in the ambient space, positive block first
Subspace embed_point(const DomainSpec& spec, const Mat& z);
// inverse of embed_point on the big cell; ChartFailure off the cell
Mat chart_of(const DomainSpec& spec, const Subspace& e);

// g = [[A, B], [C, D]] acting on columns; Z' = (C + D Z)(A + B Z)^{-1}
Mat mobius(const DomainSpec& spec, const Mat& g, const Mat& z);
void check_group_element(const DomainSpec& spec, const Mat& g, double eps = 1e-8);

// random elements of the real form preserving the Hermitian form (and S or J)
Mat random_lie_algebra(const DomainSpec& spec, Rng& rng, double scale = 0.5);
Mat random_group_element(const DomainSpec& spec, Rng& rng, double scale = 0.5);
// complexified group (only the bilinear form is preserved)
Mat random_complex_group_element(const DomainSpec& spec, Rng& rng, double scale = 0.5);
// block-diagonal isotropy element diag(U, V) with the matching symmetry
Mat random_isotropy(const DomainSpec& spec, Rng& rng);

// random interior point with operator norm at most `radius`
Mat random_interior_point(const DomainSpec& spec, Rng& rng, double radius = 0.7);

// symmetrize according to the spec (no-op for type I)
Mat project_symmetry(const DomainSpec& spec, const Mat& z);

// Kobayashi distance on a type I ball
double kobayashi_distance(const Mat& z, const Mat& w);

}  // namespace bsd
