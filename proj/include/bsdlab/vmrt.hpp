#pragma once

#include "bsdlab/moduli.hpp"

#include <optional>
#include <vector>

namespace bsd {

// Tangent space of a compact dual at the reference point, Hom(E, V/E) as a rows x cols matrix.
// Gr: any matrix; LGr: symmetric; OGr: skew.
bool is_rank_one_tangent(const DomainSpec& dual, const Mat& hom);

// SGr(q, C^{2n}) = J-isotropic q-planes, basis order (e_1..e_n, f_1..f_n), J(e_i, f_j) = delta.
// Chart at E = span(e_1..e_q): columns of [I_q; a; s; b], a, b of size (n-q) x q, s of size q x q.
// A tangent splits as g1 = [a; b] in Hom(U, Q) and g2 = s, symmetric.
struct SgrTangent {
    int n = 0, q = 0;
    Mat g1;  // 2(n-q) x q
    Mat g2;  // q x q
    Mat hom() const;  // full (2n-q) x q matrix [a; s; b]
    static SgrTangent from_hom(int n, int q, const Mat& hom);
};

Mat sgr_chart(int n, int q, const Subspace& v);
Subspace sgr_from_chart(int n, int q, const Mat& hom);
Subspace sgr_reference(int n, int q);

enum class VmrtClass { SpecialLocus, OpenOrbit, NotInVMRT };
const char* to_string(VmrtClass c);

// closed-form membership: SpecialLocus = (lambda x mu, 0), OpenOrbit = (lambda x mu, c lambda.lambda), c != 0
VmrtClass sgr_vmrt_member(const SgrTangent& t);

// factors of a VMRT point: g1 = mu lambda, g2 = c lambda^t lambda
struct VmrtFactors {
    Vec lambda;
    Vec mu;
    cd c;
};
VmrtFactors vmrt_factors(const SgrTangent& t);

// second fundamental form of the cone over the VMRT at t: does it reach the whole normal space
bool second_fundamental_surjective(const SgrTangent& t);

struct ConditionTReport {
    bool holds = false;
    int lhs_dim = 0;  // tangent of the SGr cone
    int rhs_dim = 0;  // tangent of the Gr cone intersected with T(SGr)
};
ConditionTReport condition_T(const SgrTangent& alpha);

// A subset V subset B, dim A = q - 1, dim B = q + 1
struct MinimalCurveSeed {
    Subspace A, V, B;
};

class MinimalCurve {
public:
    MinimalCurve(int n, const MinimalCurveSeed& seed, Vec v0, Vec w, bool special);
    const MinimalCurveSeed& seed() const { return seed_; }
    bool special() const { return special_; }
    // the q-plane A + span(v0 + t w)
    Subspace at(cd t) const;
    // tangent at t = 0 in the SGr chart at V (requires V = the reference point)
    SgrTangent tangent() const;

private:
    int n_;
    MinimalCurveSeed seed_;
    Vec v0_, w_;
    bool special_;
};

// a line of isotropic q-planes; special iff B is isotropic
MinimalCurve minimal_curve(int n, const MinimalCurveSeed& seed);
MinimalCurveSeed random_curve_seed(int n, int q, bool special, Rng& rng);

// oracle: rebuild the minimal curve with the given tangent and check it directly
VmrtClass curve_oracle_classify(const SgrTangent& t);

// random tangent of the requested class (NotInVMRT cycles through several failure patterns)
SgrTangent random_sgr_tangent(int n, int q, VmrtClass kind, Rng& rng);

// contraction Lambda^q -> Lambda^{q-2} with J on the first two slots, on Pluecker coordinates
class PlueckerContraction {
public:
    PlueckerContraction(int n, int q);
    int n() const { return n_; }
    int q() const { return q_; }
    std::size_t source_dim() const { return src_.size(); }
    std::size_t target_dim() const { return tgt_.size(); }
    Vec pluecker(const Mat& basis) const;
    Vec apply(const Vec& pl) const;
    Vec eval(const Subspace& v) const { return apply(pluecker(v.basis())); }

private:
    int n_, q_;
    std::vector<std::vector<int>> src_, tgt_;
};

PlueckerContraction linear_section_witness(int n, int q, long long cap = 20000);

// (x; y; z) -> (s x; s^2 (y - I) + I; s z)
LgrChartPoint dilation_psi(const LgrChartPoint& p, cd s);

struct VmrtSampleRow {
    int id = 0;
    VmrtClass expected = VmrtClass::NotInVMRT;
    VmrtClass classified = VmrtClass::NotInVMRT;
    VmrtClass oracle = VmrtClass::NotInVMRT;
    std::optional<bool> zeta_surjective;
};
std::vector<VmrtSampleRow> vmrt_classify_samples(int n, int q, int samples, std::uint64_t seed);

}  // namespace bsd
