#pragma once

#include "bsdlab/domains.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace bsd {

// integer level r, or r + 1/2 (type II only)
struct Level {
    int r = 0;
    bool half = false;
    double value() const { return r + (half ? 0.5 : 0.0); }
    std::string str() const;
    bool operator==(const Level&) const = default;
};

// dim V1 of a flag at the given level (the D_r dimension)
int level_dim(const DomainSpec& spec, Level lv);
// all valid levels of the compact dual, increasing
std::vector<Level> levels(const DomainSpec& spec);
// levels whose characteristic subspaces have positive dimension (r >= 1)
std::vector<Level> proper_levels(const DomainSpec& spec);
// rank of the characteristic subspace cut out by a flag at this level
int level_rank(const DomainSpec& spec, Level lv);

// Flag (V1, V2) for one of Gr / OGr / LGr. V2 is stored for type I only
// and recomputed as the bilinear annihilator for II/III.
class FlagPair {
public:
    FlagPair() = default;
    const DomainSpec& spec() const { return spec_; }
    Level level() const { return level_; }
    const Subspace& V1() const { return v1_; }
    Subspace V2() const;

    friend FlagPair make_flag(const DomainSpec&, Level, const Subspace&, const std::optional<Subspace>&);

private:
    DomainSpec spec_;
    Level level_;
    Subspace v1_;
    std::optional<Subspace> v2_;
};

FlagPair make_flag(const DomainSpec& spec, Level lv, const Subspace& v1,
                   const std::optional<Subspace>& v2 = std::nullopt);
// Sigma point: V2 is the Hermitian annihilator (type I) or the bilinear one
FlagPair sigma_point(const DomainSpec& spec, Level lv, const Subspace& v1);
Subspace pr_project(const FlagPair& f);
bool flag_equals(const FlagPair& a, const FlagPair& b, double eps = 1e-8);
double flag_distance(const FlagPair& a, const FlagPair& b);
// {dual, level, V1, V2}
nlohmann::json to_json(const FlagPair& f);

bool z_tau_contains(const FlagPair& tau, Level r, const Subspace& w);
bool q_mu_contains(const FlagPair& mu, Level r, const Subspace& w);
bool sigma_contains(const DomainSpec& spec, Level r, const Subspace& w);

// {Z : V1 in [I;Z] in V2} inside the domain
std::function<bool(const Mat&)> characteristic_slice(const DomainSpec& spec, const FlagPair& sigma);

// affine parametrization Z(t) = base + sum t_i dirs[i] of the chart slice of a flag
struct AffineSlice {
    Mat base;
    std::vector<Mat> dirs;
    int dim() const { return static_cast<int>(dirs.size()); }
    Mat at(const Vec& t) const;
};
AffineSlice slice_chart(const FlagPair& sigma);
// free coordinates of the chart in a fixed order (row-major, upper triangle for II/III)
Vec chart_coords(const DomainSpec& spec, const Mat& z);
Mat chart_from_coords(const DomainSpec& spec, const Vec& c);

// ---- samplers ----

// V1 isotropic for the Hermitian form (and the bilinear form for II/III)
Subspace random_sigma_v1(const DomainSpec& spec, Level lv, Rng& rng);
// V1 isotropic for the bilinear form only (II/III) or arbitrary (I)
Subspace random_dual_v1(const DomainSpec& spec, Level lv, Rng& rng);
FlagPair random_flag(const DomainSpec& spec, Level lv, Rng& rng);
FlagPair random_sigma_flag(const DomainSpec& spec, Level lv, Rng& rng);
// standard flag whose slice passes through Z = 0; level must be an integer for I/III
FlagPair standard_flag(const DomainSpec& spec, Level lv);
// g . flag
FlagPair transform_flag(const FlagPair& f, const Mat& g);
// flag of a characteristic subspace meeting the domain, with an interior slice point
struct InteriorSample {
    FlagPair flag;
    Mat point;
};
InteriorSample random_interior_flag(const DomainSpec& spec, Level lv, Rng& rng);

// ---- chains ----

enum class ChainMode { Z, Q };
std::vector<FlagPair> chain_connect(const DomainSpec& spec, Level r, const Subspace& a,
                                    const Subspace& b, ChainMode mode, Rng& rng);

// ---- dimension bookkeeping ----

int z_tau_dim_closed(const DomainSpec& spec, Level s, Level r);
int q_mu_dim_closed(const DomainSpec& spec, Level s, Level r);
// dimension of the tangent space of the predicate set at a sample point
int z_tau_dim_numeric(const FlagPair& tau, Level r, const Subspace& w);
int q_mu_dim_numeric(const FlagPair& mu, Level r, const Subspace& w);

// ---- LGr chart [I_{n-r}; x; y; z] and contact forms ----

struct LgrChartPoint {
    int n = 0;
    int r = 0;
    Mat x;  // r x (n-r)
    Mat y;  // (n-r) x (n-r)
    Mat z;  // r x (n-r)
    Mat basis() const;
    static LgrChartPoint reference(int n, int r);
    static LgrChartPoint from_subspace(int n, int r, const Subspace& v);
};

struct ChartTangent {
    Mat dx;
    Mat dy;
    Mat dz;
};

Mat lgr_bilinear_residual(const LgrChartPoint& p);
Mat lgr_hermitian_residual(const LgrChartPoint& p);
Mat lgr_tangent_residual(const LgrChartPoint& p, const ChartTangent& t);
// theta(v) + theta(v)^* for a real tangent v
Mat lgr_sigma_tangent_residual(const LgrChartPoint& p, const ChartTangent& t);

// basis of T^{1,0} D_r at p (complex kernel of the linearized bilinear equation)
std::vector<ChartTangent> lgr_holomorphic_tangents(const LgrChartPoint& p);
// real basis of T_p Sigma_r
std::vector<ChartTangent> lgr_sigma_tangents(const LgrChartPoint& p);

struct LeviValue {
    Mat theta_dtheta;  // (theta ^ dtheta)(v, w1, conj w2)
    Mat tilde;         // (theta~ ^ dtheta~)(v, w1, w2)
    cd scalar;         // largest-modulus entry of theta_dtheta
};

LeviValue levi_bracket_check(int n, int r, const LgrChartPoint& p, const ChartTangent& v,
                             const ChartTangent& w1, const ChartTangent& w2);

}  // namespace bsd
