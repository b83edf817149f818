#pragma once

#include "bsdlab/moduli.hpp"
#include "bsdlab/poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bsd {

// a point of the target partial flag manifold; f# need not land on a balanced level
struct TargetFlag {
    Subspace V1, V2;
};
double target_flag_distance(const TargetFlag& a, const TargetFlag& b);
bool target_flag_equals(const TargetFlag& a, const TargetFlag& b, double eps = 1e-8);
nlohmann::json to_json(const TargetFlag& f);

// N^k: span of the slice jets of order <= k at P, inside Hom(E', V'/E') = rows' x cols' matrices
struct JetSpan {
    FlagPair sigma;
    Mat point;
    int k = 0;
    std::vector<int> dims;  // dims[j] = dim N^{j+1}, j < k
    int k0 = 0;             // first order at which the span stops growing
    Subspace span;          // vec(A) space, column-major
    Subspace kernel;        // common kernel, inside C^{cols'}
    Subspace image;         // span of images, inside C^{rows'}
    int gr_dim() const;     // dim {A : Im A in R, Ker A contains K}
};

// k <= 0 means "up to the degree of f"
JetSpan jet_span(const PolyMatrixMap& f, const FlagPair& sigma, const Mat& p, int k = 0);

struct SharpResult {
    TargetFlag flag;
    int a = 0;      // dim V1'
    int index = 0;  // i_r
    int k0 = 0;
    int gr_dim = 0;
};

// the target flag cut out by the jet hull at P
SharpResult sharp_from_jets(const PolyMatrixMap& f, const JetSpan& js);
int target_index(const DomainSpec& target, int a);

// genericity protocol: 5 slice points near `anchor` (interior) or generic complex slice points;
// DegenerateJet if dim Gr(P, sigma) differs between them
SharpResult f_sharp(const PolyMatrixMap& f, const FlagPair& sigma, Rng& rng,
                    const std::optional<Mat>& anchor = std::nullopt);
// resample interior sigma at the level up to 20 times until the protocol accepts it
struct GenericSharp {
    FlagPair sigma;
    Mat point;
    SharpResult result;
    int attempts = 0;
};
GenericSharp generic_sharp(const PolyMatrixMap& f, Level r, Rng& rng);

// intersection / sum of the target points [I; f(Z_j)] over sampled slice points
TargetFlag sharp_oracle(const PolyMatrixMap& f, const FlagPair& sigma, const Mat& anchor, int samples, Rng& rng);

struct IndexEntry {
    Level level;
    int index = 0;
    int a = 0;
    int k0 = 0;
};
struct IndexSequence {
    std::vector<IndexEntry> entries;
    std::vector<int> values() const;
    // some r with i_r = i_{r-1} + 1 (i_0 = 0, integer levels only)
    bool has_unit_step() const;
    std::string str() const;
};
// MonotonicityViolation if not strictly increasing; DegenerateJet for degenerate maps
IndexSequence index_sequence(const PolyMatrixMap& f, std::uint64_t seed, int sigma_per_level = 3);

enum class FlatKind { Holomorphic, AntiHolomorphic };
const char* to_string(FlatKind k);

struct FlatSample {
    bool depends_on_a = false;
    bool depends_on_b = false;
    double dist_a = 0.0;
    double dist_b = 0.0;
};
struct FlatReport {
    FlatKind kind = FlatKind::Holomorphic;
    Level level;
    std::vector<FlatSample> samples;
    int agreeing = 0;
};
// leg-dependence test of F(A, B) = pr' f#(A, B); InconsistentDependence if F moves with both legs
FlatReport f_flat_classify(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed);
// f-flat at W (a point of D_r), using the leg F depends on
Subspace f_flat(const PolyMatrixMap& f, Level r, FlatKind kind, const Subspace& w, Rng& rng);

struct InclusionSample {
    char kind = 'Z';  // 'Z' (s < r) or 'Q' (s > r)
    Level s;
    bool pass = false;
    double residual = 0.0;
};
struct TrivialFitSummary {
    Level s;
    bool accepted = false;
    double residual = 0.0;
    int w0_dim = 0;
    int samples = 0;
};
struct RespectsReport {
    Level r;
    FlatKind kind = FlatKind::Holomorphic;
    bool via_transpose = false;
    bool consistent = true;  // the leg-dependence test passed
    std::vector<InclusionSample> inclusions;
    std::vector<TrivialFitSummary> fits;
    int z_failed() const;
    int q_failed() const;
    bool standard_verdict() const;
    bool all_pass() const { return consistent && z_failed() == 0 && q_failed() == 0 && standard_verdict(); }
};
RespectsReport respects_check(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed);

// Hermitian signature of V1' over sampled boundary flags sigma in Sigma_r
std::vector<Signature> sigma_image_signatures(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed);

}  // namespace bsd
