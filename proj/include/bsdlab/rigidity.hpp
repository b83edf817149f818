#pragma once

#include "bsdlab/modulimap.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bsd {

// H(V) = W0 + iota(V)
struct TrivialEmbeddingModel {
    Subspace W0;
    Mat iota;        // N' x N, zero off the span of the sampled V's
    Subspace domain; // span of the sampled V's
    Subspace apply(const Subspace& v) const;
};

struct TrivialFit {
    bool accepted = false;
    double residual = 0.0;  // worst relative residual of iota(v) off H(V)
    std::optional<TrivialEmbeddingModel> model;
    std::string reason;
};

// InsufficientSamples below dim (dim + 1) pairs, dim = dimension of the Grassmannian of
// dim V-planes inside the span of the V's
TrivialFit detect_trivial(const std::vector<std::pair<Subspace, Subspace>>& samples, double threshold = 1e-7);

struct StandardVerdict {
    bool standard = false;
    TargetFlag hull;
    int hull_rank = 0;
    int source_rank = 0;
    int degree = 0;
};
StandardVerdict detect_standard(const PolyMatrixMap& f, std::uint64_t seed, int samples = 0);

struct DecompositionResult {
    PolyMatrixMap F1;                 // standard factor, in the source shape
    std::optional<PolyMatrixMap> F2;  // residual factor; empty when the second factor is a point
    Mat A, D;                         // unitaries on the positive / negative blocks of the target
    TrivialEmbeddingModel model;      // fitted f-flat at the top level
    IndexSequence indices;
    bool unit_step = false;           // some i_r = i_{r-1} + 1
    bool via_transpose = false;
    bool f1_standard = false;
    double f1_residual = 0.0;         // F1 against the identity
    double cross_residual = 0.0;      // off-diagonal blocks
    double reassembly_residual = 0.0; // f against D diag(F1, F2) A^H
    int grid = 0;
    Mat eval_F2(const Mat& z) const;
    Mat reassemble(const Mat& z) const;
};
DecompositionResult decompose(const PolyMatrixMap& f, std::uint64_t seed, int grid = 200);

// ---- rank-gap arithmetic ----

struct RankGapReport {
    DomainKind source = DomainKind::I;
    DomainKind target = DomainKind::I;
    int q = 0;
    int qp = 0;
    long long admissible = 0;
    long long with_engine = 0;
    long long rigid_pattern = 0;  // i_1 = 1 and integer steps of 2
    bool regime_pair = false;     // same type, or III -> I
    bool all_engine() const { return admissible > 0 && with_engine == admissible; }
    bool escape() const { return with_engine < admissible; }
    std::string verdict;
    std::vector<int> example_escape;
};
RankGapReport rank_gap_analysis(DomainKind source, int q, DomainKind target, int qp);
// every pair with 2 <= q <= qmax, 2 <= q' <= 2q + 1
std::vector<RankGapReport> rank_gap_table(int qmax = 6);
const char* kind_name(DomainKind k);

}  // namespace bsd
