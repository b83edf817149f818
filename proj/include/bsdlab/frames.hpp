#pragma once

#include "bsdlab/subspace.hpp"

#include <functional>

namespace bsd {

enum class FrameGroup { SU, SO, Sp };
const char* to_string(FrameGroup g);
FrameGroup parse_frame_group(const std::string& s);

// Block sizes of a frame (Z, X, Y) with |Z| = |Y| = ell, |X| = p + q - 2 ell.
struct FrameShape {
    FrameGroup group = FrameGroup::SU;
    int p = 1, q = 1, ell = 1;
    int n() const { return p + q; }
    int xdim() const { return p + q - 2 * ell; }
};
FrameShape frame_shape(FrameGroup g, int p, int q, int ell);

// Gram of the Hermitian form in a Sigma frame basis
Mat frame_gram(const FrameShape& s);
// Gram of the bilinear form (SO: symmetric, Sp: antisymmetric) in the reference basis; empty for SU
Mat frame_bilinear_gram(const FrameShape& s);
// signs of the X block (+1 for the first q - ell vectors, -1 after)
RVec x_signs(const FrameShape& s);
// the ambient forms
Form frame_hermitian(const FrameShape& s);
Form frame_bilinear(const FrameShape& s);

// Rows of `rows` are the frame vectors Z_1 .. Z_{p+q}.
struct SigmaFrame {
    FrameShape shape;
    Mat rows;
    Mat Z() const { return rows.topRows(shape.ell); }
    Mat X() const { return rows.middleRows(shape.ell, shape.xdim()); }
    Mat Y() const { return rows.bottomRows(shape.ell); }
};

SigmaFrame reference_frame(const FrameShape& s);

struct FrameResidual {
    double pairing = 0;   // |M H M^* - Q|
    double bilinear = 0;  // |M B M^t - Q_B|
    double det = 0;       // |det M - 1|
    double max() const;
};
FrameResidual frame_residual(const FrameShape& s, const Mat& rows);

// correct a guess to an exact frame; Degenerate if it is too far off
SigmaFrame make_frame(const FrameShape& s, const Mat& guess);
// g . frame: every vector mapped by the ambient matrix g
SigmaFrame act(const Mat& g, const SigmaFrame& f);

// element of the ambient group algebra (acts on C^{p+q})
Mat random_frame_algebra(const FrameShape& s, Rng& rng, double scale = 1.0);
// project an element given in frame coordinates onto the frame algebra (for SU the trace is kept)
Mat project_frame_algebra(const FrameShape& s, const Mat& x);

// pi with dZ = pi Z, split into the blocks of the (Z, X, Y) decomposition
struct MaurerCartanSlice {
    FrameShape shape;
    Mat pi;
    Mat block(int i, int j) const;
    Mat psi() const { return block(0, 0); }
    Mat theta() const { return block(0, 1); }
    Mat phi() const { return block(0, 2); }
    Mat sigma() const { return block(1, 0); }
    Mat omega() const { return block(1, 1); }
    Mat theta_y() const { return block(1, 2); }
    Mat xi() const { return block(2, 0); }
    Mat sigma_y() const { return block(2, 1); }
    Mat psi_tilde() const { return block(2, 2); }
};

struct SymmetryResidual {
    double hermitian = 0;  // pi Q + Q pi^*
    double bilinear = 0;   // pi Q_B + Q_B pi^t
    double phi = 0;        // reduction of phi from the isotropy of Z
    double max() const { return std::max({hermitian, bilinear, phi}); }
};
SymmetryResidual symmetry_residual(const MaurerCartanSlice& m);
// literal symmetric/antisymmetric test of phi (phi - phi^t for Sp, phi + phi^t for SO)
double phi_literal_residual(const MaurerCartanSlice& m);

MaurerCartanSlice maurer_cartan_from(const FrameShape& s, const Mat& rows, const Mat& drows);

using FrameCurve = std::function<Mat(double)>;
// pi along a curve of frame matrices; FrameDriftTooLarge if the curve leaves the frame bundle
MaurerCartanSlice maurer_cartan(const FrameShape& s, const FrameCurve& path, double t, double h = 1e-3);
// exact pi for t -> exp(tA) . frame0
MaurerCartanSlice maurer_cartan_exp(const SigmaFrame& frame0, const Mat& a, double t);

// d pi - pi ^ pi on the family (s, t) -> exp(sA) exp(tB) . frame0, central differences at step h
double structure_residual(const SigmaFrame& frame0, const Mat& a, const Mat& b, double h = 1e-4);

enum class FrameChange { Position, RealVectors, Dilation, Rotation, Final };
const char* to_string(FrameChange k);

struct FrameChangeParams {
    Mat W, V;      // Position
    Mat H;         // RealVectors
    RVec lambda;   // Dilation
    Mat U;         // Rotation
    Mat A, B, C;   // Final
};

// the matrix U with (Z~, X~, Y~) = U (Z, X, Y); InvalidParams on bad input
Mat frame_change_matrix(const FrameShape& s, FrameChange kind, const FrameChangeParams& prm);
SigmaFrame frame_change(const SigmaFrame& f, FrameChange kind, const FrameChangeParams& prm);
FrameChangeParams random_change_params(const FrameShape& s, FrameChange kind, Rng& rng, double scale = 0.5);

// pi~ = dU U^{-1} + U pi U^{-1}
Mat transform_pi(const Mat& u, const Mat& du, const Mat& pi);

// worst residuals over random frames and directions
struct FrameSelftest {
    int trials = 0;
    double relations = 0;  // frame pairing / bilinear / det
    double symmetry = 0;   // Maurer-Cartan block symmetries
    double structure = 0;  // d pi - pi ^ pi at h = 1e-4
    double position = 0;   // theta -> W theta, phi -> W phi W^*
    double dilation = 0;   // theta_ij / lambda_i, phi_ij / (lambda_i lambda_j)
    double rotation = 0;   // theta U^-1
    double final = 0;      // theta - phi B
    double real_vectors = 0;
};
FrameSelftest frame_selftest(const FrameShape& s, int trials, std::uint64_t seed);

}  // namespace bsd
