#pragma once

#include "bsdlab/core.hpp"

#include <nlohmann/json.hpp>

#include <tuple>
#include <vector>

namespace bsd {

// Linear subspace of C^N held in reduced column echelon form.
// basis() has unit entries on the pivot rows; orth() is an orthonormal basis.
class Subspace {
public:
    Subspace() = default;

    int ambient() const { return ambient_; }
    int dim() const { return static_cast<int>(canon_.cols()); }
    const Mat& basis() const { return canon_; }
    const Mat& orth() const { return orth_; }
    const std::vector<int>& pivots() const { return pivots_; }
    Mat projector() const { return orth_ * orth_.adjoint(); }

    static Subspace zero(int ambient);
    static Subspace full(int ambient);
    // span of e_i for the listed (0-based) indices
    static Subspace coords(int ambient, const std::vector<int>& idx);

    friend Subspace canonicalize(const Mat& basis, double t);

private:
    int ambient_ = 0;
    Mat canon_;
    Mat orth_;
    std::vector<int> pivots_;
};

Subspace canonicalize(const Mat& basis, double t = tol);
inline Subspace span(const Mat& basis) { return canonicalize(basis); }

Subspace intersect(const Subspace& a, const Subspace& b, double t = tol);
Subspace sum(const Subspace& a, const Subspace& b, double t = tol);

// entrywise comparison of canonical forms
bool equals(const Subspace& a, const Subspace& b, double eps = 1e-8);
// spectral norm of the projector difference (sine of the largest principal angle)
double distance(const Subspace& a, const Subspace& b);
bool contained_in(const Subspace& a, const Subspace& b, double eps = 1e-8);

// ---- forms ----

enum class FormKind { Hermitian, Symmetric, Antisymmetric };

struct Form {
    FormKind kind = FormKind::Hermitian;
    Mat matrix;
    int p = 0;
    int q = 0;
    int n = 0;

    int ambient() const { return static_cast<int>(matrix.rows()); }
    bool bilinear() const { return kind != FormKind::Hermitian; }
    // value of the form on (u, v): v^H M u for Hermitian, u^T M v for bilinear
    cd eval(const Vec& u, const Vec& v) const;
    // Gram matrix of the columns of a
    Mat gram(const Mat& a) const;
    Mat gram(const Mat& a, const Mat& b) const;
};

// diag(I_q, -I_p): the positive block comes first
Form hermitian_form(int p, int q);
// [[0, I_n], [I_n, 0]]
Form symmetric_form(int n);
// [[0, I_n], [-I_n, 0]]
Form antisymmetric_form(int n);

Subspace perp(const Subspace& a, const Form& f);
bool is_isotropic(const Subspace& a, const Form& f, double eps = 1e-8);

struct Signature {
    int plus = 0;
    int minus = 0;
    int zero = 0;
    bool operator==(const Signature&) const = default;
};
Signature restrict_signature(const Subspace& a, const Form& f, double t = tol);

// ---- JSON ----

nlohmann::json to_json(const Subspace& s);
Subspace subspace_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);
nlohmann::json form_to_json(const Form& f);
Form form_from_json(const nlohmann::json& j);

}  // namespace bsd
