#include "bsdlab/catalog.hpp"

namespace bsd {

PolyMatrixMap diagonal_map(double c) {
    const DomainSpec s = DomainSpec::type1(2, 2), t = DomainSpec::type1(3, 3);
    PolyMatrixMap f(s, t);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) f.at(i, j) = Poly::variable(f.nvars(), f.var(i, j));
    f.at(2, 2) = Poly::variable(f.nvars(), f.var(0, 0)) * cd(c);
    f.name = "diagonal I(2,2)->I(3,3)";
    return f;
}

PolyMatrixMap block_map(const DomainSpec& source, int extra_rows) {
    if (source.kind != DomainKind::I) fail(ErrorKind::InputError, "block map needs a type I source");
    PolyMatrixMap f(source, DomainSpec::type1(source.p + extra_rows, source.q));
    for (int i = 0; i < source.p; ++i)
        for (int j = 0; j < source.q; ++j) f.at(i, j) = Poly::variable(f.nvars(), f.var(i, j));
    f.name = "block " + source.name() + "->" + f.target().name();
    return f;
}

PolyMatrixMap inclusion_map(int n) {
    PolyMatrixMap f(DomainSpec::type3(n), DomainSpec::type1(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f.at(i, j) = Poly::variable(f.nvars(), f.var(i, j));
    f.name = "inclusion " + f.source().name() + "->" + f.target().name();
    return f;
}

PolyMatrixMap corrupted_identity(double c) {
    PolyMatrixMap f = PolyMatrixMap::identity(DomainSpec::type1(3, 3));
    const int nv = f.nvars();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                f.at(i, j) += Poly::variable(nv, f.var(i, k)) * Poly::variable(nv, f.var(j, k)) * cd(c);
    f.name = "corrupted identity I(3,3)";
    f.claimed_proper = false;
    return f;
}

namespace {

PolyMatrixMap rotated_diagonal() {
    Rng rng = make_rng(20240611);
    const Mat a = random_unitary(rng, 2), d = random_unitary(rng, 2);
    const Mat ap = random_unitary(rng, 3), dp = random_unitary(rng, 3);
    // Z -> D' diag(D Z A^H, 0.3 (D Z A^H)_11) A'^H
    PolyMatrixMap inner = diagonal_map(0.3).precompose_linear(d, a.adjoint());
    PolyMatrixMap f = inner.transform_output(dp, ap.adjoint(), DomainSpec::type1(3, 3));
    f.name = "rotated diagonal I(2,2)->I(3,3)";
    return f;
}

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> c;
    auto put = [&](std::string id, std::string desc, PolyMatrixMap f, std::vector<int> idx, bool dec) {
        f.name = id;
        c.push_back({std::move(id), std::move(desc), std::move(f), std::move(idx), dec});
    };
    put("identity-I32", "identity of D^I_{3,2}", PolyMatrixMap::identity(DomainSpec::type1(3, 2)), {1}, true);
    put("identity-I33", "identity of D^I_{3,3}", PolyMatrixMap::identity(DomainSpec::type1(3, 3)), {1, 2}, true);
    put("transpose-I33", "Z -> Z^T on D^I_{3,3}", PolyMatrixMap::transpose(DomainSpec::type1(3, 3)), {1, 2}, true);
    put("diagonal-I22-I33", "Z -> diag(Z, 0.3 z11), D^I_{2,2} -> D^I_{3,3}", diagonal_map(0.3), {2}, true);
    put("block-I32-I42", "Z -> [Z; 0], D^I_{3,2} -> D^I_{4,2}", block_map(DomainSpec::type1(3, 2), 1), {1}, true);
    put("rotated-diagonal-I22-I33", "diagonal map composed with isotropy rotations on both sides", rotated_diagonal(),
        {2}, true);
    put("inclusion-III3-I33", "D^III_3 inside D^I_{3,3}", inclusion_map(3), {1, 2}, false);
    put("identity-III3", "identity of D^III_3", PolyMatrixMap::identity(DomainSpec::type3(3)), {1, 2}, false);
    put("identity-II6", "identity of D^II_6", PolyMatrixMap::identity(DomainSpec::type2(6)), {2, 3, 4}, false);
    return c;
}

}  // namespace

std::vector<CatalogEntry> catalog() {
    static const std::vector<CatalogEntry> c = build();
    return c;
}

const CatalogEntry& catalog_entry(const std::string& id) {
    static const std::vector<CatalogEntry> c = build();
    for (const auto& e : c)
        if (e.id == id) return e;
    fail(ErrorKind::InputError, "unknown catalog map '" + id + "'");
}

}  // namespace bsd
