#include "bsdlab/poly.hpp"

#include <cmath>

namespace bsd {

// ---- Poly ----

Poly Poly::constant(int nvars, cd c) {
    Poly p(nvars);
    p.add_term(Exponent(static_cast<std::size_t>(nvars), 0), c);
    return p;
}

Poly Poly::variable(int nvars, int i) {
    if (i < 0 || i >= nvars) fail(ErrorKind::InputError, "variable index out of range");
    Poly p(nvars);
    Exponent e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(i)] = 1;
    p.add_term(e, 1.0);
    return p;
}

namespace {

int total(const Poly::Exponent& e) {
    int s = 0;
    for (int v : e) s += v;
    return s;
}

}  // namespace

int Poly::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_)
        if (c != cd(0.0)) d = std::max(d, total(e));
    return d;
}

cd Poly::coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? cd(0.0) : it->second;
}

void Poly::add_term(const Exponent& e, cd c) {
    if (static_cast<int>(e.size()) != nvars_) fail(ErrorKind::ShapeMismatch, "exponent length");
    for (int v : e)
        if (v < 0) fail(ErrorKind::InputError, "negative exponent");
    if (c == cd(0.0)) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cd(0.0)) terms_.erase(it);
    }
}

bool Poly::is_zero(double eps) const { return max_coeff() <= eps; }

double Poly::max_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

cd Poly::eval(const Vec& x) const {
    if (x.size() != nvars_) fail(ErrorKind::ShapeMismatch, "evaluation point length");
    cd s = 0.0;
    for (const auto& [e, c] : terms_) {
        cd t = c;
        for (int i = 0; i < nvars_; ++i)
            if (e[static_cast<std::size_t>(i)]) t *= std::pow(x(i), e[static_cast<std::size_t>(i)]);
        s += t;
    }
    return s;
}

Poly Poly::homogeneous_part(int d) const {
    Poly p(nvars_);
    for (const auto& [e, c] : terms_)
        if (total(e) == d) p.terms_.emplace(e, c);
    return p;
}

Poly Poly::truncated(int max_degree) const {
    Poly p(nvars_);
    for (const auto& [e, c] : terms_)
        if (total(e) <= max_degree) p.terms_.emplace(e, c);
    return p;
}

Poly Poly::operator+(const Poly& o) const {
    Poly p = *this;
    p += o;
    return p;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.nvars_ != nvars_) fail(ErrorKind::ShapeMismatch, "variable count");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly Poly::operator-(const Poly& o) const { return *this + o * cd(-1.0); }

Poly Poly::operator*(cd s) const {
    Poly p(nvars_);
    if (s == cd(0.0)) return p;
    for (const auto& [e, c] : terms_) p.terms_.emplace(e, c * s);
    return p;
}

Poly Poly::mul_truncated(const Poly& o, int max_degree) const {
    if (o.nvars_ != nvars_) fail(ErrorKind::ShapeMismatch, "variable count");
    Poly p(nvars_);
    Exponent e(static_cast<std::size_t>(nvars_));
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_) {
            int d = 0;
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = ea[i] + eb[i];
                d += e[i];
            }
            if (max_degree >= 0 && d > max_degree) continue;
            p.add_term(e, ca * cb);
        }
    return p;
}

Poly Poly::operator*(const Poly& o) const { return mul_truncated(o, -1); }

Poly Poly::pow(int k, int max_degree) const {
    Poly r = constant(nvars_, 1.0);
    for (int i = 0; i < k; ++i) r = r.mul_truncated(*this, max_degree);
    return r;
}

Poly Poly::substitute(const std::vector<Poly>& vals, int max_degree) const {
    if (static_cast<int>(vals.size()) != nvars_) fail(ErrorKind::ShapeMismatch, "substitution length");
    const int m = vals.empty() ? 0 : vals.front().nvars();
    for (const auto& v : vals)
        if (v.nvars() != m) fail(ErrorKind::ShapeMismatch, "substituted polynomials disagree on variables");
    // cache powers of each substituted polynomial
    std::vector<std::vector<Poly>> powers(vals.size());
    auto power = [&](std::size_t i, int k) -> const Poly& {
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(constant(m, 1.0));
        while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back().mul_truncated(vals[i], max_degree));
        return pw[static_cast<std::size_t>(k)];
    };
    Poly out(m);
    for (const auto& [e, c] : terms_) {
        Poly t = constant(m, c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) t = t.mul_truncated(power(i, e[i]), max_degree);
        out += t;
    }
    return out;
}

// ---- PolyMatrixMap ----

PolyMatrixMap::PolyMatrixMap(const DomainSpec& source, const DomainSpec& target)
    : source_(source), target_(target), rows_(target.rows()), cols_(target.cols()), has_target_(true) {
    entries_.assign(static_cast<std::size_t>(rows_ * cols_), Poly(nvars()));
}

int PolyMatrixMap::degree() const {
    int d = -1;
    for (const auto& p : entries_) d = std::max(d, p.degree());
    return d;
}

Mat PolyMatrixMap::eval(const Mat& z) const {
    if (z.rows() != source_.rows() || z.cols() != source_.cols()) fail(ErrorKind::ShapeMismatch, "source point shape");
    Vec x(nvars());
    for (int i = 0; i < z.rows(); ++i)
        for (int j = 0; j < z.cols(); ++j) x(var(i, j)) = z(i, j);
    Mat out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(i, j) = at(i, j).eval(x);
    return out;
}

PolyMatrixMap PolyMatrixMap::transform_output(const Mat& l, const Mat& r, const std::optional<DomainSpec>& nt) const {
    if (l.cols() != rows_ || r.rows() != cols_) fail(ErrorKind::ShapeMismatch, "output transform shape");
    PolyMatrixMap g;
    g.source_ = source_;
    g.target_ = nt ? *nt : target_;
    g.has_target_ = nt.has_value();
    g.rows_ = static_cast<int>(l.rows());
    g.cols_ = static_cast<int>(r.cols());
    if (nt && (nt->rows() != g.rows_ || nt->cols() != g.cols_)) fail(ErrorKind::ShapeMismatch, "new target shape");
    g.entries_.assign(static_cast<std::size_t>(g.rows_ * g.cols_), Poly(nvars()));
    g.name = name;
    g.claimed_proper = claimed_proper;
    for (int i = 0; i < g.rows_; ++i)
        for (int j = 0; j < g.cols_; ++j) {
            Poly acc(nvars());
            for (int a = 0; a < rows_; ++a) {
                if (l(i, a) == cd(0.0)) continue;
                for (int b = 0; b < cols_; ++b) {
                    const cd w = l(i, a) * r(b, j);
                    if (w != cd(0.0)) acc += at(a, b) * w;
                }
            }
            g.at(i, j) = acc;
        }
    return g;
}

PolyMatrixMap PolyMatrixMap::precompose_linear(const Mat& l, const Mat& r) const {
    const int m = source_.rows(), k = source_.cols();
    if (l.rows() != m || l.cols() != m || r.rows() != k || r.cols() != k)
        fail(ErrorKind::ShapeMismatch, "precompose shape");
    std::vector<Poly> vals;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) {
            // (L Z R)_ij = sum_ab L_ia z_ab R_bj
            Poly p(nvars());
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < k; ++b) {
                    const cd w = l(i, a) * r(b, j);
                    if (w != cd(0.0)) p += Poly::variable(nvars(), var(a, b)) * w;
                }
            vals.push_back(p);
        }
    PolyMatrixMap g = *this;
    for (auto& e : g.entries_) e = e.substitute(vals);
    return g;
}

PolyMatrixMap PolyMatrixMap::compose_after(const PolyMatrixMap& g) const {
    if (!(g.target() == source_) || g.out_rows() != source_.rows() || g.out_cols() != source_.cols())
        fail(ErrorKind::ShapeMismatch, "composition: inner target differs from outer source");
    PolyMatrixMap h(g.source(), target_);
    h.rows_ = rows_;
    h.cols_ = cols_;
    h.has_target_ = has_target_;
    h.entries_.assign(entries_.size(), Poly(g.nvars()));
    std::vector<Poly> vals;
    for (int i = 0; i < source_.rows(); ++i)
        for (int j = 0; j < source_.cols(); ++j) vals.push_back(g.at(i, j));
    for (std::size_t e = 0; e < entries_.size(); ++e) h.entries_[e] = entries_[e].substitute(vals);
    h.name = name + " o " + g.name;
    h.claimed_proper = claimed_proper && g.claimed_proper;
    return h;
}

PolyMatrixMap PolyMatrixMap::homogeneous_part(int d) const {
    PolyMatrixMap g = *this;
    for (auto& e : g.entries_) e = e.homogeneous_part(d);
    return g;
}

std::vector<Poly> PolyMatrixMap::in_chart_coords() const {
    const int m = source_.rows(), k = source_.cols();
    const int nc = source_.chart_dim();
    std::vector<Poly> vals(static_cast<std::size_t>(nvars()), Poly(nc));
    int idx = 0;
    if (source_.kind == DomainKind::I) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < k; ++j) vals[static_cast<std::size_t>(var(i, j))] = Poly::variable(nc, idx++);
    } else {
        const bool skew = source_.kind == DomainKind::II;
        for (int i = 0; i < m; ++i)
            for (int j = skew ? i + 1 : i; j < k; ++j) {
                Poly v = Poly::variable(nc, idx++);
                vals[static_cast<std::size_t>(var(i, j))] = v;
                if (i != j) vals[static_cast<std::size_t>(var(j, i))] = skew ? v * cd(-1.0) : v;
            }
    }
    std::vector<Poly> out;
    for (const auto& e : entries_) out.push_back(e.substitute(vals));
    return out;
}

void PolyMatrixMap::validate() const {
    if (!has_target_) fail(ErrorKind::ShapeMismatch, "map has no target domain");
    if (rows_ != target_.rows() || cols_ != target_.cols()) fail(ErrorKind::ShapeMismatch, "output shape differs from target");
    if (!target_.has_bilinear()) return;
    const double sign = target_.kind == DomainKind::II ? -1.0 : 1.0;
    auto red = in_chart_coords();
    for (int i = 0; i < rows_; ++i)
        for (int j = i; j < cols_; ++j) {
            Poly d = red[static_cast<std::size_t>(i * cols_ + j)] - red[static_cast<std::size_t>(j * cols_ + i)] * cd(sign);
            if (!d.is_zero(1e-12)) fail(ErrorKind::SymmetryViolation, "output violates the target symmetry identically");
        }
}

PolyMatrixMap PolyMatrixMap::identity(const DomainSpec& s) {
    PolyMatrixMap f(s, s);
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j) f.at(i, j) = Poly::variable(f.nvars(), f.var(i, j));
    f.name = "identity " + s.name();
    return f;
}

PolyMatrixMap PolyMatrixMap::transpose(const DomainSpec& s) {
    if (s.rows() != s.cols()) fail(ErrorKind::InputError, "transpose needs a square source");
    PolyMatrixMap f(s, s);
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j) f.at(i, j) = Poly::variable(f.nvars(), f.var(j, i));
    f.name = "transpose " + s.name();
    return f;
}

PolyMatrixMap PolyMatrixMap::constant(const DomainSpec& source, const DomainSpec& target, const Mat& value) {
    PolyMatrixMap f(source, target);
    if (value.rows() != target.rows() || value.cols() != target.cols()) fail(ErrorKind::ShapeMismatch, "constant shape");
    for (int i = 0; i < target.rows(); ++i)
        for (int j = 0; j < target.cols(); ++j) f.at(i, j) = Poly::constant(f.nvars(), value(i, j));
    f.name = "constant";
    f.claimed_proper = false;
    return f;
}

// ---- JSON ----

nlohmann::json to_json(const PolyMatrixMap& f) {
    nlohmann::json j;
    j["source"] = spec_to_json(f.source());
    j["target"] = spec_to_json(f.target());
    j["degree"] = f.degree();
    j["claimed_proper"] = f.claimed_proper;
    if (!f.name.empty()) j["name"] = f.name;
    nlohmann::json entries = nlohmann::json::array();
    for (int r = 0; r < f.out_rows(); ++r)
        for (int c = 0; c < f.out_cols(); ++c) {
            const Poly& p = f.at(r, c);
            if (p.terms().empty()) continue;
            nlohmann::json terms = nlohmann::json::array();
            for (const auto& [e, v] : p.terms()) terms.push_back({{"coeffs", e}, {"re", v.real()}, {"im", v.imag()}});
            entries.push_back({{"row", r}, {"col", c}, {"terms", terms}});
        }
    j["entries"] = entries;
    return j;
}

namespace {

DomainSpec spec_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) fail(ErrorKind::InputError, std::string("map config needs '") + key + "'");
    const auto& s = j.at(key);
    if (s.is_string()) return parse_spec(s.get<std::string>());
    return spec_from_json(s);
}

}  // namespace

PolyMatrixMap poly_map_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::InputError, "map config must be an object");
    try {
        PolyMatrixMap f(spec_field(j, "source"), spec_field(j, "target"));
        f.claimed_proper = j.value("claimed_proper", true);
        f.name = j.value("name", std::string("user map"));
        const int nv = f.nvars();
        for (const auto& e : j.at("entries")) {
            const int r = e.at("row").get<int>(), c = e.at("col").get<int>();
            if (r < 0 || r >= f.out_rows() || c < 0 || c >= f.out_cols())
                fail(ErrorKind::ShapeMismatch, "entry outside the target shape");
            for (const auto& t : e.at("terms")) {
                auto ex = t.at("coeffs").get<std::vector<int>>();
                if (static_cast<int>(ex.size()) != nv)
                    fail(ErrorKind::ShapeMismatch, "multi-index must have " + std::to_string(nv) + " entries");
                f.at(r, c).add_term(ex, cd(t.value("re", 0.0), t.value("im", 0.0)));
            }
        }
        if (j.contains("degree") && j.at("degree").get<int>() < f.degree())
            fail(ErrorKind::InputError, "declared degree is below the actual degree");
        f.validate();
        return f;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InputError, std::string("malformed map config: ") + e.what());
    }
}

// ---- slices and jets ----

std::vector<Poly> compose_affine(const PolyMatrixMap& f, const Mat& base, const std::vector<Mat>& dirs) {
    const DomainSpec& s = f.source();
    if (base.rows() != s.rows() || base.cols() != s.cols()) fail(ErrorKind::ShapeMismatch, "slice base shape");
    const int d = static_cast<int>(dirs.size());
    std::vector<Poly> vals;
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < s.cols(); ++j) {
            Poly p = Poly::constant(d, base(i, j));
            for (int t = 0; t < d; ++t) {
                const cd w = dirs[static_cast<std::size_t>(t)](i, j);
                if (w != cd(0.0)) p += Poly::variable(d, t) * w;
            }
            vals.push_back(p);
        }
    std::vector<Poly> out;
    for (int r = 0; r < f.out_rows(); ++r)
        for (int c = 0; c < f.out_cols(); ++c) out.push_back(f.at(r, c).substitute(vals));
    return out;
}

std::vector<Jet> slice_jets(const PolyMatrixMap& f, const Mat& base, const std::vector<Mat>& dirs, int max_order) {
    auto comp = compose_affine(f, base, dirs);
    std::map<Poly::Exponent, Mat> by_alpha;
    const int rows = f.out_rows(), cols = f.out_cols();
    for (int idx = 0; idx < rows * cols; ++idx)
        for (const auto& [e, c] : comp[static_cast<std::size_t>(idx)].terms()) {
            const int ord = total(e);
            if (ord < 1 || ord > max_order) continue;
            auto it = by_alpha.find(e);
            if (it == by_alpha.end()) it = by_alpha.emplace(e, Mat::Zero(rows, cols)).first;
            double fact = 1.0;
            for (int v : e)
                for (int k = 2; k <= v; ++k) fact *= k;
            it->second(idx / cols, idx % cols) = c * fact;
        }
    std::vector<Jet> out;
    for (auto& [e, m] : by_alpha) out.push_back({e, total(e), m});
    return out;
}

}  // namespace bsd
