#include "strata/repcat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace strata {

// ---------------------------------------------------------------------------
// Rep
// ---------------------------------------------------------------------------

Rep Rep::zero(AlgebraPtr a) {
    std::vector<int> dims(a->n_vertices(), 0);
    return make(std::move(a), std::move(dims));
}

Rep Rep::make(AlgebraPtr a, std::vector<int> dims) {
    Rep m;
    m.alg = std::move(a);
    m.dims = std::move(dims);
    const Quiver& q = m.alg->quiver();
    for (const Arrow& ar : q.arrows) m.arrow_mats.push_back(Mat(m.alg->field(), m.dims[ar.tgt], m.dims[ar.src]));
    return m;
}

int Rep::total_dim() const {
    int t = 0;
    for (int d : dims) t += d;
    return t;
}

int Rep::offset(int vertex) const {
    int t = 0;
    for (int v = 0; v < vertex; ++v) t += dims[v];
    return t;
}

bool Rep::operator==(const Rep& o) const {
    return alg == o.alg && dims == o.dims && arrow_mats == o.arrow_mats;
}

Mat Rep::path_action_total(const Path& p) const {
    const FieldSpec& f = alg->field();
    int t = total_dim();
    Mat out(f, t, t);
    if (p.is_trivial()) {
        int off = offset(p.src);
        for (int k = 0; k < dims[p.src]; ++k) out.at(off + k, off + k) = Scalar::one(f);
        return out;
    }
    Mat block = arrow_mats[p.arrows[0]];
    for (size_t k = 1; k < p.arrows.size(); ++k) block = block * arrow_mats[p.arrows[k]];
    out.set_block(offset(p.tgt), offset(p.src), block);
    return out;
}

Mat Rep::basis_action_block(int b) const {
    const Path& p = alg->basis_path(b);
    if (p.is_trivial()) return Mat::identity(alg->field(), dims[p.src]);
    Mat block = arrow_mats[p.arrows[0]];
    for (size_t k = 1; k < p.arrows.size(); ++k) block = block * arrow_mats[p.arrows[k]];
    return block;
}

Mat Rep::element_action_total(const Algebra::SparseVec& x) const {
    int t = total_dim();
    Mat out(alg->field(), t, t);
    for (const auto& [b, c] : x) {
        Mat blk = basis_action_block(b);
        const Path& p = alg->basis_path(b);
        int r0 = offset(p.tgt), c0 = offset(p.src);
        for (int i = 0; i < blk.rows(); ++i)
            for (int j = 0; j < blk.cols(); ++j) out.at(r0 + i, c0 + j) += c * blk.at(i, j);
    }
    return out;
}

std::string Rep::dim_vector_string() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
    os << ")";
    return os.str();
}

ValidationReport validate(const Rep& m) {
    ValidationReport rep;
    const auto& rels = m.alg->presentation().relations;
    for (size_t r = 0; r < rels.size(); ++r) {
        const Relation& rel = rels[r];
        int src = rel[0].path.src, tgt = rel[0].path.tgt;
        Mat sum(m.alg->field(), m.dims[tgt], m.dims[src]);
        for (const RelTerm& t : rel) {
            Mat blk = Mat::identity(m.alg->field(), m.dims[src]);
            for (auto it = t.path.arrows.rbegin(); it != t.path.arrows.rend(); ++it)
                blk = m.arrow_mats[*it] * blk;
            sum = sum + blk * t.coeff;
        }
        if (!sum.is_zero()) {
            rep.ok = false;
            rep.violations.push_back({static_cast<int>(r), src, tgt});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

Mor Mor::zero(const Rep& src, const Rep& dst) {
    Mor f;
    f.src = src;
    f.dst = dst;
    for (int v = 0; v < src.alg->n_vertices(); ++v)
        f.comps.push_back(Mat(src.alg->field(), dst.dims[v], src.dims[v]));
    return f;
}

Mor Mor::identity(const Rep& m) {
    Mor f = zero(m, m);
    for (int v = 0; v < m.alg->n_vertices(); ++v) f.comps[v] = Mat::identity(m.alg->field(), m.dims[v]);
    return f;
}

Mat Mor::total() const {
    Mat out(src.alg->field(), dst.total_dim(), src.total_dim());
    for (size_t v = 0; v < comps.size(); ++v)
        out.set_block(dst.offset(static_cast<int>(v)), src.offset(static_cast<int>(v)), comps[v]);
    return out;
}

bool Mor::is_zero() const {
    return std::all_of(comps.begin(), comps.end(), [](const Mat& m) { return m.is_zero(); });
}

bool Mor::intertwines() const {
    const Quiver& q = src.alg->quiver();
    for (int a = 0; a < q.n_arrows(); ++a) {
        const Arrow& ar = q.arrows[a];
        if (comps[ar.tgt] * src.arrow_mats[a] != dst.arrow_mats[a] * comps[ar.src]) return false;
    }
    return true;
}

bool Mor::is_injective() const {
    for (size_t v = 0; v < comps.size(); ++v)
        if (rank(comps[v]) != src.dims[v]) return false;
    return true;
}

bool Mor::is_surjective() const {
    for (size_t v = 0; v < comps.size(); ++v)
        if (rank(comps[v]) != dst.dims[v]) return false;
    return true;
}

bool Mor::is_isomorphism() const { return src.dims == dst.dims && is_injective(); }

Mor Mor::operator+(const Mor& o) const {
    Mor r = *this;
    for (size_t v = 0; v < comps.size(); ++v) r.comps[v] = comps[v] + o.comps[v];
    return r;
}

Mor Mor::operator-(const Mor& o) const {
    Mor r = *this;
    for (size_t v = 0; v < comps.size(); ++v) r.comps[v] = comps[v] - o.comps[v];
    return r;
}

Mor Mor::scaled(const Scalar& c) const {
    Mor r = *this;
    for (auto& m : r.comps) m = m * c;
    return r;
}

std::optional<Mor> Mor::inverse_mor() const {
    if (src.dims != dst.dims) return std::nullopt;
    Mor r;
    r.src = dst;
    r.dst = src;
    for (const Mat& m : comps) {
        auto inv = inverse(m);
        if (!inv) return std::nullopt;
        r.comps.push_back(*inv);
    }
    return r;
}

Mor compose(const Mor& g, const Mor& f) {
    if (g.src.dims != f.dst.dims || g.src.alg != f.dst.alg) throw std::logic_error("compose: shape mismatch");
    Mor r;
    r.src = f.src;
    r.dst = g.dst;
    for (size_t v = 0; v < f.comps.size(); ++v) r.comps.push_back(g.comps[v] * f.comps[v]);
    return r;
}

std::vector<Mor> hom_basis(const Rep& m, const Rep& n) {
    if (m.alg != n.alg) throw AlgebraMismatch();
    const FieldSpec& f = m.alg->field();
    const Quiver& q = m.alg->quiver();
    const int nv = q.n_vertices();

    std::vector<int> uoff(nv + 1, 0);
    for (int v = 0; v < nv; ++v) uoff[v + 1] = uoff[v] + n.dims[v] * m.dims[v];
    const int unknowns = uoff[nv];

    int eqs = 0;
    for (const Arrow& a : q.arrows) eqs += n.dims[a.tgt] * m.dims[a.src];
    Mat sys(f, eqs, unknowns);
    int row = 0;
    for (int a = 0; a < q.n_arrows(); ++a) {
        const Arrow& ar = q.arrows[a];
        const Mat& Ma = m.arrow_mats[a];
        const Mat& Na = n.arrow_mats[a];
        for (int r = 0; r < n.dims[ar.tgt]; ++r)
            for (int c = 0; c < m.dims[ar.src]; ++c) {
                // f_tgt[r,k] Ma[k,c] - Na[r,k] f_src[k,c] = 0
                for (int k = 0; k < m.dims[ar.tgt]; ++k)
                    if (!Ma.at(k, c).is_zero()) sys.at(row, uoff[ar.tgt] + r * m.dims[ar.tgt] + k) += Ma.at(k, c);
                for (int k = 0; k < n.dims[ar.src]; ++k)
                    if (!Na.at(r, k).is_zero()) sys.at(row, uoff[ar.src] + k * m.dims[ar.src] + c) -= Na.at(r, k);
                ++row;
            }
    }
    Mat ker = nullspace(sys);
    std::vector<Mor> basis;
    for (int c = 0; c < ker.cols(); ++c) {
        Mor mor = Mor::zero(m, n);
        for (int v = 0; v < nv; ++v)
            for (int r = 0; r < n.dims[v]; ++r)
                for (int cc = 0; cc < m.dims[v]; ++cc)
                    mor.comps[v].at(r, cc) = ker.at(uoff[v] + r * m.dims[v] + cc, c);
        basis.push_back(std::move(mor));
    }
    return basis;
}

int hom_dim(const Rep& m, const Rep& n) { return static_cast<int>(hom_basis(m, n).size()); }

// ---------------------------------------------------------------------------
// Sub/quotient machinery
// ---------------------------------------------------------------------------

namespace {

// complementary coordinate indices: span(cols) + span{e_c : c in result} = k^n
std::vector<int> complement_indices(const Mat& cols) {
    Mat aug = Mat::hstack(cols, Mat::identity(cols.field(), cols.rows()));
    std::vector<int> idx;
    for (int p : rref(aug))
        if (p >= cols.cols()) idx.push_back(p - cols.cols());
    return idx;
}

}  // namespace

SubQuot submodule_from_columns(const Rep& n, const std::vector<Mat>& cols_per_vertex) {
    const int nv = n.alg->n_vertices();
    std::vector<Mat> basis(nv, Mat());
    std::vector<int> dims(nv);
    for (int v = 0; v < nv; ++v) {
        basis[v] = column_space(cols_per_vertex[v]);
        dims[v] = basis[v].cols();
    }
    Rep sub = Rep::make(n.alg, dims);
    const Quiver& q = n.alg->quiver();
    for (int a = 0; a < q.n_arrows(); ++a) {
        const Arrow& ar = q.arrows[a];
        auto x = solve(basis[ar.tgt], n.arrow_mats[a] * basis[ar.src]);
        if (!x) throw std::logic_error("submodule_from_columns: span not closed under arrows");
        sub.arrow_mats[a] = *x;
    }
    Mor incl;
    incl.src = sub;
    incl.dst = n;
    incl.comps = basis;
    return {sub, incl};
}

SubQuot kernel(const Mor& f) {
    const int nv = f.src.alg->n_vertices();
    std::vector<Mat> cols(nv);
    for (int v = 0; v < nv; ++v) cols[v] = nullspace(f.comps[v]);
    return submodule_from_columns(f.src, cols);
}

SubQuot image(const Mor& f) {
    const int nv = f.src.alg->n_vertices();
    std::vector<Mat> cols(nv);
    for (int v = 0; v < nv; ++v) cols[v] = f.comps[v];
    return submodule_from_columns(f.dst, cols);
}

SubQuot cokernel(const Mor& f) {
    const Rep& n = f.dst;
    const int nv = n.alg->n_vertices();
    const FieldSpec& F = n.alg->field();
    std::vector<Mat> qmaps(nv), sects(nv);
    std::vector<int> dims(nv);
    for (int v = 0; v < nv; ++v) {
        Mat b = column_space(f.comps[v]);
        std::vector<int> comp = complement_indices(b);
        dims[v] = static_cast<int>(comp.size());
        Mat sect(F, n.dims[v], dims[v]);
        for (size_t k = 0; k < comp.size(); ++k) sect.at(comp[k], static_cast<int>(k)) = Scalar::one(F);
        Mat u = Mat::hstack(b, sect);
        Mat uinv = *inverse(u);
        qmaps[v] = uinv.block(b.cols(), 0, dims[v], n.dims[v]);
        sects[v] = sect;
    }
    Rep quot = Rep::make(n.alg, dims);
    const Quiver& q = n.alg->quiver();
    for (int a = 0; a < q.n_arrows(); ++a) {
        const Arrow& ar = q.arrows[a];
        quot.arrow_mats[a] = qmaps[ar.tgt] * n.arrow_mats[a] * sects[ar.src];
    }
    Mor proj;
    proj.src = n;
    proj.dst = quot;
    proj.comps = qmaps;
    return {quot, proj};
}

SubQuot trace_submodule(const Rep& m, const Rep& n) {
    if (m.alg != n.alg) throw AlgebraMismatch();
    const int nv = n.alg->n_vertices();
    std::vector<Mat> cols(nv);
    for (int v = 0; v < nv; ++v) cols[v] = Mat(n.alg->field(), n.dims[v], 0);
    for (const Mor& f : hom_basis(m, n))
        for (int v = 0; v < nv; ++v) cols[v] = Mat::hstack(cols[v], f.comps[v]);
    return submodule_from_columns(n, cols);
}

std::vector<int> composition_multiplicities(const Rep& m) { return m.dims; }

// ---------------------------------------------------------------------------
// Simples, projectives, injectives, direct sums
// ---------------------------------------------------------------------------

namespace {

void check_vertex(const AlgebraPtr& a, int v) {
    if (v < 0 || v >= a->n_vertices())
        throw std::out_of_range("unknown vertex index " + std::to_string(v));
}

// representation on a set of basis paths closed under left multiplication
Rep rep_on_basis_subset(AlgebraPtr a, const std::vector<int>& subset) {
    const int nv = a->n_vertices();
    std::vector<std::vector<int>> by_vertex(nv);
    std::vector<int> local(a->dim(), -1);
    for (int b : subset) {
        local[b] = static_cast<int>(by_vertex[a->basis_tgt(b)].size());
        by_vertex[a->basis_tgt(b)].push_back(b);
    }
    std::vector<int> dims(nv);
    for (int v = 0; v < nv; ++v) dims[v] = static_cast<int>(by_vertex[v].size());
    Rep m = Rep::make(a, dims);
    const Quiver& q = a->quiver();
    for (int ar = 0; ar < q.n_arrows(); ++ar) {
        int ab = a->arrow_basis_index(ar);
        int vs = q.arrows[ar].src, vt = q.arrows[ar].tgt;
        for (int c = 0; c < dims[vs]; ++c) {
            int b = by_vertex[vs][c];
            for (const auto& [k, coeff] : a->mult(ab, b)) {
                if (local[k] < 0) throw std::logic_error("rep_on_basis_subset: subset not closed");
                m.arrow_mats[ar].at(local[k], c) += coeff;
            }
        }
    }
    return m;
}

}  // namespace

Rep simple(AlgebraPtr a, int vertex) {
    check_vertex(a, vertex);
    std::vector<int> dims(a->n_vertices(), 0);
    dims[vertex] = 1;
    return Rep::make(std::move(a), dims);
}

Rep projective(AlgebraPtr a, int vertex) {
    check_vertex(a, vertex);
    return rep_on_basis_subset(a, a->basis_with_source(vertex));
}

Rep injective(AlgebraPtr a, int vertex) {
    check_vertex(a, vertex);
    return dual_module(projective(a->opposite(), vertex));
}

DirectSum direct_sum(const std::vector<Rep>& parts) {
    if (parts.empty()) throw std::logic_error("direct_sum: empty");
    AlgebraPtr a = parts[0].alg;
    const int nv = a->n_vertices();
    std::vector<int> dims(nv, 0);
    for (const Rep& p : parts) {
        if (p.alg != a) throw AlgebraMismatch();
        for (int v = 0; v < nv; ++v) dims[v] += p.dims[v];
    }
    Rep sum = Rep::make(a, dims);
    std::vector<int> off(nv, 0);
    DirectSum out;
    std::vector<std::vector<int>> offsets;  // per part, per vertex
    for (const Rep& p : parts) {
        offsets.push_back(off);
        for (int ar = 0; ar < a->quiver().n_arrows(); ++ar) {
            const Arrow& q = a->quiver().arrows[ar];
            sum.arrow_mats[ar].set_block(off[q.tgt], off[q.src], p.arrow_mats[ar]);
        }
        for (int v = 0; v < nv; ++v) off[v] += p.dims[v];
    }
    out.rep = sum;
    for (size_t k = 0; k < parts.size(); ++k) {
        Mor incl = Mor::zero(parts[k], sum);
        Mor proj = Mor::zero(sum, parts[k]);
        for (int v = 0; v < nv; ++v)
            for (int i = 0; i < parts[k].dims[v]; ++i) {
                incl.comps[v].at(offsets[k][v] + i, i) = Scalar::one(a->field());
                proj.comps[v].at(i, offsets[k][v] + i) = Scalar::one(a->field());
            }
        out.incl.push_back(std::move(incl));
        out.proj.push_back(std::move(proj));
    }
    return out;
}

// ---------------------------------------------------------------------------
// FDAlgebra: radical, idempotents
// ---------------------------------------------------------------------------

namespace {

// dense polynomials, lowest degree first
using Poly = std::vector<Scalar>;

Poly poly_trim(Poly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

int poly_deg(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly poly_mul(const FieldSpec& f, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Scalar::zero(f));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return poly_trim(r);
}

Poly poly_sub(const FieldSpec& f, Poly a, const Poly& b) {
    a.resize(std::max(a.size(), b.size()), Scalar::zero(f));
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    return poly_trim(a);
}

// a = q b + r
std::pair<Poly, Poly> poly_divmod(const FieldSpec& f, Poly a, const Poly& b) {
    Poly q(a.size(), Scalar::zero(f));
    while (poly_deg(a) >= poly_deg(b) && !a.empty()) {
        Scalar c = a.back() / b.back();
        int shift = poly_deg(a) - poly_deg(b);
        q[shift] = c;
        Poly t(shift, Scalar::zero(f));
        t.insert(t.end(), b.begin(), b.end());
        for (auto& x : t) x *= c;
        a = poly_sub(f, a, t);
    }
    return {poly_trim(q), a};
}

Scalar poly_eval(const FieldSpec& f, const Poly& p, const Scalar& x) {
    Scalar r = Scalar::zero(f);
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

// returns (g, u, w) with u a + w b = g = gcd (g monic)
std::tuple<Poly, Poly, Poly> poly_xgcd(const FieldSpec& f, Poly a, Poly b) {
    Poly u0{Scalar::one(f)}, w0{}, u1{}, w1{Scalar::one(f)};
    while (!b.empty()) {
        auto [q, r] = poly_divmod(f, a, b);
        a = b;
        b = r;
        Poly u2 = poly_sub(f, u0, poly_mul(f, q, u1));
        Poly w2 = poly_sub(f, w0, poly_mul(f, q, w1));
        u0 = u1;
        w0 = w1;
        u1 = u2;
        w1 = w2;
    }
    if (!a.empty() && !a.back().is_one()) {
        Scalar inv = a.back().inverse();
        for (auto& x : a) x *= inv;
        for (auto& x : u0) x *= inv;
        for (auto& x : w0) x *= inv;
    }
    return {a, u0, w0};
}

}  // namespace

Mat FDAlgebra::lmul_of(const Mat& x) const {
    Mat out(field, n, n);
    for (int i = 0; i < n; ++i)
        if (!x.at(i, 0).is_zero()) out = out + left_mult[i] * x.at(i, 0);
    return out;
}

Mat FDAlgebra::rmul_of(const Mat& x) const {
    // column j of result = b_j * x = L_j x
    Mat out(field, n, n);
    for (int j = 0; j < n; ++j) {
        Mat col = left_mult[j] * x;
        out.set_block(0, j, col);
    }
    return out;
}

bool FDAlgebra::is_idempotent(const Mat& x) const { return multiply(x, x) == x; }

std::vector<Scalar> FDAlgebra::minimal_polynomial(const Mat& x) const {
    Mat powers = unit;  // columns: 1, x, x^2, ...
    Mat cur = unit;
    for (;;) {
        cur = multiply(x, cur);
        auto c = solve(powers, cur);
        if (c) {
            Poly mu(powers.cols() + 1, Scalar::zero(field));
            for (int i = 0; i < powers.cols(); ++i) mu[i] = -c->at(i, 0);
            mu[powers.cols()] = Scalar::one(field);
            return mu;
        }
        powers = Mat::hstack(powers, cur);
    }
}

Mat FDAlgebra::radical_basis() const {
    const FieldSpec& f = field;
    if (n == 0) return Mat(f, 0, 0);
    if (!f.is_prime_field()) {
        // char 0: kernel of the trace form of the regular representation
        Mat gram(f, n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                Mat prod = left_mult[i] * left_mult[j];
                Scalar tr = Scalar::zero(f);
                for (int k = 0; k < n; ++k) tr += prod.at(k, k);
                gram.at(i, j) = tr;
                gram.at(j, i) = tr;
            }
        return nullspace(gram);
    }

    // char p (prime field): Friedl-Ronyai descent.  Lift the regular
    // representation to integer matrices; the k-th refinement uses the
    // bilinear form (x, y) -> Tr((xy)^{p^k}) / p^k reduced mod p.
    const std::uint32_t p = f.p;
    FieldSpec QQ = FieldSpec::rationals();
    std::vector<Mat> lifted;
    for (int i = 0; i < n; ++i) {
        Mat L(QQ, n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) L.at(r, c) = Scalar(QQ, left_mult[i].at(r, c).value());
        lifted.push_back(std::move(L));
    }
    Mat bas = Mat::identity(f, n);
    BigInt pk = 1;
    for (;;) {
        int m = bas.cols();
        if (m == 0) break;
        std::vector<Mat> lift_b(m, Mat(QQ, n, n));
        for (int r = 0; r < m; ++r)
            for (int i = 0; i < n; ++i)
                if (!bas.at(i, r).is_zero())
                    lift_b[r] = lift_b[r] + lifted[i] * Scalar(QQ, bas.at(i, r).value());
        Mat gram(f, m, m);
        for (int r = 0; r < m; ++r)
            for (int s = 0; s < m; ++s) {
                Mat prod = lift_b[r] * lift_b[s];
                unsigned e = static_cast<unsigned>(pk.convert_to<long long>());
                Mat pw = prod.pow(e);
                BigRat tr = 0;
                for (int k = 0; k < n; ++k) tr += pw.at(k, k).value();
                BigInt num = numerator(tr);
                if (num % pk != 0) throw std::logic_error("radical_basis: divisibility failure in descent");
                gram.at(r, s) = Scalar(f, BigRat(num / pk));
            }
        bas = bas * nullspace(gram);
        // re-reduce to a clean deterministic basis
        bas = column_space(bas);
        if (pk >= n) break;
        pk *= p;
    }
    return bas;
}

std::optional<Mat> FDAlgebra::lift_idempotent(Mat e, int max_iter) const {
    for (int i = 0; i < max_iter; ++i) {
        if (is_idempotent(e)) return e;
        Mat e2 = multiply(e, e);
        e = e2 * Scalar(field, 3) - multiply(e, e2) * Scalar(field, 2);
    }
    return std::nullopt;
}

namespace {

struct QuotientAlgebra {
    FDAlgebra alg;
    Mat proj;  // n_big -> n_small coordinates
    Mat sect;  // n_small -> n_big
};

QuotientAlgebra quotient_algebra(const FDAlgebra& a, const Mat& ideal_cols) {
    const FieldSpec& f = a.field;
    Mat b = column_space(ideal_cols);
    std::vector<int> comp = complement_indices(b);
    int s = static_cast<int>(comp.size());
    Mat sect(f, a.n, s);
    for (size_t k = 0; k < comp.size(); ++k) sect.at(comp[k], static_cast<int>(k)) = Scalar::one(f);
    Mat u = Mat::hstack(b, sect);
    Mat uinv = *inverse(u);
    Mat proj = uinv.block(b.cols(), 0, s, a.n);
    FDAlgebra q;
    q.field = f;
    q.n = s;
    q.unit = proj * a.unit;
    for (int i = 0; i < s; ++i) q.left_mult.push_back(proj * a.lmul_of(sect.col(i)) * sect);
    return {q, proj, sect};
}

std::vector<Scalar> coeff_pool(const FieldSpec& f) {
    return {Scalar::one(f), -Scalar::one(f), Scalar(f, 2), Scalar(f, -2)};
}

}  // namespace

std::optional<Mat> FDAlgebra::find_nontrivial_idempotent() const {
    if (n <= 1) return std::nullopt;
    Mat rad = radical_basis();
    QuotientAlgebra qa = quotient_algebra(*this, rad);
    const FDAlgebra& S = qa.alg;
    const FieldSpec& f = field;
    if (S.n <= 1) return std::nullopt;

    auto finish = [&](const Mat& e_s) -> std::optional<Mat> {
        auto lifted = lift_idempotent(qa.sect * e_s);
        if (!lifted) return std::nullopt;
        if (lifted->is_zero() || *lifted == unit) return std::nullopt;
        return lifted;
    };

    // small prime field: exhaustive scan of the semisimple quotient
    if (f.is_prime_field()) {
        double logsz = S.n * std::log2(static_cast<double>(f.p));
        if (logsz <= 16.0) {
            std::vector<int> digits(S.n, 0);
            for (;;) {
                Mat e(f, S.n, 1);
                for (int i = 0; i < S.n; ++i) e.at(i, 0) = Scalar(f, digits[i]);
                if (!e.is_zero() && e != S.unit && S.is_idempotent(e)) {
                    auto r = finish(e);
                    if (r) return r;
                }
                int i = 0;
                while (i < S.n && ++digits[i] == static_cast<int>(f.p)) digits[i++] = 0;
                if (i == S.n) break;
            }
            return std::nullopt;
        }
    }

    // sweep elements of S; split the minimal polynomial at a root
    std::vector<Mat> candidates;
    for (int i = 0; i < S.n; ++i) {
        Mat e(f, S.n, 1);
        e.at(i, 0) = Scalar::one(f);
        candidates.push_back(e);
    }
    int singles = static_cast<int>(candidates.size());
    for (int i = 0; i < singles; ++i)
        for (int j = i + 1; j < singles; ++j) {
            candidates.push_back(candidates[i] + candidates[j]);
            candidates.push_back(candidates[i] - candidates[j]);
            candidates.push_back(S.multiply(candidates[i], candidates[j]));
        }
    std::mt19937_64 rng(0x517a7aULL);  // fixed seed: results must be deterministic
    auto pool = coeff_pool(f);
    for (int t = 0; t < 64; ++t) {
        Mat z(f, S.n, 1);
        for (int i = 0; i < S.n; ++i) {
            auto r = rng() % (pool.size() + 2);
            z.at(i, 0) = r < pool.size() ? pool[r] : Scalar::zero(f);
        }
        candidates.push_back(z);
    }

    for (const Mat& z : candidates) {
        if (z.is_zero()) continue;
        Poly mu = S.minimal_polynomial(z);
        if (poly_deg(mu) < 2) continue;
        // candidate roots
        std::vector<Scalar> roots;
        if (f.is_prime_field() && f.p <= 97) {
            for (std::uint32_t v = 0; v < f.p; ++v) roots.push_back(Scalar(f, static_cast<long>(v)));
        } else {
            for (long v = 0; v <= 50; ++v) {
                roots.push_back(Scalar(f, v));
                if (v) roots.push_back(Scalar(f, -v));
            }
            roots.push_back(Scalar::from_string(f, "1/2"));
            roots.push_back(Scalar::from_string(f, "-1/2"));
        }
        for (const Scalar& lam : roots) {
            if (!poly_eval(f, mu, lam).is_zero()) continue;
            // mu = (T - lam)^k * h with h(lam) != 0
            Poly lin{-lam, Scalar::one(f)};
            Poly h = mu;
            Poly g{Scalar::one(f)};
            while (true) {
                auto [q, r] = poly_divmod(f, h, lin);
                if (!r.empty()) break;
                h = q;
                g = poly_mul(f, g, lin);
            }
            if (h.empty() || poly_deg(g) == 0 || poly_deg(g) == poly_deg(mu)) continue;
            auto [gcd, u, w] = poly_xgcd(f, g, h);
            if (poly_deg(gcd) != 0) continue;
            // e = (w*h)(z), idempotent in F[z]/(mu)
            Poly wh = poly_mul(f, w, h);
            auto [q2, wh_red] = poly_divmod(f, wh, mu);
            Mat e(f, S.n, 1);
            for (int i = poly_deg(wh_red); i >= 0; --i) e = S.multiply(z, e) + S.unit * wh_red[i];
            if (e.is_zero() || e == S.unit || !S.is_idempotent(e)) continue;
            auto res = finish(e);
            if (res) return res;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// End algebra
// ---------------------------------------------------------------------------

namespace {

Mat flatten_mor(const Mor& f) {
    int total = 0;
    for (const Mat& m : f.comps) total += m.rows() * m.cols();
    Mat out(f.src.alg->field(), total, 1);
    int k = 0;
    for (const Mat& m : f.comps)
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) out.at(k++, 0) = m.at(r, c);
    return out;
}

}  // namespace

EndAlgebra end_algebra(const Rep& m) {
    EndAlgebra e;
    e.basis = hom_basis(m, m);
    const FieldSpec& f = m.alg->field();
    int n = static_cast<int>(e.basis.size());
    e.algebra.field = f;
    e.algebra.n = n;
    if (n == 0) {
        e.algebra.unit = Mat(f, 0, 1);
        e.radical = Mat(f, 0, 0);
        return e;
    }
    Mat flat(f, flatten_mor(e.basis[0]).rows(), n);
    for (int i = 0; i < n; ++i) flat.set_block(0, i, flatten_mor(e.basis[i]));
    for (int i = 0; i < n; ++i) {
        Mat L(f, n, n);
        for (int j = 0; j < n; ++j) {
            Mat prod = flatten_mor(compose(e.basis[i], e.basis[j]));
            L.set_block(0, j, coordinates_in(flat, prod));
        }
        e.algebra.left_mult.push_back(std::move(L));
    }
    e.algebra.unit = coordinates_in(flat, flatten_mor(Mor::identity(m)));
    e.radical = e.algebra.radical_basis();
    return e;
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

namespace {

Mor mor_from_coords(const std::vector<Mor>& basis, const Mat& coords) {
    Mor f = Mor::zero(basis[0].src, basis[0].dst);
    for (size_t i = 0; i < basis.size(); ++i)
        if (!coords.at(static_cast<int>(i), 0).is_zero()) f = f + basis[i].scaled(coords.at(static_cast<int>(i), 0));
    return f;
}

Mor mor_power(const Mor& f, int e) {
    Mor r = f;
    for (int i = 1; i < e; ++i) r = compose(f, r);
    return r;
}

struct Split {
    DecPiece a, b;
};

// complementary projections for an internal direct sum m = U + V given by inclusions
Split make_split(const Rep& m, const SubQuot& u, const SubQuot& v) {
    const int nv = m.alg->n_vertices();
    const FieldSpec& f = m.alg->field();
    Mor proj_u = Mor::zero(m, u.rep), proj_v = Mor::zero(m, v.rep);
    for (int w = 0; w < nv; ++w) {
        Mat joint = Mat::hstack(u.map.comps[w], v.map.comps[w]);
        auto inv = inverse(joint);
        if (!inv) throw std::logic_error("make_split: summands do not span");
        proj_u.comps[w] = inv->block(0, 0, u.rep.dims[w], m.dims[w]);
        proj_v.comps[w] = inv->block(u.rep.dims[w], 0, v.rep.dims[w], m.dims[w]);
    }
    return {{u.rep, u.map, proj_u}, {v.rep, v.map, proj_v}};
}

std::optional<Split> split_once(const Rep& m, bool reverse_sweep) {
    std::vector<Mor> h = hom_basis(m, m);
    if (h.size() <= 1) return std::nullopt;
    const FieldSpec& f = m.alg->field();
    const int total = m.total_dim();

    std::vector<Mor> sweep;
    for (const Mor& x : h) sweep.push_back(x);
    for (size_t i = 0; i < h.size(); ++i)
        for (size_t j = i + 1; j < h.size(); ++j) {
            sweep.push_back(h[i] + h[j]);
            sweep.push_back(h[i] - h[j]);
            sweep.push_back(compose(h[i], h[j]));
        }
    std::mt19937_64 rng(0xdec0deULL);
    auto pool = coeff_pool(f);
    for (int t = 0; t < 64; ++t) {
        Mor z = Mor::zero(m, m);
        for (const Mor& x : h) {
            auto r = rng() % (pool.size() + 2);
            if (r < pool.size()) z = z + x.scaled(pool[r]);
        }
        sweep.push_back(z);
    }
    if (reverse_sweep) std::reverse(sweep.begin(), sweep.end());

    // Fitting: for f neither nilpotent nor invertible, M = ker f^N + im f^N
    for (const Mor& cand : sweep) {
        Mor fn = mor_power(cand, total);
        int r = 0;
        for (const Mat& c : fn.comps) r += rank(c);
        if (r == 0 || r == total) continue;
        return make_split(m, kernel(fn), image(fn));
    }

    EndAlgebra e = end_algebra(m);
    auto idem = e.algebra.find_nontrivial_idempotent();
    if (idem) {
        Mor em = mor_from_coords(e.basis, *idem);
        return make_split(m, image(em), kernel(em));
    }
    return std::nullopt;
}

void decompose_rec(const DecPiece& piece, bool reverse_sweep, std::vector<DecPiece>& out) {
    auto split = split_once(piece.rep, reverse_sweep);
    if (!split) {
        out.push_back(piece);
        return;
    }
    for (DecPiece* part : {&split->a, &split->b}) {
        DecPiece composed{part->rep, compose(piece.incl, part->incl), compose(part->proj, piece.proj)};
        decompose_rec(composed, reverse_sweep, out);
    }
}

std::optional<Mor> iso_witness(const Rep& m, const Rep& n, bool allow_decompose);

}  // namespace

Decomposition decompose(const Rep& m, bool reverse_sweep) {
    Decomposition d;
    if (m.is_zero_module()) return d;
    DecPiece whole{m, Mor::identity(m), Mor::identity(m)};
    decompose_rec(whole, reverse_sweep, d.pieces);
    std::vector<bool> grouped(d.pieces.size(), false);
    for (size_t i = 0; i < d.pieces.size(); ++i) {
        if (grouped[i]) continue;
        int mult = 1;
        for (size_t j = i + 1; j < d.pieces.size(); ++j) {
            if (grouped[j] || d.pieces[i].rep.dims != d.pieces[j].rep.dims) continue;
            if (iso_witness(d.pieces[i].rep, d.pieces[j].rep, false)) {
                grouped[j] = true;
                ++mult;
            }
        }
        d.iso_classes.emplace_back(static_cast<int>(i), mult);
    }
    return d;
}

bool is_indecomposable(const Rep& m) {
    if (m.is_zero_module()) throw ZeroModule("is_indecomposable");
    if (hom_dim(m, m) == 1) return true;
    return decompose(m).pieces.size() == 1;
}

// ---------------------------------------------------------------------------
// Isomorphism testing
// ---------------------------------------------------------------------------

namespace {

std::optional<Mor> iso_witness(const Rep& m, const Rep& n, bool allow_decompose) {
    if (m.alg != n.alg) throw AlgebraMismatch();
    if (m.dims != n.dims) return std::nullopt;
    if (m.total_dim() == 0) return Mor::zero(m, n);
    std::vector<Mor> h = hom_basis(m, n);
    if (h.empty()) return std::nullopt;
    auto check = [](const Mor& f) { return f.is_isomorphism(); };

    for (const Mor& f : h)
        if (check(f)) return f;
    const FieldSpec& F = m.alg->field();
    auto pool = coeff_pool(F);
    for (size_t i = 0; i < h.size(); ++i)
        for (size_t j = i + 1; j < h.size(); ++j)
            for (const Scalar& a : pool)
                for (const Scalar& b : pool) {
                    Mor f = h[i].scaled(a) + h[j].scaled(b);
                    if (check(f)) return f;
                }
    std::mt19937_64 rng(0x150c0deULL);
    for (int t = 0; t < 200; ++t) {
        Mor f = Mor::zero(m, n);
        for (const Mor& x : h) {
            auto r = rng() % (pool.size() + 2);
            if (r < pool.size()) f = f + x.scaled(pool[r]);
        }
        if (check(f)) return f;
    }

    if (!allow_decompose) return std::nullopt;
    Decomposition dm = decompose(m), dn = decompose(n);
    if (dm.pieces.size() != dn.pieces.size()) return std::nullopt;
    std::vector<bool> used(dn.pieces.size(), false);
    Mor witness = Mor::zero(m, n);
    for (const DecPiece& pm : dm.pieces) {
        bool matched = false;
        for (size_t j = 0; j < dn.pieces.size(); ++j) {
            if (used[j]) continue;
            auto w = iso_witness(pm.rep, dn.pieces[j].rep, false);
            if (w) {
                used[j] = true;
                matched = true;
                witness = witness + compose(dn.pieces[j].incl, compose(*w, pm.proj));
                break;
            }
        }
        if (!matched) return std::nullopt;
    }
    if (witness.is_isomorphism()) return witness;
    return std::nullopt;
}

}  // namespace

std::optional<Mor> is_isomorphic(const Rep& m, const Rep& n) { return iso_witness(m, n, true); }

// ---------------------------------------------------------------------------
// Projective covers, duality, homological dimension bounds
// ---------------------------------------------------------------------------

SubQuot radical_submodule(const Rep& m) {
    const int nv = m.alg->n_vertices();
    std::vector<Mat> cols(nv);
    for (int v = 0; v < nv; ++v) cols[v] = Mat(m.alg->field(), m.dims[v], 0);
    const Quiver& q = m.alg->quiver();
    for (int a = 0; a < q.n_arrows(); ++a)
        cols[q.arrows[a].tgt] = Mat::hstack(cols[q.arrows[a].tgt], m.arrow_mats[a]);
    return submodule_from_columns(m, cols);
}

std::vector<int> top_multiplicities(const Rep& m) {
    SubQuot rad = radical_submodule(m);
    std::vector<int> t(m.dims.size());
    for (size_t v = 0; v < m.dims.size(); ++v) t[v] = m.dims[v] - rad.rep.dims[v];
    return t;
}

Mor mor_from_generator(const Rep& p, int gen_vertex, const Rep& m, const Mat& value) {
    // the map P(gen_vertex) -> m sending e_v to `value`; basis path b goes to b . value
    Mor comp = Mor::zero(p, m);
    const int nv = m.alg->n_vertices();
    std::vector<int> counter(nv, 0);
    for (int b : m.alg->basis_with_source(gen_vertex)) {
        int tv = m.alg->basis_tgt(b);
        Mat val = m.basis_action_block(b) * value;
        int col = counter[tv]++;
        for (int r = 0; r < m.dims[tv]; ++r) comp.comps[tv].at(r, col) = val.at(r, 0);
    }
    return comp;
}

CoverData projective_cover_data(const Rep& m) {
    const int nv = m.alg->n_vertices();
    const FieldSpec& f = m.alg->field();
    CoverData out;
    if (m.is_zero_module()) {
        out.cover = Rep::zero(m.alg);
        out.map = Mor::zero(out.cover, m);
        return out;
    }
    SubQuot rad = radical_submodule(m);
    std::vector<Rep> parts;
    std::vector<std::pair<int, Mat>> generators;  // (vertex, chosen top representative)
    for (int v = 0; v < nv; ++v) {
        for (int c : complement_indices(rad.map.comps[v])) {
            parts.push_back(projective(m.alg, v));
            Mat rep(f, m.dims[v], 1);
            rep.at(c, 0) = Scalar::one(f);
            generators.emplace_back(v, rep);
        }
    }
    DirectSum cover = direct_sum(parts);
    Mor map = Mor::zero(cover.rep, m);
    for (size_t k = 0; k < parts.size(); ++k) {
        auto [v, gen] = generators[k];
        out.gens.push_back(v);
        map = map + compose(mor_from_generator(parts[k], v, m, gen), cover.proj[k]);
    }
    if (!map.is_surjective()) throw std::logic_error("projective_cover: lifted map is not surjective");
    out.cover = cover.rep;
    out.incl = std::move(cover.incl);
    out.proj = std::move(cover.proj);
    out.map = std::move(map);
    return out;
}

Mor projective_cover(const Rep& m) { return projective_cover_data(m).map; }

bool is_projective(const Rep& m) {
    if (m.is_zero_module()) return true;
    Mor cover = projective_cover(m);
    return cover.src.dims == m.dims;
}

Rep dual_module(const Rep& m) {
    AlgebraPtr op = m.alg->opposite();
    Rep d = Rep::make(op, m.dims);
    for (int a = 0; a < m.alg->quiver().n_arrows(); ++a) d.arrow_mats[a] = m.arrow_mats[a].transpose();
    return d;
}

bool projective_dimension_at_most(const Rep& m, int n) {
    Rep cur = m;
    for (int k = 0; k <= n; ++k) {
        if (cur.is_zero_module()) return true;
        Mor cover = projective_cover(cur);
        if (cover.src.dims == cur.dims) return true;  // cur is projective
        cur = kernel(cover).rep;
    }
    return cur.is_zero_module();
}

bool injective_dimension_at_most(const Rep& m, int n) {
    return projective_dimension_at_most(dual_module(m), n);
}

// ---------------------------------------------------------------------------
// Change of rings along an algebra map
// ---------------------------------------------------------------------------

RingMap RingMap::identity(AlgebraPtr a) {
    RingMap phi;
    phi.from = a;
    phi.to = a;
    for (int v = 0; v < a->n_vertices(); ++v)
        phi.vertex_images.push_back({{a->idempotent(v), Scalar::one(a->field())}});
    for (int ar = 0; ar < a->quiver().n_arrows(); ++ar)
        phi.arrow_images.push_back({{a->arrow_basis_index(ar), Scalar::one(a->field())}});
    return phi;
}

void RingMap::validate() const {
    const FieldSpec& f = to->field();
    auto eq = [](const Algebra::SparseVec& a, const Algebra::SparseVec& b) { return a == b; };
    // orthogonal idempotents summing to 1
    Algebra::SparseVec sum;
    for (int i = 0; i < from->n_vertices(); ++i) {
        for (int j = 0; j < from->n_vertices(); ++j) {
            auto prod = to->mult_vec(vertex_images[i], vertex_images[j]);
            if (i == j ? !eq(prod, vertex_images[i]) : !prod.empty())
                throw NotAnAlgebraMap("vertex images are not orthogonal idempotents");
        }
        for (const auto& [b, c] : vertex_images[i]) {
            bool found = false;
            for (auto& [bb, cc] : sum)
                if (bb == b) {
                    cc += c;
                    found = true;
                }
            if (!found) sum.emplace_back(b, c);
        }
    }
    std::sort(sum.begin(), sum.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    sum.erase(std::remove_if(sum.begin(), sum.end(), [](const auto& e) { return e.second.is_zero(); }), sum.end());
    Algebra::SparseVec unit;
    for (int v = 0; v < to->n_vertices(); ++v) unit.emplace_back(to->idempotent(v), Scalar::one(f));
    if (!eq(sum, unit)) throw NotAnAlgebraMap("vertex images do not sum to 1");
    // arrows sit in the right corner
    for (int a = 0; a < from->quiver().n_arrows(); ++a) {
        const Arrow& ar = from->quiver().arrows[a];
        auto corner = to->mult_vec(vertex_images[ar.tgt], to->mult_vec(arrow_images[a], vertex_images[ar.src]));
        if (!eq(corner, arrow_images[a])) throw NotAnAlgebraMap("arrow image not in the expected corner");
    }
    // relations map to zero
    auto image_of_path = [&](const Path& p) -> Algebra::SparseVec {
        Algebra::SparseVec acc = vertex_images[p.src];
        for (auto it = p.arrows.rbegin(); it != p.arrows.rend(); ++it) acc = to->mult_vec(arrow_images[*it], acc);
        return acc;
    };
    for (const Relation& rel : from->presentation().relations) {
        Algebra::SparseVec acc;
        for (const RelTerm& t : rel) {
            auto img = image_of_path(t.path);
            for (auto& [b, c] : img) {
                bool found = false;
                for (auto& [bb, cc] : acc)
                    if (bb == b) {
                        cc += t.coeff * c;
                        found = true;
                    }
                if (!found) acc.emplace_back(b, t.coeff * c);
            }
        }
        acc.erase(std::remove_if(acc.begin(), acc.end(), [](const auto& e) { return e.second.is_zero(); }),
                  acc.end());
        if (!acc.empty()) throw NotAnAlgebraMap("a relation does not map to zero");
    }
}

Rep restrict_along(const Rep& m, const RingMap& phi) {
    if (m.alg != phi.to) throw AlgebraMismatch();
    phi.validate();
    AlgebraPtr A = phi.from;
    const int nv = A->n_vertices();
    const FieldSpec& f = A->field();
    std::vector<Mat> basis(nv);
    std::vector<int> dims(nv);
    int total = 0;
    for (int v = 0; v < nv; ++v) {
        basis[v] = column_space(m.element_action_total(phi.vertex_images[v]));
        dims[v] = basis[v].cols();
        total += dims[v];
    }
    if (total != m.total_dim()) throw NotAnAlgebraMap("idempotent images do not decompose the module");
    Rep r = Rep::make(A, dims);
    for (int a = 0; a < A->quiver().n_arrows(); ++a) {
        const Arrow& ar = A->quiver().arrows[a];
        Mat act = m.element_action_total(phi.arrow_images[a]);
        auto x = solve(basis[ar.tgt], act * basis[ar.src]);
        if (!x) throw std::logic_error("restrict_along: action leaves the graded pieces");
        r.arrow_mats[a] = *x;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Random modules
// ---------------------------------------------------------------------------

Rep random_module(AlgebraPtr a, std::mt19937_64& rng, int max_summands) {
    const int nv = a->n_vertices();
    for (int attempt = 0; attempt < 32; ++attempt) {
        int k1 = 1 + static_cast<int>(rng() % max_summands);
        int k2 = 1 + static_cast<int>(rng() % max_summands);
        std::vector<Rep> ps, qs;
        std::vector<int> pv, qv;
        for (int i = 0; i < k1; ++i) {
            pv.push_back(static_cast<int>(rng() % nv));
            ps.push_back(projective(a, pv.back()));
        }
        for (int i = 0; i < k2; ++i) {
            qv.push_back(static_cast<int>(rng() % nv));
            qs.push_back(projective(a, qv.back()));
        }
        DirectSum P = direct_sum(ps), Q = direct_sum(qs);
        Mor f = Mor::zero(Q.rep, P.rep);
        for (int r = 0; r < k1; ++r)
            for (int s = 0; s < k2; ++s) {
                // a map P(qv[s]) -> ps[r] is an element of ps[r] at vertex qv[s]
                int v = qv[s];
                if (ps[r].dims[v] == 0) continue;
                Mat gen(a->field(), ps[r].dims[v], 1);
                bool nz = false;
                for (int i = 0; i < ps[r].dims[v]; ++i) {
                    auto roll = rng() % 4;
                    if (roll == 1) gen.at(i, 0) = Scalar::one(a->field()), nz = true;
                    if (roll == 2) gen.at(i, 0) = -Scalar::one(a->field()), nz = true;
                }
                if (!nz) continue;
                Mor comp = Mor::zero(qs[s], ps[r]);
                std::vector<int> counter(nv, 0);
                for (int b : a->basis_with_source(v)) {
                    int tv = a->basis_tgt(b);
                    Mat val = ps[r].basis_action_block(b) * gen;
                    int col = counter[tv]++;
                    for (int i = 0; i < ps[r].dims[tv]; ++i) comp.comps[tv].at(i, col) = val.at(i, 0);
                }
                f = f + compose(P.incl[r], compose(comp, Q.proj[s]));
            }
        Rep result = (rng() % 4 == 0) ? kernel(f).rep : cokernel(f).rep;
        if (!result.is_zero_module()) {
            if (!validate(result).ok) throw std::logic_error("random_module: invalid module generated");
            return result;
        }
    }
    return simple(a, 0);
}

}  // namespace strata
