#include "strata/homology.hpp"

#include <mutex>
#include <sstream>
#include <unordered_map>

namespace strata {

// ---------------------------------------------------------------------------
// Short exact sequences
// ---------------------------------------------------------------------------

bool ShortExact::is_exact() const {
    if (!u.intertwines() || !v.intertwines()) return false;
    if (!u.is_injective() || !v.is_surjective()) return false;
    if (!compose(v, u).is_zero()) return false;
    for (size_t w = 0; w < b.dims.size(); ++w)
        if (a.dims[w] + c.dims[w] != b.dims[w]) return false;
    return true;
}

bool ShortExact::is_split() const {
    // look for r : b -> a with r u = id
    std::vector<Mor> h = hom_basis(b, a);
    if (h.empty()) return a.is_zero_module();
    std::vector<Mor> composed;
    for (const Mor& r : h) composed.push_back(compose(r, u));
    // solve sum x_i (h_i u) = id_a
    int rows = 0;
    for (int d : a.dims) rows += d * d;
    Mat sys(a.alg->field(), rows, static_cast<int>(h.size()));
    Mat rhs(a.alg->field(), rows, 1);
    int r0 = 0;
    for (size_t w = 0; w < a.dims.size(); ++w) {
        for (int i = 0; i < a.dims[w]; ++i)
            for (int j = 0; j < a.dims[w]; ++j) {
                for (size_t k = 0; k < composed.size(); ++k)
                    sys.at(r0, static_cast<int>(k)) = composed[k].comps[w].at(i, j);
                rhs.at(r0, 0) = i == j ? Scalar::one(a.alg->field()) : Scalar::zero(a.alg->field());
                ++r0;
            }
    }
    return solve(sys, rhs).has_value();
}

// ---------------------------------------------------------------------------
// Resolutions
// ---------------------------------------------------------------------------

namespace {

ProjTerm term_from_cover(CoverData&& cd) {
    return ProjTerm{std::move(cd.cover), std::move(cd.gens), std::move(cd.incl), std::move(cd.proj)};
}

void extend_resolution(Resolution& res, SubQuot syzygy, int n) {
    for (int k = static_cast<int>(res.terms.size()); k <= n; ++k) {
        CoverData cd = projective_cover_data(syzygy.rep);
        Mor d = compose(syzygy.map, cd.map);
        Mor next_into = cd.map;
        res.terms.push_back(term_from_cover(std::move(cd)));
        res.diff.push_back(std::move(d));
        syzygy = kernel(next_into);
        // in-ambient inclusion: kernel of cover map, then into the previous term
    }
}

}  // namespace

Resolution projective_resolution(const Rep& m, int n) {
    Resolution res;
    res.module = m;
    CoverData c0 = projective_cover_data(m);
    res.augment = c0.map;
    res.terms.push_back(term_from_cover(std::move(c0)));
    extend_resolution(res, kernel(res.augment), n);
    return res;
}

Resolution padded_resolution(const Rep& m, int n, int pad_vertex) {
    Resolution res;
    res.module = m;
    CoverData c0 = projective_cover_data(m);
    Rep pad = projective(m.alg, pad_vertex);
    DirectSum ds = direct_sum({c0.cover, pad});
    ProjTerm t0;
    t0.rep = ds.rep;
    t0.gens = c0.gens;
    t0.gens.push_back(pad_vertex);
    for (size_t i = 0; i < c0.gens.size(); ++i) {
        t0.incl.push_back(compose(ds.incl[0], c0.incl[i]));
        t0.proj.push_back(compose(c0.proj[i], ds.proj[0]));
    }
    t0.incl.push_back(ds.incl[1]);
    t0.proj.push_back(ds.proj[1]);
    res.augment = compose(c0.map, ds.proj[0]);
    res.terms.push_back(std::move(t0));
    extend_resolution(res, kernel(res.augment), n);
    return res;
}

namespace {

std::string rep_key(const Rep& m) {
    std::ostringstream os;
    os << m.alg.get() << "|" << m.dim_vector_string();
    for (const Mat& a : m.arrow_mats) os << "|" << a.to_string();
    return os.str();
}

}  // namespace

std::shared_ptr<const Resolution> cached_resolution(const Rep& m, int n) {
    static std::mutex mtx;
    static std::unordered_map<std::string, std::shared_ptr<const Resolution>> cache;
    std::string key = rep_key(m);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end() && it->second->length() >= n) return it->second;
    }
    auto fresh = std::make_shared<Resolution>(projective_resolution(m, n));
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[key];
    if (!slot || slot->length() < n) slot = fresh;
    return slot;
}

// ---------------------------------------------------------------------------
// The Hom complex in generator coordinates
// ---------------------------------------------------------------------------

int hom_term_dim(const ProjTerm& t, const Rep& n) {
    int d = 0;
    for (int v : t.gens) d += n.dims[v];
    return d;
}

namespace {

int generator_local_index(const Algebra& alg, int vertex) {
    // position of the trivial path e_v within the vertex block of P(v)
    int counter = 0;
    for (int b : alg.basis_with_source(vertex)) {
        if (alg.basis_tgt(b) != vertex) continue;
        if (b == alg.idempotent(vertex)) return counter;
        ++counter;
    }
    throw std::logic_error("generator_local_index: trivial path missing");
}

}  // namespace

Mat hom_complex_map(const Resolution& res, int k, const Rep& n) {
    const ProjTerm& a = res.terms[k];
    const ProjTerm& b = res.terms[k + 1];
    const Mor& d = res.diff[k];
    const Algebra& alg = *n.alg;
    const FieldSpec& f = n.alg->field();
    Mat out(f, hom_term_dim(b, n), hom_term_dim(a, n));

    std::vector<int> arow(b.n_gens() + 1, 0), acol(a.n_gens() + 1, 0);
    for (int s = 0; s < b.n_gens(); ++s) arow[s + 1] = arow[s] + n.dims[b.gens[s]];
    for (int s = 0; s < a.n_gens(); ++s) acol[s + 1] = acol[s] + n.dims[a.gens[s]];

    for (int sp = 0; sp < b.n_gens(); ++sp) {
        int w = b.gens[sp];
        if (b.rep.dims[w] == 0) continue;
        // image of the sp-th generator under d, an element of a.rep at vertex w
        Mat unit(f, b.incl[sp].src.dims[w], 1);
        unit.at(generator_local_index(alg, w), 0) = Scalar::one(f);
        Mat x = d.comps[w] * (b.incl[sp].comps[w] * unit);
        for (int s = 0; s < a.n_gens(); ++s) {
            int u = a.gens[s];
            Mat y = a.proj[s].comps[w] * x;  // coords over basis paths u -> w
            if (y.is_zero()) continue;
            Mat block(f, n.dims[w], n.dims[u]);
            int local = 0;
            for (int bp : alg.basis_with_source(u)) {
                if (alg.basis_tgt(bp) != w) continue;
                const Scalar& c = y.at(local, 0);
                if (!c.is_zero()) block = block + n.basis_action_block(bp) * c;
                ++local;
            }
            for (int i = 0; i < block.rows(); ++i)
                for (int j = 0; j < block.cols(); ++j) out.at(arow[sp] + i, acol[s] + j) += block.at(i, j);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ext
// ---------------------------------------------------------------------------

ExtSpace ext_space(int n, const Rep& m, const Rep& nn) {
    if (m.alg != nn.alg) throw AlgebraMismatch();
    ExtSpace es;
    es.degree = n;
    es.source = m;
    es.target = nn;
    es.res = cached_resolution(m, n + 1);
    const Resolution& res = *es.res;
    const FieldSpec& f = m.alg->field();

    Mat z = nullspace(hom_complex_map(res, n, nn));
    Mat bd(f, hom_term_dim(res.terms[n], nn), 0);
    if (n > 0) bd = column_space(hom_complex_map(res, n - 1, nn));
    es.boundaries = bd;
    Mat chosen = bd;
    for (int c = 0; c < z.cols(); ++c) {
        Mat cand = Mat::hstack(chosen, z.col(c));
        if (rank(cand) > rank(chosen)) {
            es.cocycles.push_back(z.col(c));
            chosen = cand;
        }
    }
    return es;
}

int ext_dim(int n, const Rep& m, const Rep& nn) { return ext_space(n, m, nn).dim(); }

Mor cocycle_to_mor(const ExtSpace& es, const Mat& coords) {
    const ProjTerm& t = es.res->terms[es.degree];
    const Rep& n = es.target;
    Mor f = Mor::zero(t.rep, n);
    int off = 0;
    for (int s = 0; s < t.n_gens(); ++s) {
        int u = t.gens[s];
        Mat val = coords.block(off, 0, n.dims[u], 1);
        off += n.dims[u];
        if (val.is_zero()) continue;
        f = f + compose(mor_from_generator(t.proj[s].dst, u, n, val), t.proj[s]);
    }
    return f;
}

namespace {

ShortExact pushout_extension(const Resolution& res, const Rep& m, const Rep& a, const Mor& c) {
    // E = coker(P_1 -> A + P_0), x -> (c(x), -d_1(x))
    DirectSum np = direct_sum({a, res.terms[0].rep});
    Mor g = compose(np.incl[0], c) - compose(np.incl[1], res.diff[0]);
    SubQuot ck = cokernel(g);
    ShortExact ses;
    ses.a = a;
    ses.b = ck.rep;
    ses.c = m;
    ses.u = compose(ck.map, np.incl[0]);
    Mor h = compose(res.augment, np.proj[1]);
    ses.v = Mor::zero(ck.rep, m);
    for (size_t w = 0; w < ck.rep.dims.size(); ++w) {
        auto right_inv = solve(ck.map.comps[w], Mat::identity(a.alg->field(), ck.rep.dims[w]));
        if (!right_inv) throw std::logic_error("pushout_extension: projection not surjective");
        ses.v.comps[w] = h.comps[w] * *right_inv;
    }
    if (!ses.is_exact()) throw std::logic_error("pushout_extension: sequence not exact (not a cocycle?)");
    return ses;
}

}  // namespace

ShortExact extension_from_cocycle(const ExtSpace& es, const Mat& coords) {
    if (es.degree != 1) throw std::logic_error("extension_from_cocycle: degree must be 1");
    return pushout_extension(*es.res, es.source, es.target, cocycle_to_mor(es, coords));
}

ShortExact universal_extension(const Rep& m, const Rep& n) {
    ExtSpace es = ext_space(1, m, n);
    if (es.dim() == 0) {
        ShortExact ses;
        ses.a = Rep::zero(m.alg);
        ses.b = m;
        ses.c = m;
        ses.u = Mor::zero(ses.a, m);
        ses.v = Mor::identity(m);
        return ses;
    }
    std::vector<Rep> copies(es.dim(), n);
    DirectSum nd = direct_sum(copies);
    Mor c = Mor::zero(es.res->terms[1].rep, nd.rep);
    for (int i = 0; i < es.dim(); ++i) c = c + compose(nd.incl[i], cocycle_to_mor(es, es.cocycles[i]));
    return pushout_extension(*es.res, m, nd.rep, c);
}

// ---------------------------------------------------------------------------
// Long exact sequence of a short exact sequence
// ---------------------------------------------------------------------------

namespace {

struct CohomSpace {
    Mat reps;        // columns: chosen cocycle representatives
    Mat boundaries;  // columns
    Mat cocycles;    // kernel basis
    int dim() const { return reps.cols(); }
};

CohomSpace cohomology(const Resolution& res, int k, const Rep& n) {
    CohomSpace h;
    Mat z = nullspace(hom_complex_map(res, k, n));
    h.cocycles = z;
    h.boundaries = k > 0 ? column_space(hom_complex_map(res, k - 1, n))
                         : Mat(n.alg->field(), hom_term_dim(res.terms[0], n), 0);
    Mat chosen = h.boundaries;
    h.reps = Mat(n.alg->field(), z.rows(), 0);
    for (int c = 0; c < z.cols(); ++c) {
        Mat cand = Mat::hstack(chosen, z.col(c));
        if (rank(cand) > rank(chosen)) {
            h.reps = Mat::hstack(h.reps, z.col(c));
            chosen = cand;
        }
    }
    return h;
}

// express cochain vectors in cohomology coordinates
Mat to_cohom_coords(const CohomSpace& h, const Mat& vecs) {
    if (h.dim() == 0) return Mat(vecs.field(), 0, vecs.cols());
    Mat basis = Mat::hstack(h.reps, h.boundaries);
    auto x = solve(basis, vecs);
    if (!x) throw std::logic_error("les_check: vector is not a cocycle class");
    return x->block(0, 0, h.dim(), vecs.cols());
}

// post-composition D_k(X) -> D_k(Y) with a morphism X -> Y, blockwise over generators
Mat postcompose_map(const Resolution& res, int k, const Mor& f) {
    const ProjTerm& t = res.terms[k];
    const FieldSpec& field = f.src.alg->field();
    Mat out(field, hom_term_dim(t, f.dst), hom_term_dim(t, f.src));
    int r = 0, c = 0;
    for (int s = 0; s < t.n_gens(); ++s) {
        int v = t.gens[s];
        out.set_block(r, c, f.comps[v]);
        r += f.dst.dims[v];
        c += f.src.dims[v];
    }
    return out;
}

// connecting map on cochain level: lift through v, push through d, pull back through u
Mat connecting_map(const Resolution& res, int k, const ShortExact& ses, const Mat& c_cocycles) {
    const ProjTerm& tk = res.terms[k];
    const ProjTerm& tk1 = res.terms[k + 1];
    const FieldSpec& f = ses.b.alg->field();
    Mat out(f, hom_term_dim(tk1, ses.a), c_cocycles.cols());
    for (int col = 0; col < c_cocycles.cols(); ++col) {
        // lift to B-valued cochain
        Mat gb(f, hom_term_dim(tk, ses.b), 1);
        int offc = 0, offb = 0;
        for (int s = 0; s < tk.n_gens(); ++s) {
            int v = tk.gens[s];
            Mat val(f, ses.c.dims[v], 1);
            for (int i = 0; i < val.rows(); ++i) val.at(i, 0) = c_cocycles.at(offc + i, col);
            auto pre = solve(ses.v.comps[v], val);
            if (!pre) throw std::logic_error("les_check: surjection lift failed");
            gb.set_block(offb, 0, *pre);
            offc += ses.c.dims[v];
            offb += ses.b.dims[v];
        }
        Mat hb = hom_complex_map(res, k, ses.b) * gb;
        int offa = 0;
        offb = 0;
        for (int s = 0; s < tk1.n_gens(); ++s) {
            int w = tk1.gens[s];
            Mat val = hb.block(offb, 0, ses.b.dims[w], 1);
            auto pre = solve(ses.u.comps[w], val);
            if (!pre) throw std::logic_error("les_check: connecting value outside the submodule");
            out.set_block(offa, col, *pre);
            offa += ses.a.dims[w];
            offb += ses.b.dims[w];
        }
    }
    return out;
}

}  // namespace

LesReport les_check(const Rep& m, const ShortExact& ses, int n_max) {
    if (!ses.is_exact()) throw std::logic_error("les_check: input sequence is not exact");
    LesReport report;
    auto res = cached_resolution(m, n_max + 2);

    std::vector<CohomSpace> ha, hb, hc;
    for (int k = 0; k <= n_max + 1; ++k) {
        ha.push_back(cohomology(*res, k, ses.a));
        hb.push_back(cohomology(*res, k, ses.b));
        hc.push_back(cohomology(*res, k, ses.c));
    }

    // cohomology-level maps, three per degree
    std::vector<Mat> maps;    // maps[3k] : H^k(A)->H^k(B), [3k+1]: ->H^k(C), [3k+2]: ->H^{k+1}(A)
    std::vector<int> dims;    // node dimensions in the same order
    std::vector<std::string> labels;
    for (int k = 0; k <= n_max; ++k) {
        std::string deg = k == 0 ? "Hom" : "Ext^" + std::to_string(k);
        labels.push_back(deg + "(M,A)");
        labels.push_back(deg + "(M,B)");
        labels.push_back(deg + "(M,C)");
        dims.push_back(ha[k].dim());
        dims.push_back(hb[k].dim());
        dims.push_back(hc[k].dim());
        maps.push_back(to_cohom_coords(hb[k], postcompose_map(*res, k, ses.u) * ha[k].reps));
        maps.push_back(to_cohom_coords(hc[k], postcompose_map(*res, k, ses.v) * hb[k].reps));
        maps.push_back(to_cohom_coords(ha[k + 1], connecting_map(*res, k, ses, hc[k].reps)));
    }

    // exactness node by node; the first node also checks injectivity of u_*
    int t = static_cast<int>(dims.size());
    for (int i = 0; i < t; ++i) {
        LesNode node{labels[i], dims[i], true};
        int rank_in = i == 0 ? 0 : rank(maps[i - 1]);
        int rank_out = rank(maps[i]);
        if (i > 0) {
            Mat comp = maps[i] * maps[i - 1];
            if (!comp.is_zero()) node.exact_here = false;
        }
        if (rank_in + rank_out != dims[i]) node.exact_here = false;
        if (!node.exact_here) report.exact = false;
        report.nodes.push_back(node);
    }

    long alt = 0;
    for (int i = 0; i < t; ++i) alt += (i % 2 == 0 ? 1 : -1) * dims[i];
    long expected = (t % 2 == 0 ? -1 : 1) * rank(maps[t - 1]);
    report.euler_consistent = (alt == expected);
    if (!report.euler_consistent) report.exact = false;
    return report;
}

}  // namespace strata
