#include "strata/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

namespace strata {

int Quiver::vertex_index(const std::string& label) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == label) return static_cast<int>(i);
    return -1;
}

int Quiver::arrow_index(const std::string& name) const {
    for (size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].name == name) return static_cast<int>(i);
    return -1;
}

bool Path::operator<(const Path& o) const {
    if (length() != o.length()) return length() < o.length();
    if (src != o.src) return src < o.src;
    if (tgt != o.tgt) return tgt < o.tgt;
    return arrows < o.arrows;
}

std::string Path::to_string(const Quiver& q) const {
    if (is_trivial()) return "e_" + q.vertices[src];
    std::string s;
    for (size_t i = 0; i < arrows.size(); ++i) {
        if (i) s += "*";
        s += q.arrows[arrows[i]].name;
    }
    return s;
}

std::string AlgebraPresentation::to_string() const {
    std::ostringstream os;
    os << "algebra " << name << " over " << (field.is_prime_field() ? "F" + std::to_string(field.p) : "Q")
       << " {\n  vertices:";
    for (const auto& v : quiver.vertices) os << " " << v;
    os << ";\n  arrows:";
    for (size_t i = 0; i < quiver.arrows.size(); ++i) {
        const auto& a = quiver.arrows[i];
        os << (i ? ", " : " ") << a.name << ": " << quiver.vertices[a.src] << " -> " << quiver.vertices[a.tgt];
    }
    os << ";\n";
    if (!relations.empty()) {
        os << "  relations:";
        for (size_t r = 0; r < relations.size(); ++r) {
            os << (r ? ", " : " ");
            for (size_t t = 0; t < relations[r].size(); ++t) {
                Scalar c = relations[r][t].coeff;
                std::string cs = c.to_string();
                bool neg = !cs.empty() && cs[0] == '-';
                if (t == 0) {
                    if (neg) os << "-", cs = cs.substr(1);
                } else {
                    os << (neg ? " - " : " + ");
                    if (neg) cs = cs.substr(1);
                }
                if (cs != "1") os << cs << "*";
                os << relations[r][t].path.to_string(quiver);
            }
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { ident, punct, end };
    Kind kind = Kind::end;
    std::string text;
    SourcePos pos;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }
    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    const std::string& src_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;

    void bump() {
        if (i_ < src_.size() && src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void advance() {
        while (i_ < src_.size()) {
            char c = src_[i_];
            if (c == '#') {
                while (i_ < src_.size() && src_[i_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
        tok_.pos = {line_, col_};
        if (i_ >= src_.size()) {
            tok_ = {Token::Kind::end, "", tok_.pos};
            return;
        }
        char c = src_[i_];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
                s += src_[i_];
                bump();
            }
            tok_ = {Token::Kind::ident, s, tok_.pos};
            return;
        }
        if (c == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '>') {
            bump();
            bump();
            tok_ = {Token::Kind::punct, "->", tok_.pos};
            return;
        }
        static const std::string puncts = "{};:,*+-/";
        if (puncts.find(c) != std::string::npos) {
            bump();
            tok_ = {Token::Kind::punct, std::string(1, c), tok_.pos};
            return;
        }
        throw ParseError(ParseError::Kind::syntax, tok_.pos, std::string("unexpected character '") + c + "'");
    }
};

bool is_integer(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class Parser {
  public:
    explicit Parser(const std::string& src) : lex_(src) {}

    AlgebraPresentation parse() {
        AlgebraPresentation p;
        expect_ident("algebra");
        p.name = expect(Token::Kind::ident, "algebra name").text;
        expect_ident("over");
        p.field = parse_field();
        expect_punct("{");
        expect_ident("vertices");
        expect_punct(":");
        while (lex_.peek().kind == Token::Kind::ident) {
            Token t = lex_.next();
            if (p.quiver.vertex_index(t.text) >= 0)
                throw ParseError(ParseError::Kind::syntax, t.pos, "duplicate vertex '" + t.text + "'");
            p.quiver.vertices.push_back(t.text);
        }
        if (p.quiver.vertices.empty())
            throw ParseError(ParseError::Kind::syntax, lex_.peek().pos, "expected at least one vertex");
        expect_punct(";");
        expect_ident("arrows");
        expect_punct(":");
        while (lex_.peek().kind == Token::Kind::ident) {
            parse_arrow(p);
            if (peek_punct(",")) {
                lex_.next();
                continue;
            }
            break;
        }
        expect_punct(";");
        if (lex_.peek().kind == Token::Kind::ident && lex_.peek().text == "relations") {
            lex_.next();
            expect_punct(":");
            for (;;) {
                parse_relation(p);
                if (peek_punct(",")) {
                    lex_.next();
                    continue;
                }
                break;
            }
            expect_punct(";");
        }
        expect_punct("}");
        if (lex_.peek().kind != Token::Kind::end)
            throw ParseError(ParseError::Kind::syntax, lex_.peek().pos, "trailing input after '}'");
        return p;
    }

  private:
    Lexer lex_;

    Token expect(Token::Kind k, const std::string& what) {
        if (lex_.peek().kind != k)
            throw ParseError(ParseError::Kind::syntax, lex_.peek().pos,
                             "expected " + what + ", found '" + lex_.peek().text + "'");
        return lex_.next();
    }
    void expect_ident(const std::string& kw) {
        Token t = expect(Token::Kind::ident, "'" + kw + "'");
        if (t.text != kw) throw ParseError(ParseError::Kind::syntax, t.pos, "expected '" + kw + "', found '" + t.text + "'");
    }
    void expect_punct(const std::string& s) {
        if (lex_.peek().kind != Token::Kind::punct || lex_.peek().text != s)
            throw ParseError(ParseError::Kind::syntax, lex_.peek().pos,
                             "expected '" + s + "', found '" + lex_.peek().text + "'");
        lex_.next();
    }
    bool peek_punct(const std::string& s) {
        return lex_.peek().kind == Token::Kind::punct && lex_.peek().text == s;
    }

    FieldSpec parse_field() {
        Token t = expect(Token::Kind::ident, "field ('Q' or 'F<p>')");
        if (t.text == "Q") return FieldSpec::rationals();
        if (t.text == "F") {
            Token n = expect(Token::Kind::ident, "prime after 'F'");
            if (!is_integer(n.text))
                throw ParseError(ParseError::Kind::syntax, n.pos, "expected a prime after 'F'");
            return make_prime(n.text, n.pos);
        }
        if (t.text.size() > 1 && t.text[0] == 'F' && is_integer(t.text.substr(1)))
            return make_prime(t.text.substr(1), t.pos);
        throw ParseError(ParseError::Kind::syntax, t.pos, "unknown field '" + t.text + "'");
    }

    FieldSpec make_prime(const std::string& digits, SourcePos pos) {
        unsigned long v = std::stoul(digits);
        if (v > 0xffffffffUL || !is_prime_u32(static_cast<std::uint32_t>(v)))
            throw ParseError(ParseError::Kind::syntax, pos, "'" + digits + "' is not a prime");
        return FieldSpec::prime(static_cast<std::uint32_t>(v));
    }

    void parse_arrow(AlgebraPresentation& p) {
        Token name = expect(Token::Kind::ident, "arrow name");
        if (p.quiver.arrow_index(name.text) >= 0)
            throw ParseError(ParseError::Kind::syntax, name.pos, "duplicate arrow '" + name.text + "'");
        expect_punct(":");
        Token s = expect(Token::Kind::ident, "source vertex");
        expect_punct("->");
        Token t = expect(Token::Kind::ident, "target vertex");
        int si = p.quiver.vertex_index(s.text), ti = p.quiver.vertex_index(t.text);
        if (si < 0) throw ParseError(ParseError::Kind::unknown_vertex, s.pos, "unknown vertex '" + s.text + "'");
        if (ti < 0) throw ParseError(ParseError::Kind::unknown_vertex, t.pos, "unknown vertex '" + t.text + "'");
        p.quiver.arrows.push_back({name.text, si, ti});
    }

    // term := [coeff "*"] IDENT ("*" IDENT)*  with coeff = INT [ "/" INT ]
    RelTerm parse_term(const AlgebraPresentation& p, bool negated) {
        RelTerm term;
        term.coeff = Scalar::one(p.field);
        Token first = expect(Token::Kind::ident, "relation term");
        std::string coeff_text;
        if (is_integer(first.text) && p.quiver.arrow_index(first.text) < 0) {
            coeff_text = first.text;
            if (peek_punct("/")) {
                lex_.next();
                Token den = expect(Token::Kind::ident, "denominator");
                if (!is_integer(den.text))
                    throw ParseError(ParseError::Kind::syntax, den.pos, "expected integer denominator");
                coeff_text += "/" + den.text;
            }
            term.coeff = Scalar::from_string(p.field, coeff_text);
            expect_punct("*");
            first = expect(Token::Kind::ident, "arrow name");
        }
        if (negated) term.coeff = -term.coeff;

        std::vector<Token> word{first};
        while (peek_punct("*")) {
            lex_.next();
            word.push_back(expect(Token::Kind::ident, "arrow name"));
        }
        Path path;
        for (const Token& w : word) {
            int a = p.quiver.arrow_index(w.text);
            if (a < 0) {
                auto kind = p.quiver.vertex_index(w.text) >= 0 ? ParseError::Kind::bad_relation
                                                               : ParseError::Kind::unknown_arrow;
                throw ParseError(kind, w.pos, "'" + w.text + "' is not an arrow");
            }
            if (!path.arrows.empty()) {
                int prev = path.arrows.back();
                if (p.quiver.arrows[prev].src != p.quiver.arrows[a].tgt)
                    throw ParseError(ParseError::Kind::bad_relation, w.pos,
                                     "path not composable at '" + w.text + "'");
            } else {
                path.tgt = p.quiver.arrows[a].tgt;
            }
            path.arrows.push_back(a);
            path.src = p.quiver.arrows[a].src;
        }
        term.path = path;
        return term;
    }

    void parse_relation(AlgebraPresentation& p) {
        SourcePos start = lex_.peek().pos;
        Relation rel;
        bool neg = false;
        if (peek_punct("-")) {
            lex_.next();
            neg = true;
        }
        rel.push_back(parse_term(p, neg));
        while (peek_punct("+") || peek_punct("-")) {
            bool minus = lex_.next().text == "-";
            rel.push_back(parse_term(p, minus));
        }
        // structural validation
        Relation kept;
        for (auto& t : rel)
            if (!t.coeff.is_zero()) kept.push_back(t);
        if (kept.empty()) throw ParseError(ParseError::Kind::bad_relation, start, "relation is identically zero");
        int src = kept[0].path.src, tgt = kept[0].path.tgt, len = kept[0].path.length();
        for (const auto& t : kept) {
            if (t.path.src != src || t.path.tgt != tgt)
                throw ParseError(ParseError::Kind::non_parallel_relation, start,
                                 "relation terms are not parallel paths");
            if (t.path.length() < 2)
                throw ParseError(ParseError::Kind::bad_relation, start, "relation path has length < 2");
            if (t.path.length() != len)
                throw ParseError(ParseError::Kind::bad_relation, start,
                                 "relation terms have different lengths (only length-homogeneous relations are supported)");
        }
        p.relations.push_back(kept);
    }
};

}  // namespace

AlgebraPresentation parse_presentation(const std::string& text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Algebra construction
// ---------------------------------------------------------------------------

namespace {

// sorted sparse vector combination: r += c * v
void axpy(Algebra::SparseVec& r, const Scalar& c, const Algebra::SparseVec& v) {
    if (c.is_zero()) return;
    Algebra::SparseVec out;
    out.reserve(r.size() + v.size());
    size_t i = 0, j = 0;
    while (i < r.size() || j < v.size()) {
        if (j == v.size() || (i < r.size() && r[i].first < v[j].first)) {
            out.push_back(r[i++]);
        } else if (i == r.size() || v[j].first < r[i].first) {
            out.emplace_back(v[j].first, c * v[j].second);
            ++j;
        } else {
            Scalar s = r[i].second + c * v[j].second;
            if (!s.is_zero()) out.emplace_back(r[i].first, s);
            ++i;
            ++j;
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const auto& e) { return e.second.is_zero(); }),
              out.end());
    r = std::move(out);
}

}  // namespace

std::shared_ptr<const Algebra> Algebra::build(const AlgebraPresentation& pres, int max_path_length) {
    std::shared_ptr<Algebra> alg(new Algebra());
    Algebra& A = *alg;
    A.pres_ = pres;
    const Quiver& Q = pres.quiver;
    const FieldSpec& F = pres.field;
    const int nv = Q.n_vertices();
    const int na = Q.n_arrows();

    for (int v = 0; v < nv; ++v) A.basis_.push_back(Path{v, v, {}});

    // lmul[a][basis index] = normal form of arrow_a * basis element
    std::vector<std::vector<SparseVec>> lmul(na);
    std::vector<std::vector<int>> by_degree{std::vector<int>(nv)};
    for (int v = 0; v < nv; ++v) by_degree[0][v] = v;

    A.arrow_basis_.assign(na, -1);

    for (int deg = 1;; ++deg) {
        const auto& prev = by_degree[deg - 1];
        // candidates: arrow * (degree deg-1 normal form)
        struct Cand {
            int arrow, base;
        };
        std::vector<Cand> cands;
        std::vector<std::vector<int>> cand_of(na, std::vector<int>(A.basis_.size(), -1));
        for (int b : prev)
            for (int a = 0; a < na; ++a)
                if (Q.arrows[a].src == A.basis_[b].tgt) {
                    cand_of[a][b] = static_cast<int>(cands.size());
                    cands.push_back({a, b});
                }
        if (cands.empty()) {
            A.max_degree_ = deg - 1;
            break;
        }

        // images of relation * (basis path), reduced into candidate coordinates
        std::vector<std::vector<Scalar>> krows;
        for (const Relation& rel : pres.relations) {
            int len = rel[0].path.length();
            if (len > deg) continue;
            int rel_src = rel[0].path.src;
            for (int q : by_degree[deg - len]) {
                if (A.basis_[q].tgt != rel_src) continue;
                std::vector<Scalar> row(cands.size(), Scalar::zero(F));
                bool nonzero = false;
                for (const RelTerm& term : rel) {
                    SparseVec cur{{q, Scalar::one(F)}};
                    for (int k = len - 1; k >= 1 && !cur.empty(); --k) {
                        int a = term.path.arrows[k];
                        SparseVec next;
                        for (const auto& [b, c] : cur) axpy(next, c, lmul[a][b]);
                        cur = std::move(next);
                    }
                    int a0 = term.path.arrows[0];
                    for (const auto& [b, c] : cur) {
                        int ci = cand_of[a0][b];
                        if (ci < 0) throw std::logic_error("build: non-composable reduction");
                        row[ci] += term.coeff * c;
                        nonzero = true;
                    }
                }
                if (nonzero) krows.push_back(std::move(row));
            }
        }

        Mat K(F, static_cast<int>(krows.size()), static_cast<int>(cands.size()));
        for (size_t r = 0; r < krows.size(); ++r)
            for (size_t c = 0; c < krows[r].size(); ++c) K.at(static_cast<int>(r), static_cast<int>(c)) = krows[r][c];
        std::vector<int> pivots = rref(K);
        std::vector<bool> dead(cands.size(), false);
        for (int p : pivots) dead[p] = true;

        std::vector<int> new_basis_of_cand(cands.size(), -1);
        std::vector<int> level;
        for (size_t c = 0; c < cands.size(); ++c) {
            if (dead[c]) continue;
            const Path& base = A.basis_[cands[c].base];
            Path np;
            np.src = base.src;
            np.tgt = Q.arrows[cands[c].arrow].tgt;
            np.arrows.push_back(cands[c].arrow);
            np.arrows.insert(np.arrows.end(), base.arrows.begin(), base.arrows.end());
            new_basis_of_cand[c] = static_cast<int>(A.basis_.size());
            level.push_back(static_cast<int>(A.basis_.size()));
            A.basis_.push_back(np);
        }

        for (int a = 0; a < na; ++a) lmul[a].resize(A.basis_.size());
        for (size_t c = 0; c < cands.size(); ++c) {
            SparseVec nf;
            if (!dead[c]) {
                nf = {{new_basis_of_cand[c], Scalar::one(F)}};
            } else {
                // pivot row expresses this candidate through surviving ones
                int row = -1;
                for (size_t r = 0; r < pivots.size(); ++r)
                    if (pivots[r] == static_cast<int>(c)) row = static_cast<int>(r);
                for (size_t c2 = 0; c2 < cands.size(); ++c2) {
                    if (dead[c2] || c2 == c) continue;
                    Scalar v = K.at(row, static_cast<int>(c2));
                    if (!v.is_zero()) axpy(nf, -v, {{new_basis_of_cand[c2], Scalar::one(F)}});
                }
            }
            lmul[cands[c].arrow][cands[c].base] = std::move(nf);
        }
        if (deg == 1)
            for (size_t c = 0; c < cands.size(); ++c) A.arrow_basis_[cands[c].arrow] = new_basis_of_cand[c];

        if (level.empty()) {
            A.max_degree_ = deg - 1;
            break;
        }
        by_degree.push_back(level);
        if (deg >= max_path_length) throw NotFiniteDimensional(deg);
    }

    // full multiplication table via the arrow action
    const int n = A.dim();
    A.mult_.assign(static_cast<size_t>(n) * n, {});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Path& pi = A.basis_[i];
            const Path& pj = A.basis_[j];
            if (pi.src != pj.tgt) continue;
            SparseVec cur{{j, Scalar::one(F)}};
            for (int k = pi.length() - 1; k >= 0 && !cur.empty(); --k) {
                int a = pi.arrows[k];
                SparseVec next;
                for (const auto& [b, c] : cur) axpy(next, c, lmul[a][b]);
                cur = std::move(next);
            }
            A.mult_[static_cast<size_t>(i) * n + j] = std::move(cur);
        }
    }

    A.by_source_.assign(nv, {});
    A.by_target_.assign(nv, {});
    for (int i = 0; i < n; ++i) {
        A.by_source_[A.basis_[i].src].push_back(i);
        A.by_target_[A.basis_[i].tgt].push_back(i);
    }
    return alg;
}

Algebra::SparseVec Algebra::mult_vec(const SparseVec& x, const SparseVec& y) const {
    SparseVec r;
    for (const auto& [i, ci] : x)
        for (const auto& [j, cj] : y) axpy(r, ci * cj, mult(i, j));
    return r;
}

Algebra::SparseVec Algebra::reduce_path(const Path& p) const {
    if (p.is_trivial()) return {{idempotent(p.src), Scalar::one(field())}};
    for (size_t k = 0; k + 1 < p.arrows.size(); ++k)
        if (quiver().arrows[p.arrows[k]].src != quiver().arrows[p.arrows[k + 1]].tgt) return {};
    SparseVec cur{{idempotent(p.src), Scalar::one(field())}};
    for (int k = p.length() - 1; k >= 0 && !cur.empty(); --k) {
        int ab = arrow_basis_[p.arrows[k]];
        SparseVec next;
        for (const auto& [b, c] : cur) {
            SparseVec prod = mult(ab, b);
            for (auto& e : prod) e.second = e.second * c;
            axpy(next, Scalar::one(field()), prod);
        }
        cur = std::move(next);
    }
    return cur;
}

bool Algebra::associativity_holds() const {
    const int n = dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (basis_[i].src != basis_[j].tgt) continue;
            SparseVec ij = mult(i, j);
            for (int k = 0; k < n; ++k) {
                SparseVec lhs = mult_vec(ij, {{k, Scalar::one(field())}});
                SparseVec rhs = mult_vec({{i, Scalar::one(field())}}, mult(j, k));
                if (lhs != rhs) return false;
            }
        }
    return true;
}

std::shared_ptr<const Algebra> Algebra::opposite() const {
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (opposite_) return opposite_;
    AlgebraPresentation op;
    // the two algebras point at each other, so (A^op)^op is A itself
    op.name = pres_.name + "_op";
    op.field = pres_.field;
    op.quiver.vertices = pres_.quiver.vertices;
    for (const Arrow& a : pres_.quiver.arrows) op.quiver.arrows.push_back({a.name, a.tgt, a.src});
    for (const Relation& rel : pres_.relations) {
        Relation r;
        for (const RelTerm& t : rel) {
            Path p;
            p.src = t.path.tgt;
            p.tgt = t.path.src;
            p.arrows.assign(t.path.arrows.rbegin(), t.path.arrows.rend());
            r.push_back({t.coeff, p});
        }
        op.relations.push_back(r);
    }
    opposite_ = build(op);
    opposite_->opposite_ = shared_from_this();
    return opposite_;
}

}  // namespace strata
