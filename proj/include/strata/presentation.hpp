#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "strata/matrix.hpp"

namespace strata {

struct Arrow {
    std::string name;
    int src = -1;
    int tgt = -1;
};

struct Quiver {
    std::vector<std::string> vertices;
    std::vector<Arrow> arrows;

    int vertex_index(const std::string& label) const;  // -1 if absent
    int arrow_index(const std::string& name) const;
    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_arrows() const { return static_cast<int>(arrows.size()); }
};

/// A path word a_1 * a_2 * ... * a_k, composed like functions: a_k acts
/// first.  Composability means tgt(a_{i+1}) == src(a_i).  The empty word
/// with src == tgt is the trivial path e_i.
struct Path {
    int src = -1;
    int tgt = -1;
    std::vector<int> arrows;  // word order, arrows[k] applied before arrows[k-1]

    int length() const { return static_cast<int>(arrows.size()); }
    bool is_trivial() const { return arrows.empty(); }
    bool operator==(const Path& o) const { return src == o.src && tgt == o.tgt && arrows == o.arrows; }
    bool operator<(const Path& o) const;
    std::string to_string(const Quiver& q) const;
};

struct RelTerm {
    Scalar coeff;
    Path path;
};
using Relation = std::vector<RelTerm>;

struct AlgebraPresentation {
    std::string name;
    FieldSpec field;
    Quiver quiver;
    std::vector<Relation> relations;

    std::string to_string() const;  // pretty-print back to the DSL
};

struct SourcePos {
    int line = 0;
    int column = 0;
};

class ParseError : public std::runtime_error {
  public:
    enum class Kind { syntax, unknown_vertex, unknown_arrow, non_parallel_relation, bad_relation };
    ParseError(Kind k, SourcePos pos, const std::string& msg)
        : std::runtime_error(msg + " (line " + std::to_string(pos.line) + ", column " +
                             std::to_string(pos.column) + ")"),
          kind(k),
          pos(pos) {}
    Kind kind;
    SourcePos pos;
};

/// Parse the textual presentation DSL.  `#` starts a line comment.
AlgebraPresentation parse_presentation(const std::string& text);

class NotFiniteDimensional : public std::runtime_error {
  public:
    explicit NotFiniteDimensional(int degree)
        : std::runtime_error("path space still alive at degree " + std::to_string(degree) +
                             "; algebra not finite dimensional within the configured bound"),
          degree(degree) {}
    int degree;
};

/// A finite-dimensional bound quiver algebra kQ/I with an explicit basis of
/// normal-form paths and a full multiplication table.
///
/// The basis is built degree by degree: candidates at degree d+1 are the
/// products arrow * (normal form of degree d); relation multiples are
/// reduced into candidate coordinates and eliminated by exact row reduction
/// with a fixed pivot order.  Construction stops at the first degree whose
/// whole path space lies in the ideal, which for length-homogeneous
/// relations kills every higher degree as well.
class Algebra : public std::enable_shared_from_this<Algebra> {
  public:
    using SparseVec = std::vector<std::pair<int, Scalar>>;  // basis index -> coeff, indices ascending

    static std::shared_ptr<const Algebra> build(const AlgebraPresentation& pres, int max_path_length = 32);

    const AlgebraPresentation& presentation() const { return pres_; }
    const FieldSpec& field() const { return pres_.field; }
    const Quiver& quiver() const { return pres_.quiver; }
    const std::string& name() const { return pres_.name; }

    int dim() const { return static_cast<int>(basis_.size()); }
    int n_vertices() const { return pres_.quiver.n_vertices(); }
    const Path& basis_path(int i) const { return basis_[i]; }
    int basis_src(int i) const { return basis_[i].src; }
    int basis_tgt(int i) const { return basis_[i].tgt; }
    int basis_deg(int i) const { return basis_[i].length(); }
    int idempotent(int vertex) const { return vertex; }  // e_i sits at basis index i
    int arrow_basis_index(int arrow) const { return arrow_basis_[arrow]; }

    /// Structure constants: product of basis elements i * j.
    const SparseVec& mult(int i, int j) const { return mult_[static_cast<size_t>(i) * basis_.size() + j]; }
    SparseVec mult_vec(const SparseVec& x, const SparseVec& y) const;

    /// Normal form of an arbitrary composable path word (zero if not composable).
    SparseVec reduce_path(const Path& p) const;

    /// Indices of basis paths with the given source vertex (basis of A e_i).
    const std::vector<int>& basis_with_source(int vertex) const { return by_source_[vertex]; }
    const std::vector<int>& basis_with_target(int vertex) const { return by_target_[vertex]; }

    /// Smallest d with (arrow ideal)^d = 0.
    int nilpotency_degree() const { return max_degree_ + 1; }

    bool associativity_holds() const;  // exact check over all basis triples

    std::shared_ptr<const Algebra> opposite() const;

  private:
    Algebra() = default;
    AlgebraPresentation pres_;
    std::vector<Path> basis_;
    std::vector<int> arrow_basis_;  // basis index of each arrow (or -1 if the arrow dies)
    std::vector<SparseVec> mult_;
    std::vector<std::vector<int>> by_source_, by_target_;
    int max_degree_ = 0;
    mutable std::shared_ptr<const Algebra> opposite_;  // built on demand
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

}  // namespace strata
