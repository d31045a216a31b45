#pragma once

#include <optional>
#include <random>

#include "strata/presentation.hpp"

namespace strata {

class AlgebraMismatch : public std::logic_error {
  public:
    AlgebraMismatch() : std::logic_error("operands live over different algebras") {}
};

class ZeroModule : public std::logic_error {
  public:
    ZeroModule(const char* op) : std::logic_error(std::string(op) + ": zero module") {}
};

class NotAnAlgebraMap : public std::runtime_error {
  public:
    explicit NotAnAlgebraMap(const std::string& why) : std::runtime_error("not an algebra map: " + why) {}
};

/// A left module over a bound quiver algebra, given as a representation:
/// one exact matrix per arrow, of shape dim(target) x dim(source).
struct Rep {
    AlgebraPtr alg;
    std::vector<int> dims;
    std::vector<Mat> arrow_mats;

    static Rep zero(AlgebraPtr a);
    static Rep make(AlgebraPtr a, std::vector<int> dims);  // zero arrow matrices

    int total_dim() const;
    int offset(int vertex) const;
    bool is_zero_module() const { return total_dim() == 0; }
    bool operator==(const Rep& o) const;

    /// Action of a path word on the total space (product of arrow matrices
    /// in word order), embedded as a total_dim x total_dim matrix.
    Mat path_action_total(const Path& p) const;
    /// Action of an algebra element given by basis coordinates.
    Mat element_action_total(const Algebra::SparseVec& x) const;
    /// Action of basis path `b` as a dim(tgt) x dim(src) block.
    Mat basis_action_block(int b) const;

    std::string dim_vector_string() const;
};

struct RelationViolation {
    int relation_index;
    int src, tgt;
};

struct ValidationReport {
    bool ok = true;
    std::vector<RelationViolation> violations;
};

ValidationReport validate(const Rep& m);

/// A homomorphism of representations: one matrix per vertex, intertwining
/// all arrow actions.
struct Mor {
    Rep src, dst;
    std::vector<Mat> comps;

    static Mor zero(const Rep& src, const Rep& dst);
    static Mor identity(const Rep& m);

    Mat total() const;  // block-diagonal matrix on total spaces
    bool is_zero() const;
    bool intertwines() const;  // exact check of f_j M_a == N_a f_i
    bool is_injective() const;
    bool is_surjective() const;
    bool is_isomorphism() const;

    Mor operator+(const Mor& o) const;
    Mor operator-(const Mor& o) const;
    Mor scaled(const Scalar& c) const;
    std::optional<Mor> inverse_mor() const;
};

Mor compose(const Mor& g, const Mor& f);  // g after f

/// Basis of Hom(M, N), by exact solution of the intertwining system.
/// Deterministic: unknowns ordered by vertex then row-major entry.
std::vector<Mor> hom_basis(const Rep& m, const Rep& n);
int hom_dim(const Rep& m, const Rep& n);

struct SubQuot {
    Rep rep;
    Mor map;  // inclusion (kernel/image/trace) or projection (cokernel)
};

SubQuot kernel(const Mor& f);
SubQuot image(const Mor& f);
SubQuot cokernel(const Mor& f);
/// Submodule of n spanned vertexwise by the given total-space columns,
/// closed under the arrow action (throws if the span is not closed).
SubQuot submodule_from_columns(const Rep& n, const std::vector<Mat>& cols_per_vertex);

SubQuot trace_submodule(const Rep& m, const Rep& n);

std::vector<int> composition_multiplicities(const Rep& m);

Rep simple(AlgebraPtr a, int vertex);
Rep projective(AlgebraPtr a, int vertex);
Rep injective(AlgebraPtr a, int vertex);

struct DirectSum {
    Rep rep;
    std::vector<Mor> incl, proj;
};
DirectSum direct_sum(const std::vector<Rep>& parts);

/// An abstract finite-dimensional algebra presented by structure constants,
/// used for endomorphism algebras.  Elements are coordinate columns.
struct FDAlgebra {
    FieldSpec field;
    int n = 0;
    std::vector<Mat> left_mult;  // L_i: left multiplication by basis element i
    Mat unit;                    // coordinates of 1

    Mat lmul_of(const Mat& x) const;  // sum x_i L_i
    Mat rmul_of(const Mat& x) const;  // matrix of y -> y x
    Mat multiply(const Mat& x, const Mat& y) const { return lmul_of(x) * y; }
    bool is_idempotent(const Mat& x) const;
    /// Minimal polynomial of x, monic, lowest degree first.
    std::vector<Scalar> minimal_polynomial(const Mat& x) const;

    /// Jacobson radical, as coordinate columns.  Characteristic zero uses
    /// the kernel of the trace form of the regular representation;
    /// characteristic p uses the Friedl-Ronyai descent on trace forms of
    /// p-th power maps (prime fields only).
    Mat radical_basis() const;

    /// Newton lifting e -> 3e^2 - 2e^3 of an idempotent-mod-nilpotents.
    std::optional<Mat> lift_idempotent(Mat e, int max_iter = 64) const;

    /// Search for an idempotent distinct from 0 and 1.  Complete for small
    /// prime fields (by enumeration of the semisimple quotient) and in the
    /// split cases reachable by minimal-polynomial root splitting over Q;
    /// over Q a division-algebra quotient is reported as "none found".
    std::optional<Mat> find_nontrivial_idempotent() const;
};

struct EndAlgebra {
    std::vector<Mor> basis;
    FDAlgebra algebra;
    Mat radical;  // coordinate columns in `basis`
};

EndAlgebra end_algebra(const Rep& m);

struct DecPiece {
    Rep rep;
    Mor incl;  // piece -> m
    Mor proj;  // m -> piece, with proj . incl = id
};

struct Decomposition {
    std::vector<DecPiece> pieces;
    /// Grouped by isomorphism class: (representative index into pieces, multiplicity).
    std::vector<std::pair<int, int>> iso_classes;
};

Decomposition decompose(const Rep& m, bool reverse_sweep = false);
bool is_indecomposable(const Rep& m);

std::optional<Mor> is_isomorphic(const Rep& m, const Rep& n);

bool is_projective(const Rep& m);

/// The map P(gen_vertex) -> m sending the generator e_v to `value` (a column
/// in m's vertex block), extended along the path action.
Mor mor_from_generator(const Rep& p, int gen_vertex, const Rep& m, const Mat& value);

struct CoverData {
    Rep cover;
    std::vector<int> gens;  // one generator vertex per indecomposable summand
    std::vector<Mor> incl, proj;
    Mor map;  // cover -> m, surjective
};
CoverData projective_cover_data(const Rep& m);
Mor projective_cover(const Rep& m);  // cover -> m, surjective
SubQuot radical_submodule(const Rep& m);
std::vector<int> top_multiplicities(const Rep& m);

Rep dual_module(const Rep& m);  // over the opposite algebra
bool injective_dimension_at_most(const Rep& m, int n);
bool projective_dimension_at_most(const Rep& m, int n);

/// An algebra homomorphism A -> B, given by the images of the vertices
/// (orthogonal idempotents) and of the arrows of A in B's basis.
struct RingMap {
    AlgebraPtr from, to;
    std::vector<Algebra::SparseVec> vertex_images;
    std::vector<Algebra::SparseVec> arrow_images;

    static RingMap identity(AlgebraPtr a);
    void validate() const;  // throws NotAnAlgebraMap
};

Rep restrict_along(const Rep& m, const RingMap& phi);

/// Seeded generator of valid modules: cokernels (occasionally kernels) of
/// random maps between small projective sums.
Rep random_module(AlgebraPtr a, std::mt19937_64& rng, int max_summands = 3);

}  // namespace strata
