#pragma once

#include "strata/repcat.hpp"

namespace strata {

/// 0 -> a --u--> b --v--> c -> 0
struct ShortExact {
    Rep a, b, c;
    Mor u, v;

    bool is_exact() const;
    bool is_split() const;  // the inclusion u admits a retraction
};

/// One term of a projective resolution: a direct sum of indecomposable
/// projectives with its generator vertices and splitting data.
struct ProjTerm {
    Rep rep;
    std::vector<int> gens;
    std::vector<Mor> incl, proj;

    int n_gens() const { return static_cast<int>(gens.size()); }
};

/// P_n -> ... -> P_1 -> P_0 -> M -> 0, minimal (covers of syzygies).
struct Resolution {
    Rep module;
    std::vector<ProjTerm> terms;
    std::vector<Mor> diff;  // diff[k]: terms[k+1] -> terms[k]
    Mor augment;            // terms[0] -> module

    int length() const { return static_cast<int>(terms.size()) - 1; }
};

Resolution projective_resolution(const Rep& m, int n);
/// Non-minimal variant: pads degree 0 with an extra projective summand
/// mapping to zero (used to cross-check independence of the resolution).
Resolution padded_resolution(const Rep& m, int n, int pad_vertex);

/// Cached minimal resolutions; safe for concurrent readers.
std::shared_ptr<const Resolution> cached_resolution(const Rep& m, int n);

/// Hom(P_k, N) in generator coordinates: one block of size dims[v_s] per
/// generator.  `hom_complex_map` is precomposition with diff[k], a matrix
/// from the degree-k coordinates to the degree-(k+1) coordinates.
int hom_term_dim(const ProjTerm& t, const Rep& n);
Mat hom_complex_map(const Resolution& res, int k, const Rep& n);

/// Ext^degree(source, target) with a canonical basis of cocycle
/// representatives (coordinate columns on the minimal resolution).
struct ExtSpace {
    int degree = 0;
    Rep source, target;
    std::shared_ptr<const Resolution> res;
    std::vector<Mat> cocycles;
    Mat boundaries;  // image of the previous Hom-complex map

    int dim() const { return static_cast<int>(cocycles.size()); }
};

ExtSpace ext_space(int n, const Rep& m, const Rep& nn);
int ext_dim(int n, const Rep& m, const Rep& nn);

/// The morphism P_n -> target represented by a coordinate column.
Mor cocycle_to_mor(const ExtSpace& es, const Mat& coords);

/// The extension 0 -> N -> E -> M -> 0 classified by a degree-1 cocycle,
/// built as a pushout of the first resolution step.
ShortExact extension_from_cocycle(const ExtSpace& es, const Mat& coords);

/// 0 -> N^d -> E -> M -> 0 over the full cocycle basis, d = dim Ext^1(M,N).
/// For d = 0 this degenerates to 0 -> 0 -> M -> M -> 0.
ShortExact universal_extension(const Rep& m, const Rep& n);

struct LesNode {
    std::string label;
    int dim = 0;
    bool exact_here = true;
};

struct LesReport {
    bool exact = true;
    std::vector<LesNode> nodes;
    /// alternating-sum consistency: sum of (-1)^k dims equals the rank of
    /// the final outgoing map
    bool euler_consistent = true;
};

/// Long exact sequence Hom(M,A) -> Hom(M,B) -> Hom(M,C) -> Ext^1(M,A) -> ...
/// through degree n_max, with explicit connecting maps; exactness verified
/// at every interior node.
LesReport les_check(const Rep& m, const ShortExact& ses, int n_max);

}  // namespace strata
