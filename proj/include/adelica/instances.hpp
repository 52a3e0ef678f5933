#pragma once

#include <functional>

#include "adelica/adelic.hpp"
#include "adelica/coeff.hpp"
#include "adelica/padic.hpp"

namespace adelica {

// ------------------------------ simplicial ---------------------------------

// Dual coefficient system on the simplices of a complex, given functionally:
// face_map(sigma, i) maps value(sigma minus its i-th vertex) into value(sigma).
struct SimplicialDualSystem {
    std::function<Module(const std::vector<std::size_t>&)> value;
    std::function<Map(const std::vector<std::size_t>&, std::size_t)> face_map;
};

SimplicialDualSystem constant_simplicial_system(const Module& m);

CochainComplex simplicial_cochain_complex(const SimplicialComplex& k,
                                          const SimplicialDualSystem& sys, Backend backend,
                                          const std::optional<Window>& w,
                                          const std::vector<ZZ>& base_primes = {});

CohomologyTable simplicial_cohomology(const SimplicialComplex& k, const SimplicialDualSystem& sys,
                                      Backend backend, const std::optional<Window>& w,
                                      const std::vector<ZZ>& base_primes = {});

// H_simp(K; LM) vs the adelic cohomology of K viewed as a poset, both with a
// constant module and the localizations loc(sigma) (graded inversions).
struct SubdivisionComparison {
    CohomologyTable simplicial;
    CohomologyTable adelic;
    bool equal = false;
};

SubdivisionComparison subdivision_compare(
    const SimplicialComplex& k, const Module& constant_module,
    const std::function<LocPtr(const std::vector<std::size_t>&)>& loc, const Window& w);

// ------------------------------- Cech pack ---------------------------------

struct MonomialIdeal {
    std::size_t nvars = 0;
    std::vector<Multidegree> generators;  // exponent vectors
};

enum class KoszulVariant { Local, Cech };  // Delta(A)^+ vs Delta(A)

// Adelic spec of the (augmented) punctured cube with inversion localizations
// on the constant module R.
AdelicSpec koszul_spec(const MonomialIdeal& ideal, KoszulVariant variant, const Window& w);

CohomologyTable koszul_local_cohomology(const MonomialIdeal& ideal, KoszulVariant variant,
                                        const Window& w);

// Independent 2^n-term stable Koszul complex R -> sum R[1/x_a] -> ... built
// directly (no adelic machinery); the oracle side of the comparison.
CochainComplex stable_koszul_complex(const MonomialIdeal& ideal, const Window& w);

// ----------------------------- number rings --------------------------------

enum class HasseVariant { L_LambdaM, L_LambdaPrimeM, LambdaL_M };

struct HasseInstance {
    std::vector<ZZ> primes;     // the retained closed points of Spec Z_(S)
    ZMat presentation;          // rows are relations on the generators
    HasseVariant variant = HasseVariant::L_LambdaM;
    ProductPolicy policy = ProductPolicy::Specializations;
    long precision = 32;
};

// The module M = coker(presentation) over the S-integer base: free rank plus
// S-supported invariant factors.
Module hasse_module(const HasseInstance& inst);

AdelicSpec hasse_spec(const HasseInstance& inst);

// Explicit mutually inverse maps between H^0 and M on generators.
struct H0Reconstruction {
    bool ok = false;
    std::string detail;
};

H0Reconstruction h0_reconstruct(const AdelicSpec& spec, const Module& m, const KernelBasis& kb);

// Exactness of the structural completion of an integer complex at p: the
// subgroup quotients must carry no free part and no p-primary part.
bool completion_sequence_exact(const CochainComplex& c, const ZZ& p);

// ------------------------------ adelic split -------------------------------

struct AdelicSplit {
    QQ principal;                      // rational coordinate q
    std::map<ZZ, PAdic> integral;      // a_p = b_p - q, integral at every p
    long used_precision = 0;
};

// Constructive preimage of a target in the product of Q_p corners: q is the
// sum of principal parts, the a_p are verified integral, and applying the
// assembled delta recovers the target on all known digits.
AdelicSplit adelic_split(const std::vector<ZZ>& primes, const std::map<ZZ, PAdic>& target);

// Round-trip check against the engine's differential for the rank-one free
// corner of a Hasse spec.
bool adelic_split_roundtrip(const std::vector<ZZ>& primes, const std::map<ZZ, QQ>& target_rationals,
                            long precision);

// ------------------------------ rank-1 torus -------------------------------

struct TorusRank1Instance {
    std::vector<long> orders;  // orders of the retained finite cyclic subgroups
    Window window;             // degrees of the single c-axis (c has degree 2)
};

AdelicSpec torus_rank1_spec(const TorusRank1Instance& inst);

// Relative Euler classes built from the representations z^k: the component at
// C_m is (k/m) c when m divides k and a unit otherwise.
EulerClassSystem torus_euler_system(const TorusRank1Instance& inst);

// Multiplicative family acting on the infinite product over all finite cyclic
// subgroups, restricted-product form.
RestrictedProduct torus_restricted_product(const TorusRank1Instance& inst);
EulerFamily torus_euler_family(const TorusRank1Instance& inst);

struct TomDieckReport {
    std::vector<CohomologyTable> subquotients;  // E_1 of each filtration level
    CohomologyTable total;
    bool concentrated = false;   // H^n(Fbar^n) concentrated in codegree n
    bool counts_match = false;   // degreewise dimension sum equals the total
};

TomDieckReport tom_dieck_filtration(const TorusRank1Instance& inst);

// Transitivity of the relative localizations on the instance data: for every
// chain p1 >= p2 >= p3, localizing then changing base agrees with changing
// base then localizing by the composed multiplicative set.
bool torus_transitivity_pentagon(const TorusRank1Instance& inst);

// --------------------------- seeded generators -----------------------------

// Ranked random poset: covers only between adjacent levels, every non-minimal
// element covers something below, so the poset is catenary by construction.
Poset random_catenary_poset(unsigned seed, std::size_t max_elems, std::size_t max_dim);

enum class InversionKind { Identity, Inversion, Mixed };

// Constant Q[x] coefficients with per-element identity or x-inversion slots.
AdelicSpec random_inversion_spec(const Poset& p, unsigned seed, InversionKind kind,
                                 const Window& w);

// Seeded random f.g. abelian module (bounded rank and S-supported torsion).
Module random_fg_module(unsigned seed, const std::vector<ZZ>& primes);

// Seeded random simplicial complex on the given vertices (downward closure of
// random faces).
SimplicialComplex random_simplicial_complex(unsigned seed, std::size_t vertices);

}  // namespace adelica
