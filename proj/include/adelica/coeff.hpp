#pragma once

#include <functional>
#include <memory>
#include <string>

#include "adelica/complex.hpp"
#include "adelica/module.hpp"
#include "adelica/poset.hpp"

namespace adelica {

// Coefficient system: contravariant in the Balmer order. restriction(p1, p2)
// with p2 <= p1 is the structure map value(p1) -> value(p2).
struct CoefficientSystem {
    Poset poset;
    std::vector<Module> value;
    std::map<std::pair<std::size_t, std::size_t>, Map> restriction;

    Map restrict_map(std::size_t p1, std::size_t p2) const;
    // functoriality along all chains p3 <= p2 <= p1 (exact matrix equality)
    void check_functorial(const Window* w) const;

    static CoefficientSystem constant(const Poset& poset, const Module& m);
};

// Dual coefficient system: covariant. structure(p1, p2) with p2 <= p1 maps
// value(p2) -> value(p1).
struct DualCoefficientSystem {
    Poset poset;
    std::vector<Module> value;
    std::map<std::pair<std::size_t, std::size_t>, Map> structure;

    Map structure_map(std::size_t p1, std::size_t p2) const;
    void check_functorial(const Window* w) const;
};

// A system induced on the flags of the poset. Lower star keeps the variance
// and takes the first flag vertex; upper star reverses it and takes the last.
struct FlagSystem {
    Poset poset;
    bool covariant = true;  // variance along flag inclusions (face -> coface)
    std::function<Module(const Flag&)> value;
    // covariant: value(face(g, i)) -> value(g); contravariant: the reverse
    std::function<Map(const Flag& g, std::size_t i)> face_map;
};

enum class StarVariance { LowerStar, UpperStar };

FlagSystem induce_on_flags(const CoefficientSystem& sys, StarVariance v);
FlagSystem induce_on_flags(const DualCoefficientSystem& sys, StarVariance v);

// ---------------------------------------------------------------------------
// Localizations: pointed endofunctors with a unit, the A_p slots of the
// adelic complex.
// ---------------------------------------------------------------------------

class Localization {
public:
    virtual ~Localization() = default;
    virtual std::pair<Module, Map> apply(const Module& m) const = 0;  // (A m, unit m -> A m)
    virtual Map lift(const Map& f) const = 0;
    virtual std::string name() const = 0;
};

using LocPtr = std::shared_ptr<const Localization>;

LocPtr identity_localization();
// composite A = outer . inner, with unit outer_unit(inner M) . inner_unit
LocPtr composite_localization(LocPtr inner, LocPtr outer);

// The arithmetic functors of the number-ring pack, acting on tagged
// abelian modules.
enum class ArithFunctorKind { Rationalize, LocalizeAt, CompleteAt };
LocPtr arith_localization(ArithFunctorKind kind, const ZZ& prime = 0);

// Graded monomial inversion: frees the axes in the support of a monomial on
// every component (the localization away from that monomial).
LocPtr monomial_inversion(const Multidegree& support);

// Per-component graded localization: frees the axes of support[q] on pieces
// with component q; identity on components not listed.
LocPtr component_localization(std::map<int, Multidegree> support, std::string label);

struct LocalizationSystem {
    Poset poset;
    std::vector<LocPtr> at;

    const Localization& of(std::size_t p) const { return *at[p]; }
};

enum class AbsorbSide { Left, Right };

struct AbsorbReport {
    bool ok = true;
    std::string first_failure;
};

// left: A_{p1}(eta_{p2}) iso for all p1 >= p2 on all samples;
// right: eta_{p1} at A_{p2}X iso.
AbsorbReport check_absorbative(const LocalizationSystem& sys, AbsorbSide side,
                               const std::vector<Module>& samples, const Window* w = nullptr);

// ---------------------------------------------------------------------------
// Euler class data and localization colimits with stabilization certificates.
// ---------------------------------------------------------------------------

struct EulerGenerator {
    std::string label;
    // effective non-unit actions per component: multiply by scale * x^monomial;
    // components not listed act by a unit.
    std::map<int, std::pair<Multidegree, QQ>> action;
};

// Relative system of Euler classes: one generating sequence per comparable pair.
struct EulerClassSystem {
    Poset poset;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<EulerGenerator>> pair_gens;

    const std::vector<EulerGenerator>& gens(std::size_t p1, std::size_t p2) const;
    // composition law on generators:
    // E_{p0/p2} = < image of E_{p0/p1}, E_{p1/p2} > (checked via effective actions)
    bool check_composition_law() const;
};

struct GradedLocalizeResult {
    Module module;
    Map unit;
    std::map<Multidegree, std::size_t> certificate;  // stable stage per window degree
};

// Colimit along the multiplicative sequence generated by gens, computed in
// closed form and verified degreewise: the directed system of stages is
// simulated at each window degree until one full generator cycle of
// isomorphisms occurs; failure to stabilize raises.
GradedLocalizeResult euler_localize_graded(const Module& m,
                                           const std::vector<EulerGenerator>& gens,
                                           const Window& w);

struct AbelianLocalizeResult {
    Module module;
    Map unit;
    std::size_t certificate = 0;
};

// Colimit of multiplication by a multiplicative set of integers on a plain
// f.g. abelian module; free generators make it non-stabilizing (raises).
AbelianLocalizeResult euler_localize_abelian(const Module& m, const std::vector<ZZ>& gens);

// ---------------------------------------------------------------------------
// Restricted products: finitely many exceptional components plus a countable
// tail of identified copies of a template, elements a.e. inside the
// sub-template.
// ---------------------------------------------------------------------------

struct RestrictedProduct {
    std::vector<Module> exceptional;
    bool has_tail = false;
    Module tail_component;  // the component template C
    Module tail_sub;        // elements lie in this submodule a.e. (pieces subset of C's)

    static RestrictedProduct finite(std::vector<Module> components);
    static RestrictedProduct with_tail(std::vector<Module> exceptional, Module tail_component,
                                       Module tail_sub);
};

// A multiplicative family acting on a restricted product: every element acts
// as a genuine unit on all but finitely many components (the almost-all-1
// hypothesis); the unions below drive the localization.
struct EulerFamily {
    std::vector<EulerGenerator> elements;          // actions keyed by exceptional index
    std::vector<Multidegree> exceptional_support;  // union of effective supports per component
    Multidegree tail_support;                      // union of supports hitting a generic tail index
};

struct ProductLocalizeResult {
    RestrictedProduct product;
    std::map<Multidegree, std::size_t> certificate;
};

ProductLocalizeResult localize_product(const RestrictedProduct& rp, const EulerFamily& fam,
                                       const Window& w);

struct SumVsProductResult {
    bool torsion_free = true;
    bool iso_on_cohomology = false;
    std::vector<Module> cokernel_components;  // quotients at exceptional indices
    Module cokernel_tail;                     // quotient template at a generic tail index
    std::string failure;
};

// The square over (direct sum -> localized direct sum) and (product ->
// localized product): verifies the vertical map is a homology isomorphism and
// returns the common cokernel, which is the direct sum of the per-component
// quotients.
SumVsProductResult sum_vs_product_cokernel(const RestrictedProduct& rp, const EulerFamily& fam,
                                           const Window& w);

// Truncation oracle: the first n components of rp as an honest finite direct
// sum (tail indices use the tail template).
std::vector<Module> truncate_components(const RestrictedProduct& rp, std::size_t n);

// Truncated-square oracle: per-component cokernel dimensions of the unit
// M -> (localized M) on the first n components, honestly computed by rank.
std::vector<std::map<Multidegree, int>> truncated_square_cokernel_dims(
    const RestrictedProduct& rp, const EulerFamily& fam, std::size_t n, const Window& w);

// Iterated short-exact-sequence cokernel along descending chains
// top > K_0 > ... > K_depth: the direct sum over chains of
// (E^{-1}_{top/K_depth} M(K_depth)) / M(K_depth). depth 0 recovers the
// sum-vs-product cokernel over the points below top.
struct IteratedCokernelResult {
    std::vector<Module> summands;
    std::map<Multidegree, int> dims_in_window(const Window& w) const;
};

IteratedCokernelResult iterated_cokernel(
    const Poset& poset, std::size_t top, std::size_t depth,
    const std::function<Module(std::size_t)>& module_at,
    const std::function<Multidegree(std::size_t, std::size_t)>& pair_support, const Window& w);

// quotient (localized piece)/(piece): defined when exactly the axes in
// `freed` moved from Above to Free; one piece per freed axis.
std::vector<GradedPiece> piece_quotient(const GradedPiece& original, const GradedPiece& localized);

Module module_quotient_of_localization(const Module& original, const Module& localized);

// Frees the axes with positive entries in `support` on every piece; pieces
// bounded in a freed axis are annihilated (their colimit is zero).
Module localize_module_by_support(const Module& m, const Multidegree& support);

bool maps_equal(const Map& a, const Map& b, const Window* w = nullptr);

}  // namespace adelica
