#pragma once

#include <map>
#include <string>
#include <vector>

#include "adelica/grading.hpp"
#include "adelica/matrix.hpp"

namespace adelica {

enum class Backend { Abelian, Graded };

// ---------------------------------------------------------------------------
// Abelian backend: finitely presented pieces over the S-integer base ring,
// with scalar tags recording which completed / rationalized ring a free
// generator lives over. A plain f.g. abelian group uses Base tags throughout.
// ---------------------------------------------------------------------------

enum class TagKind {
    Base,         // the base ring R (Z localized away from the instance primes)
    LocalAt,      // R_(p)
    Rat,          // Q = R_(0)
    CompleteAt,   // Z_p, the p-adic completion tag
    RatComplete,  // Q_p
};

struct AtomTag {
    TagKind kind = TagKind::Base;
    ZZ prime = 0;  // used by LocalAt / CompleteAt / RatComplete

    bool operator==(const AtomTag& o) const { return kind == o.kind && prime == o.prime; }
    bool operator<(const AtomTag& o) const {
        if (kind != o.kind) return kind < o.kind;
        return prime < o.prime;
    }
    std::string str() const;
};

inline AtomTag tag_base() { return {TagKind::Base, 0}; }
inline AtomTag tag_rat() { return {TagKind::Rat, 0}; }
inline AtomTag tag_local(const ZZ& p) { return {TagKind::LocalAt, p}; }
inline AtomTag tag_complete(const ZZ& p) { return {TagKind::CompleteAt, p}; }
inline AtomTag tag_ratcomplete(const ZZ& p) { return {TagKind::RatComplete, p}; }

// One generator: free (order == 0) over the tagged ring, or cyclic torsion
// Z/order (order > 1, always Base-tagged).
struct AbGen {
    AtomTag tag;
    ZZ order = 0;

    bool operator==(const AbGen& o) const { return tag == o.tag && order == o.order; }
};

// ---------------------------------------------------------------------------
// Graded backend: degreewise-finite Q-vector spaces presented as sums of
// monomial pieces, so localizations, inclusions and their quotients stay
// structural. A piece has one constraint per grading axis: the degree-d slot
// is one-dimensional iff every axis constraint holds and (d - shift) is
// divisible by the step. `component` names which product factor of the
// instance the piece sits in.
// ---------------------------------------------------------------------------

enum class AxisMode {
    Free,   // x_i inverted: any degree
    Above,  // d_i >= shift_i (polynomial direction)
    Below,  // d_i <= shift_i - step_i (quotient direction)
    At,     // d_i == shift_i
};

struct GradedPiece {
    int component = 0;
    Multidegree shift;
    std::vector<AxisMode> mode;
    Multidegree step;  // divisibility of (d - shift) per axis, every entry >= 1

    static GradedPiece cone(int component, Multidegree shift, Multidegree step = {});
    static GradedPiece point(int component, Multidegree shift, Multidegree step = {});

    bool realizable(const Multidegree& d) const {
        for (std::size_t i = 0; i < shift.size(); ++i) {
            if ((d[i] - shift[i]) % step[i] != 0) return false;
            switch (mode[i]) {
                case AxisMode::Free: break;
                case AxisMode::Above:
                    if (d[i] < shift[i]) return false;
                    break;
                case AxisMode::Below:
                    if (d[i] > shift[i] - step[i]) return false;
                    break;
                case AxisMode::At:
                    if (d[i] != shift[i]) return false;
                    break;
            }
        }
        return true;
    }
    // Containment of realizability regions: this piece's region inside o's.
    bool region_subset_of(const GradedPiece& o) const;

    bool operator==(const GradedPiece& o) const {
        return component == o.component && shift == o.shift && mode == o.mode && step == o.step;
    }
};

struct Module {
    Backend backend = Backend::Abelian;
    std::vector<AbGen> gens;           // abelian payload
    std::size_t nvars = 0;             // graded payload
    std::vector<GradedPiece> pieces;   // graded payload

    static Module abelian(std::vector<AbGen> g);
    static Module free_abelian(std::size_t rank, std::vector<ZZ> invariant_factors = {});
    static Module graded(std::size_t nvars, std::vector<GradedPiece> pieces);

    std::size_t gen_count() const {
        return backend == Backend::Abelian ? gens.size() : pieces.size();
    }
    bool is_zero_module() const { return gen_count() == 0; }

    // Graded: dimension of the degree-d piece.
    int dim_at(const Multidegree& d) const;
    // Graded: indices of the pieces alive in degree d, in piece order.
    std::vector<std::size_t> basis_at(const Multidegree& d) const;

    bool operator==(const Module& o) const {
        return backend == o.backend && gens == o.gens && nvars == o.nvars && pieces == o.pieces;
    }
};

// Direct sum; offsets report where each summand's generators start.
Module dsum(const std::vector<Module>& parts, std::vector<std::size_t>* offsets = nullptr);

struct GrMapEntry {
    std::size_t from = 0, to = 0;
    QQ coeff;

    bool operator==(const GrMapEntry& o) const {
        return from == o.from && to == o.to && coeff == o.coeff;
    }
};

struct Map {
    Module dom, cod;
    QMat mat;                        // abelian: cod.gens x dom.gens
    std::vector<GrMapEntry> entries; // graded

    static Map abelian(Module dom, Module cod, QMat mat);
    static Map graded(Module dom, Module cod, std::vector<GrMapEntry> entries);
    static Map zero(const Module& dom, const Module& cod);
    static Map identity(const Module& m);

    bool is_zero_map() const;
    // Graded: the degree-d matrix, rows = cod.basis_at(d), cols = dom.basis_at(d).
    QMat matrix_at(const Multidegree& d) const;

    bool operator==(const Map& o) const;
};

Map compose(const Map& g, const Map& f);  // g after f
Map dsum_maps(const std::vector<std::vector<Map>>& blocks,
              const std::vector<Module>& doms, const std::vector<Module>& cods);
Map map_sub(const Map& a, const Map& b);

// Structural validity of an abelian map's entries against the tag calculus
// (which canonical ring maps exist, zero across torsion/divisible walls).
void validate_abelian_map(const Map& m);

// Entry == 0 as a map into a generator of the given order (mod-order test for torsion).
bool entry_zero_for(const QQ& e, const ZZ& order);

// Whether the two modules are isomorphic (same sorted tags+ranks / same
// degreewise dimensions -- used by absorbativity and idempotence checks).
bool modules_isomorphic(const Module& a, const Module& b, const Window* w = nullptr);

// Whether a map is an isomorphism: abelian via determinant/SNF per sector,
// graded via square invertible matrices on every degree of the window.
bool map_is_isomorphism(const Map& m, const Window* w = nullptr);

}  // namespace adelica
