#pragma once

#include <optional>
#include <string>

#include "adelica/coeff.hpp"
#include "adelica/complex.hpp"

namespace adelica {

enum class ProductPolicy { Specializations, AllClosedPoints };

// A summand index of the adelic cochains: an honest flag, or a flag whose
// closed last vertex was added by the all-closed-points product policy and
// need not be comparable with the rest of the chain.
struct AdelicIndex {
    Flag flag;
    bool policy_extra = false;

    bool operator==(const AdelicIndex& o) const {
        return flag == o.flag && policy_extra == o.policy_extra;
    }
};

struct AdelicSpec {
    Poset poset;
    CoefficientSystem coeff;
    LocalizationSystem loc;
    Backend backend = Backend::Abelian;
    std::optional<Window> window;
    std::vector<ZZ> base_primes;
    ProductPolicy policy = ProductPolicy::Specializations;
    std::string variant_label;

    // optional augmentation data for the adelic cube: the global module with
    // its units into the singleton-flag values
    std::optional<Module> global_module;
    std::map<std::size_t, Map> global_units;

    DimensionData dims;  // filled by validate()

    // catenary check, dimension data, unit naturality on all structure maps
    void validate();
};

// All summand indices of the adelic s-cochains in the canonical order
// (lexicographic on the identifier sequence).
std::vector<AdelicIndex> adelic_indices(const AdelicSpec& spec, std::size_t s);

// Iterated value A_{p0} A_{p1} ... A_{ps} M(ps) of one summand.
Module adelic_value(const AdelicSpec& spec, const AdelicIndex& ix);

// The s-cochains: direct sum of summand values in canonical index order.
Module adelic_cochains(const AdelicSpec& spec, std::size_t s,
                       std::vector<AdelicIndex>* indices = nullptr);

// delta = sum_i (-1)^i delta_i with delta_i inserting the unit at position i
// and the final face given by the coefficient system.
Map adelic_delta(const AdelicSpec& spec, std::size_t s);

// The whole complex, degrees 0 .. dim(poset).
CochainComplex adelic_complex(const AdelicSpec& spec);

CohomologyTable adelic_cohomology(const AdelicSpec& spec);

// Collect cochains by dimension vector into the punctured cube.
CubeDiagram decompose_by_dimension(const AdelicSpec& spec);

// The adelic cube of rings: the punctured cube plus the initial vertex given
// by the spec's global module; edge and augmentation maps are checked to be
// unital (entries 0 or 1 on generators).
CubeDiagram build_adelic_cube(const AdelicSpec& spec);

// Finite-poset collapse: every summand value is isomorphic to
// A_{p0} M(ps) when the system is a left absorbative family of localizations.
bool check_collapse(const AdelicSpec& spec);

}  // namespace adelica
