#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adelica/module.hpp"
#include "adelica/poset.hpp"

namespace adelica {

// Exact description of one cohomology group in the abelian backend.
struct AbGroupInfo {
    std::vector<std::pair<AtomTag, std::size_t>> free;  // tagged free ranks, sorted by tag
    std::vector<ZZ> torsion;                            // invariant factors, successively dividing
    std::vector<std::pair<ZZ, std::size_t>> divisible;  // Pruefer coranks per prime
    std::size_t dense_defects = 0;  // Q_p-mod-Q style pieces (not finitely presentable)

    bool is_zero() const {
        return free.empty() && torsion.empty() && divisible.empty() && dense_defects == 0;
    }
    std::size_t total_rank() const {
        std::size_t r = 0;
        for (auto& [t, n] : free) r += n;
        return r;
    }
    bool operator==(const AbGroupInfo& o) const {
        return free == o.free && torsion == o.torsion && divisible == o.divisible &&
               dense_defects == o.dense_defects;
    }
    std::string str() const;
};

struct CohomologyTable {
    Backend backend = Backend::Abelian;
    std::map<int, AbGroupInfo> ab;                          // abelian entries per degree
    std::map<int, std::map<Multidegree, int>> gr;           // graded: degree -> dims (zeros omitted)
    std::optional<Window> window;
    std::map<int, bool> boundary_flags_unused;              // see boundary_coupling_flags

    bool operator==(const CohomologyTable& o) const {
        return backend == o.backend && ab == o.ab && gr == o.gr;
    }
    int graded_dim(int degree, const Multidegree& d) const;
    std::string str() const;
};

struct CochainComplex {
    Backend backend = Backend::Abelian;
    std::vector<Module> objects;   // degrees 0..n
    std::vector<Map> diffs;        // diffs[s]: objects[s] -> objects[s+1]
    std::optional<Window> window;  // required for graded
    std::vector<ZZ> base_primes;   // abelian: primes of the S-integer base; empty = plain Z

    std::size_t length() const { return objects.size(); }
    void validate_shapes() const;
};

// True iff every consecutive composite is the zero map (exact arithmetic).
bool check_complex(const CochainComplex& c);

// Degree at which delta.delta != 0, if any.
std::optional<std::size_t> complex_defect_degree(const CochainComplex& c);

// Exact cohomology. Abelian objects with Base tags go through the Smith normal
// form presentation machinery; completion/rationalization tags are handled by
// sector splitting (free arithmetic sector at complex length <= 2, torsion
// sector via SNF). Graded complexes are handled per multidegree by rank.
CohomologyTable cohomology(const CochainComplex& c);

// Free generators of H^0 made explicit: vectors in C^0 generator coordinates.
// Used by the number-ring pack to exhibit H^0 == M.
struct KernelBasis {
    // columns of the free part of H^0, grouped with their tags
    std::vector<std::pair<AtomTag, std::vector<QQ>>> free_vectors;
    // torsion part of H^0 in C^0 coordinates: generator vector and its order
    std::vector<std::pair<ZZ, std::vector<QQ>>> torsion_vectors;
};
KernelBasis degree_zero_kernel(const CochainComplex& c);

// Per-boundary-degree truncation coupling report. All maps in scope preserve
// multidegree, so a differential can never couple across the window; the
// check is performed, not assumed.
std::map<int, bool> boundary_coupling_flags(const CochainComplex& c);

// -------------------------- cube diagrams ---------------------------------

struct CubeVertex {
    DimensionVector dv;
    Module obj;
    std::vector<Flag> flags;  // summand bookkeeping (canonical order), may be empty
};

struct CubeEdge {
    std::size_t from = 0, to = 0;
    std::size_t inserted_pos = 0;  // index of the inserted dimension in `to`
    Map map;
};

struct CubeDiagram {
    Backend backend = Backend::Abelian;
    std::vector<CubeVertex> vertices;
    std::vector<CubeEdge> edges;
    std::optional<Window> window;
    std::vector<ZZ> base_primes;
    // Optional initial vertex (the empty dimension set) with its maps to the
    // singleton vertices; used by the adelic cube of rings.
    std::optional<Module> initial_obj;
    std::vector<std::pair<std::size_t, Map>> initial_maps;

    std::optional<std::size_t> find_vertex(const DimensionVector& dv) const;
};

// Every square face must commute; throws otherwise.
void check_faces_commute(const CubeDiagram& cube);

// Total complex: degree s collects vertices with s+1 dimensions, differential
// is the signed sum over inserting edges with sign (-1)^(inserted position).
CochainComplex totalize(const CubeDiagram& cube);

// ------------------------- filtrations ------------------------------------

struct FiltrationResult {
    std::vector<CochainComplex> subquotients;  // index n: level-n subquotient
    std::vector<CohomologyTable> e1;           // cohomology of each subquotient
};

// levels[s][g]: level of generator/piece g of objects[s]. The differential
// must not decrease levels (checked).
FiltrationResult filtration_subquotients(const CochainComplex& c,
                                         const std::vector<std::vector<std::size_t>>& levels);

}  // namespace adelica
