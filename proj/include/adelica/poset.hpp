#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace adelica {

// Finite poset in the Balmer convention: smaller means more special, so
// closed points are minimal. Stored as a reachability closure over the
// element list; all order axioms are checked eagerly at construction.
class Poset {
public:
    Poset() = default;  // the empty poset
    // covers: pairs (p, q) meaning q < p. Further comparabilities are taken
    // as the transitive closure; reflexivity is implicit.
    Poset(std::vector<std::string> elements, const std::vector<std::pair<std::string, std::string>>& covers);

    std::size_t size() const { return elements_.size(); }
    const std::vector<std::string>& elements() const { return elements_; }
    const std::string& name(std::size_t i) const { return elements_[i]; }
    std::size_t index(const std::string& name) const;

    // q <= p in the stored order.
    bool leq(std::size_t q, std::size_t p) const { return leq_[p][q]; }
    bool less(std::size_t q, std::size_t p) const { return q != p && leq_[p][q]; }

    std::vector<std::size_t> strictly_below(std::size_t p) const;
    std::vector<std::size_t> minimal_elements() const;

private:
    std::vector<std::string> elements_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<bool>> leq_;  // leq_[p][q] == (q <= p)
};

// Strictly decreasing chain of poset elements, the s-simplices of the order
// complex. vertices[0] is the largest element.
struct Flag {
    std::vector<std::size_t> vertices;

    std::size_t length() const { return vertices.size(); }
    std::size_t sdim() const { return vertices.size() - 1; }
    bool operator==(const Flag& o) const { return vertices == o.vertices; }
    bool operator<(const Flag& o) const { return vertices < o.vertices; }
};

// All flags of length s + 1, in the canonical order: lexicographic on the
// identifier sequence. This order fixes matrix row/column indexing globally.
std::vector<Flag> enumerate_flags(const Poset& poset, std::size_t s);

// Deletes vertex i; faces commute: face(face(F,b),a) == face(face(F,a),b-1) for a < b.
Flag face(const Flag& flag, std::size_t i);

struct DimensionData {
    bool is_catenary = false;
    std::vector<std::size_t> dim;  // defined only when is_catenary
    std::size_t poset_dim = 0;
};

// Catenary test with the dimension function: dim(p) is the common length of
// the maximal descending chains from p; closed points get 0.
DimensionData dimension_data(const Poset& poset);

struct DimensionVector {
    std::vector<std::size_t> dims;  // strictly decreasing
    bool operator==(const DimensionVector& o) const { return dims == o.dims; }
    bool operator<(const DimensionVector& o) const { return dims < o.dims; }
};

DimensionVector dimension_vector(const Flag& flag, const std::vector<std::size_t>& dim);

// Finite abstract simplicial complex; the empty set is never a simplex.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    explicit SimplicialComplex(std::vector<std::string> vertex_names,
                               std::set<std::set<std::size_t>> simplices);

    const std::vector<std::string>& vertex_names() const { return vertex_names_; }
    const std::set<std::set<std::size_t>>& simplices() const { return simplices_; }
    std::vector<std::vector<std::size_t>> simplices_of_dim(std::size_t n) const;
    std::size_t max_dim() const;
    long euler_characteristic() const;

    // The face poset, ordered by inclusion (Balmer direction: faces below cofaces).
    Poset face_poset() const;

private:
    std::vector<std::string> vertex_names_;
    std::set<std::set<std::size_t>> simplices_;
};

// Delta(A): all non-empty subsets of A, the punctured |A|-cube as a complex.
SimplicialComplex punctured_cube(const std::vector<std::string>& a);

// The poset of all subsets of A including the empty set as initial object.
Poset punctured_cube_augmented_poset(const std::vector<std::string>& a);

// The order complex X': vertices are poset elements, simplices are flags.
// Applied to the face poset of a complex this is barycentric subdivision.
SimplicialComplex order_complex(const Poset& poset);

}  // namespace adelica
