#include "adelica/poset.hpp"

#include <algorithm>
#include <stdexcept>

namespace adelica {

Poset::Poset(std::vector<std::string> elements,
             const std::vector<std::pair<std::string, std::string>>& covers)
    : elements_(std::move(elements)) {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (!index_.emplace(elements_[i], i).second)
            throw std::invalid_argument("poset: duplicate element '" + elements_[i] + "'");
    }
    std::size_t n = elements_.size();
    leq_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) leq_[i][i] = true;
    for (const auto& [p, q] : covers) {
        std::size_t ip = index(p), iq = index(q);
        if (ip == iq) throw std::invalid_argument("poset: cover relates an element to itself");
        leq_[ip][iq] = true;
    }
    // Warshall closure.
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            if (!leq_[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (leq_[k][j]) leq_[i][j] = true;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && leq_[i][j] && leq_[j][i])
                throw std::invalid_argument("poset: antisymmetry fails between '" + elements_[i] +
                                            "' and '" + elements_[j] + "'");
}

std::size_t Poset::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("poset: unknown element '" + name + "'");
    return it->second;
}

std::vector<std::size_t> Poset::strictly_below(std::size_t p) const {
    std::vector<std::size_t> r;
    for (std::size_t q = 0; q < size(); ++q)
        if (less(q, p)) r.push_back(q);
    return r;
}

std::vector<std::size_t> Poset::minimal_elements() const {
    std::vector<std::size_t> r;
    for (std::size_t p = 0; p < size(); ++p) {
        bool min = true;
        for (std::size_t q = 0; q < size() && min; ++q)
            if (less(q, p)) min = false;
        if (min) r.push_back(p);
    }
    return r;
}

namespace {

void extend_flags(const Poset& poset, std::vector<std::size_t>& partial, std::size_t want,
                  const std::vector<std::size_t>& by_name, std::vector<Flag>& out) {
    if (partial.size() == want) {
        out.push_back(Flag{partial});
        return;
    }
    for (std::size_t e : by_name) {
        if (!partial.empty() && !poset.less(e, partial.back())) continue;
        partial.push_back(e);
        extend_flags(poset, partial, want, by_name, out);
        partial.pop_back();
    }
}

}  // namespace

std::vector<Flag> enumerate_flags(const Poset& poset, std::size_t s) {
    std::vector<std::size_t> by_name(poset.size());
    for (std::size_t i = 0; i < poset.size(); ++i) by_name[i] = i;
    std::sort(by_name.begin(), by_name.end(),
              [&](std::size_t a, std::size_t b) { return poset.name(a) < poset.name(b); });
    std::vector<Flag> out;
    std::vector<std::size_t> partial;
    extend_flags(poset, partial, s + 1, by_name, out);
    std::sort(out.begin(), out.end(), [&](const Flag& a, const Flag& b) {
        for (std::size_t i = 0; i < std::min(a.length(), b.length()); ++i) {
            if (poset.name(a.vertices[i]) != poset.name(b.vertices[i]))
                return poset.name(a.vertices[i]) < poset.name(b.vertices[i]);
        }
        return a.length() < b.length();
    });
    return out;
}

Flag face(const Flag& flag, std::size_t i) {
    if (flag.length() <= 1) throw std::invalid_argument("face: flag of length 1");
    if (i >= flag.length()) throw std::out_of_range("face: index out of range");
    Flag r = flag;
    r.vertices.erase(r.vertices.begin() + static_cast<long>(i));
    return r;
}

DimensionData dimension_data(const Poset& poset) {
    std::size_t n = poset.size();
    // Longest and shortest maximal descending chain from each element.
    std::vector<long> longest(n, -1), shortest(n, -1);
    // Process in an order compatible with the poset (smaller first).
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        std::size_t ca = poset.strictly_below(a).size(), cb = poset.strictly_below(b).size();
        return ca < cb;
    });
    for (std::size_t p : order) {
        long lo = -1, hi = -1;
        for (std::size_t q = 0; q < n; ++q) {
            if (!poset.less(q, p)) continue;
            // q is a lower cover iff nothing sits strictly between.
            bool cover = true;
            for (std::size_t r = 0; r < n && cover; ++r)
                if (poset.less(q, r) && poset.less(r, p)) cover = false;
            if (!cover) continue;
            if (hi < 0 || longest[q] + 1 > hi) hi = longest[q] + 1;
            if (lo < 0 || shortest[q] + 1 < lo) lo = shortest[q] + 1;
        }
        longest[p] = hi < 0 ? 0 : hi;
        shortest[p] = lo < 0 ? 0 : lo;
    }
    DimensionData d;
    d.is_catenary = true;
    for (std::size_t p = 0; p < n; ++p)
        if (longest[p] != shortest[p]) d.is_catenary = false;
    if (d.is_catenary) {
        d.dim.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            d.dim[p] = static_cast<std::size_t>(longest[p]);
            d.poset_dim = std::max(d.poset_dim, d.dim[p]);
        }
    }
    return d;
}

DimensionVector dimension_vector(const Flag& flag, const std::vector<std::size_t>& dim) {
    DimensionVector v;
    for (std::size_t p : flag.vertices) v.dims.push_back(dim[p]);
    for (std::size_t i = 0; i + 1 < v.dims.size(); ++i)
        if (v.dims[i] <= v.dims[i + 1])
            throw std::logic_error("dimension_vector: not strictly decreasing");
    return v;
}

SimplicialComplex::SimplicialComplex(std::vector<std::string> vertex_names,
                                     std::set<std::set<std::size_t>> simplices)
    : vertex_names_(std::move(vertex_names)), simplices_(std::move(simplices)) {
    for (const auto& s : simplices_) {
        if (s.empty()) throw std::invalid_argument("simplicial complex: empty simplex");
        for (std::size_t v : s)
            if (v >= vertex_names_.size())
                throw std::invalid_argument("simplicial complex: vertex out of range");
        // Closure under non-empty subsets: removing any single vertex must stay inside.
        if (s.size() > 1)
            for (std::size_t v : s) {
                std::set<std::size_t> t = s;
                t.erase(v);
                if (!simplices_.count(t))
                    throw std::invalid_argument("simplicial complex: not closed under faces");
            }
    }
}

std::vector<std::vector<std::size_t>> SimplicialComplex::simplices_of_dim(std::size_t n) const {
    std::vector<std::vector<std::size_t>> r;
    for (const auto& s : simplices_)
        if (s.size() == n + 1) r.emplace_back(s.begin(), s.end());
    std::sort(r.begin(), r.end());
    return r;
}

std::size_t SimplicialComplex::max_dim() const {
    std::size_t m = 0;
    for (const auto& s : simplices_) m = std::max(m, s.size() - 1);
    return m;
}

long SimplicialComplex::euler_characteristic() const {
    long chi = 0;
    for (const auto& s : simplices_) chi += (s.size() % 2 == 1) ? 1 : -1;
    return chi;
}

Poset SimplicialComplex::face_poset() const {
    std::vector<std::string> names;
    std::vector<std::set<std::size_t>> faces(simplices_.begin(), simplices_.end());
    auto label = [&](const std::set<std::size_t>& s) {
        std::string t = "{";
        bool first = true;
        for (std::size_t v : s) {
            if (!first) t += ",";
            t += vertex_names_[v];
            first = false;
        }
        return t + "}";
    };
    for (const auto& s : faces) names.push_back(label(s));
    std::vector<std::pair<std::string, std::string>> covers;
    for (const auto& s : faces)
        for (const auto& t : faces)
            if (t.size() < s.size() && std::includes(s.begin(), s.end(), t.begin(), t.end()))
                covers.emplace_back(label(s), label(t));
    return Poset(names, covers);
}

SimplicialComplex punctured_cube(const std::vector<std::string>& a) {
    if (a.empty()) throw std::invalid_argument("punctured_cube: empty set");
    std::set<std::set<std::size_t>> simplices;
    std::size_t n = a.size();
    for (std::size_t mask = 1; mask < (1u << n); ++mask) {
        std::set<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.insert(i);
        simplices.insert(s);
    }
    return SimplicialComplex(a, std::move(simplices));
}

Poset punctured_cube_augmented_poset(const std::vector<std::string>& a) {
    if (a.empty()) throw std::invalid_argument("punctured_cube: empty set");
    std::size_t n = a.size();
    std::vector<std::string> names;
    std::vector<std::string> by_mask(1u << n);
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        std::string t = "{";
        bool first = true;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                if (!first) t += ",";
                t += a[i];
                first = false;
            }
        t += "}";
        by_mask[mask] = t;
        names.push_back(t);
    }
    std::vector<std::pair<std::string, std::string>> covers;
    for (std::size_t m1 = 0; m1 < (1u << n); ++m1)
        for (std::size_t m2 = 0; m2 < (1u << n); ++m2)
            if (m1 != m2 && (m1 & m2) == m2) covers.emplace_back(by_mask[m1], by_mask[m2]);
    return Poset(names, covers);
}

SimplicialComplex order_complex(const Poset& poset) {
    std::set<std::set<std::size_t>> simplices;
    std::size_t n = poset.size();
    // Small posets only: grow chains recursively.
    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t p = 0; p < n; ++p) chains.push_back({p});
    for (std::size_t i = 0; i < chains.size(); ++i) {
        std::vector<std::size_t> c = chains[i];
        simplices.insert(std::set<std::size_t>(c.begin(), c.end()));
        for (std::size_t q = 0; q < n; ++q)
            if (poset.less(q, c.back())) {
                auto d = c;
                d.push_back(q);
                chains.push_back(d);
            }
    }
    return SimplicialComplex(poset.elements(), std::move(simplices));
}

}  // namespace adelica
