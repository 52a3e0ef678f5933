#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace adelica {

// Fine multidegree in Z^n; n == 0 means a single ungraded slot.
using Multidegree = std::vector<int>;

struct Window {
    Multidegree lo, hi;

    Window() = default;
    Window(Multidegree l, Multidegree h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.size() != hi.size()) throw std::invalid_argument("window: axis mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (lo[i] > hi[i]) throw std::invalid_argument("window: lo > hi");
    }

    std::size_t nvars() const { return lo.size(); }

    bool contains(const Multidegree& d) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (d[i] < lo[i] || d[i] > hi[i]) return false;
        return true;
    }

    void for_each(const std::function<void(const Multidegree&)>& f) const {
        Multidegree d = lo;
        if (lo.empty()) {
            f(d);
            return;
        }
        while (true) {
            f(d);
            std::size_t i = 0;
            while (i < d.size()) {
                if (d[i] < hi[i]) {
                    ++d[i];
                    break;
                }
                d[i] = lo[i];
                ++i;
            }
            if (i == d.size()) break;
        }
    }

    bool operator==(const Window& o) const { return lo == o.lo && hi == o.hi; }
};

}  // namespace adelica
