#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace latsym {

/// Shift offset in Z^p. Addition/negation are componentwise; `dominates`
/// is the componentwise partial order used for stencil and solved-form tests.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}
    MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}

    static MultiIndex zero(std::size_t p) { return MultiIndex(std::vector<int>(p, 0)); }
    static MultiIndex unit(std::size_t p, std::size_t axis) {   // axis is 1-based
        std::vector<int> e(p, 0);
        e.at(axis - 1) = 1;
        return MultiIndex(std::move(e));
    }

    std::size_t dim() const { return entries_.size(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<int>& entries() const { return entries_; }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] += o.entries_[i];
        return r;
    }
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] -= o.entries_[i];
        return r;
    }
    MultiIndex operator-() const {
        MultiIndex r = *this;
        for (auto& e : r.entries_) e = -e;
        return r;
    }

    /// Componentwise J >= K.
    bool dominates(const MultiIndex& o) const {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i] < o.entries_[i]) return false;
        return true;
    }
    bool is_zero() const {
        for (int e : entries_)
            if (e != 0) return false;
        return true;
    }
    int sum() const {
        int s = 0;
        for (int e : entries_) s += e;
        return s;
    }

    bool operator==(const MultiIndex& o) const = default;
    auto operator<=>(const MultiIndex& o) const = default;   // lexicographic, for ordered maps

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(entries_[i]);
        }
        return s + ")";
    }

private:
    std::vector<int> entries_;
};

} // namespace latsym
