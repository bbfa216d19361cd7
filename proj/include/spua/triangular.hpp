#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace spua {

// Table indexed by stage t in [1, n] and partial rank s in [1, t].  Row t has
// t entries; storage is one contiguous vector with row offsets, half the
// memory of a square matrix at n = 200.
template <typename T>
class Triangular {
public:
    Triangular() = default;
    explicit Triangular(int n, T init = T{})
        : n_(n), data_(offset(n + 1), init) {}

    int stages() const { return n_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int t, int s) { return data_[index(t, s)]; }
    const T& operator()(int t, int s) const { return data_[index(t, s)]; }

    // Contiguous row t, entries s = 1..t.
    T* row(int t) { return data_.data() + offset(t); }
    const T* row(int t) const { return data_.data() + offset(t); }

    std::vector<T>& flat() { return data_; }
    const std::vector<T>& flat() const { return data_; }

    static std::size_t offset(int t) {
        return static_cast<std::size_t>(t) * (t - 1) / 2;
    }

    std::size_t index(int t, int s) const {
        assert(t >= 1 && t <= n_ && s >= 1 && s <= t);
        return offset(t) + static_cast<std::size_t>(s - 1);
    }

    bool operator==(const Triangular&) const = default;

private:
    int n_ = 0;
    std::vector<T> data_;
};

}  // namespace spua
