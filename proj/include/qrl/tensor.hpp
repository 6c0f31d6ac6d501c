#pragma once

#include <cmath>
#include <cstdint>
#include <new>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qrl {

// 64-byte aligned storage. Keeping every tensor base pointer on the same
// alignment makes Eigen's vectorized kernels pick identical code paths on
// every run, which the byte-identical-metrics guarantee depends on.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) {}
    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(64)));
    }
    void deallocate(T* p, std::size_t n) {
        ::operator delete(p, n * sizeof(T), std::align_val_t(64));
    }
    bool operator==(const AlignedAllocator&) const { return true; }
    bool operator!=(const AlignedAllocator&) const { return false; }
};

// Dense row-major tensor of doubles, up to 4 dims. Used both for network
// activations/parameters and for environment observations (H, W, C).
struct Tensor {
    std::vector<int> shape;
    std::vector<double, AlignedAllocator<double>> data;

    Tensor() = default;

    static Tensor zeros(std::vector<int> shape) {
        Tensor t;
        t.shape = std::move(shape);
        t.data.assign(static_cast<std::size_t>(numel(t.shape)), 0.0);
        return t;
    }

    static std::int64_t numel(const std::vector<int>& shape) {
        std::int64_t n = 1;
        for (int d : shape) {
            if (d <= 0) throw std::invalid_argument("tensor dim must be positive");
            n *= d;
        }
        return n;
    }

    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }

    double& at(int i) { return data[static_cast<std::size_t>(i)]; }
    double at(int i) const { return data[static_cast<std::size_t>(i)]; }

    // (h, w, c) indexing for 3-d observations.
    double& at(int h, int w, int c) {
        return data[static_cast<std::size_t>((h * shape[1] + w) * shape[2] + c)];
    }
    double at(int h, int w, int c) const {
        return data[static_cast<std::size_t>((h * shape[1] + w) * shape[2] + c)];
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

} // namespace qrl
