#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace chromnet::nn {

/// Dense row-major array with an explicit shape.
template <class T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        data_.assign(element_count(shape_), T{});
    }

    Tensor(std::vector<int> shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != element_count(shape_)) throw std::invalid_argument("tensor data does not match shape");
    }

    const std::vector<int>& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> span() noexcept { return data_; }
    std::span<const T> span() const noexcept { return data_; }
    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    static std::size_t element_count(const std::vector<int>& shape) {
        std::size_t n = 1;
        for (int d : shape) {
            if (d < 1) throw std::invalid_argument("tensor dimensions must be >= 1");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::vector<int> shape_;
    std::vector<T> data_;
};

} // namespace chromnet::nn
