#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace genboot::tensor {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major array of doubles. A rank-0 array holds one value.
class Array {
public:
    Array() : data_(1, 0.0) {}
    explicit Array(Shape shape, double fill = 0.0);
    Array(Shape shape, std::vector<double> values);

    static Array scalar(double value) { return Array(Shape{}, std::vector<double>{value}); }
    static Array vector(std::initializer_list<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    /// Value of a single-element array.
    double item() const;

    /// Position of the first NaN or infinity, or size() when every entry is finite.
    std::size_t first_non_finite() const noexcept;
    bool all_finite() const noexcept { return first_non_finite() == size(); }

    /// Same data viewed under a new shape with the same element count.
    Array reshaped(Shape shape) const&;
    Array reshaped(Shape shape) &&;

    std::vector<double> release() && { return std::move(data_); }

    bool operator==(const Array& other) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

}  // namespace genboot::tensor
