#include "genboot/tensor/array.hpp"

#include <cmath>
#include <numeric>

namespace genboot::tensor {

std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(shape[i]);
    }
    return out + ")";
}

Array::Array(Shape shape, double fill) : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Array::Array(Shape shape, std::vector<double> values) : shape_(std::move(shape)), data_(std::move(values)) {
    if (data_.size() != element_count(shape_)) {
        throw ShapeError("Array: " + std::to_string(data_.size()) + " values do not fill shape " +
                         shape_string(shape_));
    }
}

Array Array::vector(std::initializer_list<double> values) {
    return Array(Shape{values.size()}, std::vector<double>(values));
}

double Array::item() const {
    if (data_.size() != 1) {
        throw ShapeError("Array::item on array of shape " + shape_string(shape_));
    }
    return data_[0];
}

std::size_t Array::first_non_finite() const noexcept {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) return i;
    }
    return data_.size();
}

Array Array::reshaped(Shape shape) const& {
    Array copy = *this;
    return std::move(copy).reshaped(std::move(shape));
}

Array Array::reshaped(Shape shape) && {
    if (element_count(shape) != data_.size()) {
        throw ShapeError("reshape " + shape_string(shape_) + " -> " + shape_string(shape) +
                         " changes the element count");
    }
    shape_ = std::move(shape);
    return std::move(*this);
}

}  // namespace genboot::tensor
