#pragma once

#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

namespace genboot::bootstrap::detail {

/// Runs body(i) for i in [0, n) on the OpenMP team. If any call throws, the
/// failure with the smallest index is rethrown as std::runtime_error with
/// "<what> <i>: " prepended.
template <class Body>
void parallel_for_indexed(std::size_t n, const char* what, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(what) + " " + std::to_string(i) + ": " + e.what());
        }
    }
}

}  // namespace genboot::bootstrap::detail
