#pragma once

#include <cstddef>
#include <vector>

namespace headgate {

// Dense row-major matrix. Scalar is float on the production path; the double
// instantiation exists so oracle tests can rerun the same math with 64-bit
// storage and accumulation.
template <typename Scalar>
struct TMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Scalar> data;

    TMat() = default;
    TMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Scalar(0)) {}

    Scalar& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    Scalar at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    Scalar* row(std::size_t r) { return data.data() + r * cols; }
    const Scalar* row(std::size_t r) const { return data.data() + r * cols; }

    bool same_shape(const TMat& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

using Matrix = TMat<float>;
using MatrixD = TMat<double>;

template <typename To, typename From>
TMat<To> cast_matrix(const TMat<From>& m) {
    TMat<To> out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = static_cast<To>(m.data[i]);
    return out;
}

}  // namespace headgate
