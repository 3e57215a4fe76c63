#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace holoq {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using Vec3 = std::array<double, 3>;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Dense row-major complex matrix. Square in every use inside the library,
// but rectangular shapes are allowed for constraint systems.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    explicit ComplexMatrix(std::size_t n) : ComplexMatrix(n, n) {}
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const cplx> d);
    static ComplexMatrix from_columns(std::span<const CVector> columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t dim() const { return rows_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    CVector column(std::size_t j) const;
    CVector row(std::size_t i) const;
    void set_column(std::size_t j, std::span<const cplx> v);

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;

    double frobenius_norm() const;
    double norm1() const;  // max column sum
    bool is_finite() const;

    std::span<const cplx> data() const { return data_; }

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
CVector operator*(const ComplexMatrix& a, std::span<const cplx> v);

// <a|b> = sum conj(a_i) b_i
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm2(std::span<const cplx> v);
CVector scaled(std::span<const cplx> v, cplx s);
CVector axpy(cplx a, std::span<const cplx> x, std::span<const cplx> y);  // a*x + y
CVector subtract(std::span<const cplx> x, std::span<const cplx> y);

// ||A - B||_F
double distance(const ComplexMatrix& a, const ComplexMatrix& b);
double distance(std::span<const cplx> a, std::span<const cplx> b);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace holoq
