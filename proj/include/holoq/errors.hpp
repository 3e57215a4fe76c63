#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "holoq/matrix.hpp"

namespace holoq {

enum class ErrorCode {
    NoConvergence,
    Singular,
    NonDiagonalizable,
    NearDefective,
    DimensionMismatch,
    NoReference,
    OnEP,
    OutOfValidity,
    ComplexSpectrum,
    StepTooCoarse,
    LeakageTooLarge,
    NotClosed,
    EdgeTooLong,
    StepDegenerate,
    SurfaceTouchesEP,
    InsufficientSamples,
    ZeroFactor,
    Degenerate,
    BandExchange,
    ColumnMismatch,
};

std::string_view to_string(ErrorCode code);

// Every numerical failure in the library. `where` carries the parameter
// point that triggered it when one is known.
class NumericalError : public std::runtime_error {
public:
    NumericalError(ErrorCode code, const std::string& what, std::optional<Vec3> where = std::nullopt)
        : std::runtime_error(what), code_(code), where_(where) {}

    ErrorCode code() const noexcept { return code_; }
    const std::optional<Vec3>& where() const noexcept { return where_; }
    void set_where(const Vec3& r) { where_ = r; }

private:
    ErrorCode code_;
    std::optional<Vec3> where_;
};

}  // namespace holoq
