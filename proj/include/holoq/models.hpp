#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "holoq/biorthogonal.hpp"
#include "holoq/matrix.hpp"

namespace holoq {

// Constant Hermitian Y with phi^j = alpha_j Y psi_j (in the Y-normalised gauge).
struct ConstantY {
    ComplexMatrix y;
    std::vector<int> alphas;
    double residual = 0.0;
};

/// Closed-form results attached to a built-in model. The eigenvectors are
/// returned exactly as written in the closed forms (unnormalised gauge).
class ReferenceBundle {
public:
    virtual ~ReferenceBundle() = default;

    virtual std::pair<cplx, cplx> energies(const Vec3& r) const = 0;
    // Columns: psi_1, psi_2 (right) and phi^1, phi^2 (left).
    virtual ComplexMatrix right_vectors(const Vec3& r) const = 0;
    virtual ComplexMatrix left_vectors(const Vec3& r) const = 0;
    virtual ComplexMatrix metric(const Vec3& r) const = 0;
    // band is 0 or 1; throws OnEP / OutOfValidity.
    virtual std::array<cplx, 3> curvature(const Vec3& r, std::size_t band) const = 0;
    virtual bool is_exceptional(const Vec3& r) const = 0;
    virtual std::optional<ConstantY> constant_y() const { return std::nullopt; }
};

/// A parametric Hamiltonian R -> H(R). Immutable and cheap to copy; the
/// evaluation callback must be reentrant.
class Model {
public:
    using Evaluator = std::function<ComplexMatrix(const Vec3&)>;

    static Model dirac(double s);
    static Model bdg();
    static Model custom(std::string name, std::size_t dim, std::size_t param_dim, Evaluator evaluate);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return dim_; }
    std::size_t param_dim() const { return param_dim_; }
    // Gain/loss constant of the Dirac model, 0 otherwise.
    double gain_loss() const { return s_; }

    ComplexMatrix hamiltonian(const Vec3& r) const;
    const ReferenceBundle* reference() const { return reference_.get(); }

private:
    Model(std::string name, std::size_t dim, std::size_t param_dim, double s, Evaluator eval,
          std::shared_ptr<const ReferenceBundle> ref);

    std::string name_;
    std::size_t dim_ = 0;
    std::size_t param_dim_ = 0;
    double s_ = 0.0;
    Evaluator evaluate_;
    std::shared_ptr<const ReferenceBundle> reference_;
};

ComplexMatrix model_hamiltonian(const Model& model, const Vec3& r);

// Principal-branch closed form, E1 = +root, E2 = -root. NoReference for custom models.
std::pair<cplx, cplx> reference_energies(const Model& model, const Vec3& r);
std::array<cplx, 3> reference_curvature(const Model& model, const Vec3& r, std::size_t band);
bool is_exceptional(const Model& model, const Vec3& r);

// Frame assembled from the closed-form vectors, verbatim gauge.
BiorthFrame reference_frame(const Model& model, const Vec3& r);
// Same frame rescaled into the canonical numerical gauge (unit norm, first component real positive).
BiorthFrame aligned_reference_frame(const Model& model, const Vec3& r);

// Frame of H(r), with the evaluation point attached to any thrown error.
BiorthFrame frame_at(const Model& model, const Vec3& r, const FrameOptions& opts = {});

}  // namespace holoq
