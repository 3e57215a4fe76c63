#include "holoq/models.hpp"

#include <cmath>

#include "holoq/errors.hpp"

namespace holoq {

namespace {

constexpr double kEpTol = 1e-12;

double sq(double x) { return x * x; }

// H = p_x sx + p_y sy + (p_z + i s) sz
class DiracReference final : public ReferenceBundle {
public:
    explicit DiracReference(double s) : s_(s) {}

    std::pair<cplx, cplx> energies(const Vec3& p) const override {
        const cplx e = root(p, +1.0);
        return {e, -e};
    }

    ComplexMatrix right_vectors(const Vec3& p) const override {
        const cplx e = root(p, +1.0);
        const cplx top = e + I_UNIT * s_ + p[2];
        return {{top, -p[0] + I_UNIT * p[1]}, {p[0] + I_UNIT * p[1], top}};
    }

    ComplexMatrix left_vectors(const Vec3& p) const override {
        const cplx ec = root(p, -1.0);
        const cplx num = ec + I_UNIT * s_ - p[2];
        const cplx inv2 = 1.0 / (2.0 * ec);
        return {{inv2, -num / (2.0 * (p[0] + I_UNIT * p[1]) * ec)}, {num / (2.0 * (p[0] - I_UNIT * p[1]) * ec), inv2}};
    }

    ComplexMatrix metric(const Vec3& p) const override {
        const double rho2 = sq(p[0]) + sq(p[1]);
        // The closed form belongs to the vectors above divided by |E|.
        if (std::abs(p[2]) <= kEpTol && rho2 > sq(s_)) {
            const cplx off = -s_ * (p[1] + I_UNIT * p[0]) / rho2;
            return {{0.5, 0.5 * off}, {0.5 * std::conj(off), 0.5}};
        }
        const auto a = right_vectors(p);
        return cplx{std::norm(root(p, +1.0)), 0.0} * linalg::inverse(a * a.adjoint());
    }

    std::array<cplx, 3> curvature(const Vec3& p, std::size_t band) const override {
        if (is_exceptional(p)) throw NumericalError(ErrorCode::OnEP, "dirac curvature: point on the EP ring", p);
        const double rho2 = sq(p[0]) + sq(p[1]);
        if (std::abs(p[2]) > kEpTol || rho2 <= sq(s_))
            throw NumericalError(ErrorCode::OutOfValidity,
                                 "dirac curvature: closed form holds on p_z = 0 outside the EP ring", p);
        // B = -/+ d / (2 (d.d)^{3/2}) with d = (p_x, p_y, p_z + i s); the z part is
        // -/+ (i/2) s / (rho^2 - s^2)^{3/2}, the in-plane part is real.
        const double sign = band == 0 ? -1.0 : 1.0;
        const double denom = 2.0 * std::pow(rho2 - sq(s_), 1.5);
        return {sign * p[0] / denom, sign * p[1] / denom, sign * cplx{p[2], s_} / denom};
    }

    bool is_exceptional(const Vec3& p) const override {
        return s_ != 0.0 && std::abs(p[2]) <= kEpTol && std::abs(sq(p[0]) + sq(p[1]) - sq(s_)) <= kEpTol;
    }

private:
    // sqrt(p^2 - s^2 + sign * 2 i p_z s), principal branch.
    cplx root(const Vec3& p, double sign) const {
        const double re = sq(p[0]) + sq(p[1]) + sq(p[2]) - sq(s_);
        const double im = sign * 2.0 * p[2] * s_;
        return std::sqrt(cplx{re, im});
    }

    double s_;
};

// H = i x sx + i y sy + z sz
class BdgReference final : public ReferenceBundle {
public:
    std::pair<cplx, cplx> energies(const Vec3& r) const override {
        const cplx e = std::sqrt(cplx{sq(r[2]) - sq(r[0]) - sq(r[1]), 0.0});
        return {e, -e};
    }

    ComplexMatrix right_vectors(const Vec3& r) const override {
        const auto [a, b] = ab(r);
        return {{a, std::conj(b)}, {b, std::conj(a)}};
    }

    ComplexMatrix left_vectors(const Vec3& r) const override {
        upper_sheet(r, "left vectors");
        const auto [a, b] = ab(r);
        // phi^2 = (-b*, a*): the reference (b*, -a*) has <phi^2|psi_2> = -1.
        return {{a, -std::conj(b)}, {-b, std::conj(a)}};
    }

    ComplexMatrix metric(const Vec3& r) const override {
        upper_sheet(r, "metric");
        const auto [a, b] = ab(r);
        const double n = std::norm(a) + std::norm(b);
        return {{n, -2.0 * a * std::conj(b)}, {-2.0 * std::conj(a) * b, n}};
    }

    std::array<cplx, 3> curvature(const Vec3& r, std::size_t band) const override {
        if (is_exceptional(r)) throw NumericalError(ErrorCode::OnEP, "bdg curvature: point on the EP cone", r);
        const double rho2 = sq(r[0]) + sq(r[1]);
        const double r2 = rho2 + sq(r[2]);
        if (sq(r[2]) <= rho2 || r2 == 0.0)
            throw NumericalError(ErrorCode::OutOfValidity, "bdg curvature: closed form holds inside the cone", r);
        // +/- (1 + tan^2)^{3/2} / (2 (1 - tan^2)^{3/2}) R_hat / |R|^2, i.e.
        // +/- R / (2 (z^2 - x^2 - y^2)^{3/2}), upper sign for band 1.
        const double tan2 = rho2 / sq(r[2]);
        const double mag = std::pow(1.0 + tan2, 1.5) / (2.0 * std::pow(1.0 - tan2, 1.5)) / r2;
        const double sign = band == 0 ? 1.0 : -1.0;
        const double len = std::sqrt(r2);
        return {sign * mag * r[0] / len, sign * mag * r[1] / len, sign * mag * r[2] / len};
    }

    bool is_exceptional(const Vec3& r) const override {
        const double rho2 = sq(r[0]) + sq(r[1]);
        return rho2 + sq(r[2]) > kEpTol && std::abs(sq(r[2]) - rho2) <= kEpTol;
    }

    std::optional<ConstantY> constant_y() const override { return ConstantY{pauli::z(), {1, -1}, 0.0}; }

private:
    // For z < 0 the principal roots give <phi^j|psi_j> = -1.
    static void upper_sheet(const Vec3& r, const char* what) {
        if (!(r[2] > 0.0))
            throw NumericalError(ErrorCode::OutOfValidity, std::string("bdg closed-form ") + what + " hold for z > 0", r);
    }

    static std::pair<cplx, cplx> ab(const Vec3& r) {
        const cplx e = std::sqrt(cplx{sq(r[2]) - sq(r[0]) - sq(r[1]), 0.0});
        const cplx d = std::sqrt(e * e + r[2] * e);
        const double rt2 = std::sqrt(2.0);
        return {-(r[2] + e) / (rt2 * d), cplx{r[1], -r[0]} / (rt2 * d)};
    }
};

const ReferenceBundle& require_reference(const Model& model) {
    if (model.reference() == nullptr)
        throw NumericalError(ErrorCode::NoReference, "model '" + model.name() + "' has no closed-form reference");
    return *model.reference();
}

}  // namespace

Model::Model(std::string name, std::size_t dim, std::size_t param_dim, double s, Evaluator eval,
             std::shared_ptr<const ReferenceBundle> ref)
    : name_(std::move(name)), dim_(dim), param_dim_(param_dim), s_(s), evaluate_(std::move(eval)), reference_(std::move(ref)) {}

Model Model::dirac(double s) {
    auto eval = [s](const Vec3& p) {
        const cplx w{p[2], s};
        return ComplexMatrix{{w, cplx{p[0], -p[1]}}, {cplx{p[0], p[1]}, -w}};
    };
    return Model("dirac", 2, 3, s, eval, std::make_shared<DiracReference>(s));
}

Model Model::bdg() {
    auto eval = [](const Vec3& r) {
        return ComplexMatrix{{r[2], cplx{r[1], r[0]}}, {cplx{-r[1], r[0]}, -r[2]}};
    };
    return Model("bdg", 2, 3, 0.0, eval, std::make_shared<BdgReference>());
}

Model Model::custom(std::string name, std::size_t dim, std::size_t param_dim, Evaluator evaluate) {
    if (dim == 0 || param_dim == 0 || param_dim > 3)
        throw std::invalid_argument("Model::custom: need dim >= 1 and 1 <= param_dim <= 3");
    return Model(std::move(name), dim, param_dim, 0.0, std::move(evaluate), nullptr);
}

ComplexMatrix Model::hamiltonian(const Vec3& r) const {
    auto h = evaluate_(r);
    if (h.rows() != dim_ || h.cols() != dim_)
        throw NumericalError(ErrorCode::DimensionMismatch, "model '" + name_ + "' returned a matrix of the wrong size", r);
    return h;
}

ComplexMatrix model_hamiltonian(const Model& model, const Vec3& r) { return model.hamiltonian(r); }

std::pair<cplx, cplx> reference_energies(const Model& model, const Vec3& r) { return require_reference(model).energies(r); }

std::array<cplx, 3> reference_curvature(const Model& model, const Vec3& r, std::size_t band) {
    if (band > 1) throw NumericalError(ErrorCode::DimensionMismatch, "reference_curvature: band must be 0 or 1");
    return require_reference(model).curvature(r, band);
}

bool is_exceptional(const Model& model, const Vec3& r) { return require_reference(model).is_exceptional(r); }

BiorthFrame reference_frame(const Model& model, const Vec3& r) {
    const auto& ref = require_reference(model);
    const auto [e1, e2] = ref.energies(r);
    auto frame = frame_from_right({e1, e2}, ref.right_vectors(r));
    return frame;
}

BiorthFrame aligned_reference_frame(const Model& model, const Vec3& r) {
    const auto frame = reference_frame(model, r);
    CVector factors(frame.dim());
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        auto v = frame.psi(j);
        const double n = norm2(v);
        double vmax = 0.0;
        for (const auto& z : v) vmax = std::max(vmax, std::abs(z));
        std::size_t pivot = 0;
        while (std::abs(v[pivot]) <= 1e-10 * vmax) ++pivot;
        factors[j] = std::conj(v[pivot]) / std::abs(v[pivot]) / n;
    }
    return regauge(frame, factors);
}

BiorthFrame frame_at(const Model& model, const Vec3& r, const FrameOptions& opts) {
    try {
        return build_frame(model.hamiltonian(r), opts);
    } catch (NumericalError& e) {
        if (!e.where()) e.set_where(r);
        throw;
    }
}

}  // namespace holoq
