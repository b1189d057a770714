#pragma once

namespace hilfer {

/// Choice of the smoothness index used for the V_gamma norms.
enum class GammaChoice { InverseMu, Half };

/// Orders (mu, nu) of the Hilfer derivative, 1 < mu <= 2 and 0 <= nu <= 1.
class FractionalOrder {
public:
    FractionalOrder(double mu, double nu);

    double mu() const noexcept { return mu_; }
    double nu() const noexcept { return nu_; }

    /// (1 - nu)(2 - mu), the order of the inner integral and the singular exponent at t = 0.
    double beta() const noexcept { return (1.0 - nu_) * (2.0 - mu_); }

    /// nu (2 - mu), the order of the outer integral.
    double nu_gap() const noexcept { return nu_ * (2.0 - mu_); }

    double gamma(GammaChoice choice) const noexcept { return choice == GammaChoice::Half ? 0.5 : 1.0 / mu_; }

private:
    double mu_;
    double nu_;
};

} // namespace hilfer
