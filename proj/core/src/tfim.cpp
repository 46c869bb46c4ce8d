#include "affqetu/tfim.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace aff {

void TFIMParams::validate() const {
    if (sites < 2) {
        throw BadParametersError("TFIMParams: sites must be >= 2");
    }
    if (!ring) {
        throw BadParametersError("TFIMParams: only the ring coupling is supported");
    }
    if (!std::isfinite(coupling) || !std::isfinite(field)) {
        throw BadParametersError("TFIMParams: non-finite coefficients");
    }
}

void SpectrumBounds::validate() const {
    if (!(lower < upper)) {
        throw DegenerateBoundsError("SpectrumBounds: lower must be < upper");
    }
}

TransformCoefficients TransformCoefficients::from_bounds(
    const SpectrumBounds& bounds) {
    bounds.validate();
    const double c1 = std::numbers::pi / (2.0 * bounds.width());
    return TransformCoefficients{c1, -c1 * bounds.lower};
}

HermitianOperator build_tfim(const TFIMParams& params) {
    params.validate();
    if (params.sites > 12) {
        throw TooLargeError("build_tfim: sites > 12 not supported");
    }
    const int L = params.sites;
    const int bonds = (L >= 3) ? L : 1; // the two-site ring has one bond
    const Eigen::Index dim = Eigen::Index(1) << L;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int b = 0; b < bonds; ++b) {
            const int j = b;
            const int k = (b + 1) % L;
            const int zj = ((s >> j) & 1) ? -1 : 1;
            const int zk = ((s >> k) & 1) ? -1 : 1;
            diag -= params.coupling * zj * zk;
        }
        h(s, s) = diag;
        for (int j = 0; j < L; ++j) {
            h(s ^ (Eigen::Index(1) << j), s) -= params.field;
        }
    }
    return HermitianOperator(std::move(h));
}

HermitianOperator linear_transform(const HermitianOperator& h,
                                   const SpectrumBounds& bounds) {
    bounds.validate();
    const double scale = std::numbers::pi / bounds.width();
    CMatrix m = scale * (h.matrix() -
                         bounds.lower * CMatrix::Identity(h.dim(), h.dim()));
    return HermitianOperator(std::move(m));
}

double cosine_map(double lambda_t) {
    double x = lambda_t;
    if (x < 0.0 || x > std::numbers::pi) {
        std::clog << "cosine_map: clamping out-of-range argument " << x << "\n";
        x = std::clamp(x, 0.0, std::numbers::pi);
    }
    return std::cos(x / 2.0);
}

SpectralGaps spectral_gaps(const SpectralDecomposition& decomp,
                           const SpectrumBounds& bounds) {
    bounds.validate();
    const RVector& ev = decomp.eigenvalues;
    double lambda0 = ev(0);
    double lambda1 = 0.0;
    bool found = false;
    for (Eigen::Index j = 1; j < ev.size(); ++j) {
        if (ev(j) - lambda0 > kDegeneracyTol) {
            lambda1 = ev(j);
            found = true;
            break;
        }
    }
    if (!found) {
        throw FullyDegenerateError("spectral_gaps: spectrum has a single level");
    }
    const auto tc = TransformCoefficients::from_bounds(bounds);
    const double a0 = std::cos(tc.c1 * lambda0 + tc.c2);
    const double a1 = std::cos(tc.c1 * lambda1 + tc.c2);
    return SpectralGaps{lambda1 - lambda0, a0 - a1, a0, a1};
}

SpectrumBounds default_bounds(const TFIMParams& params, double margin) {
    params.validate();
    const int bonds = (params.sites >= 3) ? params.sites : 1;
    const double norm = std::abs(params.coupling) * bonds +
                        std::abs(params.field) * params.sites;
    return SpectrumBounds{-norm * margin, norm * margin};
}

} // namespace aff
