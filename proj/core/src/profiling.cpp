#include "affqetu/profiling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace aff {

double bessel_i(int n, double x) {
    n = std::abs(n);
    const double half = x / 2.0;
    // leading term (x/2)^n / n!
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k;
    double sum = term;
    for (int m = 1; m < 4000; ++m) {
        term *= half * half / (double(m) * double(m + n));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

Complex FourierCoefficients::at(int k) const {
    const int a = std::abs(k);
    if (a > cutoff) {
        throw BadParametersError("FourierCoefficients: |k| > cutoff");
    }
    return k >= 0 ? values[std::size_t(a)] : std::conj(values[std::size_t(a)]);
}

FourierCoefficients fourier_coefficients(int d, double beta) {
    if (d < 3 || d > 99 || d % 2 == 0) {
        throw BadParametersError("fourier_coefficients: D must be odd in [3, 99]");
    }
    if (!(beta > 0.1) || !(beta < 50.0)) {
        throw BadParametersError("fourier_coefficients: beta must be in (0.1, 50)");
    }
    FourierCoefficients fc;
    fc.cutoff = d;
    fc.beta = beta;
    fc.values.assign(std::size_t(d) + 1, Complex(0.0, 0.0));
    fc.values[0] = Complex(0.5, 0.0);
    const double prefactor =
        std::sqrt(beta / (2.0 * std::numbers::pi)) * std::exp(-beta);
    for (int k = 1; k < d; k += 2) {
        const int j = (k - 1) / 2;
        const double mag =
            prefactor * (bessel_i(j, beta) + bessel_i(j + 1, beta)) / double(k);
        fc.values[std::size_t(k)] = Complex(0.0, -mag);
    }
    // truncation edge |k| = D keeps only the surviving kernel term
    const double edge = prefactor * bessel_i((d - 1) / 2, beta) / double(d);
    fc.values[std::size_t(d)] = Complex(0.0, -edge);
    return fc;
}

HermitianOperator rescale_for_profiling(const HermitianOperator& h,
                                        const SpectrumBounds& bounds) {
    bounds.validate();
    const double scale = 2.0 / bounds.width();
    CMatrix m = scale * (h.matrix() -
                         bounds.lower * CMatrix::Identity(h.dim(), h.dim())) -
                CMatrix::Identity(h.dim(), h.dim());
    return HermitianOperator(std::move(m));
}

CDFProfile build_cdf(const std::vector<Complex>& moments,
                     const FourierCoefficients& coeffs, int grid_size) {
    if (grid_size < 101) {
        throw BadParametersError("build_cdf: grid size must be >= 101");
    }
    const int d = coeffs.cutoff;
    if (moments.size() != std::size_t(d) + 1) {
        throw BadParametersError("build_cdf: need moments for k = 0..D");
    }
    if (std::abs(moments[0] - Complex(1.0, 0.0)) > 0.2) {
        throw BadParametersError("build_cdf: M_0 must be ~1");
    }
    for (const auto& m : moments) {
        if (std::abs(m) > 1.2) {
            throw BadParametersError("build_cdf: |M_k| > 1.2");
        }
    }
    CDFProfile profile;
    profile.x.resize(std::size_t(grid_size));
    profile.cdf.resize(std::size_t(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        const double x = -1.0 + 2.0 * double(i) / (grid_size - 1);
        profile.x[std::size_t(i)] = x;
        Complex c = coeffs.at(0) * moments[0];
        for (int k = 1; k <= d; k += 2) {
            const Complex term = coeffs.at(k) *
                                 std::exp(Complex(0.0, k * x)) *
                                 moments[std::size_t(k)];
            c += term + std::conj(term); // k and -k pair
        }
        profile.cdf[std::size_t(i)] = c.real();
        profile.max_imag_residual =
            std::max(profile.max_imag_residual, std::abs(c.imag()));
    }
    return profile;
}

void differentiate(CDFProfile& profile) {
    const auto n = profile.x.size();
    if (n < 3) {
        throw BadParametersError("differentiate: grid too small");
    }
    const double h = profile.x[1] - profile.x[0];
    profile.d1.resize(n);
    profile.d2.resize(n);
    const auto& c = profile.cdf;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        profile.d1[i] = (c[i + 1] - c[i - 1]) / (2.0 * h);
        profile.d2[i] = (c[i + 1] - 2.0 * c[i] + c[i - 1]) / (h * h);
    }
    profile.d1[0] = (c[1] - c[0]) / h;
    profile.d1[n - 1] = (c[n - 1] - c[n - 2]) / h;
    profile.d2[0] = profile.d2[1];
    profile.d2[n - 1] = profile.d2[n - 2];
    profile.has_derivatives = true;
}

void differentiate_analytic(CDFProfile& profile,
                            const std::vector<Complex>& moments,
                            const FourierCoefficients& coeffs) {
    const int d = coeffs.cutoff;
    const auto n = profile.x.size();
    profile.d1.resize(n);
    profile.d2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = profile.x[i];
        Complex c1(0.0, 0.0), c2(0.0, 0.0);
        for (int k = 1; k <= d; k += 2) {
            const Complex term = coeffs.at(k) *
                                 std::exp(Complex(0.0, k * x)) *
                                 moments[std::size_t(k)];
            const Complex ik(0.0, double(k));
            c1 += ik * term + std::conj(ik * term);
            c2 += ik * ik * term + std::conj(ik * ik * term);
        }
        profile.d1[i] = c1.real();
        profile.d2[i] = c2.real();
    }
    profile.has_derivatives = true;
}

SpectrumBounds extract_bounds(CDFProfile& profile, double xi1, double xi2,
                              const SpectrumBounds& bounds) {
    if (!profile.has_derivatives) {
        throw BadParametersError("extract_bounds: derivatives not filled");
    }
    if (!(xi1 > 0.0) || !(xi2 > 0.0)) {
        throw BadParametersError("extract_bounds: thresholds must be positive");
    }
    // Thresholds are quoted on energy-unit derivatives dC/dlambda and
    // d2C/dlambda2; the stored d1/d2 are taken on the x grid.
    const double jac = 2.0 / bounds.width();
    const double xi1_x = xi1 / jac;
    const double xi2_x = xi2 / (jac * jac);

    const auto n = profile.x.size();
    const std::size_t peak = std::size_t(
        std::max_element(profile.d1.begin(), profile.d1.end()) -
        profile.d1.begin());
    if (!(profile.d1[peak] > xi1_x)) {
        throw NoQualifyingIntervalError(
            "extract_bounds: no grid point satisfies the growth threshold");
    }
    // growth region: the contiguous C' > xi1 run through the peak
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && profile.d1[lo - 1] > xi1_x) --lo;
    while (hi + 1 < n && profile.d1[hi + 1] > xi1_x) ++hi;
    // onset edge: walk down from the peak while the curvature stays small,
    // so the lower bound hugs the start of the accumulation region
    std::size_t lb = peak;
    while (lb > lo && std::abs(profile.d2[lb - 1]) < xi2_x) --lb;

    const double x_lb = profile.x[lb];
    const double x_ub = profile.x[hi];
    profile.bounds_x = {x_lb, x_ub};
    // invert the profiling rescale: lambda = (width/2) * (x + 2*lower/width + 1)
    const double half = bounds.width() / 2.0;
    const double offset = 2.0 * bounds.lower / bounds.width() + 1.0;
    return SpectrumBounds{half * (x_lb + offset), half * (x_ub + offset)};
}

void write_cdf_csv(const CDFProfile& profile, std::ostream& out) {
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "x,C,C1,C2\n";
    for (std::size_t i = 0; i < profile.x.size(); ++i) {
        const double d1 = profile.has_derivatives ? profile.d1[i] : 0.0;
        const double d2 = profile.has_derivatives ? profile.d2[i] : 0.0;
        out << fmt(profile.x[i]) << ',' << fmt(profile.cdf[i]) << ','
            << fmt(d1) << ',' << fmt(d2) << '\n';
    }
}

MomentAcquisition acquire_moments(const CVector& state,
                                  const HermitianOperator& h,
                                  const SpectrumBounds& bounds, int d,
                                  const ShotBudget& shots,
                                  const NoiseModel& noise, SimMode mode,
                                  const TFIMParams* params, int threads,
                                  int steps_per_unit) {
    bounds.validate();
    MomentAcquisition acq;
    acq.moments.assign(std::size_t(d) + 1, Complex(0.0, 0.0));
    acq.moments[0] = Complex(1.0, 0.0); // <psi|psi>
    const HermitianOperator h_r = rescale_for_profiling(h, bounds);
    const double scale = 2.0 / bounds.width();
    const double shift = -(2.0 * bounds.lower / bounds.width() + 1.0);
    for (int k = 1; k <= d; k += 2) {
        GateList cu;
        const GateList* cu_ptr = nullptr;
        if (mode == SimMode::Trotter) {
            if (params == nullptr) {
                throw BadParametersError(
                    "acquire_moments: trotter mode needs TFIM parameters");
            }
            cu = evolution_circuit(*params, scale, shift, double(k), true,
                                   params->sites, steps_per_unit);
            cu_ptr = &cu;
        }
        ShotBudget moment_shots{shots.total_shots,
                                splitmix64(shots.rng_seed ^
                                           splitmix64(std::uint64_t(k)))};
        acq.moments[std::size_t(k)] = estimate_moment(
            state, h_r, double(k), moment_shots, noise, mode, cu_ptr, threads);
        acq.sampled_k.push_back(k);
        acq.evolution_time += scale * k;
    }
    return acq;
}

} // namespace aff
