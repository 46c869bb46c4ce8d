#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "affqetu/qsp.hpp"
#include "affqetu/step_poly.hpp"

// Optional on-disk cache of synthesized polynomials and their phases, keyed
// by (degree, cutoff, halfwidth). One record per line, decimal values with
// 17 significant digits, so files round-trip bit-exactly.

namespace aff {

class PhaseCache {
public:
    PhaseCache() = default;

    /// Load records from `path`; a missing file yields an empty cache.
    static PhaseCache load(const std::string& path);

    std::optional<std::pair<StepPolynomial, QSPPhases>>
    lookup(int eta, double mu, double halfwidth) const;

    void store(const StepPolynomial& poly, const QSPPhases& phases);

    /// Rewrite the backing file with all records.
    void save(const std::string& path) const;

    std::size_t size() const { return records_.size(); }

    /// Cached synthesis: lookup, else approximate_step + find_phases + store.
    std::pair<StepPolynomial, QSPPhases>
    obtain(int eta, double mu, double halfwidth);

private:
    std::map<std::string, std::pair<StepPolynomial, QSPPhases>> records_;
};

} // namespace aff
