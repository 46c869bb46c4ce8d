#include "affqetu/phase_cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace aff {

namespace {

constexpr const char* kMagic = "qsp-cache-v1";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string make_key(int eta, double mu, double halfwidth) {
    return std::to_string(eta) + " " + fmt17(mu) + " " + fmt17(halfwidth);
}

} // namespace

PhaseCache PhaseCache::load(const std::string& path) {
    PhaseCache cache;
    std::ifstream in(path);
    if (!in) return cache;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string magic;
        ss >> magic;
        if (magic != kMagic) continue;
        StepPolynomial poly;
        std::size_t ncoef = 0, nph = 0;
        ss >> poly.degree >> poly.cutoff >> poly.band_halfwidth >>
            poly.residual >> ncoef;
        poly.cheb_coeffs.resize(ncoef);
        for (auto& c : poly.cheb_coeffs) ss >> c;
        QSPPhases phases;
        ss >> nph;
        phases.phases.resize(nph);
        for (auto& p : phases.phases) ss >> p;
        if (!ss.fail()) {
            cache.records_[make_key(poly.degree, poly.cutoff,
                                    poly.band_halfwidth)] = {poly, phases};
        }
    }
    return cache;
}

std::optional<std::pair<StepPolynomial, QSPPhases>>
PhaseCache::lookup(int eta, double mu, double halfwidth) const {
    const auto it = records_.find(make_key(eta, mu, halfwidth));
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void PhaseCache::store(const StepPolynomial& poly, const QSPPhases& phases) {
    records_[make_key(poly.degree, poly.cutoff, poly.band_halfwidth)] = {
        poly, phases};
}

void PhaseCache::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    out << "# affqetu phase cache\n";
    for (const auto& [key, rec] : records_) {
        const auto& [poly, phases] = rec;
        out << kMagic << ' ' << poly.degree << ' ' << fmt17(poly.cutoff) << ' '
            << fmt17(poly.band_halfwidth) << ' ' << fmt17(poly.residual) << ' '
            << poly.cheb_coeffs.size();
        for (double c : poly.cheb_coeffs) out << ' ' << fmt17(c);
        out << ' ' << phases.phases.size();
        for (double p : phases.phases) out << ' ' << fmt17(p);
        out << '\n';
    }
}

std::pair<StepPolynomial, QSPPhases>
PhaseCache::obtain(int eta, double mu, double halfwidth) {
    if (auto hit = lookup(eta, mu, halfwidth)) return *hit;
    StepPolynomial poly = approximate_step(eta, mu, halfwidth);
    QSPPhases phases = find_phases(poly);
    store(poly, phases);
    return {poly, phases};
}

} // namespace aff
