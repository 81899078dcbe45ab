#include "linksim/modem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace linksim {

namespace {

// log P(b=0) and log P(b=1) under l = ln P0/P1, numerically stable.
inline double log_p0(double llr) { return llr >= 0 ? -std::log1p(std::exp(-llr)) : llr - std::log1p(std::exp(llr)); }
inline double log_p1(double llr) { return log_p0(-llr); }

inline double logsumexp(const double* vals, int n) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::max(m, vals[i]);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(vals[i] - m);
    return m + std::log(s);
}

}  // namespace

const Constellation& Constellation::qpsk() {
    static const Constellation c = [] {
        Constellation q;
        q.bits_per_symbol = 2;
        const double s = 1.0 / std::sqrt(2.0);
        q.points.resize(4);
        for (int p = 0; p < 4; ++p) {
            int b0 = (p >> 1) & 1;
            int b1 = p & 1;
            q.points[p] = cd((1 - 2 * b0) * s, (1 - 2 * b1) * s);
        }
        return q;
    }();
    return c;
}

std::vector<cd> map_bits(const Constellation& c, const std::vector<uint8_t>& bits) {
    const int m = c.bits_per_symbol;
    if (bits.size() % m != 0) throw std::invalid_argument("map_bits: bit count not divisible by bits/symbol");
    std::vector<cd> out(bits.size() / m);
    for (size_t s = 0; s < out.size(); ++s) {
        int p = 0;
        for (int j = 0; j < m; ++j) p = (p << 1) | (bits[s * m + j] & 1);
        out[s] = c.points[p];
    }
    return out;
}

int hard_demap(const Constellation& c, cd symbol) {
    int best = 0;
    double best_d = std::norm(symbol - c.points[0]);
    for (int p = 1; p < c.size(); ++p) {
        double d = std::norm(symbol - c.points[p]);
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

SoftSymbol soft_symbol(const Constellation& c, const std::vector<double>& prior_llrs) {
    const int m = c.bits_per_symbol;
    if (static_cast<int>(prior_llrs.size()) != m) throw std::invalid_argument("soft_symbol: prior count != bits/symbol");
    cd mean(0.0, 0.0);
    double power = 0.0;
    for (int p = 0; p < c.size(); ++p) {
        double lp = 0.0;
        for (int j = 0; j < m; ++j) lp += c.bit_of(p, j) ? log_p1(prior_llrs[j]) : log_p0(prior_llrs[j]);
        double prob = std::exp(lp);
        mean += prob * c.points[p];
        power += prob * std::norm(c.points[p]);
    }
    return {mean, std::max(0.0, power - std::norm(mean))};
}

std::vector<double> demap_llr(const Constellation& c, cd u, double v_amp, double sigma_eps2,
                              const std::vector<double>& prior_llrs, bool max_log) {
    const int m = c.bits_per_symbol;
    if (sigma_eps2 <= 0.0) throw std::invalid_argument("demap_llr: sigma_eps2 must be positive");
    if (static_cast<int>(prior_llrs.size()) != m) throw std::invalid_argument("demap_llr: prior count != bits/symbol");

    const int npts = c.size();
    std::vector<double> base(npts);
    for (int p = 0; p < npts; ++p) {
        double metric = -std::norm(u - v_amp * c.points[p]) / sigma_eps2;
        for (int j = 0; j < m; ++j) metric += c.bit_of(p, j) ? log_p1(prior_llrs[j]) : log_p0(prior_llrs[j]);
        base[p] = metric;
    }

    std::vector<double> out(m);
    std::vector<double> num, den;
    num.reserve(npts);
    den.reserve(npts);
    for (int j = 0; j < m; ++j) {
        num.clear();
        den.clear();
        const double own0 = log_p0(prior_llrs[j]);
        const double own1 = log_p1(prior_llrs[j]);
        for (int p = 0; p < npts; ++p) {
            // strip bit j's own prior: extrinsic output
            double metric = base[p] - (c.bit_of(p, j) ? own1 : own0);
            (c.bit_of(p, j) ? den : num).push_back(metric);
        }
        double l0, l1;
        if (max_log) {
            l0 = *std::max_element(num.begin(), num.end());
            l1 = *std::max_element(den.begin(), den.end());
        } else {
            l0 = logsumexp(num.data(), static_cast<int>(num.size()));
            l1 = logsumexp(den.data(), static_cast<int>(den.size()));
        }
        out[j] = l0 - l1;
    }
    return out;
}

}  // namespace linksim
