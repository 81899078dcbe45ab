#include "linksim/llrcomp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace linksim {

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

namespace {

void check_partition(size_t n, std::span<const int> sys, std::span<const int> par) {
    if (sys.empty() || par.empty()) throw std::invalid_argument("compensate: need 1 <= K < N");
    if (sys.size() + par.size() != n) throw std::invalid_argument("compensate: masks do not partition the vector");
}

double max_abs(std::span<const double> llr, std::span<const int> idx) {
    double m = 0.0;
    for (int j : idx) m = std::max(m, std::abs(llr[j]));
    return m;
}

}  // namespace

CompensationResult compensate(std::span<double> llr, std::span<const int> systematic_cols,
                              std::span<const int> parity_cols) {
    check_partition(llr.size(), systematic_cols, parity_cols);
    CompensationResult r;
    r.alpha = max_abs(llr, systematic_cols);
    r.beta = max_abs(llr, parity_cols);
    r.gamma = r.alpha - r.beta;
    if (r.gamma < 0.0) {
        r.gamma_negative = true;  // systematic side did not dominate; pass through
        return r;
    }
    for (int j : parity_cols) llr[j] = (std::abs(llr[j]) + r.gamma) * sign_of(llr[j]);
    r.applied = true;
    return r;
}

CompensationResult compensate_wcnc(std::span<double> llr, std::span<const int> systematic_cols,
                                   std::span<const int> parity_cols) {
    check_partition(llr.size(), systematic_cols, parity_cols);
    CompensationResult r;
    r.alpha = max_abs(llr, systematic_cols);
    r.beta = 0.0;
    r.gamma = r.alpha;
    for (int j : parity_cols) llr[j] = r.alpha * sign_of(llr[j]);
    r.applied = true;
    return r;
}

namespace {

std::vector<int> iota_range(int lo, int hi) {
    std::vector<int> v(hi - lo);
    std::iota(v.begin(), v.end(), lo);
    return v;
}

}  // namespace

std::vector<double> compensate(const std::vector<double>& llr, int k, CompensationResult* info) {
    if (k < 1 || k >= static_cast<int>(llr.size())) throw std::invalid_argument("compensate: need 1 <= K < N");
    std::vector<double> out(llr);
    auto sys = iota_range(0, k);
    auto par = iota_range(k, static_cast<int>(llr.size()));
    auto r = compensate(std::span<double>(out), sys, par);
    if (info) *info = r;
    return out;
}

std::vector<double> compensate_wcnc(const std::vector<double>& llr, int k, CompensationResult* info) {
    if (k < 1 || k >= static_cast<int>(llr.size())) throw std::invalid_argument("compensate: need 1 <= K < N");
    std::vector<double> out(llr);
    auto sys = iota_range(0, k);
    auto par = iota_range(k, static_cast<int>(llr.size()));
    auto r = compensate_wcnc(std::span<double>(out), sys, par);
    if (info) *info = r;
    return out;
}

}  // namespace linksim
