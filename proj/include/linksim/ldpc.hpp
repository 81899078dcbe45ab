#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/gf2.hpp"

namespace linksim {

enum class CodeKind { Standard, RootCheck };

struct CodeSpec {
    int n = 0;          // codeword length
    int k = 0;          // information length
    int f = 1;          // fading blocks the code is designed for
    CodeKind kind = CodeKind::Standard;

    double rate() const { return static_cast<double>(k) / n; }
    void validate() const;
};

// Bipartite parity-check graph plus the metadata the rest of the system needs:
// systematic/parity column sets, per-variable fading block, and a factorized
// parity submatrix for encoding.
struct TannerGraph {
    CodeSpec spec;
    int num_vars = 0;
    int num_checks = 0;
    std::vector<std::vector<int>> check_adj;  // per check: neighbor variables, ascending
    std::vector<std::vector<int>> var_adj;    // per variable: neighbor checks, ascending

    std::vector<int> systematic_cols;  // ascending; size k
    std::vector<int> parity_cols;      // ascending; size n-k
    std::vector<int> var_block;        // fading block of each variable, 0-based
    std::vector<int> check_class;      // RootCheck: block whose info bits the check roots; -1 otherwise

    gf2::Solver parity_solver;  // factorization of H restricted to parity_cols

    int num_edges() const;
    int block_of(int var) const { return var_block[var]; }
    bool is_systematic(int var) const;
};

TannerGraph build_standard_code(const CodeSpec& spec, uint64_t seed, int var_degree = 3);
TannerGraph build_rootcheck_code(const CodeSpec& spec, uint64_t seed);
TannerGraph build_code(const CodeSpec& spec, uint64_t seed, int var_degree = 3);

// Message bit i lands on systematic_cols[i]; parity solved so that H c = 0.
std::vector<uint8_t> encode(const TannerGraph& graph, const std::vector<uint8_t>& message);

std::vector<uint8_t> syndrome(const TannerGraph& graph, const std::vector<uint8_t>& bits);
bool syndrome_zero(const TannerGraph& graph, const std::vector<uint8_t>& bits);

// Sparse-matrix text format used by common LDPC tooling.
std::string write_alist(const TannerGraph& graph);
void write_alist_file(const TannerGraph& graph, const std::string& path);
// Returns only the adjacency (construction metadata is not part of the format).
TannerGraph read_alist(const std::string& text);

}  // namespace linksim
