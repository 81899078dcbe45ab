#include "linksim/ldpc.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "linksim/rng.hpp"

namespace linksim {

namespace {

constexpr int kMaxConstructionAttempts = 64;

void sort_adjacency(TannerGraph& g) {
    for (auto& row : g.check_adj) std::sort(row.begin(), row.end());
    for (auto& col : g.var_adj) std::sort(col.begin(), col.end());
}

void fill_blocks_and_masks(TannerGraph& g) {
    const CodeSpec& s = g.spec;
    g.var_block.assign(s.n, 0);
    const int bsize = s.n / s.f;
    for (int v = 0; v < s.n; ++v) g.var_block[v] = v / bsize;

    std::vector<uint8_t> is_sys(s.n, 0);
    if (s.kind == CodeKind::Standard) {
        for (int v = 0; v < s.k; ++v) is_sys[v] = 1;
    } else {
        const int kb = s.k / s.f;
        for (int b = 0; b < s.f; ++b)
            for (int j = 0; j < kb; ++j) is_sys[b * bsize + j] = 1;
    }
    g.systematic_cols.clear();
    g.parity_cols.clear();
    for (int v = 0; v < s.n; ++v) (is_sys[v] ? g.systematic_cols : g.parity_cols).push_back(v);
}

gf2::BitMatrix parity_submatrix(const TannerGraph& g) {
    const int m = g.num_checks;
    std::vector<int> col_pos(g.num_vars, -1);
    for (size_t i = 0; i < g.parity_cols.size(); ++i) col_pos[g.parity_cols[i]] = static_cast<int>(i);
    gf2::BitMatrix mat(m, m);
    for (int c = 0; c < m; ++c)
        for (int v : g.check_adj[c])
            if (col_pos[v] >= 0) mat.flip(c, col_pos[v]);
    return mat;
}

bool finalize_graph(TannerGraph& g) {
    sort_adjacency(g);
    fill_blocks_and_masks(g);
    return g.parity_solver.factorize(parity_submatrix(g));
}

// True if connecting (check, var) would close a 4-cycle: some other check
// already shares a variable with `check` and contains `var`.
bool creates_4cycle(const TannerGraph& g, int check, int var) {
    for (int other : g.var_adj[var]) {
        if (other == check) continue;
        for (int w : g.check_adj[other]) {
            if (w == var) continue;
            if (std::binary_search(g.check_adj[check].begin(), g.check_adj[check].end(), w)) return true;
        }
    }
    return false;
}

void add_edge(TannerGraph& g, int check, int var) {
    auto& row = g.check_adj[check];
    row.insert(std::upper_bound(row.begin(), row.end(), var), var);
    auto& col = g.var_adj[var];
    col.insert(std::upper_bound(col.begin(), col.end(), check), check);
}

//------------------------------------------------------------------
// Standard code: progressive-edge-growth placement, regular variable
// degree, near-uniform check degrees.
//------------------------------------------------------------------

// BFS from a variable; returns depth per check (-1 = unreached).
void bfs_check_depths(const TannerGraph& g, int root_var, std::vector<int>& depth) {
    depth.assign(g.num_checks, -1);
    std::vector<int> var_seen(g.num_vars, 0);
    std::vector<int> frontier{root_var};
    var_seen[root_var] = 1;
    int level = 0;
    while (!frontier.empty()) {
        ++level;
        std::vector<int> new_checks;
        for (int v : frontier)
            for (int c : g.var_adj[v])
                if (depth[c] < 0) {
                    depth[c] = level;
                    new_checks.push_back(c);
                }
        std::vector<int> next;
        for (int c : new_checks)
            for (int v : g.check_adj[c])
                if (!var_seen[v]) {
                    var_seen[v] = 1;
                    next.push_back(v);
                }
        frontier.swap(next);
    }
}

bool try_build_standard(TannerGraph& g, const CodeSpec& spec, int var_degree, Rng& rng) {
    g = TannerGraph{};
    g.spec = spec;
    g.num_vars = spec.n;
    g.num_checks = spec.n - spec.k;
    g.check_adj.assign(g.num_checks, {});
    g.var_adj.assign(g.num_vars, {});
    g.check_class.assign(g.num_checks, -1);

    std::vector<int> depth;
    std::vector<int> candidates;
    for (int v = 0; v < g.num_vars; ++v) {
        for (int e = 0; e < var_degree; ++e) {
            candidates.clear();
            if (e == 0) {
                for (int c = 0; c < g.num_checks; ++c) candidates.push_back(c);
            } else {
                bfs_check_depths(g, v, depth);
                int max_depth = 0;
                for (int c = 0; c < g.num_checks; ++c) {
                    if (depth[c] < 0)
                        candidates.push_back(c);
                    else
                        max_depth = std::max(max_depth, depth[c]);
                }
                if (candidates.empty())
                    for (int c = 0; c < g.num_checks; ++c)
                        if (depth[c] == max_depth) candidates.push_back(c);
            }
            size_t min_deg = SIZE_MAX;
            for (int c : candidates) min_deg = std::min(min_deg, g.check_adj[c].size());
            std::vector<int> best;
            for (int c : candidates)
                if (g.check_adj[c].size() == min_deg) best.push_back(c);
            add_edge(g, best[rng.uniform_int(static_cast<int>(best.size()))], v);
        }
    }
    return finalize_graph(g);
}

//------------------------------------------------------------------
// Root-Check code.
//
// Checks are split into F classes of (N-K)/F rows. Class b gives each
// information bit of block b a root check; all its remaining neighbors
// live in the complementary half of the blocks, so any erased half
// still resolves every information bit in one hop. Parity connections
// are a random column-degree-2 block per class (kept invertible); info
// fills are PEG-style randomized with 4-cycle avoidance.
//------------------------------------------------------------------

int partner_block(int b, int f) { return (b + f / 2) % f; }

bool allowed_target(int cls, int blk, int f) {
    if (f == 2) return blk != cls;
    const int half = f / 2;
    return (cls < half) != (blk < half);  // complementary contiguous half
}

bool try_build_rootcheck(TannerGraph& g, const CodeSpec& spec, Rng& rng) {
    const int f = spec.f;
    const int bsize = spec.n / f;
    const int kb = spec.k / f;
    const int rows_per_class = (spec.n - spec.k) / f;
    const int parity_per_block = bsize - kb;

    g = TannerGraph{};
    g.spec = spec;
    g.num_vars = spec.n;
    g.num_checks = spec.n - spec.k;
    g.check_adj.assign(g.num_checks, {});
    g.var_adj.assign(g.num_vars, {});
    g.check_class.assign(g.num_checks, -1);
    for (int b = 0; b < f; ++b)
        for (int r = 0; r < rows_per_class; ++r) g.check_class[b * rows_per_class + r] = b;

    // Root connections: class b, local row r < kb roots info bit r of block b.
    for (int b = 0; b < f; ++b)
        for (int r = 0; r < kb; ++r) add_edge(g, b * rows_per_class + r, b * bsize + r);

    // Parity block per class: class b owns the parity columns of its partner
    // block. Columns mix weight 2 and weight 3 — an all-weight-2 square block
    // is structurally singular, and the weight-3 fraction leaves an erasure
    // core among the parity bits instead of a peelable chain.
    for (int b = 0; b < f; ++b) {
        const int row0 = b * rows_per_class;
        const int pb = partner_block(b, f);
        const int pcol0 = pb * bsize + kb;
        bool ok = false;
        for (int attempt = 0; attempt < kMaxConstructionAttempts && !ok; ++attempt) {
            gf2::BitMatrix block(rows_per_class, parity_per_block);
            std::vector<std::vector<int>> cols(parity_per_block);
            bool built = true;
            for (int q = 0; q < parity_per_block && built; ++q) {
                const int weight = std::min(rows_per_class, rng.uniform() < 0.3 ? 3 : 2);
                for (int tries = 0;; ++tries) {
                    if (tries > 256) {
                        built = false;
                        break;
                    }
                    std::vector<int> rows;
                    while (static_cast<int>(rows.size()) < weight) {
                        int r = rng.uniform_int(rows_per_class);
                        if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
                    }
                    std::sort(rows.begin(), rows.end());
                    bool clash = false;  // no two columns sharing two rows
                    for (int q2 = 0; q2 < q && !clash; ++q2) {
                        int shared = 0;
                        for (int r : rows)
                            if (std::binary_search(cols[q2].begin(), cols[q2].end(), r)) ++shared;
                        clash = shared >= 2;
                    }
                    if (!clash) {
                        cols[q] = rows;
                        break;
                    }
                }
            }
            if (built) {
                for (int q = 0; q < parity_per_block; ++q)
                    for (int r : cols[q]) block.flip(r, q);
                if (gf2::rank(block) == parity_per_block) {
                    for (int q = 0; q < parity_per_block; ++q)
                        for (int r : cols[q]) add_edge(g, row0 + r, pcol0 + q);
                    ok = true;
                }
            }
        }
        if (!ok) {
            // tiny classes: bidiagonal block, always invertible
            for (int q = 0; q < parity_per_block; ++q) {
                add_edge(g, row0 + q, pcol0 + q);
                if (q + 1 < rows_per_class) add_edge(g, row0 + q + 1, pcol0 + q);
            }
        }
    }

    // Info fills: bring every information bit to degree 3 using rows of the
    // classes allowed to touch its block.
    for (int b = 0; b < f; ++b) {
        std::vector<int> rows;
        for (int cls = 0; cls < f; ++cls)
            if (allowed_target(cls, b, f))
                for (int r = 0; r < rows_per_class; ++r) rows.push_back(cls * rows_per_class + r);
        for (int j = 0; j < kb; ++j) {
            const int v = b * bsize + j;
            for (int fill = 0; fill < 2; ++fill) {
                size_t min_deg = SIZE_MAX;
                for (int c : rows)
                    if (!std::binary_search(g.check_adj[c].begin(), g.check_adj[c].end(), v))
                        min_deg = std::min(min_deg, g.check_adj[c].size());
                std::vector<int> best;
                std::vector<int> fallback;
                for (int c : rows) {
                    if (std::binary_search(g.check_adj[c].begin(), g.check_adj[c].end(), v)) continue;
                    if (g.check_adj[c].size() != min_deg) continue;
                    fallback.push_back(c);
                    if (!creates_4cycle(g, c, v)) best.push_back(c);
                }
                if (best.empty()) best = fallback;
                if (best.empty()) return false;
                add_edge(g, best[rng.uniform_int(static_cast<int>(best.size()))], v);
            }
        }
    }
    return finalize_graph(g);
}

}  // namespace

void CodeSpec::validate() const {
    if (n <= 0 || k <= 0 || k >= n) throw std::invalid_argument("CodeSpec: need N > K > 0");
    if (n % f != 0) throw std::invalid_argument("CodeSpec: N must divide into F blocks");
    if (kind == CodeKind::RootCheck) {
        if (k * f != n) throw std::invalid_argument("CodeSpec: Root-Check codes require rate 1/F");
        if (k % f != 0) throw std::invalid_argument("CodeSpec: Root-Check codes need K divisible by F");
        if (f % 2 != 0) throw std::invalid_argument("CodeSpec: Root-Check construction supports even F");
    }
}

int TannerGraph::num_edges() const {
    int e = 0;
    for (const auto& row : check_adj) e += static_cast<int>(row.size());
    return e;
}

bool TannerGraph::is_systematic(int var) const {
    return std::binary_search(systematic_cols.begin(), systematic_cols.end(), var);
}

TannerGraph build_standard_code(const CodeSpec& spec, uint64_t seed, int var_degree) {
    spec.validate();
    if (spec.kind != CodeKind::Standard) throw std::invalid_argument("build_standard_code: spec.kind mismatch");
    if (var_degree < 1 || var_degree > spec.n - spec.k)
        throw std::invalid_argument("build_standard_code: infeasible variable degree");
    TannerGraph g;
    for (int attempt = 0; attempt < kMaxConstructionAttempts; ++attempt) {
        Rng rng(mix_seed(seed, 0x5741u, attempt));
        if (try_build_standard(g, spec, var_degree, rng)) return g;
    }
    // Some degree sequences (e.g. even-weight columns everywhere) cannot have
    // an invertible parity part; the graph is still valid for decoding and
    // encode() reports the failure if used.
    return g;
}

TannerGraph build_rootcheck_code(const CodeSpec& spec, uint64_t seed) {
    spec.validate();
    if (spec.kind != CodeKind::RootCheck) throw std::invalid_argument("build_rootcheck_code: spec.kind mismatch");
    TannerGraph g;
    for (int attempt = 0; attempt < kMaxConstructionAttempts; ++attempt) {
        Rng rng(mix_seed(seed, 0x52C7u, attempt));
        if (try_build_rootcheck(g, spec, rng)) return g;
    }
    throw std::runtime_error("build_rootcheck_code: could not obtain invertible parity part");
}

TannerGraph build_code(const CodeSpec& spec, uint64_t seed, int var_degree) {
    return spec.kind == CodeKind::Standard ? build_standard_code(spec, seed, var_degree)
                                           : build_rootcheck_code(spec, seed);
}

std::vector<uint8_t> encode(const TannerGraph& graph, const std::vector<uint8_t>& message) {
    if (static_cast<int>(message.size()) != graph.spec.k) throw std::invalid_argument("encode: message length != K");
    if (!graph.parity_solver.factorized()) throw std::runtime_error("encode: singular parity submatrix");

    std::vector<uint8_t> codeword(graph.num_vars, 0);
    for (size_t i = 0; i < graph.systematic_cols.size(); ++i) codeword[graph.systematic_cols[i]] = message[i] & 1;

    // Parity must absorb the syndrome of the systematic part.
    std::vector<uint8_t> rhs(graph.num_checks, 0);
    for (int c = 0; c < graph.num_checks; ++c) {
        uint8_t acc = 0;
        for (int v : graph.check_adj[c]) acc ^= codeword[v];
        rhs[c] = acc;
    }
    std::vector<uint8_t> parity = graph.parity_solver.solve(rhs);
    for (size_t i = 0; i < graph.parity_cols.size(); ++i) codeword[graph.parity_cols[i]] = parity[i];
    return codeword;
}

std::vector<uint8_t> syndrome(const TannerGraph& graph, const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> s(graph.num_checks, 0);
    for (int c = 0; c < graph.num_checks; ++c) {
        uint8_t acc = 0;
        for (int v : graph.check_adj[c]) acc ^= bits[v];
        s[c] = acc;
    }
    return s;
}

bool syndrome_zero(const TannerGraph& graph, const std::vector<uint8_t>& bits) {
    for (int c = 0; c < graph.num_checks; ++c) {
        uint8_t acc = 0;
        for (int v : graph.check_adj[c]) acc ^= bits[v];
        if (acc) return false;
    }
    return true;
}

std::string write_alist(const TannerGraph& g) {
    std::ostringstream out;
    size_t max_col = 0, max_row = 0;
    for (const auto& col : g.var_adj) max_col = std::max(max_col, col.size());
    for (const auto& row : g.check_adj) max_row = std::max(max_row, row.size());
    out << g.num_vars << ' ' << g.num_checks << '\n';
    out << max_col << ' ' << max_row << '\n';
    for (int v = 0; v < g.num_vars; ++v) out << g.var_adj[v].size() << (v + 1 < g.num_vars ? ' ' : '\n');
    for (int c = 0; c < g.num_checks; ++c) out << g.check_adj[c].size() << (c + 1 < g.num_checks ? ' ' : '\n');
    for (int v = 0; v < g.num_vars; ++v) {
        for (size_t i = 0; i < max_col; ++i) {
            out << (i < g.var_adj[v].size() ? g.var_adj[v][i] + 1 : 0);
            out << (i + 1 < max_col ? ' ' : '\n');
        }
    }
    for (int c = 0; c < g.num_checks; ++c) {
        for (size_t i = 0; i < max_row; ++i) {
            out << (i < g.check_adj[c].size() ? g.check_adj[c][i] + 1 : 0);
            out << (i + 1 < max_row ? ' ' : '\n');
        }
    }
    return out.str();
}

void write_alist_file(const TannerGraph& graph, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_alist_file: cannot open " + path);
    f << write_alist(graph);
}

TannerGraph read_alist(const std::string& text) {
    std::istringstream in(text);
    TannerGraph g;
    size_t max_col = 0, max_row = 0;
    if (!(in >> g.num_vars >> g.num_checks >> max_col >> max_row)) throw std::runtime_error("read_alist: bad header");
    std::vector<size_t> col_deg(g.num_vars), row_deg(g.num_checks);
    for (auto& d : col_deg) in >> d;
    for (auto& d : row_deg) in >> d;
    g.var_adj.assign(g.num_vars, {});
    g.check_adj.assign(g.num_checks, {});
    for (int v = 0; v < g.num_vars; ++v) {
        for (size_t i = 0; i < max_col; ++i) {
            int c;
            in >> c;
            if (c > 0 && i < col_deg[v]) g.var_adj[v].push_back(c - 1);
        }
    }
    for (int c = 0; c < g.num_checks; ++c) {
        for (size_t i = 0; i < max_row; ++i) {
            int v;
            in >> v;
            if (v > 0 && i < row_deg[c]) g.check_adj[c].push_back(v - 1);
        }
    }
    if (!in) throw std::runtime_error("read_alist: truncated data");
    sort_adjacency(g);
    return g;
}

}  // namespace linksim
