#include "cphase/signs.hpp"

#include "cphase/errors.hpp"
#include "cphase/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace cphase {

int sign_level_for(std::size_t set_size)
{
    int l = 0;
    while ((std::size_t{1} << l) < set_size)
        ++l;
    return l;
}

bool same_sign_evidence(double y, double mag_u, double mag_v, int sigma_u, int sigma_v)
{
    const double to_sum = std::abs(y - std::abs(mag_u + mag_v));
    const double to_diff = std::abs(y - std::abs(mag_u - mag_v));
    // Strict in both directions: a tie is no evidence either way.
    return sigma_u == sigma_v ? to_sum < to_diff : to_sum > to_diff;
}

SignGraph build_sign_graph(std::span<const Block* const> blocks, const Measurements& y,
                           std::span<const std::uint32_t> s2, const MagnitudeEstimates& estimates,
                           AccessCounter* counter)
{
    SignGraph g;
    g.vertices.assign(s2.begin(), s2.end());
    std::sort(g.vertices.begin(), g.vertices.end());
    g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
    if (!blocks.empty())
        g.level = blocks.front()->level();

    auto magnitude = [&](std::uint32_t i) {
        auto it = estimates.find(i);
        if (it == estimates.end())
            throw DimensionError("build_sign_graph: no magnitude estimate for coordinate " + std::to_string(i));
        return it->second;
    };

    struct Hit {
        int count = 0;
        std::uint32_t u = 0, v = 0;
        int su = 0, sv = 0;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> weights, tests;
    for (const Block* block : blocks) {
        std::unordered_map<std::size_t, Hit> hits;
        for (std::uint32_t u : g.vertices) {
            block->for_each_in_column(u, [&](std::size_t row, int s) {
                if (counter)
                    ++counter->entries;
                Hit& h = hits[row];
                if (h.count == 0) {
                    h.u = u;
                    h.su = s;
                } else if (h.count == 1) {
                    h.v = u;
                    h.sv = s;
                }
                ++h.count;
            });
        }
        const MeasurementSlice yF = y.slice(block->name(), counter);
        // Visit rows in increasing order so the result is independent of hash-map iteration.
        std::vector<std::size_t> pair_rows;
        for (const auto& [row, h] : hits)
            if (h.count == 2)
                pair_rows.push_back(row);
        std::sort(pair_rows.begin(), pair_rows.end());
        for (std::size_t row : pair_rows) {
            const Hit& h = hits[row];
            ++g.pairs_tested;
            const std::pair key{std::min(h.u, h.v), std::max(h.u, h.v)};
            tests[key] += 1.0;
            if (same_sign_evidence(yF[row], magnitude(h.u), magnitude(h.v), h.su, h.sv))
                weights[key] += 1.0;
        }
    }
    for (const auto& [uv, w] : weights)
        g.edges.push_back({uv.first, uv.second, w});
    for (const auto& [uv, w] : tests)
        g.tested.push_back({uv.first, uv.second, w});
    return g;
}

void write_edge_list(std::ostream& out, const SignGraph& g)
{
    for (const auto& e : g.edges)
        out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
}

namespace {

struct WeightedGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
    std::vector<double> degree;
    double two_m = 0.0;
    std::vector<std::vector<std::pair<std::size_t, double>>> signed_adj; ///< 2·edges − tests
};

WeightedGraph index_graph(const SignGraph& g)
{
    WeightedGraph wg;
    const std::size_t n = g.vertices.size();
    wg.adj.resize(n);
    wg.degree.assign(n, 0.0);
    auto pos = [&](std::uint32_t v) {
        auto it = std::lower_bound(g.vertices.begin(), g.vertices.end(), v);
        if (it == g.vertices.end() || *it != v)
            throw DimensionError("recover_communities: edge endpoint " + std::to_string(v) + " is not a vertex");
        return static_cast<std::size_t>(it - g.vertices.begin());
    };
    for (const auto& e : g.edges) {
        const std::size_t a = pos(e.u), b = pos(e.v);
        if (a == b)
            continue;
        wg.adj[a].emplace_back(b, e.weight);
        wg.adj[b].emplace_back(a, e.weight);
        wg.degree[a] += e.weight;
        wg.degree[b] += e.weight;
        wg.two_m += 2.0 * e.weight;
    }
    if (!g.tested.empty()) {
        std::map<std::pair<std::size_t, std::size_t>, double> sw;
        for (const auto& t : g.tested)
            sw[{pos(t.u), pos(t.v)}] -= t.weight;
        for (const auto& e : g.edges)
            sw[{pos(e.u), pos(e.v)}] += 2.0 * e.weight;
        wg.signed_adj.resize(n);
        for (const auto& [ab, w] : sw) {
            if (ab.first == ab.second || w == 0.0)
                continue;
            wg.signed_adj[ab.first].emplace_back(ab.second, w);
            wg.signed_adj[ab.second].emplace_back(ab.first, w);
        }
    }
    return wg;
}

// w = (A - d d^T / 2m + shift I) v
void modularity_times(const WeightedGraph& g, const std::vector<double>& v, double shift, std::vector<double>& w)
{
    double dv = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        dv += g.degree[i] * v[i];
    for (std::size_t i = 0; i < v.size(); ++i) {
        double s = shift * v[i] - g.degree[i] * dv / g.two_m;
        for (const auto& [j, w_ij] : g.adj[i])
            s += w_ij * v[j];
        w[i] = s;
    }
}

double normalize(std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    s = std::sqrt(s);
    if (s > 0.0)
        for (double& x : v)
            x /= s;
    return s;
}

// Leading eigenvector of B + shift I, with shift large enough that this is
// also the top algebraic eigenvector of B.
void power_iteration(const WeightedGraph& g, double shift, std::vector<double>& v, double tol, std::size_t max_iter)
{
    std::vector<double> w(v.size());
    for (std::size_t it = 0; it < max_iter; ++it) {
        modularity_times(g, v, shift, w);
        if (normalize(w) == 0.0)
            break;
        double diff = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            diff += (w[i] - v[i]) * (w[i] - v[i]);
        v.swap(w);
        if (std::sqrt(diff) < tol)
            break;
    }
}

std::vector<double> dense_top_eigenvector(const WeightedGraph& g)
{
    const auto n = static_cast<Eigen::Index>(g.degree.size());
    Eigen::MatrixXd B(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            B(i, j) = -g.degree[i] * g.degree[j] / g.two_m;
    for (Eigen::Index i = 0; i < n; ++i)
        for (const auto& [j, w] : g.adj[i])
            B(i, static_cast<Eigen::Index>(j)) += w;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    const Eigen::VectorXd top = eig.eigenvectors().col(n - 1);
    return {top.data(), top.data() + n};
}

/// Connected components over vertices with edges; isolated vertices get -1.
std::size_t components(const WeightedGraph& g, std::vector<int>& comp)
{
    const std::size_t n = g.degree.size();
    comp.assign(n, -1);
    int count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] != -1 || g.adj[s].empty())
            continue;
        comp[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : g.adj[u])
                if (comp[v] == -1) {
                    comp[v] = count;
                    stack.push_back(v);
                }
        }
        ++count;
    }
    return static_cast<std::size_t>(count);
}

/// Majority sweeps on signed evidence; returns the agreement score
/// sum_{i<j} s_ij label_i label_j of the fixpoint.
double signed_refine(const WeightedGraph& g, std::vector<int>& label, std::size_t max_sweeps)
{
    const std::size_t n = label.size();
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (const auto& [j, w] : g.signed_adj[i])
                s += w * label[j];
            const int next = s > 0.0 ? 1 : (s < 0.0 ? -1 : label[i]);
            if (next != label[i]) {
                label[i] = next;
                changed = true;
            }
        }
        if (!changed)
            break;
    }
    double score = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, w] : g.signed_adj[i])
            if (j > i)
                score += w * label[i] * label[j];
    return score;
}

} // namespace

ClusterLabels recover_communities(const SignGraph& g, const CommunityOptions& options)
{
    ClusterLabels out;
    const std::size_t n = g.vertices.size();
    if (n == 0)
        throw DimensionError("recover_communities: empty vertex set");
    const WeightedGraph wg = index_graph(g);

    std::vector<int> label(n, 1);
    std::vector<int> comp;
    const std::size_t n_comp = wg.two_m > 0.0 ? components(wg, comp) : 0;
    if (n_comp >= 2) {
        // No edge joins the pieces: the largest one is one community, the
        // rest form the other.
        std::vector<std::size_t> size(n_comp, 0);
        for (int c : comp)
            if (c >= 0)
                ++size[static_cast<std::size_t>(c)];
        const auto largest = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
        for (std::size_t i = 0; i < n; ++i)
            label[i] = comp[i] == largest || comp[i] == -1 ? 1 : -1;
    } else if (n_comp == 1) {
        std::vector<double> v;
        if (n <= options.dense_limit) {
            v = dense_top_eigenvector(wg);
        } else {
            std::mt19937_64 rng = make_stream(options.seed, "spectral", n);
            v.resize(n);
            for (double& x : v)
                x = unit_interval(rng()) - 0.5;
            normalize(v);
            // Gershgorin: every eigenvalue of B lies in [-2 max degree, 2 max degree].
            const double shift = 2.0 * *std::max_element(wg.degree.begin(), wg.degree.end());
            power_iteration(wg, shift, v, options.tolerance, options.max_power_iterations);
        }
        for (std::size_t i = 0; i < n; ++i)
            label[i] = v[i] < 0.0 ? -1 : 1;

        // Local majority on the modularity matrix: s_i = sum_j B_ij label_j, j != i.
        double d_label = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            d_label += wg.degree[i] * label[i];
        for (std::size_t sweep = 0; sweep < options.max_refine_sweeps; ++sweep) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (wg.degree[i] == 0.0)
                    continue;
                double s = 0.0;
                for (const auto& [j, w] : wg.adj[i])
                    s += w * label[j];
                s -= wg.degree[i] * (d_label - wg.degree[i] * label[i]) / wg.two_m;
                const int next = s > 0.0 ? 1 : (s < 0.0 ? -1 : label[i]);
                if (next != label[i]) {
                    d_label += wg.degree[i] * (next - label[i]);
                    label[i] = next;
                    changed = true;
                }
            }
            if (!changed)
                break;
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (wg.degree[i] == 0.0)
            label[i] = 1;

    if (!wg.signed_adj.empty()) {
        std::vector<int> single(n, 1);
        const double spectral_score = signed_refine(wg, label, options.max_refine_sweeps);
        const double single_score = signed_refine(wg, single, options.max_refine_sweeps);
        if (single_score > spectral_score)
            label = std::move(single);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const bool no_evidence = wg.degree[i] == 0.0 && (wg.signed_adj.empty() || wg.signed_adj[i].empty());
        if (no_evidence) {
            label[i] = 1;
            out.isolated.push_back(g.vertices[i]);
        }
        out.labels[g.vertices[i]] = label[i];
    }
    out.low_confidence = !out.isolated.empty();
    return out;
}

std::vector<std::pair<std::uint32_t, double>> assign_signs(const ClusterLabels& labels,
                                                          const MagnitudeEstimates& estimates,
                                                          std::span<const std::uint32_t> s2)
{
    std::vector<std::pair<std::uint32_t, double>> out;
    out.reserve(s2.size());
    for (std::uint32_t i : s2) {
        auto l = labels.labels.find(i);
        if (l == labels.labels.end())
            throw DimensionError("assign_signs: no label for coordinate " + std::to_string(i));
        auto e = estimates.find(i);
        if (e == estimates.end())
            throw DimensionError("assign_signs: no estimate for coordinate " + std::to_string(i));
        out.emplace_back(i, l->second * e->second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace cphase
