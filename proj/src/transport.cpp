#include "gansmooth/transport.hpp"

#include <algorithm>
#include <vector>

namespace gansmooth {

namespace {

struct BasicCell {
    int row;
    int col;
    double flow;
};

class SpanningTree {
public:
    SpanningTree(int m, int n) : m_(m), adj_(m + n) {}

    void link(int edge, const BasicCell& c) {
        adj_[c.row].push_back(edge);
        adj_[m_ + c.col].push_back(edge);
    }

    void unlink(int edge, const BasicCell& c) {
        auto drop = [edge](std::vector<int>& v) { v.erase(std::find(v.begin(), v.end(), edge)); };
        drop(adj_[c.row]);
        drop(adj_[m_ + c.col]);
    }

    // Row/column potentials with u_0 = 0 and u_i + v_j = c_ij on basic cells.
    void potentials(const std::vector<BasicCell>& cells, const Mat& cost, Vec& u, Vec& v) const {
        const int total = static_cast<int>(adj_.size());
        std::vector<char> seen(total, 0);
        std::vector<double> pot(total, 0.0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            for (int e : adj_[node]) {
                const auto& c = cells[e];
                const int other = node < m_ ? m_ + c.col : c.row;
                if (seen[other]) continue;
                seen[other] = 1;
                pot[other] = cost(c.row, c.col) - pot[node];
                stack.push_back(other);
            }
        }
        for (int i = 0; i < m_; ++i) u[i] = pot[i];
        for (int j = 0; j < total - m_; ++j) v[j] = pot[m_ + j];
    }

    // Edge ids on the tree path from row node `row` to column node `col`.
    std::vector<int> path(const std::vector<BasicCell>& cells, int row, int col) const {
        const int total = static_cast<int>(adj_.size());
        std::vector<int> via(total, -2);
        std::vector<int> queue{row};
        via[row] = -1;
        const int target = m_ + col;
        for (std::size_t head = 0; head < queue.size() && via[target] == -2; ++head) {
            const int node = queue[head];
            for (int e : adj_[node]) {
                const auto& c = cells[e];
                const int other = node < m_ ? m_ + c.col : c.row;
                if (via[other] != -2) continue;
                via[other] = e;
                queue.push_back(other);
            }
        }
        std::vector<int> edges;
        for (int node = target; node != row;) {
            const int e = via[node];
            edges.push_back(e);
            const auto& c = cells[e];
            node = node < m_ ? m_ + c.col : c.row;
        }
        std::reverse(edges.begin(), edges.end());
        return edges;
    }

private:
    int m_;
    std::vector<std::vector<int>> adj_;
};

}  // namespace

TransportResult solve_transport(const Vec& supply, const Vec& demand, const Mat& cost, double pivot_tol) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    if (m == 0 || n == 0) throw Error(ErrorCode::EmptySupport, "transport needs nonempty marginals");
    if (cost.rows() != m || cost.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "cost matrix shape does not match marginals");
    const double sa = supply.sum();
    const double sb = demand.sum();
    if (!(sa > 0.0) || std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
        throw Error(ErrorCode::PreconditionViolated, "unbalanced transport problem");

    Vec s = supply;
    Vec d = demand * (sa / sb);

    // North-west corner start: exactly m + n - 1 cells forming a staircase tree.
    std::vector<BasicCell> cells;
    cells.reserve(m + n - 1);
    for (int i = 0, j = 0;;) {
        const double x = std::max(0.0, std::min(s[i], d[j]));
        cells.push_back({i, j, x});
        s[i] -= x;
        d[j] -= x;
        if (i == m - 1 && j == n - 1) break;
        if (i == m - 1) ++j;
        else if (j == n - 1) ++i;
        else if (s[i] <= d[j]) ++i;
        else ++j;
    }

    SpanningTree tree(m, n);
    for (int e = 0; e < static_cast<int>(cells.size()); ++e) tree.link(e, cells[e]);

    const double tol = pivot_tol * std::max(1.0, cost.cwiseAbs().maxCoeff());
    const long dantzig_limit = 200L * (m + n) + 1000;
    const long hard_limit = 50L * dantzig_limit;
    Vec u(m), v(n);
    std::vector<char> basic(static_cast<std::size_t>(m) * n, 0);
    for (const auto& c : cells) basic[static_cast<std::size_t>(c.row) * n + c.col] = 1;

    TransportResult result;
    for (long pivot = 0;; ++pivot) {
        if (pivot > hard_limit) throw Error(ErrorCode::PreconditionViolated, "transport simplex did not converge");
        tree.potentials(cells, cost, u, v);

        // Dantzig pricing; Bland-style first-eligible entry once pivots pile up.
        const bool bland = pivot > dantzig_limit;
        int ei = -1, ej = -1;
        double best = -tol;
        for (int i = 0; i < m && !(bland && ei >= 0); ++i) {
            for (int j = 0; j < n; ++j) {
                if (basic[static_cast<std::size_t>(i) * n + j]) continue;
                const double r = cost(i, j) - u[i] - v[j];
                if (r < best) {
                    best = r;
                    ei = i;
                    ej = j;
                    if (bland) break;
                }
            }
        }
        if (ei < 0) break;

        const std::vector<int> path = tree.path(cells, ei, ej);
        // Along the path from row ei, edges alternate -, +, -, ...
        int leave = -1;
        double theta = kInf;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const double f = cells[path[k]].flow;
            if (f < theta || (f == theta && bland && path[k] < leave)) {
                theta = f;
                leave = path[k];
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k) {
            auto& c = cells[path[k]];
            c.flow += (k % 2 == 0) ? -theta : theta;
            if (c.flow < 0.0) c.flow = 0.0;
        }
        const BasicCell old = cells[leave];
        tree.unlink(leave, old);
        basic[static_cast<std::size_t>(old.row) * n + old.col] = 0;
        cells[leave] = {ei, ej, theta};
        tree.link(leave, cells[leave]);
        basic[static_cast<std::size_t>(ei) * n + ej] = 1;
        result.pivots = static_cast<int>(pivot + 1);
    }

    result.plan = Mat::Zero(m, n);
    for (const auto& c : cells) {
        result.plan(c.row, c.col) += c.flow;
        result.cost += c.flow * cost(c.row, c.col);
    }
    return result;
}

}  // namespace gansmooth
