#include "clem/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "clem/rng.hpp"

namespace clem {

namespace {

std::int64_t comb2(std::int64_t m) { return m * (m - 1) / 2; }

void check_alignment(const Clustering& A, const Clustering& B) {
    if (A.keys.size() != B.keys.size() || A.keys != B.keys) {
        throw AlignmentError("clusterings are not over the same keys in the same order");
    }
    if (A.labels.size() != A.keys.size() || B.labels.size() != B.keys.size()) {
        throw AlignmentError("label count does not match key count");
    }
}

// one nonzero cell per row and per column <=> identical partitions
bool partitions_identical(const ContingencyTable& t) {
    for (Eigen::Index i = 0; i < t.cells.rows(); ++i) {
        int nz = 0;
        for (Eigen::Index j = 0; j < t.cells.cols(); ++j)
            if (t.cells(i, j) != 0) ++nz;
        if (nz > 1) return false;
    }
    for (Eigen::Index j = 0; j < t.cells.cols(); ++j) {
        int nz = 0;
        for (Eigen::Index i = 0; i < t.cells.rows(); ++i)
            if (t.cells(i, j) != 0) ++nz;
        if (nz > 1) return false;
    }
    return true;
}

}  // namespace

Clustering Clustering::from_labels(const std::vector<int>& labels) {
    Clustering c;
    c.labels = labels;
    c.keys.reserve(labels.size());
    int maxl = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        c.keys.push_back(std::to_string(i));
        maxl = std::max(maxl, labels[i]);
    }
    c.k = maxl + 1;
    return c;
}

ContingencyTable contingency_table(const Clustering& A, const Clustering& B) {
    check_alignment(A, B);
    const std::int64_t n = static_cast<std::int64_t>(A.labels.size());
    int ka = 0, kb = 0;
    for (int l : A.labels) ka = std::max(ka, l + 1);
    for (int l : B.labels) kb = std::max(kb, l + 1);
    ka = std::max(ka, 1);
    kb = std::max(kb, 1);

    ContingencyTable t;
    t.n = n;
    t.cells = Eigen::MatrixX<std::int64_t>::Zero(ka, kb);
    for (std::int64_t i = 0; i < n; ++i) t.cells(A.labels[i], B.labels[i])++;
    t.row_sums.assign(ka, 0);
    t.col_sums.assign(kb, 0);
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) {
            t.row_sums[i] += t.cells(i, j);
            t.col_sums[j] += t.cells(i, j);
            t.sum_comb_cells += comb2(t.cells(i, j));
        }
    for (int i = 0; i < ka; ++i) t.sum_comb_rows += comb2(t.row_sums[i]);
    for (int j = 0; j < kb; ++j) t.sum_comb_cols += comb2(t.col_sums[j]);
    t.total_pairs = comb2(n);
    t.a = t.sum_comb_cells;
    t.b = t.total_pairs - t.sum_comb_rows - t.sum_comb_cols + t.sum_comb_cells;
    return t;
}

double rand_index(const Clustering& A, const Clustering& B) {
    const ContingencyTable t = contingency_table(A, B);
    if (t.total_pairs == 0) return 1.0;
    return static_cast<double>(t.a + t.b) / static_cast<double>(t.total_pairs);
}

double adjusted_rand_index(const Clustering& A, const Clustering& B) {
    const ContingencyTable t = contingency_table(A, B);
    if (t.n <= 1) return 1.0;
    const double sum_cells = static_cast<double>(t.sum_comb_cells);
    const double sum_rows = static_cast<double>(t.sum_comb_rows);
    const double sum_cols = static_cast<double>(t.sum_comb_cols);
    const double total = static_cast<double>(t.total_pairs);
    const double expected = sum_rows * sum_cols / total;
    const double denom = 0.5 * (sum_rows + sum_cols) - expected;
    if (denom == 0.0) return partitions_identical(t) ? 1.0 : 0.0;
    return (sum_cells - expected) / denom;
}

KMeansResult kmeans(const Eigen::MatrixXd& vectors, int k, std::uint64_t seed,
                    int max_iter, double tol) {
    const Eigen::Index n = vectors.rows();
    const Eigen::Index d = vectors.cols();
    if (k <= 0) throw std::invalid_argument("kmeans: k must be positive");
    if (k > n) throw std::invalid_argument("kmeans: k exceeds number of points");
    if (!vectors.allFinite()) throw std::invalid_argument("kmeans: non-finite input");

    Rng rng(seed);
    Eigen::MatrixXd centroids(k, d);

    // k-means++ seeding
    std::vector<double> dist2(n, std::numeric_limits<double>::max());
    centroids.row(0) = vectors.row(rng.index(static_cast<std::size_t>(n)));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d2 = (vectors.row(i) - centroids.row(c - 1)).squaredNorm();
            dist2[i] = std::min(dist2[i], d2);
            total += dist2[i];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= r) { pick = i; break; }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centroids.row(c) = vectors.row(pick);
    }

    std::vector<int> labels(n, 0);
    KMeansResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        // assign, ties to lowest centroid index
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d2 = (vectors.row(i) - centroids.row(c)).squaredNorm();
                if (d2 < best) { best = d2; best_c = c; }
            }
            labels[i] = best_c;
            inertia += best;
        }

        // repair empty clusters: claim the point farthest from its centroid
        std::vector<std::int64_t> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) counts[labels[i]]++;
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            Eigen::Index farthest = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (counts[labels[i]] <= 1) continue;
                const double d2 = (vectors.row(i) - centroids.row(labels[i])).squaredNorm();
                if (d2 > far_d) { far_d = d2; farthest = i; }
            }
            counts[labels[farthest]]--;
            labels[farthest] = c;
            counts[c] = 1;
        }

        // recompute inertia after repairs
        inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            inertia += (vectors.row(i) - centroids.row(labels[i])).squaredNorm();
        res.inertia_trace.push_back(inertia);
        res.iterations = iter + 1;

        // update
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, d);
        for (Eigen::Index i = 0; i < n; ++i) next.row(labels[i]) += vectors.row(i);
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) counts[labels[i]]++;
        for (int c = 0; c < k; ++c) next.row(c) /= static_cast<double>(counts[c]);

        const double movement = (next - centroids).rowwise().norm().maxCoeff();
        centroids = next;
        if (movement < tol) break;
    }

    // final assignment against the converged centroids
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::max();
        int best_c = 0;
        for (int c = 0; c < k; ++c) {
            const double d2 = (vectors.row(i) - centroids.row(c)).squaredNorm();
            if (d2 < best) { best = d2; best_c = c; }
        }
        labels[i] = best_c;
        inertia += best;
    }

    res.clustering.labels = labels;
    res.clustering.k = k;
    res.clustering.keys.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) res.clustering.keys.push_back(std::to_string(i));
    res.centroids = centroids;
    res.inertia = inertia;
    return res;
}

SelectKResult select_k(const Eigen::MatrixXd& vectors,
                       const std::vector<std::string>& keys,
                       const Clustering& expert, int k_max, std::uint64_t seed,
                       int max_iter, double tol) {
    if (k_max < 1) throw std::invalid_argument("select_k: k_max must be >= 1");
    SelectKResult out;
    out.best_ari = -std::numeric_limits<double>::max();
    for (int k = 1; k <= k_max; ++k) {
        KMeansResult km = kmeans(vectors, k, seed, max_iter, tol);
        km.clustering.keys = keys;
        const double ari = adjusted_rand_index(km.clustering, expert);
        out.curve.push_back(ari);
        if (ari > out.best_ari) {
            out.best_ari = ari;
            out.best_k = k;
        }
    }
    return out;
}

Clustering read_labels_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    Clustering c;
    std::map<std::string, int> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("labels file line missing tab: " + line);
        const std::string key = line.substr(0, tab);
        const std::string label = line.substr(tab + 1);
        auto [it, inserted] = ids.emplace(label, static_cast<int>(ids.size()));
        c.keys.push_back(key);
        c.labels.push_back(it->second);
    }
    c.k = static_cast<int>(ids.size());
    return c;
}

void write_labels_file(const std::string& path, const Clustering& c) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write labels file: " + path);
    for (std::size_t i = 0; i < c.keys.size(); ++i) {
        out << c.keys[i] << '\t' << c.labels[i] << '\n';
    }
}

}  // namespace clem
