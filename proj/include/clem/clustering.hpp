#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace clem {

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integer cluster assignment over a keyed entity set. Labels are dense
/// ids in [0, k).
struct Clustering {
    std::vector<std::string> keys;
    std::vector<int> labels;
    int k = 0;

    // keys "0","1",... for label-vector fixtures
    static Clustering from_labels(const std::vector<int>& labels);
};

/// Pair-counting structure behind RI/ARI. `a` counts pairs co-clustered in
/// both clusterings, `b` pairs separated in both.
struct ContingencyTable {
    std::int64_t n = 0;
    Eigen::MatrixX<std::int64_t> cells;     // cluster of A x cluster of B
    std::vector<std::int64_t> row_sums;     // a_i
    std::vector<std::int64_t> col_sums;     // b_j
    std::int64_t a = 0;                     // same/same pairs
    std::int64_t b = 0;                     // diff/diff pairs
    std::int64_t sum_comb_cells = 0;        // sum_ij C(n_ij, 2)
    std::int64_t sum_comb_rows = 0;         // sum_i C(a_i, 2)
    std::int64_t sum_comb_cols = 0;         // sum_j C(b_j, 2)
    std::int64_t total_pairs = 0;           // C(n, 2)
};

ContingencyTable contingency_table(const Clustering& A, const Clustering& B);

// RI = (a + b) / C(n,2), computed from the contingency table.
double rand_index(const Clustering& A, const Clustering& B);

// Hubert & Arabie chance-adjusted RI. Degenerate denominators resolve to
// 1 for identical partitions, else 0.
double adjusted_rand_index(const Clustering& A, const Clustering& B);

struct KMeansResult {
    Clustering clustering;
    Eigen::MatrixXd centroids;           // k x d
    std::vector<double> inertia_trace;   // one entry per Lloyd iteration
    double inertia = 0.0;
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Assignment ties go to the
/// lowest centroid index; empty clusters claim the point farthest from its
/// centroid.
KMeansResult kmeans(const Eigen::MatrixXd& vectors, int k, std::uint64_t seed,
                    int max_iter = 300, double tol = 1e-6);

struct SelectKResult {
    int best_k = 0;
    double best_ari = 0.0;
    std::vector<double> curve;  // curve[i] = ARI at k = i + 1
};

/// Sweeps k in [1, k_max], scoring each k-means run against the expert
/// clustering; argmax ARI, lowest k on ties.
SelectKResult select_k(const Eigen::MatrixXd& vectors,
                       const std::vector<std::string>& keys,
                       const Clustering& expert, int k_max, std::uint64_t seed,
                       int max_iter = 300, double tol = 1e-6);

// Labels file: one "key<TAB>label" per line. Opaque label strings map to
// dense integers in first-appearance order.
Clustering read_labels_file(const std::string& path);
void write_labels_file(const std::string& path, const Clustering& c);

}  // namespace clem
