#pragma once

#include <vector>

namespace htq {

// N x N real matrices are stored row-major in std::vector<double> of size N^2.
// The subspace L is spanned by the row indicators e^(i) and column indicators
// etilde^(j); the cone K is their non-negative span (the normal cone of the
// saturated face of the capacity region).

/// Orthogonal projection onto L:
///   (x_par_L)_ij = rowsum_i / N + colsum_j / N - grandsum / N^2.
std::vector<double> project_L(const std::vector<double>& x, int n);

/// ||x_par_L||^2 straight from the port sums:
///   (1/N) ( sum_j colsum_j^2 + sum_i rowsum_i^2 - grandsum^2 / N ).
double norm_parallel_L_sq(const std::vector<double>& x, int n);

struct ConeDecomposition {
    std::vector<double> parallel;  // x_par_K
    std::vector<double> perp;      // x - x_par_K, lies in the polar cone
    std::vector<double> row_weights;  // w_i >= 0
    std::vector<double> col_weights;  // wtilde_j >= 0
};

/// Projection onto K solved as non-negative least squares over the 2N
/// generator weights (active-set method with closed-form subproblem solves;
/// the generator Gram matrix is N I plus an all-ones block). Reusable across
/// calls: the active set persists as a warm start for slowly moving inputs.
class ConeProjector {
   public:
    explicit ConeProjector(int n);

    ConeDecomposition project(const std::vector<double>& x);

    /// ||x - x_par_K||^2 without materializing the decomposition.
    double perp_norm_sq(const std::vector<double>& x);

   private:
    void solve_active(const std::vector<double>& row_sums,
                      const std::vector<double>& col_sums);
    void nnls(const std::vector<double>& x);

    int n_;
    std::vector<char> row_active_, col_active_;
    std::vector<double> w_, wt_;        // current feasible weights
    std::vector<double> z_, zt_;        // trial weights from the subproblem
    std::vector<double> rs_, cs_;       // row/col sums of the input
};

ConeDecomposition project_K(const std::vector<double>& x, int n);

/// Exhaustive oracle for project_K: tries every generator subset (2^(2n)
/// sign patterns), solving each restricted least-squares problem by dense
/// Gaussian elimination, and returns the candidate passing the KKT test.
/// Exponential in n; intended for n <= 4.
std::vector<double> cone_projection_bruteforce(const std::vector<double>& x, int n);

enum class CapacityPosition { Interior, OnFaceF, BoundaryOther, Outside };

/// Classifies a non-negative rate matrix against the capacity region by its
/// port sums (tolerance 1e-10 on the saturated face).
CapacityPosition capacity_position(const std::vector<double>& rate, int n);

const char* to_string(CapacityPosition p);

}  // namespace htq
