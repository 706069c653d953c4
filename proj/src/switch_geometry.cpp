#include "htq/switch_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "htq/errors.hpp"
#include "htq/numeric.hpp"

namespace htq {

namespace {

void port_sums(const std::vector<double>& x, int n, std::vector<double>& rs,
               std::vector<double>& cs) {
    rs.assign(n, 0.0);
    cs.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = x[static_cast<std::size_t>(i) * n + j];
            rs[i] += v;
            cs[j] += v;
        }
}

}  // namespace

std::vector<double> project_L(const std::vector<double>& x, int n) {
    std::vector<double> rs, cs;
    port_sums(x, n, rs, cs);
    double grand = 0.0;
    for (double v : rs) grand += v;
    std::vector<double> y(static_cast<std::size_t>(n) * n);
    double gm = grand / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            y[static_cast<std::size_t>(i) * n + j] = rs[i] / n + cs[j] / n - gm;
    return y;
}

double norm_parallel_L_sq(const std::vector<double>& x, int n) {
    std::vector<double> rs, cs;
    port_sums(x, n, rs, cs);
    double grand = 0.0;
    CompSum s;
    for (int i = 0; i < n; ++i) {
        s.add(rs[i] * rs[i]);
        s.add(cs[i] * cs[i]);
        grand += rs[i];
    }
    s.add(-grand * grand / n);
    return s.value() / n;
}

ConeProjector::ConeProjector(int n)
    : n_(n),
      row_active_(n, 0),
      col_active_(n, 0),
      w_(n, 0.0),
      wt_(n, 0.0),
      z_(n, 0.0),
      zt_(n, 0.0) {
    if (n < 1) throw Error("ConeProjector needs n >= 1");
}

// Least squares over the active generators. With nr active rows and nc active
// cols, the normal equations reduce to the 2x2 system in the weight totals
//   T = (N R_A - nr C_B) / (N^2 - nr nc),  Ttilde = (C_B - nc T) / N,
// after which each weight is (port sum - other-side total) / N. The full set
// (nr = nc = N) is rank deficient by one; the symmetric gauge is used and
// shifted into the feasible cone when possible.
void ConeProjector::solve_active(const std::vector<double>& rs,
                                 const std::vector<double>& cs) {
    int nr = 0, nc = 0;
    double ra = 0.0, cb = 0.0;
    for (int i = 0; i < n_; ++i) {
        if (row_active_[i]) {
            ++nr;
            ra += rs[i];
        }
        if (col_active_[i]) {
            ++nc;
            cb += cs[i];
        }
    }
    double t, tt;
    if (nr == n_ && nc == n_) {
        t = tt = ra / (2.0 * n_);
    } else {
        double denom = static_cast<double>(n_) * n_ - static_cast<double>(nr) * nc;
        t = (n_ * ra - nr * cb) / denom;
        tt = (cb - nc * t) / n_;
    }
    for (int i = 0; i < n_; ++i) {
        z_[i] = row_active_[i] ? (rs[i] - tt) / n_ : 0.0;
        zt_[i] = col_active_[i] ? (cs[i] - t) / n_ : 0.0;
    }
    if (nr == n_ && nc == n_) {
        // Shift the gauge (w_i + s, wtilde_j - s leaves the projection fixed)
        // into the non-negative orthant when an overlap exists.
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < n_; ++i) {
            lo = std::max(lo, -z_[i]);
            hi = (i == 0) ? zt_[i] : std::min(hi, zt_[i]);
        }
        double s = std::clamp(0.0, lo, std::max(lo, hi));
        if (lo <= hi && s != 0.0) {
            for (int i = 0; i < n_; ++i) {
                z_[i] += s;
                zt_[i] -= s;
            }
        }
    }
}

void ConeProjector::nnls(const std::vector<double>& x) {
    port_sums(x, n_, rs_, cs_);

    double scale = 1.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    const double tol = 5e-15 * scale * n_;

    // Re-validate the warm-start set for the new input: shrink until the
    // restricted solution is feasible.
    for (int guard = 0; guard <= 2 * n_; ++guard) {
        solve_active(rs_, cs_);
        int worst = -1;
        bool worst_col = false;
        double worst_val = -tol;
        for (int i = 0; i < n_; ++i) {
            if (row_active_[i] && z_[i] < worst_val) {
                worst_val = z_[i];
                worst = i;
                worst_col = false;
            }
            if (col_active_[i] && zt_[i] < worst_val) {
                worst_val = zt_[i];
                worst = i;
                worst_col = true;
            }
        }
        if (worst < 0) break;
        (worst_col ? col_active_ : row_active_)[worst] = 0;
    }
    for (int i = 0; i < n_; ++i) {
        w_[i] = std::max(z_[i], 0.0);
        wt_[i] = std::max(zt_[i], 0.0);
    }

    const int cap = 100 * n_;
    for (int iter = 0; iter < cap; ++iter) {
        // Gradient of the objective at inactive generators; active ones are
        // stationary by the normal equations.
        double t = 0.0, tt = 0.0;
        for (int i = 0; i < n_; ++i) {
            t += w_[i];
            tt += wt_[i];
        }
        int best = -1;
        bool best_col = false;
        double best_g = tol;
        for (int i = 0; i < n_; ++i) {
            if (!row_active_[i]) {
                double g = rs_[i] - tt;
                if (g > best_g) {
                    best_g = g;
                    best = i;
                    best_col = false;
                }
            }
            if (!col_active_[i]) {
                double g = cs_[i] - t;
                if (g > best_g) {
                    best_g = g;
                    best = i;
                    best_col = true;
                }
            }
        }
        if (best < 0) return;  // KKT satisfied
        (best_col ? col_active_ : row_active_)[best] = 1;

        for (int inner = 0; inner < cap; ++inner) {
            solve_active(rs_, cs_);
            double step = 1.0;
            for (int i = 0; i < n_; ++i) {
                if (row_active_[i] && z_[i] < -tol)
                    step = std::min(step, w_[i] / (w_[i] - z_[i]));
                if (col_active_[i] && zt_[i] < -tol)
                    step = std::min(step, wt_[i] / (wt_[i] - zt_[i]));
            }
            if (step >= 1.0) {
                for (int i = 0; i < n_; ++i) {
                    w_[i] = std::max(z_[i], 0.0);
                    wt_[i] = std::max(zt_[i], 0.0);
                }
                break;
            }
            for (int i = 0; i < n_; ++i) {
                w_[i] += step * (z_[i] - w_[i]);
                wt_[i] += step * (zt_[i] - wt_[i]);
                if (row_active_[i] && w_[i] <= tol) {
                    row_active_[i] = 0;
                    w_[i] = 0.0;
                }
                if (col_active_[i] && wt_[i] <= tol) {
                    col_active_[i] = 0;
                    wt_[i] = 0.0;
                }
            }
        }
    }
    throw ConvergenceFailure("cone projection: active-set iteration cap hit");
}

ConeDecomposition ConeProjector::project(const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(n_) * n_)
        throw Error("cone projection: input is not n x n");
    nnls(x);
    ConeDecomposition d;
    d.row_weights = w_;
    d.col_weights = wt_;
    d.parallel.resize(x.size());
    d.perp.resize(x.size());
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * n_ + j;
            d.parallel[k] = w_[i] + wt_[j];
            d.perp[k] = x[k] - d.parallel[k];
        }
    return d;
}

double ConeProjector::perp_norm_sq(const std::vector<double>& x) {
    nnls(x);
    CompSum s;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            double r = x[static_cast<std::size_t>(i) * n_ + j] - w_[i] - wt_[j];
            s.add(r * r);
        }
    return s.value();
}

ConeDecomposition project_K(const std::vector<double>& x, int n) {
    ConeProjector proj(n);
    return proj.project(x);
}

std::vector<double> cone_projection_bruteforce(const std::vector<double>& x, int n) {
    if (n > 4) throw DimensionTooLarge("cone brute force limited to n <= 4");
    std::vector<double> rs, cs;
    port_sums(x, n, rs, cs);
    double scale = 1.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * scale;

    const unsigned full = (1u << n) - 1u;
    std::vector<int> idx;
    std::vector<double> g, rhs, sol;
    for (unsigned ra = 0; ra <= full; ++ra) {
        for (unsigned cb = 0; cb <= full; ++cb) {
            if (ra == full && cb == full) continue;  // rank-deficient, redundant
            idx.clear();
            for (int i = 0; i < n; ++i)
                if (ra & (1u << i)) idx.push_back(i);
            for (int j = 0; j < n; ++j)
                if (cb & (1u << j)) idx.push_back(n + j);
            int m = static_cast<int>(idx.size());

            // Gram matrix: n on the diagonal, 1 between a row and a column
            // generator, 0 within a side.
            g.assign(static_cast<std::size_t>(m) * m, 0.0);
            rhs.assign(m, 0.0);
            for (int a = 0; a < m; ++a) {
                rhs[a] = idx[a] < n ? rs[idx[a]] : cs[idx[a] - n];
                for (int b = 0; b < m; ++b) {
                    bool a_row = idx[a] < n, b_row = idx[b] < n;
                    if (a == b)
                        g[static_cast<std::size_t>(a) * m + b] = n;
                    else if (a_row != b_row)
                        g[static_cast<std::size_t>(a) * m + b] = 1.0;
                }
            }
            // Gaussian elimination with partial pivoting.
            sol = rhs;
            bool singular = false;
            for (int col = 0; col < m && !singular; ++col) {
                int piv = col;
                for (int r = col + 1; r < m; ++r)
                    if (std::abs(g[static_cast<std::size_t>(r) * m + col]) >
                        std::abs(g[static_cast<std::size_t>(piv) * m + col]))
                        piv = r;
                if (std::abs(g[static_cast<std::size_t>(piv) * m + col]) < 1e-12) {
                    singular = true;
                    break;
                }
                if (piv != col) {
                    for (int j = 0; j < m; ++j)
                        std::swap(g[static_cast<std::size_t>(piv) * m + j],
                                  g[static_cast<std::size_t>(col) * m + j]);
                    std::swap(sol[piv], sol[col]);
                }
                for (int r = 0; r < m; ++r) {
                    if (r == col) continue;
                    double f = g[static_cast<std::size_t>(r) * m + col] /
                               g[static_cast<std::size_t>(col) * m + col];
                    if (f == 0.0) continue;
                    for (int j = col; j < m; ++j)
                        g[static_cast<std::size_t>(r) * m + j] -=
                            f * g[static_cast<std::size_t>(col) * m + j];
                    sol[r] -= f * sol[col];
                }
            }
            if (singular) continue;
            for (int a = 0; a < m; ++a)
                sol[a] /= g[static_cast<std::size_t>(a) * m + a];

            bool feasible = true;
            for (int a = 0; a < m && feasible; ++a)
                if (sol[a] < -tol) feasible = false;
            if (!feasible) continue;

            std::vector<double> w(n, 0.0), wt(n, 0.0);
            for (int a = 0; a < m; ++a) {
                if (idx[a] < n)
                    w[idx[a]] = std::max(sol[a], 0.0);
                else
                    wt[idx[a] - n] = std::max(sol[a], 0.0);
            }
            // KKT: residual in the polar cone and orthogonal to the projection.
            double t = 0.0, tt = 0.0;
            for (int i = 0; i < n; ++i) {
                t += w[i];
                tt += wt[i];
            }
            bool kkt = true;
            double ip = 0.0;
            for (int i = 0; i < n && kkt; ++i) {
                double gr = rs[i] - (n * w[i] + tt);
                double gc = cs[i] - (n * wt[i] + t);
                if (gr > tol || gc > tol) kkt = false;
                ip += w[i] * gr + wt[i] * gc;
            }
            if (!kkt || std::abs(ip) > tol * (1.0 + t + tt) * n) continue;

            std::vector<double> y(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    y[static_cast<std::size_t>(i) * n + j] = w[i] + wt[j];
            return y;
        }
    }
    throw Error("cone brute force: no subset satisfied the KKT conditions");
}

CapacityPosition capacity_position(const std::vector<double>& rate, int n) {
    constexpr double tol = 1e-10;
    std::vector<double> rs, cs;
    port_sums(rate, n, rs, cs);
    bool all_on_face = true;
    bool all_inside = true;
    for (int i = 0; i < n; ++i) {
        for (double s : {rs[i], cs[i]}) {
            if (s > 1.0 + tol) return CapacityPosition::Outside;
            if (std::abs(s - 1.0) > tol) all_on_face = false;
            if (s >= 1.0 - tol) all_inside = false;
        }
    }
    if (all_on_face) return CapacityPosition::OnFaceF;
    if (all_inside) return CapacityPosition::Interior;
    return CapacityPosition::BoundaryOther;
}

const char* to_string(CapacityPosition p) {
    switch (p) {
        case CapacityPosition::Interior: return "interior";
        case CapacityPosition::OnFaceF: return "on-face-F";
        case CapacityPosition::BoundaryOther: return "boundary-other";
        case CapacityPosition::Outside: return "outside";
    }
    return "?";
}

}  // namespace htq
