#include "navslip/linear_solver.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

#include "navslip/error.hpp"

namespace navslip {

Stencil5::Stencil5(int ni_, int nj_, bool periodic)
    : ni(ni_), nj(nj_), periodic_i(periodic),
      diag(static_cast<std::size_t>(ni_) * nj_, 0.0),
      west(diag.size(), 0.0),
      south(diag.size(), 0.0) {}

void Stencil5::add_edge_x(int i, int j, double w) {
    const int im = (i == 0) ? ni - 1 : i - 1;
    west[index(i, j)] += w;
    diag[index(i, j)] += w;
    diag[index(im, j)] += w;
}

void Stencil5::add_edge_y(int i, int j, double w) {
    south[index(i, j)] += w;
    diag[index(i, j)] += w;
    diag[index(i, j - 1)] += w;
}

void Stencil5::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(x.size());
    const double* xp = x.data();
    const double* dg = diag.data();
    const double* we = west.data();
    const double* so = south.data();
    double* yp = y.data();
    for (int j = 0; j < nj; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * ni;
        for (int i = 0; i < ni; ++i) {
            const std::size_t k = row + i;
            yp[k] = dg[k] * xp[k];
        }
        // Horizontal couplings inside the row, then the periodic wrap.
        for (int i = 1; i < ni; ++i) {
            const std::size_t k = row + i;
            yp[k] -= we[k] * xp[k - 1];
            yp[k - 1] -= we[k] * xp[k];
        }
        if (periodic_i) {
            yp[row] -= we[row] * xp[row + ni - 1];
            yp[row + ni - 1] -= we[row] * xp[row];
        }
        if (j > 0) {
            for (int i = 0; i < ni; ++i) {
                const std::size_t k = row + i;
                yp[k] -= so[k] * xp[k - ni];
                yp[k - ni] -= so[k] * xp[k];
            }
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const std::vector<double>& a) {
    return std::sqrt(dot(a, a));
}

namespace {

void remove_mean(std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

/// Incomplete Cholesky with zero fill on the non-wrapping part of the stencil;
/// periodic wrap couplings are dropped from the factor. `tau` > 0 gives the
/// modified variant, which compensates the dropped fill on the diagonal.
class Ic0 {
public:
    Ic0(const Stencil5& a, double tau) : a_(a), d_(a.size()) {
        const int ni = a.ni;
        for (int j = 0; j < a.nj; ++j) {
            for (int i = 0; i < ni; ++i) {
                const std::size_t k = a.index(i, j);
                double v = a.diag[k];
                if (i > 0) {
                    const double fill = (j + 1 < a.nj) ? a.south[k - 1 + ni] : 0.0;
                    v -= a.west[k] * (a.west[k] + tau * fill) / d_[k - 1];
                }
                if (j > 0) {
                    const double fill = (i + 1 < ni) ? a.west[k + 1 - ni] : 0.0;
                    v -= a.south[k] * (a.south[k] + tau * fill) / d_[k - ni];
                }
                // Safeguard against tiny or negative pivots from the modification.
                if (v < 0.25 * a.diag[k]) v = a.diag[k];
                d_[k] = v;
            }
        }
    }

    // Solves (D - L) D^{-1} (D - L^T) z = r.
    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        const int ni = a_.ni;
        const int nj = a_.nj;
        const double* we = a_.west.data();
        const double* so = a_.south.data();
        const double* d = d_.data();
        z.resize(r.size());
        double* zp = z.data();
        for (int j = 0; j < nj; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * ni;
            if (j > 0) {
                for (int i = 0; i < ni; ++i) zp[row + i] = r[row + i] + so[row + i] * zp[row + i - ni];
            } else {
                for (int i = 0; i < ni; ++i) zp[row + i] = r[row + i];
            }
            zp[row] /= d[row];
            for (int i = 1; i < ni; ++i) {
                const std::size_t k = row + i;
                zp[k] = (zp[k] + we[k] * zp[k - 1]) / d[k];
            }
        }
        for (int j = nj - 1; j >= 0; --j) {
            const std::size_t row = static_cast<std::size_t>(j) * ni;
            if (j + 1 < nj) {
                for (int i = 0; i < ni; ++i) zp[row + i] += so[row + i + ni] * zp[row + i + ni] / d[row + i];
            }
            for (int i = ni - 2; i >= 0; --i) {
                const std::size_t k = row + i;
                zp[k] += we[k + 1] * zp[k + 1] / d[k];
            }
        }
    }

private:
    const Stencil5& a_;
    std::vector<double> d_;
};

std::string history_tail(const std::vector<double>& h) {
    std::string out;
    const std::size_t start = h.size() > 8 ? h.size() - 8 : 0;
    char buf[32];
    for (std::size_t k = start; k < h.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.3e", out.empty() ? "" : " ", h[k]);
        out += buf;
    }
    return out;
}

} // namespace

SolveStats pcg(const Stencil5& a, const std::vector<double>& b, std::vector<double>& x,
               const SolveControl& control, const std::string& label) {
    const std::size_t n = a.size();
    require(b.size() == n && x.size() == n, label + ": vector size mismatch");
    SolveStats stats;

    std::vector<double> r(n), z(n), p(n), q(n);
    a.apply(x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    if (control.singular_constant_mode) remove_mean(r);

    double rnorm = norm2(r);
    stats.history.push_back(rnorm);
    if (rnorm <= control.abs_tol) {
        stats.residual = rnorm;
        return stats;
    }

    std::vector<double> inv_diag;
    std::unique_ptr<Ic0> ic0;
    if (control.preconditioner != Preconditioner::jacobi) {
        ic0 = std::make_unique<Ic0>(a, control.preconditioner == Preconditioner::mic0 ? 0.97 : 0.0);
    } else {
        inv_diag.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            require(a.diag[k] > 0.0, label + ": non-positive diagonal");
            inv_diag[k] = 1.0 / a.diag[k];
        }
    }
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (ic0) {
            ic0->apply(in, out);
        } else {
            for (std::size_t k = 0; k < n; ++k) out[k] = inv_diag[k] * in[k];
        }
        if (control.singular_constant_mode) remove_mean(out);
    };

    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= control.max_iterations; ++it) {
        a.apply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            throw SolverError(label + ": CG breakdown (p.Ap = " + std::to_string(pq) +
                              ") after " + std::to_string(it) + " iterations; residuals " +
                              history_tail(stats.history));
        }
        const double step = rz / pq;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += step * p[k];
            r[k] -= step * q[k];
        }
        rnorm = norm2(r);
        if (stats.history.size() < 100000) stats.history.push_back(rnorm);
        stats.iterations = it;
        if (rnorm <= control.abs_tol) {
            stats.residual = rnorm;
            return stats;
        }
        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    throw SolverError(label + ": no convergence in " + std::to_string(control.max_iterations) +
                      " iterations (target " + std::to_string(control.abs_tol) + "); residuals " +
                      history_tail(stats.history));
}

} // namespace navslip
