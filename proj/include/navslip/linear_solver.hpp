#pragma once

/// @file linear_solver.hpp
/// @brief Symmetric five-point stencil matrices and a preconditioned conjugate-gradient solver.

#include <string>
#include <vector>

namespace navslip {

/// Symmetric matrix on an ni x nj lattice of unknowns, index k = j*ni + i:
///   (A x)_k = diag_k x_k - sum over lattice neighbours of coupling * x_nbr.
/// west(i, j) couples (i-1, j) with (i, j); for periodic_i the i = 0 entry couples
/// with (ni-1, j). south(i, j) couples (i, j-1) with (i, j); its j = 0 entries are unused.
struct Stencil5 {
    int ni = 0;
    int nj = 0;
    bool periodic_i = false;
    std::vector<double> diag;
    std::vector<double> west;
    std::vector<double> south;

    Stencil5() = default;
    Stencil5(int ni_, int nj_, bool periodic);

    std::size_t size() const { return diag.size(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * ni + i; }

    /// Adds a symmetric coupling of strength w between two lattice points and the
    /// matching diagonal contributions (a graph-Laplacian edge).
    void add_edge_x(int i, int j, double w);  // (i-1, j) -- (i, j)
    void add_edge_y(int i, int j, double w);  // (i, j-1) -- (i, j)

    void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

enum class Preconditioner { jacobi, ic0, mic0 };

struct SolveControl {
    double abs_tol = 1e-12;       // stop when ||b - A x||_2 <= abs_tol
    int max_iterations = 20000;
    bool singular_constant_mode = false;  // A has the constant null vector; keep iterates mean-free
    Preconditioner preconditioner = Preconditioner::jacobi;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;  // residual 2-norm per iteration (capped length)
};

/// Preconditioned CG. x holds the initial guess on entry. Throws SolverError on
/// breakdown or if the iteration cap is reached, including the residual history.
SolveStats pcg(const Stencil5& a, const std::vector<double>& b, std::vector<double>& x,
               const SolveControl& control, const std::string& label);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

} // namespace navslip
