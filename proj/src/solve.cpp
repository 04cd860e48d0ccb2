#include "xfd/solve.hpp"
#include "xfd/profile.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace xfd {

DirichletData outer_dirichlet(const DofMap& dofs, const VectorField& g) {
    DirichletData bc;
    const auto& sp = dofs.velocity;
    for (Index r = 0; r < sp.num_retained(); ++r) {
        const Index node = sp.retained_nodes[static_cast<std::size_t>(r)];
        if (!sp.on_boundary[static_cast<std::size_t>(node)]) continue;
        const Vec2 v = g ? g(sp.coords[static_cast<std::size_t>(node)]) : Vec2::Zero();
        bc.dofs.push_back(2 * r);
        bc.values.push_back(v.x());
        bc.dofs.push_back(2 * r + 1);
        bc.values.push_back(v.y());
    }
    return bc;
}

namespace {

// Unknowns left after removing prescribed ones, plus an optional bordering
// row/column for the mean-value pressure constraint.
class ReducedSpace {
public:
    ReducedSpace(const SaddleSystem& sys, const DirichletData& bc, PressureGauge gauge)
        : n_(sys.layout.size()), full_to_free_(static_cast<std::size_t>(n_), 0), pinned_values_(Eigen::VectorXd::Zero(n_)) {
        for (std::size_t k = 0; k < bc.dofs.size(); ++k) {
            full_to_free_[static_cast<std::size_t>(bc.dofs[k])] = -1;
            pinned_values_[bc.dofs[k]] = bc.values[k];
        }
        const Eigen::VectorXd& w = sys.pressure_weights;
        if (gauge == PressureGauge::PinOne && sys.layout.np > 0) {
            Index best = 0;
            for (Index i = 1; i < w.size(); ++i)
                if (w[i] > w[best]) best = i;
            pinned_pressure_ = sys.layout.p_offset() + best;
            full_to_free_[static_cast<std::size_t>(pinned_pressure_)] = -1;
        }
        Index nf = 0;
        for (auto& m : full_to_free_)
            if (m == 0) m = nf++;
        free_ = nf;
        if (gauge == PressureGauge::MeanZero && sys.layout.np > 0) {
            bordered_ = true;
            border_ = Eigen::VectorXd::Zero(free_);
            const double scale = w.cwiseAbs().maxCoeff();
            for (Index i = 0; i < sys.layout.np; ++i) {
                const Index f = full_to_free_[static_cast<std::size_t>(sys.layout.p_offset() + i)];
                if (f >= 0) border_[f] = w[i] / scale;
            }
        }
    }

    Index size() const { return free_ + (bordered_ ? 1 : 0); }
    /// Constraint row of the mean-value gauge; empty when not bordered.
    Eigen::VectorXd border() const { return bordered_ ? border_ : Eigen::VectorXd(); }
    const Eigen::VectorXd& pinned_values() const { return pinned_values_; }

    SparseMatrix reduce(const SparseMatrix& a) const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(a.nonZeros()) + (bordered_ ? 2 * static_cast<std::size_t>(free_) : 0));
        for (Index col = 0; col < a.outerSize(); ++col) {
            const Index fc = full_to_free_[static_cast<std::size_t>(col)];
            if (fc < 0) continue;
            for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
                const Index fr = full_to_free_[static_cast<std::size_t>(it.row())];
                if (fr >= 0) trip.emplace_back(fr, fc, it.value());
            }
        }
        SparseMatrix r(free_, free_);
        r.setFromTriplets(trip.begin(), trip.end());
        return r;
    }

    // Full-length residual -> reduced residual, including the constraint row.
    Eigen::VectorXd restrict(const Eigen::VectorXd& full, const Eigen::VectorXd& x_full, double border_mult) const {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(size());
        for (Index i = 0; i < n_; ++i) {
            const Index f = full_to_free_[static_cast<std::size_t>(i)];
            if (f >= 0) r[f] = full[i];
        }
        if (bordered_) {
            double c = 0.0;
            for (Index i = 0; i < n_; ++i) {
                const Index f = full_to_free_[static_cast<std::size_t>(i)];
                if (f >= 0 && border_[f] != 0.0) {
                    r[f] += border_[f] * border_mult;
                    c += border_[f] * x_full[i];
                }
            }
            r[free_] = c;
        }
        return r;
    }

    void update(Eigen::VectorXd& x_full, double& border_mult, const Eigen::VectorXd& delta) const {
        for (Index i = 0; i < n_; ++i) {
            const Index f = full_to_free_[static_cast<std::size_t>(i)];
            if (f >= 0) x_full[i] += delta[f];
        }
        if (bordered_) border_mult += delta[free_];
    }

    void apply_pinned(Eigen::VectorXd& x_full) const {
        for (Index i = 0; i < n_; ++i)
            if (full_to_free_[static_cast<std::size_t>(i)] < 0) x_full[i] = pinned_values_[i];
    }

private:
    Index n_;
    std::vector<Index> full_to_free_;
    Eigen::VectorXd pinned_values_;
    Index free_ = 0;
    Index pinned_pressure_ = -1;
    bool bordered_ = false;
    Eigen::VectorXd border_;
};

class DirectSolver {
public:
    // Factorizes `a`; a non-empty `border` b turns it into [a b; b^T 0],
    // solved through the scalar Schur complement so that the dense row never
    // enters the sparse factorization.
    DirectSolver(const SparseMatrix& a, const Eigen::VectorXd& border) {
        ScopedTimer t("factor");
        SparseMatrix m = a;
        m.makeCompressed();
        lu_.compute(m);
        if (lu_.info() != Eigen::Success) throw SingularSystem("sparse LU factorization failed: " + lu_.lastErrorMessage());
        if (border.size() > 0) {
            border_ = border;
            border_solved_ = raw_solve(border);
            border_schur_ = border.dot(border_solved_);
            if (!(std::abs(border_schur_) > 0.0)) throw SingularSystem("mean-value gauge is degenerate");
        }
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) {
        ScopedTimer t("solve");
        if (border_.size() == 0) return raw_solve(b);
        const Index n = border_.size();
        const Eigen::VectorXd y = raw_solve(b.head(n));
        const double mult = (border_.dot(y) - b[n]) / border_schur_;
        Eigen::VectorXd x(n + 1);
        x.head(n) = y - mult * border_solved_;
        x[n] = mult;
        return x;
    }

private:
    Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) {
        Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success || !x.allFinite()) throw SingularSystem("sparse LU solve failed");
        return x;
    }

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
    Eigen::VectorXd border_, border_solved_;
    double border_schur_ = 0.0;
};

// Shift a pinned-gauge solution to zero fluid mean, moving Λ along the
// (0, c, -c n) direction.
void shift_to_zero_mean(const SaddleSystem& sys, Eigen::VectorXd& x) {
    const Index po = sys.layout.p_offset();
    const double area = sys.pressure_weights.sum();
    if (area <= 0.0) return;
    const double mean = sys.pressure_weights.dot(x.segment(po, sys.layout.np)) / area;
    x.segment(po, sys.layout.np).array() -= mean;
    x.tail(sys.layout.nl) += mean * sys.mean_normals;
}

SparseMatrix embed_velocity_block(const SparseMatrix& a, Index n) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(a.nonZeros()));
    for (Index col = 0; col < a.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    SparseMatrix r(n, n);
    r.setFromTriplets(trip.begin(), trip.end());
    return r;
}

} // namespace

Solution solve_stokes(const SaddleSystem& system, const Eigen::VectorXd& rhs, const DirichletData& bc,
                      const SolveOptions& opts) {
    XFD_REQUIRE(rhs.size() == system.layout.size(), InvalidArgument, "rhs size does not match the system");
    const ReducedSpace space(system, bc, opts.gauge);
    Solution sol;
    sol.layout = system.layout;
    sol.x = Eigen::VectorXd::Zero(system.layout.size());
    space.apply_pinned(sol.x);

    const SparseMatrix a = space.reduce(system.matrix);
    DirectSolver lu(a, space.border());
    double mult = 0.0;
    // Newton on a linear residual: one solve plus up to two refinement passes.
    Eigen::VectorXd r = space.restrict(system.matrix * sol.x - rhs, sol.x, mult);
    const double bnorm = std::max(r.norm(), 1e-300);
    for (int pass = 0; pass < 3; ++pass) {
        sol.residual_history.push_back(r.norm());
        if (pass > 0 && r.norm() <= 1e-12 * bnorm) break;
        space.update(sol.x, mult, lu.solve(-r));
        ++sol.iterations;
        r = space.restrict(system.matrix * sol.x - rhs, sol.x, mult);
    }
    sol.residual = r.norm();
    if (sol.residual > 1e-6 * bnorm)
        throw SingularSystem("linear residual " + std::to_string(sol.residual / bnorm) + " (relative) after refinement");
    if (sol.residual > 1e-10 * bnorm)
        spdlog::warn("stokes solve: relative linear residual {:.2e}", sol.residual / bnorm);
    if (opts.gauge == PressureGauge::PinOne) shift_to_zero_mean(system, sol.x);
    return sol;
}

Solution solve_navier_stokes_step(const TransientProblem& problem, const Eigen::VectorXd& guess,
                                  const SolveOptions& opts) {
    XFD_REQUIRE(problem.system != nullptr, InvalidArgument, "transient problem without system");
    const SaddleSystem& sys = *problem.system;
    const Index n = sys.layout.size();
    const Index nu = sys.layout.nu;
    XFD_REQUIRE(guess.size() == n && problem.rhs.size() == n && problem.u_prev.size() == nu, InvalidArgument,
                "transient problem: inconsistent vector sizes");
    XFD_REQUIRE(problem.dt > 0.0, InvalidArgument, "dt must be positive");

    const ReducedSpace space(sys, problem.bc, opts.gauge);
    const SparseMatrix mass_dt = sys.mass / problem.dt;
    const SparseMatrix base = sys.matrix + embed_velocity_block(mass_dt, n);

    Solution sol;
    sol.layout = sys.layout;
    sol.x = guess;
    space.apply_pinned(sol.x);
    double mult = 0.0;

    auto residual = [&](ConvectionTerm* conv) {
        Eigen::VectorXd r = sys.matrix * sol.x - problem.rhs;
        r.head(nu) += mass_dt * (sol.x.head(nu) - problem.u_prev);
        if (problem.convection) {
            *conv = problem.convection(sol.x.head(nu));
            r.head(nu) += conv->vector;
        }
        return space.restrict(r, sol.x, mult);
    };

    ConvectionTerm conv;
    Eigen::VectorXd r = residual(&conv);
    const double tol = std::max(opts.newton_abs_tol, opts.newton_rel_tol * r.norm());
    for (;;) {
        const double rn = r.norm();
        sol.residual_history.push_back(rn);
        sol.residual = rn;
        spdlog::debug("newton {}: residual {:.3e} (tol {:.1e})", sol.iterations, rn, tol);
        if (!std::isfinite(rn)) throw NewtonDiverged("newton: residual is not finite");
        if (rn <= tol) break;
        if (sol.iterations >= opts.newton_max_iter)
            throw NewtonDiverged("newton: no convergence after " + std::to_string(sol.iterations) +
                                 " iterations, residual " + std::to_string(rn));
        const SparseMatrix jac = problem.convection ? SparseMatrix(base + embed_velocity_block(conv.jacobian, n)) : base;
        DirectSolver lu(space.reduce(jac), space.border());
        const Eigen::VectorXd step = lu.solve(-r);
        const Eigen::VectorXd x0 = sol.x;
        const double mult0 = mult;
        ++sol.iterations;
        // backtracking on the residual norm, full step first
        double alpha = 1.0;
        for (int k = 0;; ++k) {
            sol.x = x0;
            mult = mult0;
            space.update(sol.x, mult, alpha * step);
            r = residual(&conv);
            if (!problem.convection || k >= opts.line_search_max || r.norm() <= (1.0 - 1e-4 * alpha) * rn) break;
            alpha *= 0.5;
        }
        if (alpha < 1.0) spdlog::debug("newton: damped step alpha {}", alpha);
    }
    if (opts.gauge == PressureGauge::PinOne) shift_to_zero_mean(sys, sol.x);
    return sol;
}

double TripleNormParts::value(double h) const {
    return std::sqrt(u_V2 + p_F2 + h * Dun_G2 + h * p_G2 + h * lambda_G2 + u_G2 / h);
}

ErrorReport compute_errors(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad, const Solution& sol,
                           const ExactSolution& exact, double nu) {
    const Eigen::VectorXd u = sol.x.head(sol.layout.nu);
    const Eigen::VectorXd p = sol.x.segment(sol.layout.p_offset(), sol.layout.np);
    const Eigen::VectorXd lam = sol.x.tail(sol.layout.nl);

    ErrorReport rep;
    rep.h = mesh.h();
    TripleNormParts parts;
    double u_l2 = 0.0, u_semi = 0.0, lam_norm = 0.0;

    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const VolumeRule& vr = quad.volume[static_cast<std::size_t>(t)];
        for (std::size_t q = 0; q < vr.points.size(); ++q) {
            const Vec2& x = vr.points[q];
            const VelocitySample s = eval_velocity(mesh, dofs, u, t, x);
            const Vec2 eu = s.value - exact.u(x);
            const Mat2 eg = s.grad - exact.grad_u(x);
            const double ep = eval_pressure(mesh, dofs, p, t, x) - exact.p(x);
            u_l2 += vr.weights[q] * eu.squaredNorm();
            u_semi += vr.weights[q] * eg.squaredNorm();
            parts.p_F2 += vr.weights[q] * ep * ep;
        }
    }
    parts.u_V2 = u_l2 + u_semi;

    for (std::size_t k = 0; k < quad.surface.size(); ++k) {
        const Index t = dofs.multiplier_elements[k];
        const Vec2 lh(lam[static_cast<Index>(2 * k)], lam[static_cast<Index>(2 * k + 1)]);
        for (const SurfaceRule& sr : quad.surface[k]) {
            for (std::size_t q = 0; q < sr.points.size(); ++q) {
                const Vec2& x = sr.points[q];
                const Vec2& n = sr.normals[q];
                const double w = sr.weights[q];
                const VelocitySample s = eval_velocity(mesh, dofs, u, t, x);
                const double pex = exact.p(x);
                const Vec2 lex = 2.0 * nu * sym_grad(exact.grad_u(x)) * n - pex * n;
                const Vec2 eu = s.value - exact.u(x);
                const Vec2 eDn = sym_grad(s.grad - exact.grad_u(x)) * n;
                const double ep = eval_pressure(mesh, dofs, p, t, x) - pex;
                parts.Dun_G2 += w * eDn.squaredNorm();
                parts.p_G2 += w * ep * ep;
                parts.lambda_G2 += w * (lh - lex).squaredNorm();
                parts.u_G2 += w * eu.squaredNorm();
                lam_norm += w * lex.squaredNorm();
            }
        }
    }

    rep.err_u_L2 = std::sqrt(u_l2);
    rep.err_u_H1 = std::sqrt(u_l2 + u_semi);
    rep.err_p_L2 = std::sqrt(parts.p_F2);
    rep.err_lambda_L2 = std::sqrt(parts.lambda_G2);
    rep.lambda_norm = std::sqrt(lam_norm);
    rep.triple_norm_err = parts.value(rep.h);
    return rep;
}

} // namespace xfd
