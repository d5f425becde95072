// Carleman-weighted convexification engine for the reduced coefficient system:
// weighted functional with analytic gradient, convex linearized initializer,
// and monotone gradient descent.
#pragma once

#include "cpl/basis.hpp"
#include "cpl/grid.hpp"
#include "cpl/optim.hpp"
#include "cpl/reduction.hpp"

namespace cpl {

struct CarlemanParams {
    double lambda = 1.1;
    double r = 2.0;                       // weight offset, must exceed R
    double epsilon = 1.7782794100389228e-6;  // 10^-5.75
    double eta = 0.1;                     // initial descent step
    int max_iters = 2000;
    double grad_tol = 1e-8;
    double M = 0.0;                       // admissible-ball radius, diagnostic only
    // Plain descent is deliberate: the iteration counts double as iterative
    // regularization, building the strongly weighted (near-data) components
    // first. Preconditioning or Barzilai-Borwein steps equalize the spectrum
    // and converge onto continuation junk in the weakly weighted region.
    bool precondition = false;
    bool bb_step = false;
    int cg_max_iters = 20000;
    double cg_tol = 1e-8;
    // The initializer solve uses max(epsilon, init_epsilon): the continuation
    // problem leaves the plain normal equations too ill-conditioned for CG,
    // and an unconverged solve seeds the descent with junk in the weakly
    // weighted region. Any admissible starting point is permitted.
    double init_epsilon = 1e-3;

    void validate(double R) const {
        ensure(lambda >= 0.0, "CarlemanParams: lambda must be nonnegative");
        ensure(r > R, "CarlemanParams: need r > R");
        ensure(epsilon > 0.0, "CarlemanParams: need epsilon > 0");
        ensure(eta > 0.0 && max_iters > 0 && cg_max_iters > 0,
               "CarlemanParams: caps and step must be positive");
    }
};

// Optimization unknown: N complex fields on the grid.
struct Candidate {
    std::vector<ScalarField> phi;

    int count() const { return static_cast<int>(phi.size()); }
    static Candidate zeros(const Grid3D& g, int N) {
        Candidate c;
        c.phi.assign(N, g.make_field());
        return c;
    }
    DVec pack() const;
    static Candidate unpack(const DVec& x, const Grid3D& g, int N);
};

struct FunctionalBlocks {
    double interior = 0.0;   // weighted PDE residual
    double gamma = 0.0;      // Cauchy mismatch on Gamma
    double sidewall = 0.0;   // penalty on dOmega\Gamma
    double reg = 0.0;        // epsilon-weighted discrete H^2 norm
    double total() const { return interior + gamma + sidewall + reg; }
};

// Precomputed per-scenario state shared by every evaluation.
class CarlemanProblem {
  public:
    CarlemanProblem(const Grid3D& g, const ReducedTensors& t, const CoefficientStack& stack,
                    const Vec3& x0, const CarlemanParams& p,
                    std::vector<ScalarField> manufactured_source = {});

    const Grid3D& grid() const { return grid_; }
    int N() const { return N_; }
    const CarlemanParams& params() const { return params_; }
    double interior_weight(int t) const { return w_layer_[t]; }

    // Functional value (and blocks / gradient on demand). drop_quadratic
    // removes the a_mnl term from the residual, i.e. evaluates the linearized
    // initializer functional.
    double eval(const Candidate& c, Candidate* grad = nullptr, FunctionalBlocks* blocks = nullptr,
                bool drop_quadratic = false) const;

    // Diagonal of the Gauss-Newton Hessian of the linearized functional; one
    // entry per complex degree of freedom (shared by the re/im coordinates).
    DVec hessian_diagonal() const;

    // Discrete H^2 seminorm-squared used by the regularization block,
    // dx^3 sum_interior |d|^2 + |grad d|^2 + |lap d|^2 over all fields.
    double h2_norm_sq(const Candidate& c) const;

    // Raw residual of the reduced system at every interior node (zero
    // elsewhere), before weighting and before subtracting any manufactured
    // source. Used to manufacture consistent data for inversion tests.
    std::vector<ScalarField> interior_residual(const Candidate& c) const;

    // Copy of this problem with different parameters (same data and tensors).
    CarlemanProblem with_params(const CarlemanParams& p) const;

  private:
    Grid3D grid_;
    ReducedTensors tensors_;
    Vec3 x0_;
    CarlemanParams params_;
    int N_ = 0;

    std::vector<Box3<Complex>> g_m_, h_m_;
    std::vector<ScalarField> source_;  // manufactured interior source, may be empty

    std::vector<double> w_layer_;      // e^{2 lambda (z_t - r)^2} per layer
    double gamma_weight_ = 0.0;        // lambda^4 e^{2 lambda (R+r)^2} dx^2
    std::vector<double> asym_;         // a_mnl + a_mln
    std::vector<Complex> zeta_a_;      // zeta_mn(rho) = zeta_a + zeta_b / rho
    std::vector<double> zeta_b_;
    std::vector<double> inv_rho_;      // per node
    std::vector<Vec3> rhat_;           // per node
};

double eval_functional(const Candidate& c, const CarlemanProblem& prob,
                       FunctionalBlocks* blocks = nullptr);
Candidate eval_gradient(const Candidate& c, const CarlemanProblem& prob);

struct InitResult {
    Candidate candidate;
    double rel_residual = 0.0;
    int iters = 0;
};

// Minimizer of the strictly convex linearized functional, by Jacobi-
// preconditioned conjugate gradient on the normal equations.
InitResult init_guess(const CarlemanProblem& prob);

struct DescentRecord {
    int iter = 0;
    double J = 0.0;
    FunctionalBlocks blocks;
    double grad_norm = 0.0;
    double eta = 0.0;
};

struct MinimizeResult {
    Candidate candidate;
    std::vector<DescentRecord> log;
    bool converged = false;
    double final_J = 0.0;
    double final_grad_norm = 0.0;
};

// Gradient descent phi <- phi - eta P^{-1} grad J with backtracking halving of
// eta on non-decrease; the accepted step seeds the next trial (Barzilai-Borwein
// when curvature information is usable). J is non-increasing by construction.
// on_iterate, when set, sees every accepted iterate (checkpointing hook).
using IterateHook = std::function<void(int, const Candidate&)>;
MinimizeResult minimize(const Candidate& phi0, const CarlemanProblem& prob,
                        const IterateHook& on_iterate = {});

struct BregmanSample {
    double lhs = 0.0;  // J(u) - J(w) - <grad J(w), u - w>
    double rhs = 0.0;  // epsilon ||u - w||^2_{H^2}
};

BregmanSample bregman_probe(const CarlemanProblem& prob, const Candidate& u, const Candidate& w);

}  // namespace cpl
