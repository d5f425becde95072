#include "cpl/carleman.hpp"

namespace cpl {

DVec Candidate::pack() const {
    const size_t nn = phi.empty() ? 0 : phi[0].size();
    DVec x(2 * phi.size() * nn);
    for (size_t n = 0; n < phi.size(); ++n)
        for (size_t p = 0; p < nn; ++p) {
            x[2 * (n * nn + p)] = phi[n].a[p].real();
            x[2 * (n * nn + p) + 1] = phi[n].a[p].imag();
        }
    return x;
}

Candidate Candidate::unpack(const DVec& x, const Grid3D& g, int N) {
    Candidate c = Candidate::zeros(g, N);
    const size_t nn = g.nodes();
    ensure(x.size() == 2 * static_cast<size_t>(N) * nn, "Candidate::unpack: size mismatch");
    for (int n = 0; n < N; ++n)
        for (size_t p = 0; p < nn; ++p)
            c.phi[n].a[p] = Complex(x[2 * (n * nn + p)], x[2 * (n * nn + p) + 1]);
    return c;
}

CarlemanProblem::CarlemanProblem(const Grid3D& g, const ReducedTensors& t,
                                 const CoefficientStack& stack, const Vec3& x0,
                                 const CarlemanParams& p,
                                 std::vector<ScalarField> manufactured_source)
    : grid_(g), tensors_(t), x0_(x0), params_(p), N_(t.N), source_(std::move(manufactured_source)) {
    params_.validate(g.R);
    ensure(stack.complemented, "CarlemanProblem: stack data must be complemented first");
    ensure(static_cast<int>(stack.g_m.size()) == N_ && static_cast<int>(stack.h_m.size()) == N_,
           "CarlemanProblem: Cauchy data count mismatch");
    ensure(source_.empty() || static_cast<int>(source_.size()) == N_,
           "CarlemanProblem: source count mismatch");
    g_m_ = stack.g_m;
    h_m_ = stack.h_m;

    const double la = params_.lambda, r = params_.r;
    w_layer_.resize(g.nx);
    for (int tt = 0; tt < g.nx; ++tt) {
        const double z = g.coord(tt);
        w_layer_[tt] = std::exp(2.0 * la * (z - r) * (z - r));
    }
    gamma_weight_ = std::pow(la, 4) * std::exp(2.0 * la * (g.R + r) * (g.R + r)) * g.dx * g.dx;

    asym_.assign(static_cast<size_t>(N_) * N_ * N_, 0.0);
    for (int m = 0; m < N_; ++m)
        for (int n = 0; n < N_; ++n)
            for (int l = 0; l < N_; ++l)
                asym_[(static_cast<size_t>(m) * N_ + n) * N_ + l] = t.a(m, n, l) + t.a(m, l, n);

    // zeta_mn(x) = i (beta1_mn + 2 delta_mn) - 2 s_mn / |x-x0|
    zeta_a_.assign(static_cast<size_t>(N_) * N_, Complex(0.0));
    zeta_b_.assign(static_cast<size_t>(N_) * N_, 0.0);
    for (int m = 0; m < N_; ++m)
        for (int n = 0; n < N_; ++n) {
            zeta_a_[static_cast<size_t>(m) * N_ + n] =
                Complex(0.0, t.beta1.at(m, n) + (m == n ? 2.0 : 0.0));
            zeta_b_[static_cast<size_t>(m) * N_ + n] = -2.0 * t.S.at(m, n);
        }

    inv_rho_.resize(g.nodes());
    rhat_.resize(g.nodes());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int tt = 0; tt < g.nx; ++tt) {
                const Vec3 d = g.pos(i, j, tt) - x0;
                const double rho = norm3(d);
                ensure(rho >= g.dx, "CarlemanProblem: source too close to the grid");
                const size_t q = g.idx(i, j, tt);
                inv_rho_[q] = 1.0 / rho;
                rhat_[q] = {d[0] / rho, d[1] / rho, d[2] / rho};
            }
}

CarlemanProblem CarlemanProblem::with_params(const CarlemanParams& p) const {
    CarlemanProblem copy = *this;
    copy.params_ = p;
    copy.params_.validate(copy.grid_.R);
    const double la = p.lambda, r = p.r;
    for (int tt = 0; tt < copy.grid_.nx; ++tt) {
        const double z = copy.grid_.coord(tt);
        copy.w_layer_[tt] = std::exp(2.0 * la * (z - r) * (z - r));
    }
    copy.gamma_weight_ = std::pow(la, 4) *
                         std::exp(2.0 * la * (copy.grid_.R + r) * (copy.grid_.R + r)) *
                         copy.grid_.dx * copy.grid_.dx;
    return copy;
}

double CarlemanProblem::h2_norm_sq(const Candidate& c) const {
    const Grid3D& g = grid_;
    const double dx3 = g.dx * g.dx * g.dx;
    const double inv_h2 = 1.0 / (g.dx * g.dx), inv_2h = 1.0 / (2.0 * g.dx);
    double acc = 0.0;
    for (const auto& f : c.phi)
        for (int i = 1; i < g.nx - 1; ++i)
            for (int j = 1; j < g.nx - 1; ++j)
                for (int t = 1; t < g.nx - 1; ++t) {
                    const Complex lap =
                        inv_h2 * (f.at(i + 1, j, t) + f.at(i - 1, j, t) + f.at(i, j + 1, t) +
                                  f.at(i, j - 1, t) + f.at(i, j, t + 1) + f.at(i, j, t - 1) -
                                  6.0 * f.at(i, j, t));
                    const Complex gx = (f.at(i + 1, j, t) - f.at(i - 1, j, t)) * inv_2h;
                    const Complex gy = (f.at(i, j + 1, t) - f.at(i, j - 1, t)) * inv_2h;
                    const Complex gz = (f.at(i, j, t + 1) - f.at(i, j, t - 1)) * inv_2h;
                    acc += dx3 * (std::norm(f.at(i, j, t)) + std::norm(gx) + std::norm(gy) +
                                  std::norm(gz) + std::norm(lap));
                }
    return acc;
}

std::vector<ScalarField> CarlemanProblem::interior_residual(const Candidate& c) const {
    const Grid3D& g = grid_;
    const int N = N_, nx = g.nx;
    const double inv_h2 = 1.0 / (g.dx * g.dx), inv_2h = 1.0 / (2.0 * g.dx);
    std::vector<ScalarField> out(N, g.make_field());
    std::vector<Complex> lap(N), gx(N), gy(N), gz(N), proj(N);
    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < nx - 1; ++j)
            for (int t = 1; t < nx - 1; ++t) {
                const size_t q = g.idx(i, j, t);
                const Vec3& rh = rhat_[q];
                const double ir = inv_rho_[q];
                for (int n = 0; n < N; ++n) {
                    const auto& f = c.phi[n];
                    lap[n] = inv_h2 * (f.at(i + 1, j, t) + f.at(i - 1, j, t) +
                                       f.at(i, j + 1, t) + f.at(i, j - 1, t) +
                                       f.at(i, j, t + 1) + f.at(i, j, t - 1) -
                                       6.0 * f.at(i, j, t));
                    gx[n] = (f.at(i + 1, j, t) - f.at(i - 1, j, t)) * inv_2h;
                    gy[n] = (f.at(i, j + 1, t) - f.at(i, j - 1, t)) * inv_2h;
                    gz[n] = (f.at(i, j, t + 1) - f.at(i, j, t - 1)) * inv_2h;
                    proj[n] = rh[0] * gx[n] + rh[1] * gy[n] + rh[2] * gz[n];
                }
                for (int m = 0; m < N; ++m) {
                    Complex res(0.0);
                    for (int n = 0; n < N; ++n) {
                        const size_t mn = static_cast<size_t>(m) * N + n;
                        res += tensors_.S.at(m, n) * lap[n] +
                               (zeta_a_[mn] + zeta_b_[mn] * ir) * proj[n];
                        for (int l = 0; l < N; ++l)
                            res += tensors_.a(m, n, l) *
                                   (gx[n] * gx[l] + gy[n] * gy[l] + gz[n] * gz[l]);
                    }
                    out[m].a[q] = res;
                }
            }
    return out;
}

double CarlemanProblem::eval(const Candidate& c, Candidate* grad, FunctionalBlocks* blocks,
                             bool drop_quadratic) const {
    const Grid3D& g = grid_;
    const int N = N_, nx = g.nx;
    ensure(c.count() == N, "CarlemanProblem::eval: candidate count mismatch");
    const double dx3 = g.dx * g.dx * g.dx;
    const double inv_h2 = 1.0 / (g.dx * g.dx), inv_2h = 1.0 / (2.0 * g.dx);
    const double eps = params_.epsilon;
    const double la4 = std::pow(params_.lambda, 4);

    FunctionalBlocks bl;
    if (grad) *grad = Candidate::zeros(g, N);

    std::vector<Complex> lap(N), gx(N), gy(N), gz(N), proj(N), sig(N);
    std::vector<Complex> pdot(static_cast<size_t>(N) * N);
    std::vector<Complex> bnl(static_cast<size_t>(N) * N);

    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < nx - 1; ++j)
            for (int t = 1; t < nx - 1; ++t) {
                const size_t q = g.idx(i, j, t);
                const double w = dx3 * w_layer_[t];
                const Vec3& rh = rhat_[q];
                const double ir = inv_rho_[q];

                for (int n = 0; n < N; ++n) {
                    const auto& f = c.phi[n];
                    lap[n] = inv_h2 * (f.at(i + 1, j, t) + f.at(i - 1, j, t) +
                                       f.at(i, j + 1, t) + f.at(i, j - 1, t) +
                                       f.at(i, j, t + 1) + f.at(i, j, t - 1) -
                                       6.0 * f.at(i, j, t));
                    gx[n] = (f.at(i + 1, j, t) - f.at(i - 1, j, t)) * inv_2h;
                    gy[n] = (f.at(i, j + 1, t) - f.at(i, j - 1, t)) * inv_2h;
                    gz[n] = (f.at(i, j, t + 1) - f.at(i, j, t - 1)) * inv_2h;
                    proj[n] = rh[0] * gx[n] + rh[1] * gy[n] + rh[2] * gz[n];
                }
                if (!drop_quadratic)
                    for (int n = 0; n < N; ++n)
                        for (int l = n; l < N; ++l)
                            pdot[static_cast<size_t>(n) * N + l] =
                                gx[n] * gx[l] + gy[n] * gy[l] + gz[n] * gz[l];

                for (int m = 0; m < N; ++m) {
                    Complex res = source_.empty() ? Complex(0.0) : -source_[m].a[q];
                    for (int n = 0; n < N; ++n) {
                        const size_t mn = static_cast<size_t>(m) * N + n;
                        res += tensors_.S.at(m, n) * lap[n] +
                               (zeta_a_[mn] + zeta_b_[mn] * ir) * proj[n];
                    }
                    if (!drop_quadratic) {
                        const size_t base = static_cast<size_t>(m) * N * N;
                        for (int n = 0; n < N; ++n) {
                            res += tensors_.a(m, n, n) * pdot[static_cast<size_t>(n) * N + n];
                            for (int l = n + 1; l < N; ++l)
                                res += asym_[base + static_cast<size_t>(n) * N + l] *
                                       pdot[static_cast<size_t>(n) * N + l];
                        }
                    }
                    bl.interior += w * std::norm(res);
                    if (grad) sig[m] = 2.0 * w * res;
                }

                // regularization block shares the stencil values
                double reg_here = 0.0;
                for (int n = 0; n < N; ++n)
                    reg_here += std::norm(c.phi[n].a[q]) + std::norm(gx[n]) + std::norm(gy[n]) +
                                std::norm(gz[n]) + std::norm(lap[n]);
                bl.reg += eps * dx3 * reg_here;

                if (!grad) continue;

                if (!drop_quadratic) {
                    for (int n = 0; n < N; ++n)
                        for (int l = 0; l < N; ++l) {
                            Complex acc(0.0);
                            for (int m = 0; m < N; ++m)
                                acc += sig[m] *
                                       asym_[(static_cast<size_t>(m) * N + n) * N + l];
                            bnl[static_cast<size_t>(n) * N + l] = acc;
                        }
                }

                const double e2 = 2.0 * eps * dx3;
                for (int n = 0; n < N; ++n) {
                    Complex T(0.0), Wb(0.0);
                    for (int m = 0; m < N; ++m) {
                        const size_t mn = static_cast<size_t>(m) * N + n;
                        T += sig[m] * tensors_.S.at(m, n);
                        Wb += sig[m] * std::conj(zeta_a_[mn] + zeta_b_[mn] * ir);
                    }
                    T += e2 * lap[n];
                    Complex V[3] = {Wb * rh[0] + e2 * gx[n], Wb * rh[1] + e2 * gy[n],
                                    Wb * rh[2] + e2 * gz[n]};
                    if (!drop_quadratic) {
                        const size_t nb = static_cast<size_t>(n) * N;
                        Complex ax(0.0), ay(0.0), az(0.0);
                        for (int l = 0; l < N; ++l) {
                            ax += bnl[nb + l] * std::conj(gx[l]);
                            ay += bnl[nb + l] * std::conj(gy[l]);
                            az += bnl[nb + l] * std::conj(gz[l]);
                        }
                        V[0] += ax;
                        V[1] += ay;
                        V[2] += az;
                    }
                    auto& G = grad->phi[n];
                    const Complex Th2 = T * inv_h2;
                    G.at(i, j, t) += -6.0 * Th2 + e2 * c.phi[n].a[q];
                    G.at(i + 1, j, t) += Th2 + V[0] * inv_2h;
                    G.at(i - 1, j, t) += Th2 - V[0] * inv_2h;
                    G.at(i, j + 1, t) += Th2 + V[1] * inv_2h;
                    G.at(i, j - 1, t) += Th2 - V[1] * inv_2h;
                    G.at(i, j, t + 1) += Th2 + V[2] * inv_2h;
                    G.at(i, j, t - 1) += Th2 - V[2] * inv_2h;
                }
            }

    // Gamma: value and dz mismatch against the Cauchy data
    const double c0 = -3.0 * inv_2h, c1 = 4.0 * inv_2h, c2 = -inv_2h;
    for (int m = 0; m < N; ++m) {
        const auto& f = c.phi[m];
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j) {
                const Complex r1 = f.at(i, j, 0) - g_m_[m].at(i, j, 0);
                const Complex dz = c0 * f.at(i, j, 0) + c1 * f.at(i, j, 1) + c2 * f.at(i, j, 2);
                const Complex r2 = dz - h_m_[m].at(i, j, 0);
                bl.gamma += gamma_weight_ * (std::norm(r1) + std::norm(r2));
                if (grad) {
                    auto& G = grad->phi[m];
                    G.at(i, j, 0) += 2.0 * gamma_weight_ * r1;
                    const Complex s2 = 2.0 * gamma_weight_ * r2;
                    G.at(i, j, 0) += s2 * c0;
                    G.at(i, j, 1) += s2 * c1;
                    G.at(i, j, 2) += s2 * c2;
                }
            }
    }

    // dOmega minus Gamma: every boundary node with t > 0, counted once
    for (int m = 0; m < N; ++m) {
        const auto& f = c.phi[m];
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                for (int t = 1; t < nx; ++t) {
                    if (!g.boundary(i, j, t)) continue;
                    const double w = la4 * g.dx * g.dx * w_layer_[t];
                    bl.sidewall += w * std::norm(f.at(i, j, t));
                    if (grad) grad->phi[m].at(i, j, t) += 2.0 * w * f.at(i, j, t);
                }
    }

    if (blocks) *blocks = bl;
    return bl.total();
}

DVec CarlemanProblem::hessian_diagonal() const {
    const Grid3D& g = grid_;
    const int N = N_, nx = g.nx;
    const double dx3 = g.dx * g.dx * g.dx;
    const double inv_h2 = 1.0 / (g.dx * g.dx), inv_2h = 1.0 / (2.0 * g.dx);
    const double la4 = std::pow(params_.lambda, 4);
    const size_t nn = g.nodes();
    DVec diag(static_cast<size_t>(N) * nn, 0.0);
    auto at = [&](int n, size_t q) -> double& { return diag[static_cast<size_t>(n) * nn + q]; };

    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < nx - 1; ++j)
            for (int t = 1; t < nx - 1; ++t) {
                const size_t q = g.idx(i, j, t);
                const double w2 = 2.0 * dx3 * w_layer_[t];
                const Vec3& rh = rhat_[q];
                const double ir = inv_rho_[q];
                const size_t qn[6] = {g.idx(i + 1, j, t), g.idx(i - 1, j, t), g.idx(i, j + 1, t),
                                      g.idx(i, j - 1, t), g.idx(i, j, t + 1), g.idx(i, j, t - 1)};
                for (int m = 0; m < N; ++m)
                    for (int n = 0; n < N; ++n) {
                        const size_t mn = static_cast<size_t>(m) * N + n;
                        const double s = tensors_.S.at(m, n);
                        const Complex zeta = zeta_a_[mn] + zeta_b_[mn] * ir;
                        at(n, q) += w2 * (36.0 * inv_h2 * inv_h2) * s * s;
                        for (int d = 0; d < 3; ++d) {
                            const Complex cp = s * inv_h2 + zeta * rh[d] * inv_2h;
                            const Complex cm = s * inv_h2 - zeta * rh[d] * inv_2h;
                            at(n, qn[2 * d]) += w2 * std::norm(cp);
                            at(n, qn[2 * d + 1]) += w2 * std::norm(cm);
                        }
                    }
                // regularization rows
                const double e2 = 2.0 * params_.epsilon * dx3;
                for (int n = 0; n < N; ++n) {
                    at(n, q) += e2 * (1.0 + 36.0 * inv_h2 * inv_h2);
                    for (int d = 0; d < 6; ++d)
                        at(n, qn[d]) += e2 * (inv_2h * inv_2h + inv_h2 * inv_h2);
                }
            }

    const double c0 = -3.0 * inv_2h, c1 = 4.0 * inv_2h, c2 = -inv_2h;
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j) {
                at(n, g.idx(i, j, 0)) += 2.0 * gamma_weight_ * (1.0 + c0 * c0);
                at(n, g.idx(i, j, 1)) += 2.0 * gamma_weight_ * c1 * c1;
                at(n, g.idx(i, j, 2)) += 2.0 * gamma_weight_ * c2 * c2;
            }

    for (int n = 0; n < N; ++n)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                for (int t = 1; t < nx; ++t)
                    if (g.boundary(i, j, t))
                        at(n, g.idx(i, j, t)) += 2.0 * la4 * g.dx * g.dx * w_layer_[t];
    return diag;
}

double eval_functional(const Candidate& c, const CarlemanProblem& prob,
                       FunctionalBlocks* blocks) {
    return prob.eval(c, nullptr, blocks);
}

Candidate eval_gradient(const Candidate& c, const CarlemanProblem& prob) {
    Candidate g;
    prob.eval(c, &g);
    return g;
}

namespace {

DVec expand_diag(const DVec& d) {
    DVec out(2 * d.size());
    for (size_t i = 0; i < d.size(); ++i) out[2 * i] = out[2 * i + 1] = d[i];
    return out;
}

}  // namespace

InitResult init_guess(const CarlemanProblem& prob) {
    const Grid3D& g = prob.grid();
    const int N = prob.N();

    CarlemanParams pi = prob.params();
    pi.epsilon = std::max(pi.epsilon, pi.init_epsilon);
    const CarlemanProblem rp = prob.with_params(pi);

    Candidate zero = Candidate::zeros(g, N);
    Candidate g0c;
    rp.eval(zero, &g0c, nullptr, /*drop_quadratic=*/true);
    DVec g0 = g0c.pack();

    auto apply = [&](const DVec& x) {
        Candidate cx = Candidate::unpack(x, g, N);
        Candidate gc;
        rp.eval(cx, &gc, nullptr, /*drop_quadratic=*/true);
        DVec gx = gc.pack();
        for (size_t i = 0; i < gx.size(); ++i) gx[i] = 0.5 * (gx[i] - g0[i]);
        return gx;
    };

    DVec b(g0.size());
    for (size_t i = 0; i < b.size(); ++i) b[i] = -0.5 * g0[i];

    // identity scaling keeps the Krylov filtering property of a partial CG
    // solve; Jacobi is available for well-posed small cases
    DVec inv_diag(g0.size(), 1.0);
    if (prob.params().precondition) {
        DVec diag = expand_diag(rp.hessian_diagonal());
        for (size_t i = 0; i < diag.size(); ++i)
            inv_diag[i] = diag[i] > 0.0 ? 2.0 / diag[i] : 1.0;  // drop-quadratic halves
    }

    DVec x;
    KrylovResult kr = pcg(apply, b, x, inv_diag, prob.params().cg_tol,
                          prob.params().cg_max_iters);
    // A stalled solve still initializes the convex descent as long as the
    // residual is genuinely small.
    ensure(kr.converged || kr.rel_residual <= 1e-2,
           "init_guess: CG cap exceeded, relative residual " +
               std::to_string(kr.rel_residual));
    InitResult out;
    out.candidate = Candidate::unpack(x, g, N);
    out.rel_residual = kr.rel_residual;
    out.iters = kr.iters;
    return out;
}

MinimizeResult minimize(const Candidate& phi0, const CarlemanProblem& prob,
                        const IterateHook& on_iterate) {
    const Grid3D& g = prob.grid();
    const int N = prob.N();
    const CarlemanParams& p = prob.params();

    DVec inv_pre;
    DVec pre;
    if (p.precondition) {
        pre = expand_diag(prob.hessian_diagonal());
        inv_pre.resize(pre.size());
        for (size_t i = 0; i < pre.size(); ++i) inv_pre[i] = pre[i] > 0.0 ? 1.0 / pre[i] : 1.0;
    }

    MinimizeResult out;
    Candidate cur = phi0;
    Candidate gc;
    FunctionalBlocks bl;
    double J = prob.eval(cur, &gc, &bl);
    DVec x = cur.pack();
    DVec grad = gc.pack();
    double gnorm = nrm2(grad);
    out.log.push_back({0, J, bl, gnorm, 0.0});

    double eta = p.eta;
    DVec dir(x.size()), x_prev, g_prev;

    for (int it = 1; it <= p.max_iters; ++it) {
        if (gnorm <= p.grad_tol) {
            out.converged = true;
            break;
        }
        for (size_t i = 0; i < x.size(); ++i)
            dir[i] = p.precondition ? -inv_pre[i] * grad[i] : -grad[i];

        // Barzilai-Borwein seed from the previous accepted step (optional)
        if (p.bb_step && !x_prev.empty()) {
            double sy = 0.0, sPs = 0.0;
            for (size_t i = 0; i < x.size(); ++i) {
                const double s = x[i] - x_prev[i];
                const double y = grad[i] - g_prev[i];
                sy += s * y;
                sPs += s * (p.precondition ? pre[i] * s : s);
            }
            if (sy > 0.0 && sPs > 0.0) {
                double bb = sPs / sy;
                if (std::isfinite(bb) && bb > 0.0) eta = std::min(bb, 1e8);
            }
        }

        if (p.bb_step) {
            x_prev = x;
            g_prev = grad;
        }

        // backtracking: halve eta until the objective decreases
        DVec x_trial(x.size());
        double J_trial = J;
        bool accepted = false;
        for (int h = 0; h < 60; ++h) {
            for (size_t i = 0; i < x.size(); ++i) x_trial[i] = x[i] + eta * dir[i];
            Candidate ct = Candidate::unpack(x_trial, g, N);
            J_trial = prob.eval(ct);
            if (J_trial < J) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;  // no descent possible at machine precision

        x = x_trial;
        cur = Candidate::unpack(x, g, N);
        J = prob.eval(cur, &gc, &bl);
        grad = gc.pack();
        gnorm = nrm2(grad);
        out.log.push_back({it, J, bl, gnorm, eta});
        if (on_iterate) on_iterate(it, cur);
        eta *= 2.0;  // optimistic growth; BB overrides when usable
    }

    out.candidate = std::move(cur);
    out.final_J = J;
    out.final_grad_norm = gnorm;
    if (gnorm <= p.grad_tol) out.converged = true;
    return out;
}

BregmanSample bregman_probe(const CarlemanProblem& prob, const Candidate& u,
                            const Candidate& w) {
    BregmanSample s;
    Candidate gw;
    const double Jw = prob.eval(w, &gw);
    const double Ju = prob.eval(u);
    double inner = 0.0;
    Candidate diff = Candidate::zeros(prob.grid(), prob.N());
    for (int n = 0; n < prob.N(); ++n)
        for (size_t p = 0; p < u.phi[n].size(); ++p) {
            const Complex d = u.phi[n].a[p] - w.phi[n].a[p];
            diff.phi[n].a[p] = d;
            inner += gw.phi[n].a[p].real() * d.real() + gw.phi[n].a[p].imag() * d.imag();
        }
    s.lhs = Ju - Jw - inner;
    s.rhs = prob.params().epsilon * prob.h2_norm_sq(diff);
    return s;
}

}  // namespace cpl
