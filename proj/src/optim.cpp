#include "cpl/optim.hpp"

#include <deque>

namespace cpl {

double dot(const DVec& a, const DVec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double nrm2(const DVec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const DVec& x, DVec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

namespace {

// Strong-Wolfe line search (bracket + zoom with bisection/quadratic steps).
// phi(a) = f(x + a d). Returns the accepted step, or 0 on failure.
struct LinePoint {
    double a, f, g;  // step, value, directional derivative
};

double zoom(const std::function<LinePoint(double)>& phi, LinePoint lo, LinePoint hi,
            double f0, double g0, double c1, double c2, int max_it) {
    for (int it = 0; it < max_it; ++it) {
        // quadratic interpolation using lo's value/slope and hi's value
        double a = 0.5 * (lo.a + hi.a);
        double denom = 2.0 * (hi.f - lo.f - lo.g * (hi.a - lo.a));
        if (std::abs(denom) > 1e-300) {
            double cand = lo.a - lo.g * (hi.a - lo.a) * (hi.a - lo.a) / denom;
            double lo_b = std::min(lo.a, hi.a), hi_b = std::max(lo.a, hi.a);
            double margin = 0.1 * (hi_b - lo_b);
            if (cand > lo_b + margin && cand < hi_b - margin) a = cand;
        }
        LinePoint p = phi(a);
        if (p.f > f0 + c1 * a * g0 || p.f >= lo.f) {
            hi = p;
        } else {
            if (std::abs(p.g) <= -c2 * g0) return p.a;
            if (p.g * (hi.a - lo.a) >= 0.0) hi = lo;
            lo = p;
        }
        if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, std::abs(lo.a))) return lo.a;
    }
    return lo.a;
}

double strong_wolfe(const std::function<LinePoint(double)>& phi, double f0, double g0,
                    double a_init, double c1, double c2, int max_it) {
    if (g0 >= 0.0) return 0.0;  // not a descent direction
    LinePoint prev{0.0, f0, g0};
    double a = a_init;
    for (int it = 0; it < max_it; ++it) {
        LinePoint p = phi(a);
        if (p.f > f0 + c1 * a * g0 || (it > 0 && p.f >= prev.f))
            return zoom(phi, prev, p, f0, g0, c1, c2, max_it);
        if (std::abs(p.g) <= -c2 * g0) return p.a;
        if (p.g >= 0.0) return zoom(phi, p, prev, f0, g0, c1, c2, max_it);
        prev = p;
        a *= 2.0;
        if (a > 1e10) break;
    }
    return 0.0;
}

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, DVec x0, const LbfgsOptions& opt) {
    const size_t n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);
    DVec g(n), d(n);
    res.f = f(res.x, g);
    res.grad_norm = nrm2(g);

    std::deque<DVec> s_hist, y_hist;
    std::deque<double> rho_hist;

    double best_f = res.f;
    DVec best_x = res.x;

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        if (res.grad_norm <= opt.grad_tol) {
            res.converged = true;
            break;
        }
        // two-loop recursion
        d = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], d);
            axpy(-alpha[i], y_hist[i], d);
        }
        if (!s_hist.empty()) {
            double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& v : d) v *= gamma;
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            double beta = rho_hist[i] * dot(y_hist[i], d);
            axpy(alpha[i] - beta, s_hist[i], d);
        }
        for (double& v : d) v = -v;

        double g0 = dot(g, d);
        if (g0 >= 0.0) {  // fall back to steepest descent
            for (size_t i = 0; i < n; ++i) d[i] = -g[i];
            g0 = dot(g, d);
            if (g0 >= 0.0) break;  // flat
        }

        DVec x_trial(n), g_trial(n);
        auto phi = [&](double a) {
            x_trial = res.x;
            axpy(a, d, x_trial);
            double fv = f(x_trial, g_trial);
            return LinePoint{a, fv, dot(g_trial, d)};
        };
        double a_init = (iter == 0) ? std::min(1.0, 1.0 / std::max(res.grad_norm, 1e-30)) : 1.0;
        double a = strong_wolfe(phi, res.f, g0, a_init, opt.wolfe_c1, opt.wolfe_c2,
                                opt.max_line_search);
        if (a <= 0.0) break;  // line search failed; keep best iterate

        LinePoint p = phi(a);  // re-evaluate at the accepted step
        DVec s(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            s[i] = x_trial[i] - res.x[i];
            y[i] = g_trial[i] - g[i];
        }
        res.x = x_trial;
        res.f = p.f;
        g = g_trial;
        res.grad_norm = nrm2(g);
        res.iters = iter + 1;
        if (res.f < best_f) {
            best_f = res.f;
            best_x = res.x;
        }
        double sy = dot(s, y);
        if (sy > 1e-30) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
    }
    if (res.grad_norm <= opt.grad_tol) res.converged = true;
    // return the lowest objective seen
    if (best_f < res.f) {
        res.x = best_x;
        DVec gtmp(n);
        res.f = f(res.x, gtmp);
        res.grad_norm = nrm2(gtmp);
    }
    return res;
}

KrylovResult gmres(const std::function<CVec(const CVec&)>& apply, const CVec& b, CVec& x,
                   double tol, int restart, int max_iters) {
    const size_t n = b.size();
    if (x.size() != n) x.assign(n, Complex(0.0));
    auto cnorm = [](const CVec& v) {
        double s = 0.0;
        for (const Complex& z : v) s += std::norm(z);
        return std::sqrt(s);
    };
    const double bnorm = cnorm(b);
    KrylovResult out;
    if (bnorm == 0.0) {
        x.assign(n, Complex(0.0));
        out.converged = true;
        return out;
    }

    int total = 0;
    while (total < max_iters) {
        CVec r = apply(x);
        for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        double beta = cnorm(r);
        out.rel_residual = beta / bnorm;
        if (out.rel_residual <= tol) {
            out.converged = true;
            return out;
        }
        const int m = std::min(restart, max_iters - total);
        std::vector<CVec> V;
        V.reserve(m + 1);
        V.push_back(r);
        for (Complex& z : V[0]) z /= beta;
        // Hessenberg in column-major chunks
        std::vector<std::vector<Complex>> H(m + 1, std::vector<Complex>(m, Complex(0.0)));
        std::vector<Complex> cs(m), sn(m), gvec(m + 1, Complex(0.0));
        gvec[0] = beta;
        int j = 0;
        for (; j < m; ++j) {
            CVec w = apply(V[j]);
            const double w_scale = cnorm(w);
            for (int pass = 0; pass < 2; ++pass)  // MGS with reorthogonalization
                for (int i = 0; i <= j; ++i) {
                    Complex h(0.0);
                    for (size_t p = 0; p < n; ++p) h += std::conj(V[i][p]) * w[p];
                    if (pass == 0)
                        H[i][j] = h;
                    else
                        H[i][j] += h;
                    for (size_t p = 0; p < n; ++p) w[p] -= h * V[i][p];
                }
            double hw = cnorm(w);
            // happy breakdown: the Krylov space is exhausted
            if (hw <= 1e-12 * std::max(w_scale, 1e-300)) hw = 0.0;
            H[j + 1][j] = hw;
            // apply accumulated Givens rotations: with cs complex and sn real,
            // the pair (x, y) maps to (conj(cs) x + sn y, -sn x + cs y)
            for (int i = 0; i < j; ++i) {
                Complex t = std::conj(cs[i]) * H[i][j] + sn[i] * H[i + 1][j];
                H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
                H[i][j] = t;
            }
            double denom = std::sqrt(std::norm(H[j][j]) + hw * hw);
            if (denom < 1e-300) {
                ++j;
                break;
            }
            cs[j] = H[j][j] / denom;
            sn[j] = hw / denom;
            H[j][j] = denom;
            H[j + 1][j] = Complex(0.0);
            gvec[j + 1] = -sn[j] * gvec[j];
            gvec[j] = std::conj(cs[j]) * gvec[j];
            ++total;
            out.iters = total;
            out.rel_residual = std::abs(gvec[j + 1]) / bnorm;
            if (hw > 0.0 && j + 1 < m + 1) {
                V.push_back(w);
                for (Complex& z : V[j + 1]) z /= hw;
            }
            if (out.rel_residual <= tol || hw == 0.0) {
                ++j;
                break;
            }
        }
        // back-substitution for the least-squares coefficients
        std::vector<Complex> y(j, Complex(0.0));
        for (int i = j - 1; i >= 0; --i) {
            Complex s = gvec[i];
            for (int p = i + 1; p < j; ++p) s -= H[i][p] * y[p];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < j; ++i)
            for (size_t p = 0; p < n; ++p) x[p] += y[i] * V[i][p];
        if (out.rel_residual <= tol) {
            // confirm with a true residual
            CVec rr = apply(x);
            double s = 0.0;
            for (size_t p = 0; p < n; ++p) s += std::norm(b[p] - rr[p]);
            out.rel_residual = std::sqrt(s) / bnorm;
            if (out.rel_residual <= tol) {
                out.converged = true;
                return out;
            }
        }
    }
    return out;
}

KrylovResult pcg(const std::function<DVec(const DVec&)>& apply, const DVec& b, DVec& x,
                 const DVec& inv_diag, double tol, int max_iters) {
    const size_t n = b.size();
    if (x.size() != n) x.assign(n, 0.0);
    KrylovResult out;
    DVec r = apply(x);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = nrm2(b);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        out.converged = true;
        return out;
    }
    DVec z(n), p(n), Ap(n);
    for (size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    DVec best_x = x;
    double best_res = nrm2(r) / bnorm;
    double window_best = best_res;
    int window_start = 0;
    for (int it = 0; it < max_iters; ++it) {
        Ap = apply(p);
        double pAp = dot(p, Ap);
        if (pAp <= 0.0) break;  // lost positive-definiteness numerically
        double alpha = rz / pAp;
        axpy(alpha, p, x);
        axpy(-alpha, Ap, r);
        out.iters = it + 1;
        out.rel_residual = nrm2(r) / bnorm;
        if (out.rel_residual < best_res) {
            best_res = out.rel_residual;
            best_x = x;
        }
        if (out.rel_residual <= tol) {
            out.converged = true;
            return out;
        }
        // stagnation: no measurable progress across a long window
        if (it - window_start >= 3000) {
            if (best_res > 0.999 * window_best) break;
            window_best = best_res;
            window_start = it;
        }
        for (size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    x = best_x;
    out.rel_residual = best_res;
    return out;
}

}  // namespace cpl
