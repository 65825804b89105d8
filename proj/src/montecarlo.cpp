#include "stosym/montecarlo.hpp"

#include "stosym/errors.hpp"
#include "stosym/numeric_expr.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace stosym {

namespace {

constexpr std::size_t kPilotPaths = 256;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream for path i: depends only on (seed, i).
std::mt19937_64 path_engine(std::uint64_t seed, std::size_t i) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(0xD1B54A32D192ED03ULL * (i + 1))));
}

struct CompiledSde {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<NumericExpr> drift;
    std::vector<NumericExpr> sigma;  // row-major n x m
    std::vector<Interval> bounds;

    CompiledSde(const Sde& sde, const std::map<std::string, double>& params) : n(sde.dim()), m(sde.noise_dim()) {
        drift = compile(sde.drift, sde.vars, params);
        for (const auto& row : sde.diffusion) {
            for (const auto& e : row) sigma.emplace_back(e, sde.vars, params);
        }
        for (const auto& v : sde.vars) bounds.push_back(sde.bounds(v));
    }

    void step(const double* x, const double* dw, double dt, double* out) const {
        for (std::size_t i = 0; i < n; ++i) {
            double v = x[i] + drift[i](x) * dt;
            for (std::size_t a = 0; a < m; ++a) {
                const NumericExpr& s = sigma[i * m + a];
                if (!s.is_zero()) v += s(x) * dw[a];
            }
            out[i] = v;
        }
    }

    bool inside(const double* x) const {
        for (std::size_t i = 0; i < n; ++i) {
            if (!bounds[i].contains(x[i])) return false;
        }
        return true;
    }
};

struct CompiledTransform {
    std::size_t n = 0;
    std::size_t m = 0;
    bool identity_phi = true;
    bool identity_b = true;
    bool unit_eta = true;
    bool constant_eta = true;
    bool zero_h = true;
    std::vector<NumericExpr> phi;
    std::vector<NumericExpr> b;  // row-major m x m
    NumericExpr eta;
    std::vector<NumericExpr> h;

    CompiledTransform(std::size_t n_, std::size_t m_) : n(n_), m(m_) {}

    CompiledTransform(const Sde& sde, const FiniteTransform& t, const std::map<std::string, double>& params)
        : n(sde.dim()), m(sde.noise_dim()) {
        for (std::size_t i = 0; i < n; ++i) identity_phi = identity_phi && t.phi[i] == Expr::var(sde.vars[i]);
        identity_b = t.B == identity_matrix(m);
        unit_eta = t.eta == Expr(1);
        constant_eta = t.eta.is_constant();
        zero_h = is_zero(t.h);
        phi = compile(t.phi, sde.vars, params);
        for (const auto& row : t.B) {
            for (const auto& e : row) b.emplace_back(e, sde.vars, params);
        }
        eta = NumericExpr(t.eta, sde.vars, params);
        h = compile(t.h, sde.vars, params);
    }

    bool is_identity() const { return identity_phi && identity_b && unit_eta && zero_h; }

    void map(const double* x, double* out) const {
        if (identity_phi) {
            std::copy(x, x + n, out);
            return;
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = phi[i](x);
    }
};

struct PathOutput {
    double* X;          // evals x n
    double* W;          // evals x m
    double* x_initial;  // n
    double* x_final;    // n
    double logw = 0.0;
    double clock = 0.0;
    double eta_min = std::numeric_limits<double>::infinity();
};

// One path of the streaming kernel. Eval times are on the transformed clock.
void run_path(std::size_t path, const McConfig& cfg, const CompiledSde& sde, const CompiledTransform& t,
              const std::vector<double>& eval_times, PathOutput& out) {
    const std::size_t n = sde.n;
    const std::size_t m = sde.m;
    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double snap = 1e-9 * dt;

    std::mt19937_64 rng = path_engine(cfg.seed, path);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> x(cfg.x0), x_next(n), xi(n), dw(m), dwp(m), wp(m, 0.0), hv(m), shifted(m);
    double clock = 0.0;
    double logw = 0.0;
    std::size_t e = 0;
    const std::size_t n_eval = eval_times.size();

    t.map(x.data(), out.x_initial);
    while (e < n_eval && eval_times[e] <= snap) {
        t.map(x.data(), out.X + e * n);
        std::fill(out.W + e * m, out.W + (e + 1) * m, 0.0);
        ++e;
    }

    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t a = 0; a < m; ++a) dw[a] = sqrt_dt * normal(rng);

        double eta = 1.0;
        if (t.is_identity()) {
            dwp = dw;
        } else {
            if (!t.unit_eta) {
                eta = t.eta(x.data());
                if (!(eta > 0.0)) throw Error("time-change density is not positive on path " + std::to_string(path));
                out.eta_min = std::min(out.eta_min, eta);
            }
            for (std::size_t a = 0; a < m; ++a) {
                hv[a] = t.zero_h ? 0.0 : t.h[a](x.data());
                logw += hv[a] * dw[a] - 0.5 * hv[a] * hv[a] * dt;
                shifted[a] = dw[a] - hv[a] * dt;
            }
            const double root = std::sqrt(eta);
            for (std::size_t a = 0; a < m; ++a) {
                double v = 0.0;
                if (t.identity_b) {
                    v = shifted[a];
                } else {
                    for (std::size_t c = 0; c < m; ++c) v += t.b[a * m + c](x.data()) * shifted[c];
                }
                dwp[a] = root * v;
            }
        }

        sde.step(x.data(), dw.data(), dt, x_next.data());
        if (!sde.inside(x_next.data())) throw DomainExit("path left the domain", path);

        const double clock_next = clock + eta * dt;
        while (e < n_eval && eval_times[e] <= clock_next + snap) {
            double* xe = out.X + e * n;
            double* we = out.W + e * m;
            if (std::abs(eval_times[e] - clock_next) <= snap) {
                t.map(x_next.data(), xe);
                for (std::size_t a = 0; a < m; ++a) we[a] = wp[a] + dwp[a];
            } else {
                const double frac = (eval_times[e] - clock) / (clock_next - clock);
                for (std::size_t i = 0; i < n; ++i) xi[i] = x[i] + frac * (x_next[i] - x[i]);
                t.map(xi.data(), xe);
                for (std::size_t a = 0; a < m; ++a) we[a] = wp[a] + frac * dwp[a];
            }
            ++e;
        }
        for (std::size_t a = 0; a < m; ++a) wp[a] += dwp[a];
        x.swap(x_next);
        clock = clock_next;
    }
    if (e < n_eval) {
        throw ClockTooShort("evaluation time " + std::to_string(eval_times[e]) + " exceeds the transformed clock " +
                            std::to_string(clock) + " of path " + std::to_string(path));
    }
    t.map(x.data(), out.x_final);
    out.logw = logw;
    out.clock = clock;
}

PathBundle make_bundle(const Sde& sde, const McConfig& cfg) {
    PathBundle b;
    b.cfg = cfg;
    b.source = std::make_shared<const Sde>(sde);
    b.vars = sde.vars;
    b.time_var = sde.time_var;
    b.n = sde.dim();
    b.m = sde.noise_dim();
    const std::size_t np = cfg.n_paths;
    const std::size_t ne = cfg.eval_times.size();
    b.X.assign(np * ne * b.n, 0.0);
    b.W.assign(np * ne * b.m, 0.0);
    b.logw.assign(np, 0.0);
    b.clock.assign(np, 0.0);
    b.x_initial.assign(np * b.n, 0.0);
    b.x_final.assign(np * b.n, 0.0);
    return b;
}

void run_all(PathBundle& b, const CompiledSde& sde, const CompiledTransform& t) {
    const std::size_t np = b.cfg.n_paths;
    const std::size_t ne = b.evals();
    std::vector<std::exception_ptr> errors(np);
    const int threads = b.cfg.threads > 0 ? b.cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::size_t i = 0; i < np; ++i) {
        PathOutput out{b.X.data() + i * ne * b.n, b.W.data() + i * ne * b.m, b.x_initial.data() + i * b.n,
                       b.x_final.data() + i * b.n};
        try {
            run_path(i, b.cfg, sde, t, b.cfg.eval_times, out);
        } catch (...) {
            errors[i] = std::current_exception();
        }
        b.logw[i] = out.logw;
        b.clock[i] = out.clock;
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);  // lowest failing path index
    }
}

// Smallest density seen on the first paths; guards the evaluation times
// against paths whose new clock ends early.
void check_clock(const McConfig& cfg, const CompiledSde& sde, const CompiledTransform& t) {
    const double last = cfg.eval_times.empty() ? 0.0 : cfg.eval_times.back();
    if (t.constant_eta) {
        const double eta = t.eta(cfg.x0.data());
        if (!(eta > 0.0)) throw Error("time-change density is not positive");
        if (last > eta * cfg.horizon * (1.0 + 1e-12)) {
            throw ClockTooShort("evaluation time exceeds the transformed horizon");
        }
        return;
    }
    McConfig pilot = cfg;
    pilot.n_paths = std::min(cfg.n_paths, kPilotPaths);
    const std::size_t n = sde.n;
    double eta_min = std::numeric_limits<double>::infinity();
    const std::vector<double> none;
    for (std::size_t i = 0; i < pilot.n_paths; ++i) {
        std::vector<double> xi(n), xf(n);
        PathOutput out{nullptr, nullptr, xi.data(), xf.data()};
        run_path(i, pilot, sde, t, none, out);
        eta_min = std::min(eta_min, out.eta_min);
    }
    if (last > 0.9 * eta_min * cfg.horizon) {
        throw ClockTooShort("evaluation time " + std::to_string(last) + " exceeds 0.9 * eta_min * horizon = " +
                            std::to_string(0.9 * eta_min * cfg.horizon));
    }
}

double weight_shift(const PathBundle& b) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double l : b.logw) mx = std::max(mx, l);
    return std::isfinite(mx) ? mx : 0.0;
}

std::string monomial_label(const std::vector<std::string>& names, const std::vector<int>& powers) {
    std::string out;
    for (std::size_t j = 0; j < powers.size(); ++j) {
        if (powers[j] == 0) continue;
        if (!out.empty()) out += "*";
        out += names[j];
        if (powers[j] > 1) out += "^" + std::to_string(powers[j]);
    }
    return out;
}

void enumerate_powers(std::size_t k, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (k == cur.size()) {
        int total = 0;
        for (int p : cur) total += p;
        if (total > 0) out.push_back(cur);
        return;
    }
    for (int p = 0; p <= remaining; ++p) {
        cur[k] = p;
        enumerate_powers(k + 1, remaining - p, cur, out);
    }
    cur[k] = 0;
}

double ks_p_value(double d, double n1, double n2) {
    const double ne = n1 * n2 / (n1 + n2);
    const double s = std::sqrt(ne);
    return kolmogorov_tail((s + 0.12 + 0.11 / s) * d);
}

}  // namespace

void McConfig::validate(const Sde& sde) const {
    if (n_paths == 0) throw Error("need at least one path");
    if (!(dt > 0.0)) throw Error("dt must be positive");
    if (!(horizon > 0.0)) throw Error("horizon must be positive");
    const double steps = horizon / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
        throw Error("horizon must be a multiple of dt");
    }
    if (x0.size() != sde.dim()) throw Error("initial point has the wrong length");
    for (std::size_t i = 0; i < x0.size(); ++i) {
        if (!sde.bounds(sde.vars[i]).contains(x0[i])) throw DomainError("initial point outside the domain");
    }
    for (const auto& p : sde.params) {
        if (!param_values.count(p)) throw Error("no value for parameter " + p);
    }
    if (!std::is_sorted(eval_times.begin(), eval_times.end())) throw Error("evaluation times must be sorted");
    for (double t : eval_times) {
        if (t < 0.0) throw Error("evaluation times must be nonnegative");
    }
    if (degree < 1) throw Error("degree cap must be at least one");
}

PathBundle simulate(const Sde& sde, const McConfig& cfg) {
    sde.validate();
    if (!sde.nonexplosive) throw NonExplosiveRequired("simulation needs a nonexplosive SDE");
    cfg.validate(sde);
    if (!cfg.eval_times.empty() && cfg.eval_times.back() > cfg.horizon * (1.0 + 1e-12)) {
        throw Error("evaluation time beyond the horizon");
    }
    const CompiledSde compiled(sde, cfg.param_values);
    const CompiledTransform identity(sde.dim(), sde.noise_dim());
    PathBundle b = make_bundle(sde, cfg);
    run_all(b, compiled, identity);
    return b;
}

PathBundle transform_paths(const PathBundle& bundle, const FiniteTransform& t) {
    if (!bundle.source) throw Error("bundle has no generating SDE");
    const Sde& sde = *bundle.source;
    const FiniteTransform total = bundle.applied ? compose(sde.vars, t, *bundle.applied) : t;
    validate(sde, total);
    const CompiledSde compiled(sde, bundle.cfg.param_values);
    const CompiledTransform ct(sde, total, bundle.cfg.param_values);
    check_clock(bundle.cfg, compiled, ct);
    PathBundle b = make_bundle(sde, bundle.cfg);
    b.applied = total;
    run_all(b, compiled, ct);
    return b;
}

PathBundle simulate_serial(const Sde& sde, const McConfig& cfg) {
    sde.validate();
    if (!sde.nonexplosive) throw NonExplosiveRequired("simulation needs a nonexplosive SDE");
    cfg.validate(sde);
    PathBundle b = make_bundle(sde, cfg);
    const FiniteTransform id = identity_transform(sde.vars, sde.noise_dim());
    b.applied.reset();
    // The identity replay of the reference transform is the reference simulation.
    PathBundle r = transform_paths_serial(b, id);
    r.applied.reset();
    return r;
}

PathBundle transform_paths_serial(const PathBundle& bundle, const FiniteTransform& t) {
    if (!bundle.source) throw Error("bundle has no generating SDE");
    const Sde& sde = *bundle.source;
    const McConfig& cfg = bundle.cfg;
    const FiniteTransform total = bundle.applied ? compose(sde.vars, t, *bundle.applied) : t;
    validate(sde, total);
    const auto& vars = sde.vars;
    const auto& p = cfg.param_values;
    const std::size_t n = sde.dim();
    const std::size_t m = sde.noise_dim();
    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const double dt = cfg.dt;
    const double snap = 1e-9 * dt;

    const auto mu = compile(sde.drift, vars, p);
    std::vector<std::vector<NumericExpr>> sigma;
    for (const auto& row : sde.diffusion) sigma.push_back(compile(row, vars, p));
    const auto phi = compile(total.phi, vars, p);
    std::vector<std::vector<NumericExpr>> rot;
    for (const auto& row : total.B) rot.push_back(compile(row, vars, p));
    const NumericExpr eta(total.eta, vars, p);
    const auto h = compile(total.h, vars, p);
    const bool unit_eta = total.eta == Expr(1);
    const bool zero_h = is_zero(total.h);
    const bool identity_b = total.B == identity_matrix(m);
    bool identity_phi = true;
    for (std::size_t i = 0; i < n; ++i) identity_phi = identity_phi && total.phi[i] == Expr::var(vars[i]);
    const bool identity = identity_phi && identity_b && unit_eta && zero_h;
    auto apply_phi = [&](const std::vector<double>& x, double* out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = identity_phi ? x[i] : phi[i](x.data());
    };

    PathBundle b = make_bundle(sde, cfg);
    b.applied = total;
    const std::size_t ne = cfg.eval_times.size();
    for (std::size_t path = 0; path < cfg.n_paths; ++path) {
        std::mt19937_64 rng = path_engine(cfg.seed, path);
        std::normal_distribution<double> normal(0.0, 1.0);

        // Whole grid on the original clock.
        std::vector<std::vector<double>> xs(steps + 1, std::vector<double>(n));
        std::vector<std::vector<double>> dws(steps, std::vector<double>(m));
        xs[0] = cfg.x0;
        for (std::size_t k = 0; k < steps; ++k) {
            for (std::size_t a = 0; a < m; ++a) dws[k][a] = std::sqrt(dt) * normal(rng);
            for (std::size_t i = 0; i < n; ++i) {
                double v = xs[k][i] + mu[i](xs[k].data()) * dt;
                for (std::size_t a = 0; a < m; ++a) {
                    if (!sigma[i][a].is_zero()) v += sigma[i][a](xs[k].data()) * dws[k][a];
                }
                xs[k + 1][i] = v;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!sde.bounds(vars[i]).contains(xs[k + 1][i])) throw DomainExit("path left the domain", path);
            }
        }

        // Transformation applied afterwards.
        std::vector<double> clock(steps + 1, 0.0);
        std::vector<std::vector<double>> wp(steps + 1, std::vector<double>(m, 0.0));
        std::vector<std::vector<double>> dwp(steps, std::vector<double>(m, 0.0));
        double logw = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double* x = xs[k].data();
            const double e = identity || unit_eta ? 1.0 : eta(x);
            std::vector<double> hv(m, 0.0), shifted(m);
            for (std::size_t a = 0; a < m; ++a) {
                if (!identity && !zero_h) hv[a] = h[a](x);
                if (!identity) logw += hv[a] * dws[k][a] - 0.5 * hv[a] * hv[a] * dt;
                shifted[a] = dws[k][a] - hv[a] * dt;
            }
            for (std::size_t a = 0; a < m; ++a) {
                double v = 0.0;
                if (identity_b) {
                    v = shifted[a];
                } else {
                    for (std::size_t c = 0; c < m; ++c) v += rot[a][c](x) * shifted[c];
                }
                dwp[k][a] = identity ? dws[k][a] : std::sqrt(e) * v;
                wp[k + 1][a] = wp[k][a] + dwp[k][a];
            }
            clock[k + 1] = clock[k] + e * dt;
        }

        double* X = &b.X[path * ne * n];
        double* W = &b.W[path * ne * m];
        for (std::size_t j = 0; j < ne; ++j) {
            const double te = cfg.eval_times[j];
            if (te <= snap) {
                apply_phi(xs[0], X + j * n);
                continue;
            }
            if (te > clock[steps] + snap) throw ClockTooShort("evaluation time exceeds the transformed clock");
            // first k with clock[k] >= te - snap
            std::size_t k = static_cast<std::size_t>(
                std::lower_bound(clock.begin(), clock.end(), te - snap) - clock.begin());
            if (std::abs(clock[k] - te) <= snap) {
                apply_phi(xs[k], X + j * n);
                for (std::size_t a = 0; a < m; ++a) W[j * m + a] = wp[k][a];
            } else {
                const std::size_t lo = k - 1;
                const double frac = (te - clock[lo]) / (clock[k] - clock[lo]);
                std::vector<double> xi(n);
                for (std::size_t i = 0; i < n; ++i) xi[i] = xs[lo][i] + frac * (xs[k][i] - xs[lo][i]);
                apply_phi(xi, X + j * n);
                for (std::size_t a = 0; a < m; ++a) W[j * m + a] = wp[lo][a] + frac * dwp[lo][a];
            }
        }
        apply_phi(xs[0], &b.x_initial[path * n]);
        apply_phi(xs[steps], &b.x_final[path * n]);
        b.logw[path] = logw;
        b.clock[path] = clock[steps];
    }
    return b;
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

Estimate weighted_mean(const PathBundle& b, std::size_t eval,
                       const std::function<double(const double* x, const double* w)>& f, bool use_weights) {
    const std::size_t np = b.paths();
    if (np == 0) throw Error("empty bundle");
    const double shift = weight_shift(b);
    std::vector<double> w(np), wf(np), fv(np);
    for (std::size_t i = 0; i < np; ++i) {
        w[i] = use_weights ? std::exp(b.logw[i] - shift) : 1.0;
        fv[i] = f(b.x(i, eval), b.w(i, eval));
        wf[i] = w[i] * fv[i];
    }
    const double sw = pairwise_sum(w.data(), np);
    const double mean = pairwise_sum(wf.data(), np) / sw;
    std::vector<double> sq(np);
    for (std::size_t i = 0; i < np; ++i) sq[i] = w[i] * w[i] * (fv[i] - mean) * (fv[i] - mean);
    return {mean, std::sqrt(pairwise_sum(sq.data(), np)) / sw};
}

Estimate mean_weight(const PathBundle& b) {
    const std::size_t np = b.paths();
    if (np < 2) throw Error("need at least two paths");
    std::vector<double> w(np);
    for (std::size_t i = 0; i < np; ++i) w[i] = std::exp(b.logw[i]);
    const double mean = pairwise_sum(w.data(), np) / static_cast<double>(np);
    std::vector<double> sq(np);
    for (std::size_t i = 0; i < np; ++i) sq[i] = (w[i] - mean) * (w[i] - mean);
    const double var = pairwise_sum(sq.data(), np) / static_cast<double>(np - 1);
    return {mean, std::sqrt(var / static_cast<double>(np))};
}

double effective_sample_size(const PathBundle& b) {
    const std::size_t np = b.paths();
    const double shift = weight_shift(b);
    std::vector<double> w(np), w2(np);
    for (std::size_t i = 0; i < np; ++i) {
        w[i] = std::exp(b.logw[i] - shift);
        w2[i] = w[i] * w[i];
    }
    const double s = pairwise_sum(w.data(), np);
    return s * s / pairwise_sum(w2.data(), np);
}

double kolmogorov_tail(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

CompareReport weak_compare(const PathBundle& transformed, const PathBundle& direct, const CompareThresholds& th,
                           bool use_weights) {
    if (transformed.n != direct.n || transformed.evals() != direct.evals()) {
        throw Error("bundles have different shapes");
    }
    for (std::size_t e = 0; e < transformed.evals(); ++e) {
        if (std::abs(transformed.cfg.eval_times[e] - direct.cfg.eval_times[e]) > 1e-12) {
            throw Error("bundles use different evaluation times");
        }
    }
    CompareReport rep;
    rep.thresholds = th;
    const std::size_t n = transformed.n;
    const std::size_t nt = transformed.paths();
    const std::size_t nd = direct.paths();
    const double shift = weight_shift(transformed);
    std::vector<double> w(nt);
    for (std::size_t i = 0; i < nt; ++i) w[i] = use_weights ? std::exp(transformed.logw[i] - shift) : 1.0;
    const double sw = pairwise_sum(w.data(), nt);
    std::vector<double> w2(nt);
    for (std::size_t i = 0; i < nt; ++i) w2[i] = w[i] * w[i];
    const double n_eff = sw * sw / pairwise_sum(w2.data(), nt);

    for (std::size_t e = 0; e < transformed.evals(); ++e) {
        const double time = transformed.cfg.eval_times[e];
        std::vector<std::size_t> active;
        std::vector<std::string> names;
        for (std::size_t j = 0; j < n; ++j) {
            if (transformed.time_var && transformed.vars[j] == *transformed.time_var) continue;
            const double ref = transformed.x(0, e)[j];
            bool varies = false;
            for (std::size_t i = 0; i < nt && !varies; ++i) varies = transformed.x(i, e)[j] != ref;
            for (std::size_t i = 0; i < nd && !varies; ++i) varies = direct.x(i, e)[j] != ref;
            if (!varies) continue;
            active.push_back(j);
            names.push_back(transformed.vars[j]);
        }
        if (active.empty()) continue;

        std::vector<std::vector<int>> powers;
        std::vector<int> cur(active.size(), 0);
        enumerate_powers(0, transformed.cfg.degree, cur, powers);
        for (const auto& pw : powers) {
            auto f = [&](const double* x) {
                double v = 1.0;
                for (std::size_t j = 0; j < active.size(); ++j) {
                    for (int r = 0; r < pw[j]; ++r) v *= x[active[j]];
                }
                return v;
            };
            std::vector<double> a(nt), sq(nt), d(nd), dsq(nd);
            for (std::size_t i = 0; i < nt; ++i) a[i] = w[i] * f(transformed.x(i, e));
            const double mt = pairwise_sum(a.data(), nt) / sw;
            for (std::size_t i = 0; i < nt; ++i) {
                const double dv = f(transformed.x(i, e)) - mt;
                sq[i] = w[i] * w[i] * dv * dv;
            }
            const double vt = pairwise_sum(sq.data(), nt) / (sw * sw);
            for (std::size_t i = 0; i < nd; ++i) d[i] = f(direct.x(i, e));
            const double md = pairwise_sum(d.data(), nd) / static_cast<double>(nd);
            for (std::size_t i = 0; i < nd; ++i) dsq[i] = (d[i] - md) * (d[i] - md);
            const double vd = pairwise_sum(dsq.data(), nd) / (static_cast<double>(nd) * static_cast<double>(nd));
            MomentComparison mc{time, monomial_label(names, pw), mt, md, std::sqrt(vt + vd), 0.0};
            if (mc.se > 0.0) {
                mc.z = (mt - md) / mc.se;
            } else {
                mc.z = std::abs(mt - md) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
            }
            rep.max_abs_z = std::max(rep.max_abs_z, std::abs(mc.z));
            rep.moments.push_back(mc);
        }

        for (std::size_t j = 0; j < active.size(); ++j) {
            std::vector<std::pair<double, double>> t(nt);
            for (std::size_t i = 0; i < nt; ++i) t[i] = {transformed.x(i, e)[active[j]], w[i] / sw};
            std::vector<double> dv(nd);
            for (std::size_t i = 0; i < nd; ++i) dv[i] = direct.x(i, e)[active[j]];
            std::sort(t.begin(), t.end());
            std::sort(dv.begin(), dv.end());
            double f1 = 0.0;
            double f2 = 0.0;
            double dmax = 0.0;
            std::size_t p = 0;
            std::size_t q = 0;
            while (p < nt || q < nd) {
                const double v = std::min(p < nt ? t[p].first : std::numeric_limits<double>::infinity(),
                                          q < nd ? dv[q] : std::numeric_limits<double>::infinity());
                while (p < nt && t[p].first == v) f1 += t[p++].second;
                while (q < nd && dv[q] == v) {
                    ++q;
                    f2 = static_cast<double>(q) / static_cast<double>(nd);
                }
                dmax = std::max(dmax, std::abs(f1 - f2));
            }
            KsComparison ks{time, names[j], dmax, n_eff, ks_p_value(dmax, n_eff, static_cast<double>(nd))};
            rep.min_p = std::min(rep.min_p, ks.p_value);
            rep.ks.push_back(ks);
        }
    }
    rep.pass = rep.max_abs_z < th.z_max && rep.min_p > th.p_min;
    return rep;
}

PathwiseReport doob_pathwise_check(const PathBundle& bundle, const DensityRecipe& recipe) {
    if (!recipe.doob_potential) throw PotentialMissing("density recipe has no Doob potential");
    if (!bundle.source) throw Error("bundle has no generating SDE");
    if (bundle.applied) throw Error("pathwise check needs the untransformed bundle");
    const Sde& sde = *bundle.source;
    FiniteTransform girsanov = identity_transform(sde.vars, sde.noise_dim());
    girsanov.h = recipe.theta;
    const PathBundle g = transform_paths(bundle, girsanov);
    const NumericExpr pot(*recipe.doob_potential, sde.vars, bundle.cfg.param_values);

    const std::size_t np = g.paths();
    std::vector<double> disc(np);
#pragma omp parallel for schedule(static) num_threads(bundle.cfg.threads > 0 ? bundle.cfg.threads : omp_get_max_threads())
    for (std::size_t i = 0; i < np; ++i) {
        const double rhs = pot(&g.x_final[i * g.n]) - pot(&g.x_initial[i * g.n]);
        disc[i] = std::abs(g.logw[i] - rhs);
    }
    PathwiseReport r;
    r.paths = np;
    for (double d : disc) r.max_discrepancy = std::max(r.max_discrepancy, d);
    r.mean_discrepancy = pairwise_sum(disc.data(), np) / static_cast<double>(np);
    return r;
}

void write_csv(std::ostream& os, const PathBundle& b) {
    os << "path_id,t";
    for (std::size_t i = 0; i < b.n; ++i) os << ",X_" << (i + 1);
    os << ",logw\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t p = 0; p < b.paths(); ++p) {
        for (std::size_t e = 0; e < b.evals(); ++e) {
            line.str("");
            line << p << ',' << b.cfg.eval_times[e];
            const double* x = b.x(p, e);
            for (std::size_t i = 0; i < b.n; ++i) line << ',' << x[i];
            line << ',' << b.logw[p] << '\n';
            os << line.str();
        }
    }
}

}  // namespace stosym
