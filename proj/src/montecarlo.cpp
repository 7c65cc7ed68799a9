#include "skgs/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "skgs/error.hpp"
#include "skgs/integrators.hpp"
#include "skgs/noise.hpp"

namespace skgs {

namespace {

constexpr int kBlock = 64;

// Runs work(i) for i in [begin, end) on up to `threads` threads. If any
// item throws, the exception of the lowest failing index is rethrown with
// that index in the message.
template <typename Work>
void parallel_for(int begin, int end, int threads, Work&& work) {
    std::atomic<int> next{begin};
    std::mutex mu;
    int failed_index = std::numeric_limits<int>::max();
    std::exception_ptr failure;

    auto worker = [&] {
        for (int i = next++; i < end; i = next++) {
            try {
                work(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    const int n = std::clamp(threads, 1, std::max(1, end - begin));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!failure) return;
    const std::string where = "sample " + std::to_string(failed_index) + ": ";
    try {
        std::rethrow_exception(failure);
    } catch (const NumericalError& e) {
        throw NumericalError(where + e.what());
    } catch (const UsageError& e) {
        throw UsageError(where + e.what());
    } catch (const IoError& e) {
        throw IoError(where + e.what());
    } catch (const std::exception& e) {
        throw Error(where + e.what());
    }
}

struct Welford {
    std::vector<double> mean, m2;
    int count = 0;

    explicit Welford(std::size_t n) : mean(n, 0.0), m2(n, 0.0) {}

    void add(const std::vector<double>& x) {
        ++count;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double delta = x[j] - mean[j];
            mean[j] += delta / count;
            m2[j] += delta * (x[j] - mean[j]);
        }
    }

    SeriesStats stats() const {
        SeriesStats s{mean, std::vector<double>(mean.size(), 0.0)};
        if (count > 1) {
            for (std::size_t j = 0; j < mean.size(); ++j) {
                s.stderror[j] = std::sqrt(m2[j] / (count - 1)) / std::sqrt(double(count));
            }
        }
        return s;
    }
};

struct PathSeries {
    std::vector<double> charge, energy, coupling, integral;
};

std::vector<long> recorded_steps(int n_steps, int stride) {
    std::vector<long> steps;
    for (long n = 0; n <= n_steps; n += stride) steps.push_back(n);
    if (steps.back() != n_steps) steps.push_back(n_steps);
    return steps;
}

}  // namespace

int default_thread_count() {
    if (const char* env = std::getenv("SKGS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw UsageError("SKGS_THREADS must be a positive integer");
        }
        return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EvolutionRecord run_ensemble(const EnsembleSpec& spec) {
    spec.scheme.validate();
    if (spec.samples < 1) throw UsageError("ensemble: samples must be >= 1");
    if (spec.record_stride < 1) throw UsageError("ensemble: record_stride must be >= 1");
    const int n_steps = spec.scheme.step_count();
    const double dt = spec.scheme.dt;
    const auto op = make_operator(spec.scheme.scheme, spec.grid);
    const Vec e1 = scheme_profile(*op, spec.params.eta1, spec.params.eta1_fn);
    const FieldState x0 = scheme_initial(*op, eval_initial(spec.initial, spec.grid));
    const std::vector<long> steps = recorded_steps(n_steps, spec.record_stride);
    const std::size_t n_rec = steps.size();

    Welford charge(n_rec), energy_acc(n_rec), coup(n_rec), integral(n_rec);
    std::vector<PathSeries> block(kBlock);

    for (int start = 0; start < spec.samples; start += kBlock) {
        const int stop = std::min(spec.samples, start + kBlock);
        parallel_for(start, stop, spec.threads, [&](int i) {
            auto stepper = make_stepper(spec.scheme, op, spec.params);
            const std::uint64_t seed = derive_seed(spec.master_seed, i);
            PathSeries& out = block[i - start];
            out = PathSeries{};
            FieldState x = x0;
            double running = 0.0;
            std::size_t r = 0;
            for (long n = 0;; ++n) {
                const double c = coupling(x, *op, e1);
                if (r < n_rec && steps[r] == n) {
                    out.charge.push_back(skgs::charge(x, *op));
                    out.energy.push_back(skgs::energy(x, *op));
                    out.coupling.push_back(c);
                    out.integral.push_back(running);
                    ++r;
                }
                if (n == n_steps) break;
                running += c * dt;
                stepper->step(x, increment_at(seed, n, dt));
            }
        });
        for (int i = start; i < stop; ++i) {
            const PathSeries& p = block[i - start];
            charge.add(p.charge);
            energy_acc.add(p.energy);
            coup.add(p.coupling);
            integral.add(p.integral);
        }
    }

    EvolutionRecord rec;
    rec.samples = spec.samples;
    rec.step = steps;
    for (long n : steps) rec.t.push_back(n * dt);
    rec.charge = charge.stats();
    rec.energy = energy_acc.stats();
    rec.coupling = coup.stats();
    rec.coupling_integral = integral.stats();
    return rec;
}

double fit_loglog_slope(const std::vector<double>& dt, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < dt.size() && i < err.size(); ++i) {
        if (!(err[i] > 0.0) || !(dt[i] > 0.0)) continue;
        const double x = std::log(dt[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceResult run_convergence(const ConvergenceSpec& spec) {
    if (spec.samples < 1) throw UsageError("convergence: samples must be >= 1");
    if (spec.dt_list.empty()) throw UsageError("convergence: dt_list is empty");
    if (!(spec.reference_dt > 0.0)) throw UsageError("convergence: reference_dt must be positive");
    for (std::size_t i = 1; i < spec.dt_list.size(); ++i) {
        if (!(spec.dt_list[i] < spec.dt_list[i - 1])) {
            throw UsageError("convergence: dt_list must be strictly descending");
        }
    }
    SchemeConfig ref_cfg = spec.scheme;
    ref_cfg.dt = spec.reference_dt;
    ref_cfg.validate();
    const int n_ref = ref_cfg.step_count();
    std::vector<int> ratio;
    std::vector<SchemeConfig> cfgs;
    for (double dt : spec.dt_list) {
        const double k = dt / spec.reference_dt;
        const double kr = std::round(k);
        if (kr < 1.0 || std::abs(k - kr) > 1e-9 * k) {
            throw UsageError("convergence: reference_dt must divide every dt in dt_list");
        }
        SchemeConfig c = spec.scheme;
        c.dt = dt;
        c.validate();
        if (static_cast<long>(kr) * c.step_count() != n_ref) {
            throw UsageError("convergence: dt does not divide T");
        }
        ratio.push_back(static_cast<int>(kr));
        cfgs.push_back(c);
    }

    const auto op = make_operator(spec.scheme.scheme, spec.grid);
    const FieldState x0 = scheme_initial(*op, eval_initial(spec.initial, spec.grid));
    const double h = spec.grid.h;
    const std::size_t m = spec.dt_list.size();

    std::vector<double> sum_sq(m, 0.0);
    std::vector<std::vector<double>> block(kBlock);
    for (int start = 0; start < spec.samples; start += kBlock) {
        const int stop = std::min(spec.samples, start + kBlock);
        parallel_for(start, stop, spec.threads, [&](int i) {
            const BrownianPath path =
                sample_path(derive_seed(spec.master_seed, i), spec.reference_dt, n_ref);
            auto run = [&](const SchemeConfig& cfg, const std::vector<NoiseIncrement>& incs) {
                auto stepper = make_stepper(cfg, op, spec.params);
                FieldState x = x0;
                for (const NoiseIncrement& inc : incs) stepper->step(x, inc);
                return x;
            };
            const FieldState ref = run(ref_cfg, path.increments);
            std::vector<double>& out = block[i - start];
            out.assign(m, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                const FieldState x =
                    ratio[j] == 1 ? ref : run(cfgs[j], aggregate(path, ratio[j]));
                out[j] = h * ((x.P - ref.P).squaredNorm() + (x.Q - ref.Q).squaredNorm() +
                              (x.U - ref.U).squaredNorm() + (x.V - ref.V).squaredNorm());
            }
        });
        for (int i = start; i < stop; ++i) {
            for (std::size_t j = 0; j < m; ++j) sum_sq[j] += block[i - start][j];
        }
    }

    ConvergenceResult res;
    res.dt = spec.dt_list;
    for (std::size_t j = 0; j < m; ++j) res.rms_error.push_back(std::sqrt(sum_sq[j] / spec.samples));
    res.slope = fit_loglog_slope(res.dt, res.rms_error);
    return res;
}

}  // namespace skgs
