#include "skgs/sine_transform.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "skgs/error.hpp"

namespace skgs {
namespace {
// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct SineTransform::Plan {
    fftw_plan plan = nullptr;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
};

SineTransform::SineTransform(int n) : n_(n), scale_(1.0 / std::sqrt(2.0 * (n + 1))) {
    if (n < 1) throw UsageError("sine transform needs at least one point");
    std::vector<double> in(n), out(n);
    auto plan = std::make_shared<Plan>();
    {
        std::lock_guard lock(planner_mutex());
        plan->plan = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (plan->plan == nullptr) throw NumericalError("FFTW could not plan a DST-I");
    plan_ = std::move(plan);
}

void SineTransform::apply(std::span<const double> in, std::span<double> out) const {
    if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_) {
        throw UsageError("sine transform: length mismatch");
    }
    // RODFT00 computes 2 * sum x_j sin(pi (j+1)(k+1) / (n+1)). The plan is
    // out-of-place, so aliasing buffers go through a copy.
    if (in.data() == out.data()) {
        std::vector<double> tmp(in.begin(), in.end());
        fftw_execute_r2r(plan_->plan, tmp.data(), out.data());
    } else {
        fftw_execute_r2r(plan_->plan, const_cast<double*>(in.data()), out.data());
    }
    for (double& v : out) v *= scale_;
}

Vec SineTransform::apply(const Vec& x) const {
    Vec out(n_);
    apply(std::span<const double>(x.data(), x.size()), std::span<double>(out.data(), n_));
    return out;
}

}  // namespace skgs
