#include "qmr/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "qmr/errors.hpp"

namespace qmr::fft {

namespace {

using PlanKey = std::tuple<std::vector<int>, int>;

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans are made FFTW_UNALIGNED so any Eigen buffer may be used.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const std::vector<int>& dims, int sign) {
        std::lock_guard lock(mutex_);
        PlanKey key{dims, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        int total = 1;
        for (int d : dims) total *= d;
        std::vector<fftw_complex> scratch(static_cast<std::size_t>(total));
        fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch.data(), scratch.data(),
                                       sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw Error("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(const std::vector<int>& dims, int sign, Eigen::VectorXcd& data) {
    if (data.size() == 0) return;
    fftw_plan plan = cache().get(dims, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

std::vector<int> grid_dims(const PeriodicGrid& grid, const Eigen::VectorXcd& data) {
    if (data.size() != static_cast<Eigen::Index>(grid.size()))
        throw DimensionError("FFT buffer size does not match the grid");
    return std::vector<int>(static_cast<std::size_t>(grid.dim()), grid.points_per_axis());
}

}  // namespace

void forward(const PeriodicGrid& grid, Eigen::VectorXcd& data) { run(grid_dims(grid, data), FFTW_FORWARD, data); }

void backward(const PeriodicGrid& grid, Eigen::VectorXcd& data) { run(grid_dims(grid, data), FFTW_BACKWARD, data); }

void forward_1d(Eigen::VectorXcd& data) { run({static_cast<int>(data.size())}, FFTW_FORWARD, data); }

void backward_1d(Eigen::VectorXcd& data) { run({static_cast<int>(data.size())}, FFTW_BACKWARD, data); }

GridFunction apply_multiplier(const GridFunction& u, const std::function<cplx(const Vec& xi)>& m) {
    const auto& grid = u.grid();
    Eigen::VectorXcd spec = u.values();
    forward(grid, spec);
    for (std::size_t i = 0; i < grid.size(); ++i)
        spec[static_cast<Eigen::Index>(i)] *= m(u.h() * grid.wavevector(i));
    backward(grid, spec);
    spec /= static_cast<double>(grid.size());
    return GridFunction(grid, u.h(), std::move(spec));
}

}  // namespace qmr::fft
