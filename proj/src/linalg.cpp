#include "linalg.hpp"

#include "dwfloquet/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dwf::detail {

void symmetric_eigen(Eigen::MatrixXd& a, Eigen::VectorXd& w) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.cols() != a.rows()) throw InternalError("symmetric_eigen: matrix not square");
    w.resize(n);
    if (n == 0) return;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    if (info != 0) {
        throw NumericalError("dsyevd failed with info=" + std::to_string(info));
    }
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(resolve_workers(workers)));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(n);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace dwf::detail
