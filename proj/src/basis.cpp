#include "dwfloquet/basis.hpp"

#include "dwfloquet/errors.hpp"
#include "io_internal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace dwf {

namespace {

struct Level {
    double energy;
    int parity;
    int block_index;
    Eigen::Index column;
};

// C = A B for banded A, B (half bandwidths a, b)
template <class M>
M banded_product(const M& A, int a, const M& B, int b) {
    const Eigen::Index n = A.rows();
    M C = M::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - a - b); j <= std::min<Eigen::Index>(n - 1, i + a + b); ++j) {
            typename M::Scalar acc = 0;
            const Eigen::Index k0 = std::max<Eigen::Index>({0, i - a, j - b});
            const Eigen::Index k1 = std::min<Eigen::Index>({n - 1, i + a, j + b});
            for (Eigen::Index k = k0; k <= k1; ++k) acc += A(i, k) * B(k, j);
            C(i, j) = acc;
        }
    }
    return C;
}

} // namespace

H0Spectrum solve_h0(const SystemParams& params, int computational_size, int K, double ho_frequency) {
    params.validate();
    if (!(ho_frequency > 0.0)) throw InvalidArgument("oscillator frequency must be positive");
    if (K < 2) throw InvalidArgument("K must be at least 2");
    if (K > computational_size) {
        std::ostringstream os;
        os << "cannot retain K=" << K << " states from a computational basis of " << computational_size;
        throw InvalidArgument(os.str());
    }
    if (computational_size < 2 * K) {
        std::ostringstream os;
        os << "computational basis " << computational_size << " must be at least 2K=" << 2 * K;
        throw InvalidArgument(os.str());
    }
    const int need = 2 * static_cast<int>(std::ceil(params.D));
    if (K < need) {
        std::ostringstream os;
        os << "K=" << K << " too small for D=" << params.D << " (need at least " << need << ")";
        throw InvalidArgument(os.str());
    }

    const int N = computational_size;
    const int P = N + 4; // room for x^4 to be exact inside the N x N corner
    const double Om = ho_frequency;
    const double D = params.D;

    // Assembled in long double: the doublet splittings sit near 1e-15 relative to
    // the energies, below what double-precision eigenvalues resolve. The
    // eigenvectors come from double precision and the energies are re-evaluated
    // as long double Rayleigh quotients, whose error is quadratic in the vector error.
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    MatL xl = MatL::Zero(P, P);
    const long double scale = std::sqrt(1.0L / (2.0L * Om));
    for (int n = 1; n < P; ++n) xl(n - 1, n) = xl(n, n - 1) = scale * std::sqrt(static_cast<long double>(n));
    const MatL x2l = banded_product(xl, 1, xl, 1);
    const MatL x4l = banded_product(x2l, 2, x2l, 2);
    MatL hl = -(0.5L * Om * Om + 0.25L) * x2l + x4l / (64.0L * D);
    for (int n = 0; n < P; ++n) hl(n, n) += Om * (n + 0.5L);

    const MatL HL = hl.topLeftCorner(N, N);
    const Eigen::MatrixXd H = HL.cast<double>();
    const Eigen::MatrixXd X = xl.topLeftCorner(N, N).cast<double>();
    const Eigen::MatrixXd X2 = x2l.topLeftCorner(N, N).cast<double>();

    std::vector<Level> levels;
    std::vector<Eigen::MatrixXd> block_vectors(2);
    for (int b = 0; b < 2; ++b) {
        const int dim = (N - b + 1) / 2;
        Eigen::MatrixXd hb(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) hb(i, j) = H(2 * i + b, 2 * j + b);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hb);
        if (es.info() != Eigen::Success) throw NumericalError("H0 eigensolver did not converge");
        block_vectors[b] = es.eigenvectors();
        for (int i = 0; i < dim; ++i) {
            const Eigen::Matrix<long double, Eigen::Dynamic, 1> v = block_vectors[b].col(i).cast<long double>();
            long double num = 0.0L;
            for (int r = 0; r < dim; ++r) {
                long double row = 0.0L;
                for (int c = std::max(0, r - 2); c <= std::min(dim - 1, r + 2); ++c) row += HL(2 * r + b, 2 * c + b) * v(c);
                num += v(r) * row;
            }
            levels.push_back({static_cast<double>(num / v.squaredNorm()), b == 0 ? 1 : -1, b, i});
        }
    }
    std::stable_sort(levels.begin(), levels.end(),
                     [](const Level& a, const Level& b) { return a.energy < b.energy; });

    H0Spectrum out;
    out.ho_frequency = Om;
    out.computational_size = N;
    out.energies.resize(K);
    out.parities.resize(K);
    out.vectors = Eigen::MatrixXd::Zero(N, K);
    for (int k = 0; k < K; ++k) {
        const Level& lv = levels[k];
        out.energies(k) = lv.energy;
        out.parities(k) = lv.parity;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
        const Eigen::VectorXd vb = block_vectors[lv.block_index].col(lv.column);
        for (Eigen::Index i = 0; i < vb.size(); ++i) v(2 * i + lv.block_index) = vb(i);
        // sign convention: largest coefficient positive
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0) v = -v;
        out.vectors.col(k) = v;
    }

    out.residuals.resize(K);
    double hnorm = H.cwiseAbs().rowwise().sum().maxCoeff();
    std::vector<int> bad;
    for (int k = 0; k < K; ++k) {
        out.residuals(k) = (H * out.vectors.col(k) - out.energies(k) * out.vectors.col(k)).norm();
        if (out.residuals(k) > 1e-9 * std::max(1.0, hnorm)) bad.push_back(k);
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "H0 eigenvectors not converged; residual norms:";
        for (int k : bad) os << " k=" << k << ":" << out.residuals(k);
        throw NumericalError(os.str());
    }

    Eigen::MatrixXd xk = out.vectors.transpose() * X * out.vectors;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (out.parities(i) == out.parities(j)) xk(i, j) = 0.0;
    out.x = 0.5 * (xk + xk.transpose());
    out.x2_diag = (out.vectors.transpose() * X2 * out.vectors).diagonal();
    return out;
}

Eigen::MatrixXd position_matrix(const H0Spectrum& spectrum) {
    const int K = spectrum.size();
    if (spectrum.x.rows() != K || spectrum.x.cols() != K) {
        throw InvalidArgument("position_matrix: spectrum is incomplete");
    }
    Eigen::MatrixXd x = spectrum.x;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (spectrum.parities(i) == spectrum.parities(j)) x(i, j) = 0.0;
    return 0.5 * (x + x.transpose());
}

double h0_convergence(const SystemParams& params, int computational_size, int K, double ho_frequency) {
    const H0Spectrum a = solve_h0(params, computational_size, K, ho_frequency);
    const H0Spectrum b = solve_h0(params, computational_size + computational_size / 2, K, ho_frequency);
    double worst = 0.0;
    for (int k = 0; k < K; ++k) {
        const double ref = std::max(std::abs(a.energies(k)), 1e-300);
        worst = std::max(worst, std::abs(a.energies(k) - b.energies(k)) / ref);
    }
    return worst;
}

void write_h0_csv(std::ostream& os, const H0Spectrum& spectrum) {
    os << "k,energy,parity\n";
    for (int k = 0; k < spectrum.size(); ++k) {
        os << k << ',' << detail::fmt(spectrum.energies(k)) << ',' << spectrum.parities(k) << '\n';
    }
}

} // namespace dwf
