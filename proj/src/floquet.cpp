#include "dwfloquet/floquet.hpp"

#include "dwfloquet/errors.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dwf {

double FloquetState::sideband_weight(int n) const {
    const int r = n - first_sideband;
    if (r < 0 || r >= sidebands()) return 0.0;
    return components.row(r).squaredNorm();
}

FloquetState FloquetState::shifted(int m, double omega) const {
    FloquetState s = *this;
    s.first_sideband += m;
    s.quasienergy -= m * omega;
    if (m % 2 != 0) s.parity = -s.parity;
    return s;
}

double reduce_quasienergy(double e, double omega) {
    double r = e - omega * std::floor((e + 0.5 * omega) / omega);
    if (r >= 0.5 * omega) r -= omega;
    if (r < -0.5 * omega) r += omega;
    return r;
}

std::vector<std::pair<int, int>> sector_indices(const H0Spectrum& spectrum, int NF, int sector) {
    if (sector != 1 && sector != -1) throw InvalidArgument("sector must be +1 or -1");
    std::vector<std::pair<int, int>> idx;
    for (int n = -NF; n <= NF; ++n) {
        const int sn = (n % 2 == 0) ? 1 : -1;
        for (int k = 0; k < spectrum.size(); ++k) {
            if (sn * spectrum.parities(k) == sector) idx.emplace_back(n, k);
        }
    }
    return idx;
}

Eigen::MatrixXd assemble_floquet_matrix(const H0Spectrum& spectrum, const SystemParams& params, int NF,
                                        int sector) {
    params.validate();
    if (NF < 1) throw InvalidArgument("NF must be at least 1");
    const int K = spectrum.size();
    const auto idx = sector_indices(spectrum, NF, sector);
    const Eigen::Index dim = static_cast<Eigen::Index>(idx.size());

    std::vector<int> row_of(static_cast<std::size_t>((2 * NF + 1) * K), -1);
    for (Eigen::Index r = 0; r < dim; ++r) {
        row_of[(idx[r].first + NF) * K + idx[r].second] = static_cast<int>(r);
    }

    const double half_s = 0.5 * params.S;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const auto [n, k] = idx[r];
        H(r, r) = spectrum.energies(k) - n * params.omega;
        if (half_s == 0.0) continue;
        for (int dn : {-1, 1}) {
            const int n2 = n + dn;
            if (n2 < -NF || n2 > NF) continue;
            for (int k2 = 0; k2 < K; ++k2) {
                const double xv = spectrum.x(k, k2);
                if (xv == 0.0) continue;
                const int c = row_of[(n2 + NF) * K + k2];
                if (c < 0) {
                    std::ostringstream os;
                    os << "sector bookkeeping broken: (" << n << "," << k << ") couples to (" << n2 << ","
                       << k2 << ") outside sector " << sector;
                    throw InternalError(os.str());
                }
                H(r, c) = half_s * xv;
            }
        }
    }
    return H;
}

Eigen::MatrixXd assemble_full_floquet_matrix(const H0Spectrum& spectrum, const SystemParams& params,
                                             int NF) {
    params.validate();
    if (NF < 1) throw InvalidArgument("NF must be at least 1");
    const int K = spectrum.size();
    const int dim = (2 * NF + 1) * K;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = -NF; n <= NF; ++n) {
        for (int k = 0; k < K; ++k) {
            const int r = (n + NF) * K + k;
            H(r, r) = spectrum.energies(k) - n * params.omega;
            if (n < NF) {
                for (int k2 = 0; k2 < K; ++k2) {
                    const int c = (n + 1 + NF) * K + k2;
                    H(r, c) = H(c, r) = 0.5 * params.S * spectrum.x(k, k2);
                }
            }
        }
    }
    return H;
}

SectorSolution solve_sector(Eigen::MatrixXd matrix, const H0Spectrum& spectrum, int NF, int sector) {
    SectorSolution sol;
    sol.sector = sector;
    sol.NF = NF;
    sol.K = spectrum.size();
    sol.index = sector_indices(spectrum, NF, sector);
    if (matrix.rows() != static_cast<Eigen::Index>(sol.index.size()) || matrix.cols() != matrix.rows()) {
        throw InternalError("solve_sector: matrix does not match sector size");
    }
    detail::symmetric_eigen(matrix, sol.values);
    sol.vectors = std::move(matrix);
    for (Eigen::Index j = 0; j < sol.vectors.cols(); ++j) {
        Eigen::Index imax;
        sol.vectors.col(j).cwiseAbs().maxCoeff(&imax);
        if (sol.vectors(imax, j) < 0) sol.vectors.col(j) *= -1.0;
    }
    return sol;
}

namespace {

struct Candidate {
    const SectorSolution* sol;
    Eigen::Index column;
    double lambda;
    double central;
};

Eigen::MatrixXd expand(const SectorSolution& sol, Eigen::Index column) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * sol.NF + 1, sol.K);
    for (std::size_t r = 0; r < sol.index.size(); ++r) {
        c(sol.index[r].first + sol.NF, sol.index[r].second) = sol.vectors(static_cast<Eigen::Index>(r), column);
    }
    return c;
}

// |sum_n a(n) b(n + m)| for two states on the same sideband window.
double shifted_overlap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int m) {
    const Eigen::Index rows = a.rows();
    const Eigen::Index am = std::abs(m);
    if (am >= rows) return 0.0;
    if (m >= 0) return std::abs((a.topRows(rows - am).array() * b.bottomRows(rows - am).array()).sum());
    return std::abs((a.bottomRows(rows - am).array() * b.topRows(rows - am).array()).sum());
}

struct Accepted {
    double lambda;
    double central;
    int sector;
    Eigen::MatrixXd c;
    bool ambiguous = false;
};

} // namespace

FloquetSpectrum merge_sectors(const SectorSolution& even, const SectorSolution& odd, const SystemParams& params,
                              const DedupOptions& opts) {
    if (even.NF != odd.NF || even.K != odd.K) throw InternalError("merge_sectors: truncation mismatch");
    const int NF = even.NF;
    const int K = even.K;
    const double omega = params.omega;

    std::vector<Candidate> cands;
    cands.reserve(static_cast<std::size_t>(even.values.size() + odd.values.size()));
    for (const SectorSolution* s : {&even, &odd}) {
        std::vector<Eigen::Index> central_rows;
        for (std::size_t r = 0; r < s->index.size(); ++r)
            if (s->index[r].first == 0) central_rows.push_back(static_cast<Eigen::Index>(r));
        for (Eigen::Index j = 0; j < s->values.size(); ++j) {
            double w0 = 0.0;
            for (Eigen::Index r : central_rows) w0 += s->vectors(r, j) * s->vectors(r, j);
            cands.push_back({s, j, s->values(j), w0});
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.central != b.central) return a.central > b.central;
        return a.lambda < b.lambda;
    });

    FloquetSpectrum out;
    out.params = params;
    out.K = K;
    out.NF = NF;

    std::vector<Accepted> reps;
    for (const Candidate& cand : cands) {
        if (static_cast<int>(reps.size()) >= K) break;
        Eigen::MatrixXd c = expand(*cand.sol, cand.column);
        bool duplicate = false;
        for (Accepted& rep : reps) {
            const double d = (cand.lambda - rep.lambda) / omega;
            const double m = std::round(d);
            if (std::abs(d - m) >= opts.quasienergy_tol) continue;
            if (shifted_overlap(c, rep.c, static_cast<int>(m)) > opts.min_overlap) {
                duplicate = true;
                if (std::abs(cand.central - rep.central) < opts.tie_tol && !rep.ambiguous) {
                    rep.ambiguous = true;
                    std::ostringstream os;
                    os << "class representative ambiguous at lambda=" << rep.lambda
                       << " (central weights tie at " << rep.central << ")";
                    out.warnings.push_back(os.str());
                }
                break;
            }
        }
        if (!duplicate) reps.push_back({cand.lambda, cand.central, cand.sol->sector, std::move(c)});
    }
    if (static_cast<int>(reps.size()) < K) {
        std::ostringstream os;
        os << "only " << reps.size() << " Floquet classes found for K=" << K;
        throw NumericalError(os.str());
    }

    out.states.reserve(reps.size());
    for (Accepted& rep : reps) {
        FloquetState st;
        const int m = static_cast<int>(std::floor((rep.lambda + 0.5 * omega) / omega));
        st.quasienergy = reduce_quasienergy(rep.lambda - m * omega, omega);
        st.parity = (m % 2 == 0) ? rep.sector : -rep.sector;
        st.first_sideband = -NF + m;
        st.central_weight = rep.central;
        st.ambiguous = rep.ambiguous;
        double e = 0.0;
        for (int r = 0; r < 2 * NF + 1; ++r) {
            e += (rep.lambda + (r - NF) * omega) * rep.c.row(r).squaredNorm();
        }
        st.mean_energy = e;
        st.components = std::move(rep.c);
        out.states.push_back(std::move(st));
    }
    std::stable_sort(out.states.begin(), out.states.end(),
                     [](const FloquetState& a, const FloquetState& b) { return a.mean_energy < b.mean_energy; });
    return out;
}

FloquetSpectrum solve_floquet(const H0Spectrum& spectrum, const SystemParams& params, int NF,
                              const DedupOptions& opts) {
    SectorSolution even = solve_sector(assemble_floquet_matrix(spectrum, params, NF, 1), spectrum, NF, 1);
    SectorSolution odd = solve_sector(assemble_floquet_matrix(spectrum, params, NF, -1), spectrum, NF, -1);
    return merge_sectors(even, odd, params, opts);
}

double mean_energy(const FloquetState& state, double omega) {
    const double n2 = state.norm2();
    if (std::abs(n2 - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "mean_energy: state not normalized (norm^2=" << n2 << ")";
        throw InvalidArgument(os.str());
    }
    double e = 0.0;
    for (int r = 0; r < state.sidebands(); ++r) {
        const int n = state.first_sideband + r;
        e += (state.quasienergy + n * omega) * state.components.row(r).squaredNorm();
    }
    return e;
}

double state_overlap(const FloquetState& a, const FloquetState& b, int max_shift, int* best_shift) {
    if (a.components.cols() != b.components.cols()) throw InvalidArgument("state_overlap: K mismatch");
    double best = 0.0;
    int best_s = 0;
    for (int s = -max_shift; s <= max_shift; ++s) {
        // pair a(n) with b(n + s)
        const int lo = std::max(a.first_sideband, b.first_sideband - s);
        const int hi = std::min(a.last_sideband(), b.last_sideband() - s);
        if (hi < lo) continue;
        const int len = hi - lo + 1;
        const double ov = std::abs((a.components.middleRows(lo - a.first_sideband, len).array() *
                                    b.components.middleRows(lo + s - b.first_sideband, len).array())
                                       .sum());
        if (ov > best) {
            best = ov;
            best_s = s;
        }
    }
    if (best_shift) *best_shift = best_s;
    return best;
}

double position_at_zero(const FloquetState& a, const FloquetState& b, const Eigen::MatrixXd& x) {
    const Eigen::RowVectorXd sa = a.components.colwise().sum();
    const Eigen::RowVectorXd sb = b.components.colwise().sum();
    return (sa * x * sb.transpose())(0, 0);
}

LocalizedPair localized_superpositions(const FloquetState& even, const FloquetState& odd, const Eigen::MatrixXd& x) {
    if (even.parity == odd.parity) {
        throw InvalidArgument("localized_superpositions: states must have opposite generalized parity");
    }
    const double xee = position_at_zero(even, even, x);
    const double xoo = position_at_zero(odd, odd, x);
    const double xeo = position_at_zero(even, odd, x);
    const double xp = 0.5 * (xee + xoo) + xeo;
    const double xm = 0.5 * (xee + xoo) - xeo;
    if (std::abs(xp - xm) < 1e-8) throw NumericalError("states not well localized");
    const double s = xp >= xm ? 1.0 : -1.0;
    LocalizedPair out;
    out.right = Eigen::Vector2d(1.0, s) / std::sqrt(2.0);
    out.left = Eigen::Vector2d(1.0, -s) / std::sqrt(2.0);
    out.x_right = std::max(xp, xm);
    out.x_left = std::min(xp, xm);
    return out;
}

} // namespace dwf
