#include "heckelab/operator.hpp"
#include "heckelab/errors.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heckelab {

SpectralReport spectrum(const OperatorMatrix& H)
{
    if (!H.symmetrized) {
        throw invalid_input_error("spectrum: matrix must be symmetrized first");
    }
    const int n = static_cast<int>(H.H.rows());
    Eigen::MatrixXd work = H.H;
    std::vector<double> w(static_cast<std::size_t>(n));
    const int info =
        LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
    if (info != 0) {
        throw no_convergence_error("spectrum: dsyev failed with info " + std::to_string(info),
                                   static_cast<double>(info));
    }

    SpectralReport report;
    report.selfadjoint_defect = H.selfadjoint_defect;
    report.eigenvalues = std::move(w);
    std::stable_sort(report.eigenvalues.begin(), report.eigenvalues.end(),
                     [](double a, double b) { return std::abs(a) > std::abs(b); });
    report.decay_profile.reserve(report.eigenvalues.size());
    for (double ev : report.eigenvalues) report.decay_profile.push_back(std::abs(ev));
    return report;
}

double commutator_defect(const OperatorMatrix& Hx, const OperatorMatrix& Hy)
{
    if (Hx.H.rows() != Hy.H.rows() || Hx.N != Hy.N || Hx.tau != Hy.tau ||
        Hx.kind != Hy.kind) {
        throw invalid_input_error("commutator_defect: operators live on different grids");
    }
    const int n = static_cast<int>(Hx.H.rows());
    Eigen::MatrixXd ab(n, n), ba(n, n);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, Hx.H.data(), n,
                Hy.H.data(), n, 0.0, ab.data(), n);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, Hy.H.data(), n,
                Hx.H.data(), n, 0.0, ba.data(), n);
    const double num = (ab - ba).norm();
    const double den = Hx.H.norm() * Hy.H.norm();
    return (den > 0.0) ? num / den : 0.0;
}

} // namespace heckelab
