#include "mosum/mosum.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace mosum {

MosumSeries mosum_statistic(const SampledPath& path, double bandwidth) {
    if (!(bandwidth > 0.0))
        throw validation_error("bandwidth must be positive");
    if (!(2.0 * bandwidth < path.horizon))
        throw validation_error("bandwidth violates 2h < T");
    const Eigen::Index kh = grid_steps(bandwidth, path.grid_step, "bandwidth");
    if (kh < 1)
        throw validation_error("bandwidth shorter than one grid step");

    const Eigen::Index n = path.grid_points();
    const Eigen::Index m = n - 2 * kh;
    if (m <= 0)
        throw validation_error("path too short for the requested bandwidth");

    MosumSeries series;
    series.grid_step = path.grid_step;
    series.horizon = path.horizon;
    series.bandwidth = bandwidth;
    series.first_grid_index = kh;
    series.vectors.resize(path.dim(), m);
    series.norms.resize(m);

    const double scale = 1.0 / std::sqrt(2.0 * bandwidth);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index k = kh + j;
        series.vectors.col(j) =
            scale * (path.values.col(k + kh) - 2.0 * path.values.col(k) + path.values.col(k - kh));
        series.norms[j] = series.vectors.col(j).norm();
    }
    return series;
}

Vector signal_term(const ChangeSpec& spec, double bandwidth, double t) {
    Vector m = Vector::Zero(spec.dim());
    for (std::size_t i = 0; i < spec.change_points.size(); ++i) {
        const double dist = std::abs(t - spec.change_points[i]);
        if (dist < bandwidth)
            m += (bandwidth - dist) * spec.drift_change(i);
    }
    return m / std::sqrt(2.0 * bandwidth);
}

void quadratic_form_series(MosumSeries& series, const ScaleProvider& scale) {
    if (scale.dim() != series.dim())
        throw validation_error("scale provider dimension does not match the MOSUM series");
    const Eigen::Index m = series.size();
    series.quadform.resize(m);

    auto fail_at = [&](Eigen::Index j) {
        std::ostringstream msg;
        msg << "scale matrix at t = " << series.time_at(j) << " is not positive definite";
        throw numeric_error(msg.str());
    };

    if (scale.diagonal()) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const Vector d = scale.diagonal_at(series.time_at(j));
            double q = 0.0;
            for (Eigen::Index i = 0; i < d.size(); ++i) {
                if (!(d[i] > 0.0))
                    fail_at(j);
                const double v = series.vectors(i, j);
                q += v * v / d[i];
            }
            series.quadform[j] = q;
        }
        return;
    }

    for (Eigen::Index j = 0; j < m; ++j) {
        const Matrix a = scale.matrix_at(series.time_at(j));
        Eigen::LLT<Matrix> llt(a);
        if (llt.info() != Eigen::Success)
            fail_at(j);
        const Vector v = series.vectors.col(j);
        series.quadform[j] = v.dot(llt.solve(v));
    }
}

} // namespace mosum
