#include "kernels_internal.hpp"

#include "gnconvert/activation.hpp"
#include "gnconvert/neuron.hpp"

namespace gnc::kernels {

namespace detail {

double dense_row(const double* w, const double* x, std::size_t n_in) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_in; ++i) {
        acc += w[i] * x[i];
    }
    return acc;
}

}  // namespace detail

namespace {

void dense_scalar(std::span<const double> w, std::span<const double> bias, std::span<const double> x,
                  std::span<double> y) {
    const std::size_t n_in = x.size();
    for (std::size_t o = 0; o < y.size(); ++o) {
        const double acc = detail::dense_row(w.data() + o * n_in, x.data(), n_in);
        y[o] = bias.empty() ? acc : acc + bias[o];
    }
}

void qcfs_scalar(std::span<const double> z, double lambda, int L, std::span<double> out) {
    const QCFSParams params{lambda, L};
    for (std::size_t j = 0; j < z.size(); ++j) {
        out[j] = gnc::qcfs(z[j], params);
    }
}

void if_step_scalar(std::span<double> v, std::span<const double> current, double theta,
                    std::span<std::int32_t> counts, std::span<double> psp) {
    const IFConfig cfg{theta};
    for (std::size_t j = 0; j < v.size(); ++j) {
        const IFStep r = gnc::if_step(IFState{v[j]}, cfg, current[j]);
        v[j] = r.state.v;
        counts[j] = r.out.count;
        psp[j] = r.out.psp;
    }
}

void gn_step_scalar(std::span<double> v, std::span<const double> current, double theta, int tau,
                    std::span<std::int32_t> counts, std::span<double> psp) {
    const GNConfig cfg(theta, tau);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const GNStep r = gnc::gn_step(GNState{v[j]}, cfg, current[j]);
        v[j] = r.state.v;
        counts[j] = r.out.count;
        psp[j] = r.out.psp;
    }
}

void accumulate_scalar(std::span<double> acc, std::span<const double> x) {
    for (std::size_t j = 0; j < acc.size(); ++j) {
        acc[j] += x[j];
    }
}

constexpr KernelTable kScalar{
    "scalar", dense_scalar, qcfs_scalar, if_step_scalar, gn_step_scalar, accumulate_scalar,
};

}  // namespace

const KernelTable& scalar() {
    return kScalar;
}

}  // namespace gnc::kernels
