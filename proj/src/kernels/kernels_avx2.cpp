// AVX2 variants, 4 doubles per register. Built with -mavx2 only; the
// dispatcher checks the CPU before handing out this table.

#include "kernels_internal.hpp"

#include <immintrin.h>

#include <cmath>

#include "gnconvert/activation.hpp"
#include "gnconvert/neuron.hpp"

namespace gnc::kernels::detail {

namespace {

// Lanes run four output rows side by side, each summing over i in the same
// order as the scalar row kernel.
void dense_avx2(std::span<const double> w, std::span<const double> bias, std::span<const double> x,
                std::span<double> y) {
    const std::size_t n_in = x.size();
    const std::size_t n_out = y.size();
    const double* wp = w.data();
    std::size_t o = 0;
    for (; o + 4 <= n_out; o += 4) {
        const double* r0 = wp + (o + 0) * n_in;
        const double* r1 = wp + (o + 1) * n_in;
        const double* r2 = wp + (o + 2) * n_in;
        const double* r3 = wp + (o + 3) * n_in;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t i = 0; i < n_in; ++i) {
            const __m256d wv = _mm256_set_pd(r3[i], r2[i], r1[i], r0[i]);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(wv, _mm256_broadcast_sd(x.data() + i)));
        }
        if (!bias.empty()) {
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(bias.data() + o));
        }
        _mm256_storeu_pd(y.data() + o, acc);
    }
    for (; o < n_out; ++o) {
        const double acc = dense_row(wp + o * n_in, x.data(), n_in);
        y[o] = bias.empty() ? acc : acc + bias[o];
    }
}

void qcfs_avx2(std::span<const double> z, double lambda, int L, std::span<double> out) {
    const __m256d vl = _mm256_set1_pd(static_cast<double>(L));
    const __m256d vlam = _mm256_set1_pd(lambda);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t j = 0;
    for (; j + 4 <= z.size(); j += 4) {
        const __m256d zv = _mm256_loadu_pd(z.data() + j);
        __m256d level = _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(zv, vl), vlam), half);
        level = _mm256_div_pd(_mm256_floor_pd(level), vl);
        level = _mm256_min_pd(_mm256_max_pd(level, zero), one);
        _mm256_storeu_pd(out.data() + j, _mm256_mul_pd(vlam, level));
    }
    const QCFSParams params{lambda, L};
    for (; j < z.size(); ++j) {
        out[j] = gnc::qcfs(z[j], params);
    }
}

void if_step_avx2(std::span<double> v, std::span<const double> current, double theta,
                  std::span<std::int32_t> counts, std::span<double> psp) {
    const __m256d vth = _mm256_set1_pd(theta);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t j = 0;
    for (; j + 4 <= v.size(); j += 4) {
        const __m256d p = _mm256_add_pd(_mm256_loadu_pd(v.data() + j), _mm256_loadu_pd(current.data() + j));
        const __m256d fire = _mm256_cmp_pd(p, vth, _CMP_GE_OQ);
        _mm256_storeu_pd(v.data() + j, _mm256_blendv_pd(p, _mm256_sub_pd(p, vth), fire));
        _mm256_storeu_pd(psp.data() + j, _mm256_and_pd(fire, vth));
        const __m128i c = _mm256_cvtpd_epi32(_mm256_and_pd(fire, one));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(counts.data() + j), c);
    }
    const IFConfig cfg{theta};
    for (; j < v.size(); ++j) {
        const IFStep r = gnc::if_step(IFState{v[j]}, cfg, current[j]);
        v[j] = r.state.v;
        counts[j] = r.out.count;
        psp[j] = r.out.psp;
    }
}

// Member threshold i*theta/tau with the top member pinned to theta.
inline __m256d member_threshold_avx2(__m256d i, __m256d vth, __m256d vtau) {
    const __m256d t = _mm256_div_pd(_mm256_mul_pd(i, vth), vtau);
    return _mm256_blendv_pd(t, vth, _mm256_cmp_pd(i, vtau, _CMP_EQ_OQ));
}

void gn_step_avx2(std::span<double> v, std::span<const double> current, double theta, int tau,
                  std::span<std::int32_t> counts, std::span<double> psp) {
    const GNConfig cfg(theta, tau);
    const __m256d vth = _mm256_set1_pd(theta);
    const __m256d vtau = _mm256_set1_pd(static_cast<double>(tau));
    const __m256d vgn = _mm256_set1_pd(cfg.theta_gn());
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t j = 0;
    for (; j + 4 <= v.size(); j += 4) {
        const __m256d p = _mm256_add_pd(_mm256_loadu_pd(v.data() + j), _mm256_loadu_pd(current.data() + j));
        __m256d q = _mm256_floor_pd(_mm256_div_pd(_mm256_mul_pd(p, vtau), vth));
        q = _mm256_min_pd(_mm256_max_pd(q, zero), vtau);

        const __m256d next = _mm256_add_pd(q, one);
        const __m256d up = _mm256_and_pd(_mm256_cmp_pd(q, vtau, _CMP_LT_OQ),
                                         _mm256_cmp_pd(p, member_threshold_avx2(next, vth, vtau), _CMP_GE_OQ));
        const __m256d down = _mm256_andnot_pd(
            up, _mm256_and_pd(_mm256_cmp_pd(q, zero, _CMP_GT_OQ),
                              _mm256_cmp_pd(p, member_threshold_avx2(q, vth, vtau), _CMP_LT_OQ)));
        q = _mm256_sub_pd(_mm256_add_pd(q, _mm256_and_pd(up, one)), _mm256_and_pd(down, one));

        _mm256_storeu_pd(v.data() + j, _mm256_sub_pd(p, _mm256_mul_pd(vgn, q)));
        _mm256_storeu_pd(psp.data() + j, _mm256_mul_pd(q, vgn));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(counts.data() + j), _mm256_cvtpd_epi32(q));
    }
    for (; j < v.size(); ++j) {
        const GNStep r = gnc::gn_step(GNState{v[j]}, cfg, current[j]);
        v[j] = r.state.v;
        counts[j] = r.out.count;
        psp[j] = r.out.psp;
    }
}

void accumulate_avx2(std::span<double> acc, std::span<const double> x) {
    std::size_t j = 0;
    for (; j + 4 <= acc.size(); j += 4) {
        _mm256_storeu_pd(acc.data() + j,
                         _mm256_add_pd(_mm256_loadu_pd(acc.data() + j), _mm256_loadu_pd(x.data() + j)));
    }
    for (; j < acc.size(); ++j) {
        acc[j] += x[j];
    }
}

}  // namespace

const KernelTable kAvx2{
    "avx2", dense_avx2, qcfs_avx2, if_step_avx2, gn_step_avx2, accumulate_avx2,
};

}  // namespace gnc::kernels::detail
