// AArch64 NEON variants, 2 doubles per register. Advanced SIMD is part of
// the AArch64 baseline, so no runtime check is needed.

#include "kernels_internal.hpp"

#include <arm_neon.h>

#include "gnconvert/activation.hpp"
#include "gnconvert/neuron.hpp"

namespace gnc::kernels::detail {

namespace {

void dense_neon(std::span<const double> w, std::span<const double> bias, std::span<const double> x,
                std::span<double> y) {
    const std::size_t n_in = x.size();
    const std::size_t n_out = y.size();
    const double* wp = w.data();
    std::size_t o = 0;
    for (; o + 2 <= n_out; o += 2) {
        const double* r0 = wp + (o + 0) * n_in;
        const double* r1 = wp + (o + 1) * n_in;
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t i = 0; i < n_in; ++i) {
            float64x2_t wv = vdupq_n_f64(r0[i]);
            wv = vsetq_lane_f64(r1[i], wv, 1);
            // vmulq + vaddq rather than vfmaq: must round like the scalar row.
            acc = vaddq_f64(acc, vmulq_f64(wv, vdupq_n_f64(x[i])));
        }
        if (!bias.empty()) {
            acc = vaddq_f64(acc, vld1q_f64(bias.data() + o));
        }
        vst1q_f64(y.data() + o, acc);
    }
    for (; o < n_out; ++o) {
        const double acc = dense_row(wp + o * n_in, x.data(), n_in);
        y[o] = bias.empty() ? acc : acc + bias[o];
    }
}

void qcfs_neon(std::span<const double> z, double lambda, int L, std::span<double> out) {
    const float64x2_t vl = vdupq_n_f64(static_cast<double>(L));
    const float64x2_t vlam = vdupq_n_f64(lambda);
    const float64x2_t half = vdupq_n_f64(0.5);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t j = 0;
    for (; j + 2 <= z.size(); j += 2) {
        const float64x2_t zv = vld1q_f64(z.data() + j);
        float64x2_t level = vaddq_f64(vdivq_f64(vmulq_f64(zv, vl), vlam), half);
        level = vdivq_f64(vrndmq_f64(level), vl);
        level = vminq_f64(vmaxq_f64(level, zero), one);
        vst1q_f64(out.data() + j, vmulq_f64(vlam, level));
    }
    const QCFSParams params{lambda, L};
    for (; j < z.size(); ++j) {
        out[j] = gnc::qcfs(z[j], params);
    }
}

inline void store_counts(std::int32_t* dst, float64x2_t q) {
    vst1_s32(dst, vmovn_s64(vcvtq_s64_f64(q)));
}

void if_step_neon(std::span<double> v, std::span<const double> current, double theta,
                  std::span<std::int32_t> counts, std::span<double> psp) {
    const float64x2_t vth = vdupq_n_f64(theta);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t j = 0;
    for (; j + 2 <= v.size(); j += 2) {
        const float64x2_t p = vaddq_f64(vld1q_f64(v.data() + j), vld1q_f64(current.data() + j));
        const uint64x2_t fire = vcgeq_f64(p, vth);
        vst1q_f64(v.data() + j, vbslq_f64(fire, vsubq_f64(p, vth), p));
        vst1q_f64(psp.data() + j, vbslq_f64(fire, vth, zero));
        store_counts(counts.data() + j, vbslq_f64(fire, one, zero));
    }
    const IFConfig cfg{theta};
    for (; j < v.size(); ++j) {
        const IFStep r = gnc::if_step(IFState{v[j]}, cfg, current[j]);
        v[j] = r.state.v;
        counts[j] = r.out.count;
        psp[j] = r.out.psp;
    }
}

inline float64x2_t member_threshold_neon(float64x2_t i, float64x2_t vth, float64x2_t vtau) {
    const float64x2_t t = vdivq_f64(vmulq_f64(i, vth), vtau);
    return vbslq_f64(vceqq_f64(i, vtau), vth, t);
}

void gn_step_neon(std::span<double> v, std::span<const double> current, double theta, int tau,
                  std::span<std::int32_t> counts, std::span<double> psp) {
    const GNConfig cfg(theta, tau);
    const float64x2_t vth = vdupq_n_f64(theta);
    const float64x2_t vtau = vdupq_n_f64(static_cast<double>(tau));
    const float64x2_t vgn = vdupq_n_f64(cfg.theta_gn());
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t j = 0;
    for (; j + 2 <= v.size(); j += 2) {
        const float64x2_t p = vaddq_f64(vld1q_f64(v.data() + j), vld1q_f64(current.data() + j));
        float64x2_t q = vrndmq_f64(vdivq_f64(vmulq_f64(p, vtau), vth));
        q = vminq_f64(vmaxq_f64(q, zero), vtau);

        const uint64x2_t up = vandq_u64(vcltq_f64(q, vtau),
                                        vcgeq_f64(p, member_threshold_neon(vaddq_f64(q, one), vth, vtau)));
        const uint64x2_t down = vbicq_u64(
            vandq_u64(vcgtq_f64(q, zero), vcltq_f64(p, member_threshold_neon(q, vth, vtau))), up);
        q = vsubq_f64(vaddq_f64(q, vbslq_f64(up, one, zero)), vbslq_f64(down, one, zero));

        vst1q_f64(v.data() + j, vsubq_f64(p, vmulq_f64(vgn, q)));
        vst1q_f64(psp.data() + j, vmulq_f64(q, vgn));
        store_counts(counts.data() + j, q);
    }
    for (; j < v.size(); ++j) {
        const GNStep r = gnc::gn_step(GNState{v[j]}, cfg, current[j]);
        v[j] = r.state.v;
        counts[j] = r.out.count;
        psp[j] = r.out.psp;
    }
}

void accumulate_neon(std::span<double> acc, std::span<const double> x) {
    std::size_t j = 0;
    for (; j + 2 <= acc.size(); j += 2) {
        vst1q_f64(acc.data() + j, vaddq_f64(vld1q_f64(acc.data() + j), vld1q_f64(x.data() + j)));
    }
    for (; j < acc.size(); ++j) {
        acc[j] += x[j];
    }
}

}  // namespace

const KernelTable kNeon{
    "neon", dense_neon, qcfs_neon, if_step_neon, gn_step_neon, accumulate_neon,
};

}  // namespace gnc::kernels::detail
