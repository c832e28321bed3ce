#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "zedloc/raytrace.hpp"
#include "zedloc/sysparams.hpp"

namespace zedloc {

/// One complex entry per pilot of a bit period.
using CVector = Eigen::VectorXcd;

/// Frequency response of a ray list at every pilot:
///   out[n] = sum_p gain_p * exp(-j 2 pi freq_offset(n) delay_p).
/// Evaluated once per distinct pilot frequency and broadcast over subframes.
CVector compose(const std::vector<Ray>& rays, const PilotGrid& grid);

/// Per-pilot coefficients of the three links seen by a smartphone near a
/// backscatter device: direct (gamma), BS->device (phi), device->SM (lambda_),
/// and the reflecting-mode channel g = gamma + phi .* lambda_.
struct PilotChannel {
    CVector gamma;
    CVector phi;
    CVector lambda_;
    CVector g;

    std::size_t size() const { return static_cast<std::size_t>(gamma.size()); }
};

PilotChannel make_pilot_channel(CVector gamma, CVector phi, CVector lambda_);

PilotChannel build_pilot_channel(const std::vector<Ray>& gamma_rays, const std::vector<Ray>& phi_rays,
                                 const std::vector<Ray>& lambda_rays, const PilotGrid& grid);

/// Channel seen while the device sends `bit`: gamma for 0, g for 1.
const CVector& effective(const PilotChannel& chan, int bit);

/// ||phi .* lambda_||^2 / N.
double zed_delta_norm2(const PilotChannel& chan);

}  // namespace zedloc
