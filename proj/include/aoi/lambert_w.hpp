#pragma once

namespace aoi {

/// Principal branch W0 of the Lambert W function: the w >= -1 solving
/// w e^w = z. Arguments below -1/e by at most 1e-12 are clamped to the branch
/// point; anything lower throws std::domain_error.
double lambert_w0(double z);

}  // namespace aoi
