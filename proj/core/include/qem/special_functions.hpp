#pragma once

#include <cstdint>
#include <span>

namespace qem {

/// Standard normal density.
double norm_pdf(double z);

/// Standard normal CDF, computed through erfc so the lower tail keeps
/// full relative accuracy.
double norm_cdf(double z);

/// Standard normal survival function 1 - Phi(z), accurate in the upper tail.
double norm_sf(double z);

/// Inverse standard normal CDF. Wichura's PPND16 rational approximation
/// followed by one Newton correction evaluated on the smaller tail, giving
/// close to full double accuracy over (0, 1). Returns +-inf at the ends.
double norm_quantile(double p);

/// Order-independent-by-construction summation: fixed pairwise reduction
/// over the index range, deterministic for a given input order.
double pairwise_sum(std::span<const double> values);

/// SplitMix64 finalizer; bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

} // namespace qem
