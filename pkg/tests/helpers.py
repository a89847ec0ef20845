"""Shared test configurations where the sampling rate is a valid bandpass rate and no
in-band harmonic aliases onto a self-conjugate bin."""
import math

from modband import BandSpec, synth_random_bandpass

# (wedge, samples per unit period, lowest harmonic, highest harmonic)
ODD_CASE = (3, 198, 200, 202)
EVEN_CASE = (2, 103, 100, 102)


def bandpass_case(case, seed):
    P, K, n_lo, n_hi = case
    band = BandSpec(2 * math.pi * n_lo, 2 * math.pi * n_hi)
    return synth_random_bandpass(band, 1.0, seed), band, P, K
