"""Unit conversions and physical constants.

Internal convention: all frequencies are angular (rad/s) once inside the
package; Hz and degrees appear only at external boundaries (CLI, file
formats, reporting).
"""

import math

TWO_PI = 2.0 * math.pi

# CODATA values
HBAR = 1.054571817e-34  # J s
MU0_OVER_4PI = 1e-7  # T^2 m^3 / J

# 13C defaults (glycine C-C pair)
GAMMA_C13 = 6.7283e7  # rad s^-1 T^-1
GLYCINE_CC_DISTANCE = 1.53e-10  # m, literature C-C bond length


def hz_to_angular(f):
    """Hz -> rad/s."""
    return TWO_PI * f


def angular_to_hz(w):
    """rad/s -> Hz."""
    return w / TWO_PI


def ppm_to_hz(shift, carrier_mhz):
    """Chemical shift (ppm) at a given carrier (MHz) -> offset in Hz.

    1 ppm of an f MHz carrier is exactly f Hz.
    """
    if carrier_mhz <= 0:
        raise ValueError(f"carrier must be positive, got {carrier_mhz} MHz")
    return shift * carrier_mhz


def deg_to_rad(deg):
    return math.radians(deg)


def rad_to_deg(rad):
    return math.degrees(rad)
