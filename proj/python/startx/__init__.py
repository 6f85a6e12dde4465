"""Star transform: forward model, Radon-based inversion and singular-direction analysis.

Images are (n, n) float64 arrays indexed [iy, ix] with row 0 at y = -L.
"""

from ._core import (
    StarConfig,
    StarError,
    conjecture_scan,
    fbp,
    find_singular_directions,
    gaussian_bump,
    invert_star,
    is_invertible,
    is_symmetric,
    p2,
    q,
    radon,
    regular_star,
    shepp_logan,
    sign_normalize,
    stable_config_for_weights,
    star_transform,
)

__version__ = "0.1.0"

__all__ = [
    "StarConfig",
    "StarError",
    "conjecture_scan",
    "fbp",
    "find_singular_directions",
    "gaussian_bump",
    "invert_star",
    "is_invertible",
    "is_symmetric",
    "p2",
    "q",
    "radon",
    "regular_star",
    "shepp_logan",
    "sign_normalize",
    "stable_config_for_weights",
    "star_transform",
]
