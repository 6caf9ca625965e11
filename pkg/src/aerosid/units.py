"""Unit tags and conversions to the package's SI-internal convention.

Internally everything is SI: metres, seconds, kilograms, radians, Pascals,
Kelvin.  CSV ingest declares one unit tag per column; the registry below
maps each tag to a converter into SI.  Conversion factors are derived from
exact legal definitions (1 ft = 0.3048 m, 1 lbf = 4.4482216152605 N,
1 slug = 14.59390293720636 kg) so that converting and inverting round-trips
to machine precision.
"""

import math
from typing import Callable

from .errors import UnitError

FT_TO_M = 0.3048
LBF_TO_N = 4.4482216152605
# 1 slug = 1 lbf s^2 / ft
SLUG_TO_KG = LBF_TO_N / FT_TO_M
SLUGFT3_TO_KGM3 = SLUG_TO_KG / FT_TO_M ** 3      # ~515.3788
PSF_TO_PA = LBF_TO_N / FT_TO_M ** 2              # lb/ft^2 -> Pa, ~47.8803
DEG_TO_RAD = math.pi / 180.0
KT_TO_MPS = 1852.0 / 3600.0

_CONVERTERS: dict[str, Callable[[float], float]] = {
    # dimensionless / already SI
    "1": lambda v: v,
    "-": lambda v: v,
    "s": lambda v: v,
    "m": lambda v: v,
    "m/s": lambda v: v,
    "rad": lambda v: v,
    "rad/s": lambda v: v,
    "pa": lambda v: v,
    "kg/m3": lambda v: v,
    "k": lambda v: v,
    "g": lambda v: v,            # load factor in g
    # imperial / aviation
    "ft": lambda v: v * FT_TO_M,
    "ft/s": lambda v: v * FT_TO_M,
    "kt": lambda v: v * KT_TO_MPS,
    "deg": lambda v: v * DEG_TO_RAD,
    "deg/s": lambda v: v * DEG_TO_RAD,
    "lb/ft2": lambda v: v * PSF_TO_PA,
    "psf": lambda v: v * PSF_TO_PA,
    "slug/ft3": lambda v: v * SLUGFT3_TO_KGM3,
    "c": lambda v: v + 273.15,
    "degc": lambda v: v + 273.15,
}


def convert(value: float, unit: str) -> float:
    """Convert a scalar from the tagged unit into SI."""
    try:
        fn = _CONVERTERS[unit.strip().lower()]
    except KeyError:
        raise UnitError(f"unknown unit tag {unit!r}") from None
    return fn(value)


def known_units() -> list[str]:
    return sorted(_CONVERTERS)
