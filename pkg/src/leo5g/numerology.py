"""NR subcarrier-spacing family and carrier-frequency-offset tolerance."""

from __future__ import annotations

from dataclasses import dataclass

MAX_INDEX = 6
BASE_SCS_KHZ = 15


def scs_from_index(n: int) -> int:
    """Subcarrier spacing in kHz for numerology index ``n``."""
    if isinstance(n, bool) or int(n) != n:
        raise ValueError("numerology index must be an integer")
    n = int(n)
    if not 0 <= n <= MAX_INDEX:
        raise ValueError(f"numerology index must be in [0, {MAX_INDEX}]")
    return BASE_SCS_KHZ * 2**n


SCS_FAMILY_KHZ = tuple(scs_from_index(n) for n in range(MAX_INDEX + 1))


def index_from_scs(scs_khz: float) -> int:
    try:
        return SCS_FAMILY_KHZ.index(scs_khz)
    except ValueError:
        raise ValueError(f"{scs_khz} kHz is not an NR subcarrier spacing") from None


@dataclass(frozen=True)
class Numerology:
    index: int = 5

    def __post_init__(self) -> None:
        scs_from_index(self.index)

    @property
    def scs(self) -> int:
        return scs_from_index(self.index)


@dataclass(frozen=True)
class CfoTolerancePolicy:
    """Tolerable CFO as a fixed fraction of the subcarrier spacing.

    Stored as a reference point (tolerance at one spacing) so that the
    calibration point is reproduced without rounding; scaling to other
    family members is by powers of two and therefore exact as well.
    """

    reference_tolerance_khz: float = 30.4
    reference_scs_khz: float = 480.0

    def __post_init__(self) -> None:
        if not 0 < self.reference_tolerance_khz < self.reference_scs_khz:
            raise ValueError("tolerance fraction must lie in (0, 1)")

    @classmethod
    def from_fraction(cls, fraction: float) -> "CfoTolerancePolicy":
        return cls(fraction * 480.0, 480.0)

    @property
    def fraction(self) -> float:
        return self.reference_tolerance_khz / self.reference_scs_khz


def max_tolerable_cfo(scs_khz: float, policy: CfoTolerancePolicy = CfoTolerancePolicy()) -> float:
    """Largest residual frequency offset (kHz) the spacing can absorb."""
    index_from_scs(scs_khz)
    return policy.reference_tolerance_khz * (scs_khz / policy.reference_scs_khz)


@dataclass(frozen=True)
class WaveformVerdict:
    feasible: bool
    residual_hz: float
    tolerance_hz: float
    margin_hz: float

    def as_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "residual_hz": self.residual_hz,
            "tolerance_hz": self.tolerance_hz,
            "margin_hz": self.margin_hz,
        }


def waveform_feasibility(
    residual_hz: float,
    numerology: Numerology = Numerology(),
    policy: CfoTolerancePolicy = CfoTolerancePolicy(),
) -> WaveformVerdict:
    tol = max_tolerable_cfo(numerology.scs, policy) * 1e3
    mag = abs(residual_hz)
    return WaveformVerdict(mag <= tol, residual_hz, tol, tol - mag)
