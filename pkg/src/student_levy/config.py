"""Quadrature and inversion settings, loadable from JSON."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

__all__ = ["QuadratureConfig", "DEFAULT_CONFIG"]


@dataclass(frozen=True)
class QuadratureConfig:
    """Numerical settings for Fourier inversion, Laplace inversion and subordination.

    Attributes
    ----------
    fourier_truncation : float or None
        Upper limit U of the cosine integral; ``None`` solves
        ``c U - c (nu - 1/2) log U = fourier_decay_target``.
    fourier_decay_target : float
        Log-decay of ``k_nu(U)**c`` aimed for by the automatic truncation.
    fourier_nodes : int
        Gauss-Legendre nodes per panel (doubled on the graded panels at 0).
    fourier_oscillation_threshold : float
        Above this value of ``|x| U`` panels are placed between zeros of
        ``cos(u x)``.
    fourier_panel_width : float
        Panel width used below the oscillation threshold.
    origin_levels : int
        Number of geometric refinements of the first panel toward u = 0.
    laplace_order : int
        Gaver-Stehfest order M (even).
    laplace_precision_bits : int or None
        Working precision; ``None`` picks ``4 M + 16`` bits.
    laplace_tolerance : float
        Relative disagreement between orders M and M - 2 above which a
        result is flagged.
    subordination_grid_density : int
        Grid points per unit of log t for the cached h^{*c} grid.
    subordination_t_max : float
        Largest grid time; beyond it h^{*c} is continued as a pure power.
    subordination_rel_tol : float
        Relative size of the Gaussian factor below which small t are dropped.
    tail_band : float
        Half-width of the band around 1 in which a tail ratio counts as converged.
    normalization_cutoff : float
        Abscissa beyond which mass is taken from the leading tail term.
    """

    fourier_truncation: float | None = None
    fourier_decay_target: float = 40.0
    fourier_nodes: int = 16
    fourier_oscillation_threshold: float = 50.0
    fourier_panel_width: float = 0.5
    origin_levels: int = 40
    laplace_order: int = 64
    laplace_precision_bits: int | None = None
    laplace_tolerance: float = 1e-5
    subordination_grid_density: int = 8
    subordination_t_max: float = 1e10
    subordination_rel_tol: float = 1e-18
    tail_band: float = 0.01
    normalization_cutoff: float = 400.0

    def __post_init__(self):
        if self.fourier_truncation is not None and not self.fourier_truncation > 0:
            raise ValueError("fourier_truncation must be positive")
        if self.fourier_nodes < 2:
            raise ValueError("fourier_nodes must be at least 2")
        if self.laplace_order % 2 or not 8 <= self.laplace_order <= 96:
            raise ValueError("laplace_order must be even and within [8, 96]")
        if self.laplace_precision_bits is not None and self.laplace_precision_bits < 53:
            raise ValueError("laplace_precision_bits must be at least 53")
        if self.subordination_grid_density < 1:
            raise ValueError("subordination_grid_density must be positive")
        if not 0 < self.tail_band < 1:
            raise ValueError("tail_band must lie in (0, 1)")

    @property
    def precision_bits(self) -> int:
        if self.laplace_precision_bits is not None:
            return self.laplace_precision_bits
        return 4 * self.laplace_order + 16

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def replace(self, **changes) -> "QuadratureConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "QuadratureConfig":
        with open(Path(path), encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_dict(data.get("quadrature", data))


DEFAULT_CONFIG = QuadratureConfig()
