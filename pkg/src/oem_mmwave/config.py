"""System configuration for the OAM-embedded massive-MIMO link.

The JSON schema mirrors the dataclass field names one-to-one.  Angles
(``phi``, ``phi_c``, ``theta``) are stored in DEGREES in the file and
converted to radians on load; ``beta`` is stored as a two-element
``[re, im]`` list.  Everything else is SI units (meters, watts).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .errors import InvalidConfigError


@dataclass(frozen=True)
class OemConfig:
    """Full parameterization of one OEM link.

    Attributes
    ----------
    n_tx, m_rx : number of transmit / receive UCAs (N, M).
    u_elems, v_elems : array-elements per transmit / receive UCA (U, V).
    r1 : radius of the OEM transmit/receive circle (m).
    r2 : UCA radius (m).
    wavelength : carrier wavelength (m).
    phi : divergence angle of the vortex beam (rad).
    phi_c : equivalent convergent angle after the reflector (rad).
    theta : azimuth offset of the link axis projection (rad).
    beta : lumped amplitude/phase constant of the link budget.
    link_distance : center-to-center transmit/receive distance (m).
    conv_gains : per-mode convergence amplitude gains, length U, or None
        to use the equal-gain idealization computed by the channel module.
    noise_var : per-element noise variance (W).
    """

    n_tx: int
    m_rx: int
    u_elems: int
    v_elems: int
    r1: float
    r2: float
    wavelength: float
    phi: float
    phi_c: float
    theta: float = 0.0
    beta: complex = 1.0 + 0.0j
    link_distance: float = 100.0
    conv_gains: Optional[tuple[float, ...]] = None
    noise_var: float = 1.0

    def __post_init__(self):
        if self.conv_gains is not None:
            object.__setattr__(self, "conv_gains", tuple(float(g) for g in self.conv_gains))
        self.validate()

    def validate(self) -> None:
        problems = []
        if self.n_tx < 1 or self.m_rx < 1:
            problems.append("need at least one transmit and one receive UCA")
        if self.u_elems < 1:
            problems.append("need at least one array-element per transmit UCA")
        if self.v_elems < self.u_elems:
            problems.append(
                f"alias-free decomposition needs V >= U, got V={self.v_elems} U={self.u_elems}"
            )
        if not (self.r1 > self.r2 > 0.0):
            problems.append(f"need r1 > r2 > 0, got r1={self.r1} r2={self.r2}")
        if self.wavelength <= 0.0:
            problems.append("wavelength must be positive")
        if not (0.0 < self.phi < math.pi / 2):
            problems.append(f"divergence angle must lie in (0, pi/2), got {self.phi}")
        if not (0.0 <= self.phi_c <= self.phi):
            problems.append(f"convergent angle must lie in [0, phi], got {self.phi_c}")
        if self.conv_gains is not None:
            if len(self.conv_gains) != self.u_elems:
                problems.append(
                    f"conv_gains needs exactly U={self.u_elems} entries, got {len(self.conv_gains)}"
                )
            elif any(g < 0.0 for g in self.conv_gains):
                problems.append("conv_gains entries must be nonnegative")
        if self.link_distance <= 0.0:
            problems.append("link_distance must be positive")
        if self.noise_var < 0.0:
            problems.append("noise_var must be nonnegative")
        if problems:
            raise InvalidConfigError("; ".join(problems))

    def with_(self, **kwargs) -> "OemConfig":
        """Return a modified copy (dataclasses.replace with validation)."""
        return replace(self, **kwargs)

    # -- JSON round trip ---------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {
            "n_tx": self.n_tx,
            "m_rx": self.m_rx,
            "u_elems": self.u_elems,
            "v_elems": self.v_elems,
            "r1": self.r1,
            "r2": self.r2,
            "wavelength": self.wavelength,
            "phi": math.degrees(self.phi),
            "phi_c": math.degrees(self.phi_c),
            "theta": math.degrees(self.theta),
            "beta": [self.beta.real, self.beta.imag],
            "link_distance": self.link_distance,
            "conv_gains": list(self.conv_gains) if self.conv_gains is not None else None,
            "noise_var": self.noise_var,
        }
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "OemConfig":
        required = {"n_tx", "m_rx", "u_elems", "v_elems", "r1", "r2", "wavelength", "phi", "phi_c"}
        missing = required - d.keys()
        if missing:
            raise InvalidConfigError(f"config missing fields: {sorted(missing)}")
        unknown = d.keys() - {
            "n_tx", "m_rx", "u_elems", "v_elems", "r1", "r2", "wavelength",
            "phi", "phi_c", "theta", "beta", "link_distance", "conv_gains", "noise_var",
        }
        if unknown:
            raise InvalidConfigError(f"config has unknown fields: {sorted(unknown)}")
        beta = d.get("beta", [1.0, 0.0])
        if isinstance(beta, (int, float)):
            beta = complex(beta)
        else:
            beta = complex(beta[0], beta[1])
        try:
            return cls(
                n_tx=int(d["n_tx"]),
                m_rx=int(d["m_rx"]),
                u_elems=int(d["u_elems"]),
                v_elems=int(d["v_elems"]),
                r1=float(d["r1"]),
                r2=float(d["r2"]),
                wavelength=float(d["wavelength"]),
                phi=math.radians(float(d["phi"])),
                phi_c=math.radians(float(d["phi_c"])),
                theta=math.radians(float(d.get("theta", 0.0))),
                beta=beta,
                link_distance=float(d.get("link_distance", 100.0)),
                conv_gains=d.get("conv_gains"),
                noise_var=float(d.get("noise_var", 1.0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfigError):
                raise
            raise InvalidConfigError(f"malformed config value: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "OemConfig":
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise InvalidConfigError("config file must hold a JSON object")
        return cls.from_json_dict(d)
