"""Data models for the Theta-Quant system."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np


Time = Union[float, complex]


@dataclass(frozen=True)
class ThetaConstants:
    """The external parameters (vartheta_2, vartheta_3, vartheta_4, eta) of the theta system."""
    v2: complex
    v3: complex
    v4: complex
    eta: complex = 0j


@dataclass(frozen=True)
class LegendreTriple:
    """Values of the Legendre integrals F, E and Pi_alpha at one argument set."""
    F: complex
    E: complex
    Pi: complex
    x: complex = 0j
    k: complex = 0j
    alpha: complex = 0j


@dataclass(frozen=True)
class LegendrePartials:
    """All seven first partial derivatives of (F, E, Pi_alpha)."""
    F_x: complex
    F_k: complex
    E_x: complex
    E_k: complex
    Pi_x: complex
    Pi_k: complex
    Pi_alpha: complex

    def as_dict(self) -> Dict[str, complex]:
        return {
            'F_x': self.F_x, 'F_k': self.F_k,
            'E_x': self.E_x, 'E_k': self.E_k,
            'Pi_x': self.Pi_x, 'Pi_k': self.Pi_k, 'Pi_alpha': self.Pi_alpha,
        }


@dataclass(frozen=True)
class ThetaState:
    """Values of theta_1..theta_4 and theta_1' at time t."""
    th1: complex
    th2: complex
    th3: complex
    th4: complex
    dth1: complex
    t: Time = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.th1, self.th2, self.th3, self.th4, self.dth1], dtype=complex)

    @classmethod
    def from_array(cls, values, t: Time = 0.0) -> "ThetaState":
        th1, th2, th3, th4, dth1 = (complex(v) for v in values)
        return cls(th1, th2, th3, th4, dth1, t)


@dataclass(frozen=True)
class PolyState:
    """Polynomial coordinates (x, y, z, xi, u); the 4D subsystem ignores u."""
    x: complex
    y: complex
    z: complex
    xi: complex
    u: complex = 0j

    def as_array(self, dim: int = 5) -> np.ndarray:
        values = [self.x, self.y, self.z, self.xi, self.u]
        return np.array(values[:dim], dtype=complex)

    @classmethod
    def from_array(cls, values) -> "PolyState":
        values = [complex(v) for v in values]
        if len(values) == 4:
            values.append(0j)
        return cls(*values)


@dataclass(frozen=True)
class InertiaParams:
    """Principal moments of inertia of a free rigid body."""
    A: float
    B: float
    C: float


@dataclass(frozen=True)
class SolutionParams:
    """Free constants (k, alpha, K0, eps) of the closed-form solution."""
    k: complex
    alpha: complex
    K0: complex = 0j
    eps: complex = 0j


@dataclass
class Trajectory:
    """Ordered samples of an integrated flow plus integrator statistics."""
    times: np.ndarray
    states: np.ndarray
    labels: Tuple[str, ...] = ()
    accepted_steps: int = 0
    rejected_steps: int = 0
    error_estimates: List[float] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> Time:
        return self.times[-1]

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class StraightState:
    """Straightened variables: the time-like N and the integrals I, J, K."""
    N: complex
    I: complex
    J: complex
    K: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.N, self.I, self.J, self.K], dtype=complex)


@dataclass(frozen=True)
class HamiltonianCoefficients:
    """Coefficients of H = a(x^2 - z^2) + b(x^2 - y^2)."""
    a: complex = -0.5
    b: complex = 0.0


@dataclass(frozen=True)
class BandEdge:
    """One eigenvalue of the periodic or antiperiodic boundary problem."""
    energy: float
    parity: str
    index: int


@dataclass(frozen=True)
class Gap:
    """A spectral lacuna between two consecutive bands."""
    index: int
    low: float
    high: float
    closed_threshold: float = 1e-9

    @property
    def width(self) -> float:
        return self.high - self.low

    @property
    def closed(self) -> bool:
        return self.width < self.closed_threshold

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)


@dataclass
class BandStructure:
    """Band edges in increasing order together with the derived gaps."""
    A: float
    edges: List[BandEdge]
    gaps: List[Gap] = field(default_factory=list)
    converged: bool = True
    max_shift: float = 0.0

    def energies(self, parity: Optional[str] = None) -> List[float]:
        return [e.energy for e in self.edges if parity is None or e.parity == parity]

    def bands(self) -> List[Tuple[float, float]]:
        """Allowed energy intervals (E_low, E_high); the last band is cut at the last edge."""
        values = self.energies()
        if len(values) < 2:
            return []
        result = [(values[0], values[1])]
        for j in range(2, len(values) - 1, 2):
            result.append((values[j], values[j + 1]))
        return result


@dataclass(frozen=True)
class MathieuProblem:
    """Parameters of Psi'' = (A cos(gamma) - E) Psi on one period 2 pi."""
    A: float
    M: int = 40
    E_max: float = 25.0
    tolerance: float = 1e-8


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single audit check."""
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass
class RunConfig:
    """Validated configuration for one CLI command."""
    command: str
    tau: complex = 1j
    z: complex = 0j
    k: float = 0.6
    alpha: complex = 1.0
    K0: complex = 0.0
    eps: complex = 0.0
    x: complex = 0.5
    system: str = 'poly'
    t0: float = 0.1
    t1: float = 1.0
    tol: float = 1e-10
    fd_tol: float = 1e-6
    truncation: int = 8
    a_min: float = 0.0
    a_max: float = 5.0
    a_steps: int = 51
    e_max: float = 25.0
    modes: int = 40
    threads: int = 4
    seed: int = 20240607
    samples: int = 100
    out: Optional[Path] = None
    format: Optional[str] = None

    @property
    def a_grid(self) -> List[float]:
        if self.a_steps == 1:
            return [self.a_min]
        step = (self.a_max - self.a_min) / (self.a_steps - 1)
        return [self.a_min + j * step for j in range(self.a_steps)]

    @property
    def output_format(self) -> str:
        if self.format:
            return self.format
        if self.out is not None and Path(self.out).suffix.lower() == '.json':
            return 'json'
        return 'csv'
