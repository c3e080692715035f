"""
Data models for words, chains, configurations and level geometry.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError, WindowError
from .golden import DEFAULT_THETA, ONE, TAU, GoldenNumber


class Letter(str, Enum):
    """Letter of the two-letter alphabet; its length is its chain step."""
    A = "a"
    B = "b"

    @property
    def length(self) -> GoldenNumber:
        return TAU if self is Letter.A else ONE


@dataclass(frozen=True)
class Word:
    """Finite word over {a, b} with an optional reference bar."""
    letters: str
    ref_index: Optional[int] = None

    def __post_init__(self):
        if self.letters.strip("ab"):
            raise ValidationError(f"Word contains letters outside {{a, b}}: {self.letters!r}")
        if self.ref_index is not None and not 0 <= self.ref_index <= len(self.letters):
            raise ValidationError(
                f"Reference index {self.ref_index} outside [0, {len(self.letters)}]"
            )

    def __repr__(self):
        return f"Word({self})"

    def __str__(self):
        if self.ref_index is None:
            return self.letters
        return f"{self.letters[:self.ref_index]}|{self.letters[self.ref_index:]}"

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, k: int) -> Letter:
        return Letter(self.letters[k])

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def counts(self) -> Tuple[int, int]:
        """Number of a's and b's."""
        n_a = self.letters.count("a")
        return n_a, len(self.letters) - n_a

    @property
    def length(self) -> GoldenNumber:
        """Assigned length with |a| = tau and |b| = 1."""
        n_a, n_b = self.counts()
        return GoldenNumber(n_b, n_a)


@dataclass(frozen=True)
class FreqPair:
    """Absolute frequencies of the two super-words per unit length."""
    freq_A: float
    freq_B: float

    @property
    def ratio(self) -> float:
        return self.freq_B / self.freq_A


@dataclass(frozen=True)
class Patch:
    """Chain points seen from a center, as offsets inside an open ball."""
    points: Tuple[GoldenNumber, ...]
    radius: float

    def matches(self, other: "Patch") -> bool:
        return self.points == other.points

    def __repr__(self):
        return f"Patch({', '.join(str(p) for p in self.points)}; R={self.radius})"


class IntervalType(Enum):
    """Type of a super-interval: short (A) or long (B)."""
    A = "A"
    B = "B"

    @property
    def circle(self) -> int:
        return 1 if self is IntervalType.A else 2


@dataclass(frozen=True)
class PotentialSpec:
    """Scale of the substrate potential and the alpha/beta evaluator it uses."""
    lam: float = 1.0
    substrate: bool = True
    evaluator: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError(f"lambda must be positive, got {self.lam}")


class AnchorKind(Enum):
    LINEAR = "linear"
    SIGNED_SQUARE = "signed-square"
    TABLE = "table"


@dataclass(frozen=True)
class AnchorFn:
    """Anchor h(i) that a configuration is measured against."""
    kind: AnchorKind
    theta: Optional[GoldenNumber] = None
    table: Mapping[int, GoldenNumber] = field(default_factory=dict, compare=False)
    name: str = ""

    @classmethod
    def linear(cls, theta: GoldenNumber = DEFAULT_THETA) -> "AnchorFn":
        theta = GoldenNumber.coerce(theta)
        return cls(AnchorKind.LINEAR, theta=theta, name=f"linear({theta})")

    @classmethod
    def signed_square(cls) -> "AnchorFn":
        return cls(AnchorKind.SIGNED_SQUARE, name="h1")

    @classmethod
    def from_table(cls, values: Mapping[int, object], name: str = "table") -> "AnchorFn":
        if not values:
            raise ValidationError("Anchor table is empty")
        table = {int(i): GoldenNumber.coerce(v) for i, v in values.items()}
        return cls(AnchorKind.TABLE, table=table, name=name)

    def __repr__(self):
        return f"AnchorFn({self.name or self.kind.value})"

    def exact(self, i: int) -> GoldenNumber:
        if self.kind is AnchorKind.LINEAR:
            return self.theta * i
        if self.kind is AnchorKind.SIGNED_SQUARE:
            return GoldenNumber(i * i if i >= 0 else -i * i, 0)
        try:
            return self.table[i]
        except KeyError:
            raise WindowError(f"Anchor table '{self.name}' has no value at i={i}") from None

    def __call__(self, i: int) -> float:
        return float(self.exact(i))

    def values(self, indices: Sequence[int]) -> np.ndarray:
        return np.array([self(int(i)) for i in indices], dtype=float)

    def delta(self, i: int) -> GoldenNumber:
        """Discrete Laplacian h(i-1) - 2h(i) + h(i+1)."""
        return self.exact(i - 1) - self.exact(i) * 2 + self.exact(i + 1)

    def delta_bound(self, n: int) -> float:
        """sup |(Delta h)_i| over i in [-n, n]."""
        if self.kind is AnchorKind.LINEAR:
            return 0.0
        return max(abs(float(self.delta(i))) for i in range(-n, n + 1))

    def describe(self) -> dict:
        out = {"kind": self.kind.value, "name": self.name}
        if self.theta is not None:
            out["theta"] = self.theta.to_json()
        return out


@dataclass(frozen=True, eq=False)
class Configuration:
    """Finite window of positions x_i, i in [i_min, i_max]."""
    positions: np.ndarray
    i_min: int = 0
    meta: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.array(self.positions, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("Configuration needs a non-empty 1-d array of positions")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("Configuration positions must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "positions", arr)

    def __repr__(self):
        return (f"Configuration(i=[{self.i_min}, {self.i_max}], "
                f"anchor={self.anchor}, lam={self.meta.get('lam')})")

    def __len__(self) -> int:
        return self.positions.size

    @property
    def i_max(self) -> int:
        return self.i_min + self.positions.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.i_min, self.i_max + 1)

    @property
    def anchor(self) -> Optional[AnchorFn]:
        return self.meta.get("anchor")

    def contains(self, i: int) -> bool:
        return self.i_min <= i <= self.i_max

    def at(self, i: int) -> float:
        if not self.contains(i):
            raise WindowError(f"Index {i} outside [{self.i_min}, {self.i_max}]")
        return float(self.positions[i - self.i_min])

    def with_position(self, i: int, value: float) -> "Configuration":
        self.at(i)
        arr = self.positions.copy()
        arr[i - self.i_min] = value
        return Configuration(arr, self.i_min, dict(self.meta))


@dataclass
class AILParams:
    """Parameters of the anti-integrable equilibrium solve on i in [-n, n]."""
    lam: float = 1.0
    anchor: AnchorFn = field(default_factory=AnchorFn.linear)
    n: int = 500
    tol: float = 1e-12
    max_iter: int = 100
    closure: str = "anchor"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError(f"lambda must be positive, got {self.lam}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.n < 1:
            raise ValidationError(f"window half-width n must be >= 1, got {self.n}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.closure not in ("anchor", "zero"):
            raise ValidationError(f"closure must be 'anchor' or 'zero', got {self.closure!r}")

    @property
    def step(self) -> float:
        """1 / (-lam * zeta''(0))."""
        return 1.0 / (128.0 * self.lam)


@dataclass(eq=False)
class TridiagonalSystem:
    """Constant-coefficient system alpha*u[i-1] + (1-2*alpha)*u[i] + alpha*u[i+1] = rhs[i]."""
    alpha: float
    rhs: np.ndarray

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValidationError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.rhs.ndim != 1 or self.rhs.size == 0:
            raise ValidationError("rhs must be a non-empty 1-d sequence")

    @property
    def size(self) -> int:
        return self.rhs.size

    def diagonals(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.size
        off = np.full(m - 1, self.alpha)
        return off, np.full(m, 1.0 - 2.0 * self.alpha), off.copy()

    def matrix(self) -> np.ndarray:
        sub, main, sup = self.diagonals()
        return np.diag(main) + np.diag(sub, -1) + np.diag(sup, 1)


@dataclass(eq=False)
class LevelGeometry:
    """Two circles tangent at R_l, with the free atoms placed on each."""
    l: int
    circumferences: Tuple[GoldenNumber, GoldenNumber]
    counts: Tuple[int, int]
    free_points: Tuple[np.ndarray, np.ndarray]
    report: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        pts = []
        for k, arr in enumerate(self.free_points):
            arr = np.asarray(arr, dtype=float)
            c = float(self.circumferences[k])
            if arr.size != self.counts[k] - 1:
                raise ValidationError(
                    f"circle {k + 1} needs {self.counts[k] - 1} free points, got {arr.size}"
                )
            if arr.size and (np.any(np.diff(arr) <= 0) or arr[0] <= 0 or arr[-1] >= c):
                raise ValidationError(f"free points on circle {k + 1} must increase inside (0, {c})")
            pts.append(arr)
        self.free_points = (pts[0], pts[1])

    def __repr__(self):
        return (f"LevelGeometry(l={self.l}, C=({self.circumferences[0]}, "
                f"{self.circumferences[1]}), N={self.counts})")

    def circumference(self, circle: int) -> float:
        return float(self.circumferences[circle - 1])

    def atoms(self, circle: int) -> np.ndarray:
        """Arc coordinates of R followed by the free points."""
        return np.concatenate(([0.0], self.free_points[circle - 1]))


@dataclass(frozen=True)
class CirclePoint:
    """Point on one of the two circles; R_l is stored as circle 1, arc 0."""
    circle: int
    arc: GoldenNumber

    def __post_init__(self):
        if self.circle not in (1, 2):
            raise ValidationError(f"circle must be 1 or 2, got {self.circle}")
        arc = GoldenNumber.coerce(self.arc)
        if arc < 0:
            raise ValidationError(f"arc must be non-negative, got {arc}")
        object.__setattr__(self, "arc", arc)
        if not arc:
            object.__setattr__(self, "circle", 1)

    @property
    def is_root(self) -> bool:
        return not self.arc

    def __repr__(self):
        return "R" if self.is_root else f"CirclePoint({self.circle}, {self.arc})"


@dataclass(eq=False)
class LevelConfig:
    """Lift of an optimized level geometry to the line."""
    level: int
    geometry: LevelGeometry
    configuration: Configuration
    boundaries: List[GoldenNumber] = field(default_factory=list)
    types: List[IntervalType] = field(default_factory=list)

    @property
    def theta(self) -> np.ndarray:
        return self.configuration.positions


@dataclass
class RunManifest:
    """Record written next to every CLI output."""
    command: str
    parameters: Dict
    seed: Optional[int] = None
    version: str = ""
    outputs: List[str] = field(default_factory=list)
    results: Dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "version": self.version,
            "outputs": list(self.outputs),
            "results": self.results,
        }

    def write(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True)
            f.write("\n")
