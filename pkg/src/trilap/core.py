"""Domain types, configuration ingestion, validation and diagnostic functionals.

The systems handled throughout the package have the form

    du/dt = D * lap^3(u) + sum_i T[i] * du/dx_i - F(u),    x in R^d,

with u an N-component real field, D ("diffusion") and T[1..d] ("transport")
constant N x N matrices and F a pointwise interaction term.  D + D^T must be
positive definite.  R^d is truncated to a periodic box; decaying data is
expected to live well inside it.

All fields are real valued.  The vector inner product is the component sum of
the L^2 pairings, discretised by the trapezoidal (here: plain Riemann, the
grid is periodic) rule with weight spacing^d.

Conventions:
  * component and matrix indices are 0-based throughout the Python API,
  * grids use centred coordinates, the origin is the sample at index n//2
    per axis,
  * arrays held by the frozen types are marked read-only; treat every
    instance as immutable and share freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

__all__ = [
    "ConfigError",
    "DimensionMismatchError",
    "PositivityError",
    "Grid",
    "Field",
    "Reaction",
    "ZeroReaction",
    "LinearReaction",
    "PolynomialReaction",
    "SystemSpec",
    "Violation",
    "AuditReport",
    "ComponentMin",
    "as_square_matrix",
    "inner_product",
    "min_component_value",
    "parse_config",
    "load_system",
    "load_grid",
    "serialize_system",
]


class ConfigError(ValueError):
    """Malformed or unparseable system configuration."""


class DimensionMismatchError(ConfigError):
    """Matrix or vector sizes inconsistent with the declared d and N."""


class PositivityError(ConfigError):
    """D + D^T is not positive definite."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            "diffusion matrix fails positivity: smallest eigenvalue of "
            f"(D + D^T)/2 is {self.min_eigenvalue:.6g} (must be > 0)"
        )


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_square_matrix(entries, side: int | None = None, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite real square matrix as a read-only array."""
    m = np.array(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name}: expected a square matrix, got shape {m.shape}")
    if side is not None and m.shape[0] != side:
        raise DimensionMismatchError(f"{name}: expected side {side}, got {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise ConfigError(f"{name}: entries must all be finite")
    return _readonly(m)


@dataclass(frozen=True)
class Grid:
    """Periodic box discretisation: n samples per axis over side length box.

    Wavenumbers follow the standard symmetric DFT layout
    xi = 2*pi*m/box, m = 0, 1, ..., n/2-1, -n/2, ..., -1; the unmatched
    Nyquist frequency has its odd-derivative multiplier zeroed so first
    derivatives of real fields stay real.
    """

    d: int
    n: int
    box: float

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigError(f"grid: d must be 1, 2 or 3, got {self.d}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ConfigError(f"grid: n must be a power of two >= 8, got {self.n}")
        if not (np.isfinite(self.box) and self.box > 0):
            raise ConfigError(f"grid: box must be positive and finite, got {self.box}")

    @property
    def spacing(self) -> float:
        return self.box / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.n // 2,) * self.d

    @cached_property
    def axis_coords(self) -> np.ndarray:
        """Centred sample coordinates of one axis; the origin is a sample."""
        return _readonly((np.arange(self.n) - self.n // 2) * self.spacing)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return _readonly(2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing))

    @cached_property
    def deriv_wavenumbers(self) -> np.ndarray:
        k = self.wavenumbers.copy()
        k[self.n // 2] = 0.0  # unmatched Nyquist mode: odd-derivative multiplier zero
        return _readonly(k)

    @cached_property
    def coord_mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(
            _readonly(m) for m in np.meshgrid(*(self.axis_coords,) * self.d, indexing="ij")
        )

    @cached_property
    def k_squared(self) -> np.ndarray:
        meshes = np.meshgrid(*(self.wavenumbers,) * self.d, indexing="ij")
        return _readonly(sum(m**2 for m in meshes))

    @cached_property
    def k_sixth(self) -> np.ndarray:
        # |xi|^6 as (|xi|^2)^3, matching lap^3 = (lap)^3 composition
        return _readonly(self.k_squared**3)

    @cached_property
    def deriv_mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(
            _readonly(m)
            for m in np.meshgrid(*(self.deriv_wavenumbers,) * self.d, indexing="ij")
        )

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: True on retained modes."""
        m = np.abs(np.fft.fftfreq(self.n) * self.n)
        keep = m < self.n / 3.0
        meshes = np.meshgrid(*(keep,) * self.d, indexing="ij")
        out = meshes[0]
        for extra in meshes[1:]:
            out = out & extra
        return _readonly(out)


@dataclass(frozen=True, eq=False)
class Field:
    """N real components sampled on a grid; values shape (ncomp, n, ..., n)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != self.grid.d + 1 or v.shape[1:] != self.grid.shape:
            raise DimensionMismatchError(
                f"field values shape {v.shape} does not match grid shape "
                f"(ncomp,) + {self.grid.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ConfigError("field values must all be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def ncomp(self) -> int:
        return self.values.shape[0]


class Reaction:
    """Pointwise interaction term F; the right-hand side subtracts it."""

    kind = "abstract"

    def evaluate(self, values: np.ndarray) -> np.ndarray:
        """Evaluate F componentwise; values has shape (ncomp, ...)."""
        raise NotImplementedError

    def validate(self, ncomp: int) -> None:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroReaction(Reaction):
    kind = "zero"

    def evaluate(self, values):
        return np.zeros_like(values)

    def validate(self, ncomp):
        pass

    def to_config(self):
        return {"kind": "zero"}


@dataclass(frozen=True, eq=False)
class LinearReaction(Reaction):
    """F(u) = M u for a constant square matrix M."""

    matrix: np.ndarray
    kind = "linear"

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_square_matrix(self.matrix, name="reaction.L"))

    def evaluate(self, values):
        return np.einsum("kj,j...->k...", self.matrix, values)

    def validate(self, ncomp):
        as_square_matrix(self.matrix, side=ncomp, name="reaction.L")

    def to_config(self):
        return {"kind": "linear", "L": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class PolynomialReaction(Reaction):
    """Per-component sums of monomials coeff * prod_l u_l**e_l."""

    terms: tuple[tuple[tuple[float, tuple[int, ...]], ...], ...]
    kind = "polynomial"

    def __post_init__(self):
        norm = tuple(
            tuple((float(c), tuple(int(e) for e in expo)) for c, expo in comp)
            for comp in self.terms
        )
        for comp in norm:
            for c, expo in comp:
                if not np.isfinite(c):
                    raise ConfigError("polynomial reaction: coefficients must be finite")
                if any(e < 0 for e in expo):
                    raise ConfigError("polynomial reaction: exponents must be nonnegative")
        object.__setattr__(self, "terms", norm)

    def evaluate(self, values):
        out = np.zeros_like(values)
        # overflow is allowed to produce inf here; callers treat non-finite
        # results as evaluation failure
        with np.errstate(over="ignore", invalid="ignore"):
            for k, comp in enumerate(self.terms):
                for coeff, expo in comp:
                    term = np.full(values.shape[1:], coeff)
                    for l, e in enumerate(expo):
                        if e:
                            term = term * values[l] ** e
                    out[k] += term
        return out

    def validate(self, ncomp):
        if len(self.terms) != ncomp:
            raise DimensionMismatchError(
                f"polynomial reaction: {len(self.terms)} component term lists for N={ncomp}"
            )
        for k, comp in enumerate(self.terms):
            for _, expo in comp:
                if len(expo) != ncomp:
                    raise DimensionMismatchError(
                        f"polynomial reaction: component {k} has an exponent vector of "
                        f"length {len(expo)}, expected {ncomp}"
                    )

    def to_config(self):
        return {
            "kind": "polynomial",
            "terms": [
                [{"coeff": c, "exponents": list(e)} for c, e in comp] for comp in self.terms
            ],
        }


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Validated system data: dimension, diffusion/transport matrices, reaction."""

    d: int
    ncomp: int
    diffusion: np.ndarray
    transport: tuple[np.ndarray, ...]
    reaction: Reaction = field(default_factory=ZeroReaction)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigError(f"d must be 1, 2 or 3, got {self.d}")
        if self.ncomp < 1:
            raise ConfigError(f"N must be >= 1, got {self.ncomp}")
        diff = as_square_matrix(self.diffusion, side=self.ncomp, name="A")
        gammas = tuple(self.transport)
        if len(gammas) != self.d:
            raise DimensionMismatchError(
                f"expected {self.d} transport matrices (one per axis), got {len(gammas)}"
            )
        gammas = tuple(
            as_square_matrix(g, side=self.ncomp, name=f"Gamma[{i}]")
            for i, g in enumerate(gammas)
        )
        self.reaction.validate(self.ncomp)
        sym_min = float(np.linalg.eigvalsh((diff + diff.T) / 2.0).min())
        if sym_min <= 0.0:
            raise PositivityError(sym_min)
        object.__setattr__(self, "diffusion", diff)
        object.__setattr__(self, "transport", gammas)

    @property
    def symmetrized_min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.diffusion + self.diffusion.T) / 2.0).min())


@dataclass(frozen=True)
class Violation:
    """One located rule violation; `site` is a JSON-ready locator dict."""

    rule: str
    site: dict
    value: float

    def to_dict(self) -> dict:
        value = self.value if math.isfinite(self.value) else None
        return {"rule": self.rule, "site": self.site, "value": value}


@dataclass(frozen=True)
class AuditReport:
    """Structured verdict of the structural nonnegativity audit."""

    diffusion_ok: bool
    transport_ok: bool
    reaction_ok: bool
    violations: tuple[Violation, ...]
    warnings: tuple[Violation, ...] = ()

    @property
    def overall(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "diffusion_ok": self.diffusion_ok,
            "transport_ok": self.transport_ok,
            "reaction_ok": self.reaction_ok,
            "warnings": [w.to_dict() for w in self.warnings],
            "violations": [v.to_dict() for v in self.violations],
        }


class ComponentMin(NamedTuple):
    value: float
    index: int                       # flat C-order index, smallest on ties
    multi_index: tuple[int, ...]


def inner_product(f: Field, g: Field) -> float:
    """Component-summed L^2 pairing, sum_k sum_x f_k g_k * spacing^d.

    The reduction order is fixed (numpy pairwise summation over C-order),
    so repeated evaluations are bit-identical.
    """
    if f.grid != g.grid:
        raise DimensionMismatchError("inner_product: fields live on different grids")
    if f.ncomp != g.ncomp:
        raise DimensionMismatchError(
            f"inner_product: component counts differ ({f.ncomp} vs {g.ncomp})"
        )
    return float(np.sum(f.values * g.values) * f.grid.spacing**f.grid.d)


def min_component_value(u: Field, k: int) -> ComponentMin:
    """Minimum sample of component k with one argmin (smallest flat index on ties)."""
    if not 0 <= k < u.ncomp:
        raise IndexError(f"component index {k} out of range for ncomp={u.ncomp}")
    comp = u.values[k]
    flat = int(np.argmin(comp))
    return ComponentMin(float(comp.flat[flat]), flat, np.unravel_index(flat, comp.shape))


# ---------------------------------------------------------------------------
# configuration ingestion


def parse_config(text: str) -> dict:
    """Parse the JSON config, reporting the offending line on syntax errors."""
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config parse error at line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    return cfg


def _reaction_from_config(node) -> Reaction:
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError("field 'reaction': expected an object with a 'kind'")
    kind = node["kind"]
    if kind == "zero":
        return ZeroReaction()
    if kind == "linear":
        if "L" not in node:
            raise ConfigError("field 'reaction.L': required for kind 'linear'")
        return LinearReaction(node["L"])
    if kind == "polynomial":
        if "terms" not in node:
            raise ConfigError("field 'reaction.terms': required for kind 'polynomial'")
        try:
            terms = tuple(
                tuple((mono["coeff"], tuple(mono["exponents"])) for mono in comp)
                for comp in node["terms"]
            )
        except (TypeError, KeyError):
            raise ConfigError(
                "field 'reaction.terms': expected per-component lists of "
                "{'coeff': real, 'exponents': [int]} objects"
            )
        return PolynomialReaction(terms)
    raise ConfigError(f"field 'reaction.kind': unknown kind {kind!r}")


def load_system(config_text: str) -> SystemSpec:
    """Build a validated SystemSpec from config text.

    Raises ConfigError (parse/field problems), DimensionMismatchError or
    PositivityError (naming the smallest symmetric eigenvalue).
    """
    cfg = parse_config(config_text)
    for key in ("d", "N", "A", "Gamma", "reaction"):
        if key not in cfg:
            raise ConfigError(f"field '{key}': missing")
    d, ncomp = int(cfg["d"]), int(cfg["N"])
    gammas = cfg["Gamma"]
    if not isinstance(gammas, list):
        raise ConfigError("field 'Gamma': expected a list of d matrices")
    return SystemSpec(
        d=d,
        ncomp=ncomp,
        diffusion=cfg["A"],
        transport=tuple(gammas),
        reaction=_reaction_from_config(cfg["reaction"]),
    )


def load_grid(config_text: str, d: int | None = None) -> Grid:
    """Build the Grid described by the config's 'grid' block."""
    cfg = parse_config(config_text)
    if "grid" not in cfg:
        raise ConfigError("field 'grid': missing")
    node = cfg["grid"]
    if d is None:
        if "d" not in cfg:
            raise ConfigError("field 'd': missing")
        d = int(cfg["d"])
    return Grid(d=d, n=int(node["n"]), box=float(node["box"]))


def serialize_system(spec: SystemSpec, grid: Grid | None = None) -> str:
    """Config text whose load_system round-trips the numeric content."""
    cfg = {
        "d": spec.d,
        "N": spec.ncomp,
        "A": spec.diffusion.tolist(),
        "Gamma": [g.tolist() for g in spec.transport],
        "reaction": spec.reaction.to_config(),
    }
    if grid is not None:
        cfg["grid"] = {"n": grid.n, "box": grid.box}
    return json.dumps(cfg, indent=2)
