"""System data types, standing-assumption checks and JSON file I/O."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    InadmissibleWeights,
    NotHurwitz,
    NotSymmetric,
    ParseError,
)

SYM_TOL = 1e-9
STAB_MARGIN = 1e-9
PD_TOL = 1e-12


def _frozen(x, name="matrix"):
    arr = np.array(x, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """Plant dx/dt = a x + b u + w with a symmetric Hurwitz ``a``.

    Build through :func:`validate_system`; the constructor only checks shapes.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _frozen(self.a, "a")
        b = _frozen(self.b, "b")
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"a must be square, got {a.shape}")
        if b.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"b has {b.shape[0]} rows, a has {a.shape[0]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]


@dataclass(frozen=True, eq=False)
class CostWeights:
    """State and input weights Q = C^T C and R = D^T D of the scaled output."""

    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = _frozen(self.q, "q")
        r = _frozen(self.r, "r")
        for name, w in (("q", q), ("r", r)):
            if w.shape[0] != w.shape[1]:
                raise DimensionMismatch(f"{name} must be square, got {w.shape}")
            if np.max(np.abs(w - w.T), initial=0.0) > SYM_TOL * max(1.0, np.linalg.norm(w)):
                raise InadmissibleWeights(f"{name} is not symmetric")
            if w.size and np.linalg.eigvalsh((w + w.T) / 2)[0] < PD_TOL:
                raise InadmissibleWeights(f"{name} is not positive definite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def identity(cls, n: int, m: int) -> "CostWeights":
        return cls(np.eye(n), np.eye(m))

    def output_factors(self):
        """Return (C, D) with C^T C = q and D^T D = r (upper Cholesky factors)."""
        return np.linalg.cholesky(self.q).T, np.linalg.cholesky(self.r).T

    def admissible(self, a, sym_tol: float = SYM_TOL, pd_tol: float = PD_TOL) -> bool:
        """True when -a q^{-1} is symmetric and positive definite."""
        a = np.asarray(a, dtype=float)
        if a.shape != self.q.shape:
            return False
        # a q^{-1} = (q^{-T} a^T)^T
        m = -np.linalg.solve(self.q.T, a.T).T
        scale = max(1.0, np.linalg.norm(m))
        if np.max(np.abs(m - m.T)) > sym_tol * scale:
            return False
        return bool(np.linalg.eigvalsh((m + m.T) / 2)[0] >= pd_tol * scale)


@dataclass(frozen=True, eq=False)
class SparsityPattern:
    mask: np.ndarray
    zero_tol: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, SparsityPattern):
            return NotImplemented
        return self.mask.shape == other.mask.shape and bool(np.all(self.mask == other.mask))

    def __hash__(self):
        return hash((self.mask.shape, self.mask.tobytes()))

    def as_int(self) -> np.ndarray:
        return self.mask.astype(int)


def sparsity_pattern(m, zero_tol: float = 0.0) -> SparsityPattern:
    m = np.asarray(m, dtype=float)
    mask = np.abs(m) > zero_tol
    mask.setflags(write=False)
    return SparsityPattern(mask, zero_tol)


@dataclass(frozen=True, eq=False)
class GainMatrix:
    """Static state feedback u = l x, l of shape (m, n)."""

    l: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "l", _frozen(self.l, "l"))

    @property
    def shape(self):
        return self.l.shape

    def pattern(self, zero_tol: float = 0.0) -> SparsityPattern:
        return sparsity_pattern(self.l, zero_tol)

    def check_conforms(self, sys: LtiSystem):
        if self.l.shape != (sys.m, sys.n):
            raise DimensionMismatch(
                f"gain has shape {self.l.shape}, plant needs {(sys.m, sys.n)}"
            )


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Generic realization (a, b, c, d): dx = a x + b w, y = c x + d w."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        a, b, c, d = (_frozen(getattr(self, k), k) for k in "abcd")
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch(f"a must be square, got {a.shape}")
        if b.shape[0] != n or c.shape[1] != n:
            raise DimensionMismatch(f"b {b.shape} / c {c.shape} do not conform to a {a.shape}")
        if d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatch(f"d has shape {d.shape}, expected {(c.shape[0], b.shape[1])}")
        for k, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, k, v)

    @property
    def n(self):
        return self.a.shape[0]

    def freqresp(self, omega: float) -> np.ndarray:
        """Transfer matrix c (i omega I - a)^{-1} b + d."""
        res = np.linalg.solve(1j * omega * np.eye(self.n) - self.a, self.b)
        return self.c @ res + self.d


def validate_system(a, b, sym_tol: float = SYM_TOL, stab_margin: float = STAB_MARGIN) -> LtiSystem:
    """Check the standing assumptions (symmetric, Hurwitz) and return a plant.

    Asymmetry up to ``sym_tol * ||a||`` is removed by symmetrizing; anything
    larger raises :class:`NotSymmetric`.
    """
    if sym_tol <= 0 or stab_margin <= 0:
        raise ValueError("tolerances must be positive")
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"a must be square, got {a.shape}")
    if b.ndim != 2 or b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"b has shape {b.shape}, needs {a.shape[0]} rows")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ParseError("system matrices contain non-finite entries")

    asym = np.max(np.abs(a - a.T), initial=0.0)
    if asym > sym_tol * np.linalg.norm(a, 2):
        raise NotSymmetric(f"max |a - a^T| = {asym:.3g} exceeds tolerance")
    # general eigensolver: a is not yet known to be exactly symmetric
    worst = np.max(np.linalg.eigvals(a).real, initial=-np.inf)
    if worst > -stab_margin:
        raise NotHurwitz(f"eigenvalue with real part {worst:.6g} > -{stab_margin:g}")
    return LtiSystem((a + a.T) / 2, b)


def is_incidence_matrix(b) -> bool:
    """True iff each column holds exactly one +1, one -1 and zeros elsewhere."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] < 2 or b.shape[1] == 0:
        return False
    for col in b.T:
        if np.count_nonzero(col == 1.0) != 1 or np.count_nonzero(col == -1.0) != 1:
            return False
        if np.count_nonzero(col) != 2:
            return False
    return True


# --- file I/O ---------------------------------------------------------------

def _fmt_matrix(m) -> str:
    rows = ["[" + ", ".join(format(float(v) + 0.0, ".17g") for v in row) + "]" for row in np.asarray(m)]
    return "[" + ", ".join(rows) + "]"


def dumps_matrices(fields: dict) -> str:
    """Serialize named matrices as JSON with 17 significant digits."""
    body = ",\n".join(f'  "{k}": {_fmt_matrix(v)}' for k, v in fields.items())
    return "{\n" + body + "\n}\n"


def _read_json(path) -> dict:
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise ParseError(f"{path}: empty file")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top-level value must be an object")
    return obj


def matrix_field(obj: dict, key: str, source="<input>") -> np.ndarray:
    if key not in obj:
        raise ParseError(f"{source}: missing field '{key}'")
    raw = obj[key]
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise ParseError(f"{source}: field '{key}' must be a list of rows")
    widths = {len(r) for r in raw}
    if len(widths) > 1:
        raise ParseError(f"{source}: field '{key}' has ragged rows")
    for i, row in enumerate(raw):
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{source}: field '{key}'[{i}][{j}] is not a number")
    arr = np.array(raw, dtype=float)
    if arr.ndim != 2:
        arr = arr.reshape(len(raw), 0)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{source}: field '{key}' has non-finite entries")
    return arr


def save_system(sys: LtiSystem, path):
    Path(path).write_text(dumps_matrices({"a": sys.a, "b": sys.b}))


def load_system(path, sym_tol: float = SYM_TOL, stab_margin: float = STAB_MARGIN) -> LtiSystem:
    obj = _read_json(path)
    return validate_system(
        matrix_field(obj, "a", path), matrix_field(obj, "b", path), sym_tol, stab_margin
    )


def save_gain(gain: GainMatrix, path):
    Path(path).write_text(dumps_matrices({"l": gain.l}))


def load_gain(path) -> GainMatrix:
    return GainMatrix(matrix_field(_read_json(path), "l", path))


def save_statespace(ss: StateSpace, path):
    Path(path).write_text(dumps_matrices({"a": ss.a, "b": ss.b, "c": ss.c, "d": ss.d}))


def load_statespace(path) -> StateSpace:
    obj = _read_json(path)
    return StateSpace(*(matrix_field(obj, k, path) for k in "abcd"))


def save_weights(w: CostWeights, path):
    Path(path).write_text(dumps_matrices({"q": w.q, "r": w.r}))


def load_weights(path) -> CostWeights:
    obj = _read_json(path)
    return CostWeights(matrix_field(obj, "q", path), matrix_field(obj, "r", path))


def load_json(path) -> dict:
    return _read_json(path)
