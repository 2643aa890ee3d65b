"""Generalized Butcher tableaus for additively partitioned Runge-Kutta methods.

A tableau couples N component methods through an N-by-N grid of coefficient
blocks ``A[q][m]`` (shape ``s_q x s_m``) and per-component weight vectors
``b[q]``. Abscissae are always derived as block row sums and never stored, so
a tableau cannot carry inconsistent ``c`` values.

Component indices are 0-based throughout. For the two-component IMEX builders
the convention is: component 0 explicit, component 1 implicit, so the stiff
part sits last.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = [
    "GarkTableau",
    "StructureFlags",
    "abscissae",
    "check_internal_consistency",
    "check_stiff_accuracy",
    "component_is_explicit",
    "component_is_diagonally_implicit",
    "build_classical_imex",
    "build_transposed_imex",
    "structure_flags",
    "tableau_to_json",
    "tableau_from_json",
    "save_tableau",
    "load_tableau",
]


def _frozen_matrix(a, rows: int, cols: int, label: str) -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.shape != (rows, cols):
        raise ValueError(f"{label} must have shape ({rows}, {cols}), got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{label} contains non-finite entries")
    m.flags.writeable = False
    return m


def _frozen_vector(v, length: int, label: str) -> np.ndarray:
    w = np.array(v, dtype=float)
    if w.shape != (length,):
        raise ValueError(f"{label} must have shape ({length},), got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError(f"{label} contains non-finite entries")
    w.flags.writeable = False
    return w


@dataclass(frozen=True, eq=False)
class GarkTableau:
    """N-component generalized Butcher tableau.

    Attributes:
        name: identifier string.
        a_blocks: N x N grid of coefficient matrices; block (q, m) has shape
            (stage_counts[q], stage_counts[m]).
        b_weights: per-component weight vectors, entry q of length
            stage_counts[q].
        metadata: free-form parameter record (e.g. values of free parameters
            the tableau was instantiated with).

    Instances are immutable: all arrays are copied on construction and marked
    read-only, so tableaus are safe to share across threads.
    """

    name: str
    a_blocks: tuple[tuple[np.ndarray, ...], ...]
    b_weights: tuple[np.ndarray, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = tuple(np.array(b, dtype=float) for b in self.b_weights)
        if not weights:
            raise ValueError("tableau needs at least one component")
        counts = tuple(w.shape[0] if w.ndim == 1 else -1 for w in weights)
        if any(c < 1 for c in counts):
            raise ValueError("each weight vector must be a 1-D array with >= 1 entry")
        n = len(weights)
        if len(self.a_blocks) != n or any(len(row) != n for row in self.a_blocks):
            raise ValueError(f"a_blocks must be an {n}x{n} grid to match b_weights")
        blocks = tuple(
            tuple(
                _frozen_matrix(self.a_blocks[q][m], counts[q], counts[m], f"A[{q}][{m}]")
                for m in range(n)
            )
            for q in range(n)
        )
        frozen_weights = tuple(
            _frozen_vector(weights[q], counts[q], f"b[{q}]") for q in range(n)
        )
        object.__setattr__(self, "a_blocks", blocks)
        object.__setattr__(self, "b_weights", frozen_weights)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n_components(self) -> int:
        return len(self.b_weights)

    @property
    def stage_counts(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.b_weights)

    def block(self, q: int, m: int) -> np.ndarray:
        self._check_component(q)
        self._check_component(m)
        return self.a_blocks[q][m]

    def weights(self, q: int) -> np.ndarray:
        self._check_component(q)
        return self.b_weights[q]

    def _check_component(self, q: int) -> None:
        if not 0 <= q < self.n_components:
            raise IndexError(
                f"component index {q} out of range for N={self.n_components}"
            )

    def __eq__(self, other: object) -> bool:
        """Bit-exact coefficient equality (name and metadata ignored)."""
        if not isinstance(other, GarkTableau):
            return NotImplemented
        if self.stage_counts != other.stage_counts:
            return False
        if any(
            not np.array_equal(self.b_weights[q], other.b_weights[q])
            for q in range(self.n_components)
        ):
            return False
        return all(
            np.array_equal(self.a_blocks[q][m], other.a_blocks[q][m])
            for q in range(self.n_components)
            for m in range(self.n_components)
        )

    def __hash__(self) -> int:  # frozen dataclass with custom __eq__
        return object.__hash__(self)

    def __repr__(self) -> str:
        return (
            f"GarkTableau(name={self.name!r}, N={self.n_components}, "
            f"stages={self.stage_counts})"
        )


def abscissae(t: GarkTableau, q: int, m: int) -> np.ndarray:
    """Abscissae c^(q,m): exact row sums of block (q, m)."""
    return t.block(q, m).sum(axis=1)


def check_internal_consistency(t: GarkTableau, tol: float = 1e-10) -> tuple[bool, float]:
    """Check that all per-component row sums of each stage agree.

    Returns (consistent, max_discrepancy) where the discrepancy is the largest
    spread, over all stages, between the row sums taken against different
    components.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    worst = 0.0
    for q in range(t.n_components):
        sums = np.stack([abscissae(t, q, m) for m in range(t.n_components)])
        spread = float((sums.max(axis=0) - sums.min(axis=0)).max())
        worst = max(worst, spread)
    return worst <= tol, worst


def check_stiff_accuracy(t: GarkTableau, q: int, tol: float = 1e-10) -> bool:
    """True iff the last row of every block A[q][m] equals b[m] within tol."""
    t._check_component(q)
    return all(
        float(np.abs(t.a_blocks[q][m][-1, :] - t.b_weights[m]).max()) <= tol
        for m in range(t.n_components)
    )


def component_is_explicit(t: GarkTableau, q: int) -> bool:
    """A[q][q] strictly lower triangular."""
    a = t.block(q, q)
    return bool(np.all(np.triu(a) == 0.0))


def component_is_diagonally_implicit(t: GarkTableau, q: int) -> bool:
    """A[q][q] lower triangular with at least one nonzero diagonal entry."""
    a = t.block(q, q)
    return bool(np.all(np.triu(a, 1) == 0.0) and np.any(np.diag(a) != 0.0))


@dataclass(frozen=True)
class StructureFlags:
    """Structural predicates of a tableau, computed at one tolerance."""

    internally_consistent: bool
    max_row_sum_discrepancy: float
    stiffly_accurate_wrt: tuple[int, ...]
    diagonally_implicit: tuple[bool, ...]
    explicit: tuple[bool, ...]
    schedulable: bool
    tol: float


def structure_flags(t: GarkTableau, tol: float = 1e-10) -> StructureFlags:
    from .integrator import CyclicDependencyError, schedule_stages

    consistent, disc = check_internal_consistency(t, tol)
    try:
        schedule_stages(t)
        schedulable = True
    except CyclicDependencyError:
        schedulable = False
    return StructureFlags(
        internally_consistent=consistent,
        max_row_sum_discrepancy=disc,
        stiffly_accurate_wrt=tuple(
            q for q in range(t.n_components) if check_stiff_accuracy(t, q, tol)
        ),
        diagonally_implicit=tuple(
            component_is_diagonally_implicit(t, q) for q in range(t.n_components)
        ),
        explicit=tuple(component_is_explicit(t, q) for q in range(t.n_components)),
        schedulable=schedulable,
        tol=tol,
    )


def _as_square(a, label: str) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{label} must be square")
    return m


def _check_imex_inputs(a_explicit, b_explicit, a_implicit, b_implicit):
    ae = _as_square(a_explicit, "explicit coefficient matrix")
    ai = _as_square(a_implicit, "implicit coefficient matrix")
    be = np.asarray(b_explicit, dtype=float)
    bi = np.asarray(b_implicit, dtype=float)
    if ae.shape != ai.shape:
        raise ValueError("explicit and implicit methods must have equal stage counts")
    s = ae.shape[0]
    if be.shape != (s,) or bi.shape != (s,):
        raise ValueError("weight lengths must match the stage count")
    if np.any(np.triu(ae) != 0.0):
        raise ValueError("explicit coefficient matrix must be strictly lower triangular")
    if np.any(np.triu(ai, 1) != 0.0):
        raise ValueError("implicit coefficient matrix must be lower triangular")
    return ae, be, ai, bi


def build_classical_imex(a_explicit, b_explicit, a_implicit, b_implicit,
                         name: str = "classical-imex") -> GarkTableau:
    """Embed a classical IMEX pair: both rows sample the same stage values.

    Component 0 is the explicit method, component 1 the implicit one. Block
    assignment: A[0][0] = A[1][0] = A_explicit, A[0][1] = A[1][1] = A_implicit.
    """
    ae, be, ai, bi = _check_imex_inputs(a_explicit, b_explicit, a_implicit, b_implicit)
    return GarkTableau(name=name, a_blocks=((ae, ai), (ae, ai)), b_weights=(be, bi))


def build_transposed_imex(a_explicit, b_explicit, a_implicit, b_implicit,
                          name: str = "transposed-imex") -> GarkTableau:
    """Embed an IMEX pair with the transposed block assignment.

    Component 0 is the explicit method, component 1 the implicit one. Block
    assignment: A[0][0] = A[0][1] = A_explicit, A[1][0] = A[1][1] = A_implicit,
    which makes the scheme internally consistent by construction.
    """
    ae, be, ai, bi = _check_imex_inputs(a_explicit, b_explicit, a_implicit, b_implicit)
    return GarkTableau(name=name, a_blocks=((ae, ae), (ai, ai)), b_weights=(be, bi))


# --- JSON interchange -------------------------------------------------------
#
# Numbers are serialized as decimal strings (shortest round-trip repr), so a
# save/load cycle reproduces coefficients bit-exactly.


def _matrix_to_strings(m: np.ndarray) -> list[list[str]]:
    return [[repr(float(x)) for x in row] for row in m]


def tableau_to_json(t: GarkTableau, indent: int | None = 2) -> str:
    n = t.n_components
    doc = {
        "name": t.name,
        "components": n,
        "stages": list(t.stage_counts),
        "A": [[_matrix_to_strings(t.a_blocks[q][m]) for m in range(n)] for q in range(n)],
        "b": [[repr(float(x)) for x in t.b_weights[q]] for q in range(n)],
        "metadata": t.metadata,
    }
    return json.dumps(doc, indent=indent, sort_keys=True)


def tableau_from_json(text: str) -> GarkTableau:
    doc = json.loads(text)
    try:
        n = int(doc["components"])
        stages = [int(s) for s in doc["stages"]]
        a_raw = doc["A"]
        b_raw = doc["b"]
        name = str(doc["name"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed tableau document: {exc}") from exc
    if len(stages) != n or len(a_raw) != n or len(b_raw) != n:
        raise ValueError("tableau document has inconsistent component counts")
    blocks = tuple(
        tuple(
            np.array([[float(x) for x in row] for row in a_raw[q][m]], dtype=float)
            for m in range(n)
        )
        for q in range(n)
    )
    weights = tuple(np.array([float(x) for x in b_raw[q]], dtype=float) for q in range(n))
    return GarkTableau(
        name=name,
        a_blocks=blocks,
        b_weights=weights,
        metadata=dict(doc.get("metadata", {})),
    )


def save_tableau(t: GarkTableau, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tableau_to_json(t))
        fh.write("\n")


def load_tableau(path) -> GarkTableau:
    with open(path, "r", encoding="utf-8") as fh:
        return tableau_from_json(fh.read())
