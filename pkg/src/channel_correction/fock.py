"""Truncated multimode Fock space.

States live on a basis of occupation vectors whose total photon number is at
most ``n_max``. Pure states are stored sparsely (occupation tuple -> amplitude),
density operators densely over the enumerated basis. Every operation returns a
new value; nothing is mutated in place.

Basis ordering: grouped by total photon number, lexicographic (ascending)
within a group. For two modes and ``n_max=2`` this is::

    (0,0) (0,1) (1,0) (0,2) (1,1) (2,0)
"""

from __future__ import annotations

import warnings
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import factorial, sqrt

import numpy as np

DEFAULT_NMAX = 4
PRUNE = 1e-14
ATOL = 1e-10

Occupation = tuple[int, ...]


class TruncationWarning(UserWarning):
    """Raised when terms above the photon-number cap are discarded."""


# ----------------------------------------------------------------------------
# basis
# ----------------------------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def fock_basis(n_modes: int, n_max: int) -> tuple[Occupation, ...]:
    """All occupation vectors of ``n_modes`` modes with total <= ``n_max``."""
    out: list[Occupation] = []
    for total in range(n_max + 1):
        out.extend(_compositions(total, n_modes))
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(n_modes: int, n_max: int) -> dict[Occupation, int]:
    return {occ: i for i, occ in enumerate(fock_basis(n_modes, n_max))}


@dataclass(frozen=True)
class ModeRegister:
    """Ordered, immutable set of mode labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate mode labels in {labels}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label) -> bool:
        return label in self.index

    def positions(self, labels: Iterable[str]) -> tuple[int, ...]:
        try:
            return tuple(self.index[lab] for lab in labels)
        except KeyError as exc:
            raise KeyError(f"unknown mode {exc.args[0]!r}; register has {self.labels}") from None

    def concat(self, other: ModeRegister) -> ModeRegister:
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise ValueError(f"mode labels collide: {sorted(clash)}")
        return ModeRegister(self.labels + other.labels)


def as_register(modes) -> ModeRegister:
    if isinstance(modes, ModeRegister):
        return modes
    if isinstance(modes, str):
        return ModeRegister((modes,))
    return ModeRegister(tuple(modes))


# ----------------------------------------------------------------------------
# states
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureState:
    """Sparse ket over a truncated Fock basis."""

    register: ModeRegister
    amplitudes: Mapping[Occupation, complex]
    n_max: int = DEFAULT_NMAX

    def __post_init__(self):
        register = as_register(self.register)
        object.__setattr__(self, "register", register)
        m = len(register)
        clean: dict[Occupation, complex] = {}
        for occ, amp in self.amplitudes.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != m:
                raise ValueError(f"occupation {occ} does not match {m} modes")
            if min(occ, default=0) < 0:
                raise ValueError(f"negative occupation {occ}")
            if sum(occ) > self.n_max:
                raise ValueError(f"occupation {occ} exceeds n_max={self.n_max}")
            if abs(amp) >= PRUNE:
                clean[occ] = complex(amp)
        object.__setattr__(self, "amplitudes", clean)

    @classmethod
    def fock(cls, modes, occupations: Sequence[int], n_max: int = DEFAULT_NMAX) -> PureState:
        return cls(as_register(modes), {tuple(occupations): 1.0}, n_max)

    @classmethod
    def vacuum(cls, modes, n_max: int = DEFAULT_NMAX) -> PureState:
        register = as_register(modes)
        return cls(register, {(0,) * len(register): 1.0}, n_max)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.register.labels

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return self.amplitudes.get(tuple(occupations), 0j)

    def norm(self) -> float:
        return sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalized(self) -> PureState:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return PureState(self.register, {k: v / n for k, v in self.amplitudes.items()}, self.n_max)

    def to_vector(self) -> np.ndarray:
        idx = basis_index(len(self.register), self.n_max)
        vec = np.zeros(len(idx), dtype=complex)
        for occ, amp in self.amplitudes.items():
            vec[idx[occ]] = amp
        return vec

    def to_density(self) -> DensityOperator:
        vec = self.to_vector()
        return DensityOperator(self.register, np.outer(vec, vec.conj()), self.n_max)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Dense (possibly sub-normalized) density matrix over the truncated basis.

    After heralding the trace is the probability of the heralded event, so
    ``trace_weight`` doubles as the bookkeeping for success probabilities.
    """

    register: ModeRegister
    matrix: np.ndarray
    n_max: int = DEFAULT_NMAX

    def __post_init__(self):
        object.__setattr__(self, "register", as_register(self.register))
        mat = np.asarray(self.matrix, dtype=complex)
        dim = len(self.basis)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match basis dimension {dim}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def vacuum(cls, modes, n_max: int = DEFAULT_NMAX) -> DensityOperator:
        return PureState.vacuum(modes, n_max).to_density()

    @property
    def labels(self) -> tuple[str, ...]:
        return self.register.labels

    @property
    def basis(self) -> tuple[Occupation, ...]:
        return fock_basis(len(self.register), self.n_max)

    @property
    def trace_weight(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def normalized(self) -> DensityOperator:
        tr = self.trace_weight
        if tr <= 0:
            raise ZeroDivisionError("density operator has zero trace")
        return DensityOperator(self.register, self.matrix / tr, self.n_max)

    def element(self, ket: Sequence[int], bra: Sequence[int]) -> complex:
        idx = basis_index(len(self.register), self.n_max)
        return complex(self.matrix[idx[tuple(ket)], idx[tuple(bra)]])

    def purity(self) -> float:
        rho = self.normalized().matrix
        return float(np.real(np.trace(rho @ rho)))

    def check(self, atol: float = ATOL, eig_tol: float = 1e-9) -> None:
        """Raise ``ValueError`` unless Hermitian and positive semidefinite."""
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=atol, rtol=0):
            raise ValueError("density operator is not Hermitian")
        lo = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min()
        if lo < -eig_tol:
            raise ValueError(f"density operator has negative eigenvalue {lo:.3g}")


State = PureState | DensityOperator


# ----------------------------------------------------------------------------
# operators
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """Passive linear-optical transformation of creation operators.

    Column ``i`` of ``matrix`` is the image of the creation operator of
    ``modes[i]``: ``a_i^dag -> sum_j matrix[j, i] a_j^dag``. Photon number is
    conserved, so the induced Fock-space map never leaves the truncation.
    """

    modes: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        if len(set(modes)) != len(modes):
            raise ValueError(f"repeated mode in {modes}")
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (len(modes), len(modes)):
            raise ValueError(f"matrix shape {mat.shape} does not match {len(modes)} modes")
        if not np.allclose(mat.conj().T @ mat, np.eye(len(modes)), atol=ATOL, rtol=0):
            raise ValueError("mode transformation is not unitary")
        object.__setattr__(self, "matrix", mat)

    def dagger(self) -> ModeUnitary:
        return ModeUnitary(self.modes, self.matrix.conj().T)

    def expand(self, occupations: Occupation) -> dict[Occupation, complex]:
        """Fock-space image of the basis vector with these occupations of ``modes``."""
        k = len(self.modes)
        poly: dict[Occupation, complex] = {(0,) * k: 1.0 + 0j}
        for i, n in enumerate(occupations):
            column = self.matrix[:, i]
            targets = [(j, column[j]) for j in range(k) if column[j] != 0]
            for _ in range(n):
                nxt: dict[Occupation, complex] = {}
                for mono, c in poly.items():
                    for j, u in targets:
                        m = mono[:j] + (mono[j] + 1,) + mono[j + 1 :]
                        nxt[m] = nxt.get(m, 0j) + c * u
                poly = nxt
        in_norm = 1.0
        for n in occupations:
            in_norm *= sqrt(factorial(n))
        out = {}
        for mono, c in poly.items():
            scale = 1.0
            for n in mono:
                scale *= sqrt(factorial(n))
            amp = c * scale / in_norm
            if abs(amp) >= PRUNE:
                out[mono] = amp
        return out

    def fock_matrix(self, n_max: int) -> np.ndarray:
        """Dense Fock-space matrix on the ``len(modes)``-mode truncated basis."""
        basis = fock_basis(len(self.modes), n_max)
        idx = basis_index(len(self.modes), n_max)
        mat = np.zeros((len(basis), len(basis)), dtype=complex)
        for col, occ in enumerate(basis):
            for out, amp in self.expand(occ).items():
                mat[idx[out], col] = amp
        return mat


@dataclass(frozen=True, eq=False)
class PovmElement:
    """Number-diagonal effect on a group of modes.

    ``response(n)`` is the probability of this outcome given ``n`` photons in
    total across ``modes``; detectors that cannot tell the modes apart (e.g.
    matched and unmatched internal sub-modes) are represented this way.
    """

    modes: tuple[str, ...]
    response: Callable[[int], float]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    def weight(self, n: int) -> float:
        w = float(self.response(n))
        if not (-ATOL <= w <= 1 + ATOL):
            raise ValueError(f"invalid POVM element {self.name!r}: response({n}) = {w}")
        return min(max(w, 0.0), 1.0)


# ----------------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------------


def _n_max_of(a: State, b: State, n_max: int | None) -> int:
    return max(a.n_max, b.n_max) if n_max is None else n_max


def tensor(a: State, b: State, n_max: int | None = None) -> State:
    """Joint state on the concatenated register.

    Basis pairs whose total exceeds ``n_max`` (default: the larger of the two
    inputs' caps) are dropped; a ``TruncationWarning`` is emitted if any of
    them carried weight.
    """
    if type(a) is not type(b):
        raise TypeError("tensor needs two states of the same kind")
    register = a.register.concat(b.register)
    cap = _n_max_of(a, b, n_max)
    if isinstance(a, PureState):
        terms: dict[Occupation, complex] = {}
        dropped = 0.0
        for oa, ca in a.amplitudes.items():
            for ob, cb in b.amplitudes.items():
                amp = ca * cb
                if sum(oa) + sum(ob) > cap:
                    dropped += abs(amp) ** 2
                    continue
                terms[oa + ob] = amp
        if dropped > PRUNE:
            warnings.warn(f"tensor dropped weight {dropped:.3g} above n_max={cap}", TruncationWarning, stacklevel=2)
        return PureState(register, terms, cap)

    basis_a, basis_b = a.basis, b.basis
    joint = basis_index(len(register), cap)
    ia, ib, ij = [], [], []
    dropped = 0.0
    diag_a, diag_b = np.real(np.diag(a.matrix)), np.real(np.diag(b.matrix))
    for i, oa in enumerate(basis_a):
        for j, ob in enumerate(basis_b):
            if sum(oa) + sum(ob) > cap:
                dropped += diag_a[i] * diag_b[j]
                continue
            ia.append(i)
            ib.append(j)
            ij.append(joint[oa + ob])
    ia, ib, ij = np.array(ia), np.array(ib), np.array(ij)
    mat = np.zeros((len(joint), len(joint)), dtype=complex)
    mat[np.ix_(ij, ij)] = a.matrix[np.ix_(ia, ia)] * b.matrix[np.ix_(ib, ib)]
    if dropped > PRUNE:
        warnings.warn(f"tensor dropped weight {dropped:.3g} above n_max={cap}", TruncationWarning, stacklevel=2)
    return DensityOperator(register, mat, cap)


def with_vacuum(state: State, modes: Sequence[str]) -> State:
    """Append empty modes to a state."""
    if isinstance(modes, str):
        modes = (modes,)
    if isinstance(state, PureState):
        return tensor(state, PureState.vacuum(modes, state.n_max), state.n_max)
    return tensor(state, DensityOperator.vacuum(modes, state.n_max), state.n_max)


def _split_positions(register: ModeRegister, keep: Iterable[str]):
    keep = set(keep)
    unknown = keep - set(register.labels)
    if unknown:
        raise KeyError(f"unknown modes {sorted(unknown)}; register has {register.labels}")
    kept = tuple(i for i, lab in enumerate(register.labels) if lab in keep)
    traced = tuple(i for i, lab in enumerate(register.labels) if lab not in keep)
    return kept, traced


def partial_trace(rho: State, keep: Iterable[str]) -> DensityOperator:
    """Reduce onto the modes in ``keep`` (register order is preserved)."""
    if isinstance(rho, PureState):
        rho = rho.to_density()
    kept, traced = _split_positions(rho.register, keep)
    new_register = ModeRegister(tuple(rho.register.labels[i] for i in kept))
    if not traced:
        return rho
    kept_idx = basis_index(len(kept), rho.n_max)
    groups: dict[Occupation, tuple[list[int], list[int]]] = {}
    for i, occ in enumerate(rho.basis):
        key = tuple(occ[t] for t in traced)
        full, red = groups.setdefault(key, ([], []))
        full.append(i)
        red.append(kept_idx[tuple(occ[k] for k in kept)])
    out = np.zeros((len(kept_idx), len(kept_idx)), dtype=complex)
    for full, red in groups.values():
        out[np.ix_(red, red)] += rho.matrix[np.ix_(full, full)]
    return DensityOperator(new_register, out, rho.n_max)


def apply_unitary(state: State, u: ModeUnitary) -> State:
    """Apply a passive mode transformation to the listed modes of ``state``."""
    pos = state.register.positions(u.modes)
    if isinstance(state, PureState):
        cache: dict[Occupation, dict[Occupation, complex]] = {}
        out: dict[Occupation, complex] = {}
        for occ, amp in state.amplitudes.items():
            sub = tuple(occ[p] for p in pos)
            image = cache.get(sub)
            if image is None:
                image = cache[sub] = u.expand(sub)
            base = list(occ)
            for sub_out, c in image.items():
                for p, n in zip(pos, sub_out):
                    base[p] = n
                key = tuple(base)
                out[key] = out.get(key, 0j) + amp * c
        return PureState(state.register, out, state.n_max)

    basis = state.basis
    idx = basis_index(len(state.register), state.n_max)
    cache = {}
    w = np.zeros((len(basis), len(basis)), dtype=complex)
    for col, occ in enumerate(basis):
        sub = tuple(occ[p] for p in pos)
        image = cache.get(sub)
        if image is None:
            image = cache[sub] = u.expand(sub)
        base = list(occ)
        for sub_out, c in image.items():
            for p, n in zip(pos, sub_out):
                base[p] = n
            w[idx[tuple(base)], col] += c
    return DensityOperator(state.register, w @ state.matrix @ w.conj().T, state.n_max)


def effect_weights(state: State, elements: Sequence[PovmElement]) -> np.ndarray:
    """Diagonal of the product of number-diagonal effects over ``state``'s basis."""
    basis = state.basis if isinstance(state, DensityOperator) else fock_basis(len(state.register), state.n_max)
    w = np.ones(len(basis))
    for e in elements:
        pos = state.register.positions(e.modes)
        table = [e.weight(n) for n in range(state.n_max + 1)]
        w *= np.array([table[sum(occ[p] for p in pos)] for occ in basis])
    return w


def project(rho: State, e: PovmElement) -> tuple[DensityOperator, float]:
    """Apply one POVM effect: returns ``(sqrt(e) rho sqrt(e), Tr(e rho))``.

    The returned operator is left sub-normalized; its trace equals the
    outcome probability.
    """
    if isinstance(rho, PureState):
        rho = rho.to_density()
    s = np.sqrt(effect_weights(rho, [e]))
    out = DensityOperator(rho.register, s[:, None] * rho.matrix * s[None, :], rho.n_max)
    return out, out.trace_weight
