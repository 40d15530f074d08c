"""Words, cylinders, and finite-resolution attractor approximation.

A word is a plain tuple of symbols in 1..kappa; the empty tuple is the
identity cylinder.  The anchor point of a cylinder is the image of the
fixed point of map 1, which always lies inside the attractor.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BadSymbolError, BudgetError, NotContractiveError, budget_limit
from .linalg2 import (
    AffineMap2,
    SingularData,
    alpha1_of_stack,
    compose,
    singular_data,
)

Word = tuple[int, ...]


@dataclass(frozen=True)
class IFS:
    """An ordered tuple of contractive invertible affine maps."""

    maps: tuple[AffineMap2, ...]

    def __post_init__(self) -> None:
        if len(self.maps) < 1:
            raise ValueError("IFS needs at least one map")
        for k, f in enumerate(self.maps):
            sd = singular_data(f.linear)
            if sd.alpha1 >= 1.0:
                raise NotContractiveError(
                    f"map {k + 1} has alpha1 = {sd.alpha1:.6g} >= 1"
                )

    @property
    def kappa(self) -> int:
        return len(self.maps)

    def linear_stack(self) -> np.ndarray:
        return np.stack([f.linear.as_array() for f in self.maps])

    def translation_stack(self) -> np.ndarray:
        return np.stack([np.asarray(f.translation, dtype=float) for f in self.maps])

    def anchor_point(self) -> np.ndarray:
        """Fixed point of map 1; a point of the attractor."""
        return self.maps[0].fixed_point()

    def diameter_bound(self) -> float:
        """Upper bound for diam(E) via the invariant ball around map 1's fixed point.

        With x0 any point and D0 = max_i |phi_i(x0) - x0|, the ball
        B(x0, D0 / (1 - s)) maps into itself, so it contains the attractor.
        """
        x0 = self.anchor_point()
        s = max(singular_data(f.linear).alpha1 for f in self.maps)
        d0 = max(float(np.hypot(*(f(x0) - x0))) for f in self.maps)
        return 2.0 * d0 / (1.0 - s) if d0 > 0 else 0.0


@dataclass(frozen=True)
class Cylinder:
    """A finite word together with its composed map and singular data.

    ``det`` is the exact product of the factor determinants; it feeds the
    alpha2 computation, which would otherwise cancel catastrophically for
    long dominated words.
    """

    word: Word
    map: AffineMap2
    sdata: SingularData
    det: float = 1.0

    @property
    def alpha1(self) -> float:
        return self.sdata.alpha1

    @property
    def alpha2(self) -> float:
        return self.sdata.alpha2


@dataclass(frozen=True)
class PointCloud:
    """Finite point set approximating a planar set at a stated resolution."""

    points: np.ndarray
    resolution: float

    def __post_init__(self) -> None:
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def common_prefix_length(a: Word, b: Word) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def word_distance(a: Word, b: Word) -> float:
    """2^-(length of the longest common prefix); 0 for equal words."""
    if a == b:
        return 0.0
    return 2.0 ** (-common_prefix_length(a, b))


def _check_word(ifs: IFS, word: Sequence[int]) -> Word:
    w = tuple(int(s) for s in word)
    for s in w:
        if not 1 <= s <= ifs.kappa:
            raise BadSymbolError(f"symbol {s} outside 1..{ifs.kappa}")
    return w


def cylinder(ifs: IFS, word: Sequence[int]) -> Cylinder:
    """Compose phi_w = phi_{w1} o ... o phi_{wn} and attach singular data."""
    w = _check_word(ifs, word)
    f = AffineMap2.identity()
    det = 1.0
    for s in w:
        f = compose(f, ifs.maps[s - 1])
        det *= ifs.maps[s - 1].linear.det
    return Cylinder(w, f, singular_data(f.linear, det=det), det)


def child_cylinder(ifs: IFS, parent: Cylinder, symbol: int) -> Cylinder:
    """Extend a cylinder by one symbol on the right."""
    if not 1 <= symbol <= ifs.kappa:
        raise BadSymbolError(f"symbol {symbol} outside 1..{ifs.kappa}")
    f = compose(parent.map, ifs.maps[symbol - 1])
    det = parent.det * ifs.maps[symbol - 1].linear.det
    return Cylinder(parent.word + (symbol,), f, singular_data(f.linear, det=det), det)


def refine_cylinders(
    ifs: IFS,
    stop: Callable[[Cylinder], bool],
    budget: int | None = None,
) -> list[Cylinder]:
    """Minimal antichain of cylinders satisfying ``stop``.

    Expands the word tree largest-alpha1-first, so memory stays proportional
    to the antichain.  A word is emitted as soon as it satisfies ``stop``;
    no emitted word's proper prefix satisfies it.  Output is sorted
    lexicographically for determinism.
    """
    limit = budget_limit(budget)
    root = cylinder(ifs, ())
    out: list[Cylinder] = []
    heap: list[tuple[float, Word, Cylinder]] = [(-root.alpha1, root.word, root)]
    while heap:
        _, _, cyl = heapq.heappop(heap)
        if stop(cyl):
            out.append(cyl)
        else:
            for s in range(1, ifs.kappa + 1):
                child = child_cylinder(ifs, cyl, s)
                heapq.heappush(heap, (-child.alpha1, child.word, child))
        if len(out) + len(heap) > limit:
            raise BudgetError(
                f"antichain would exceed budget {limit}; coarsen the stop rule"
            )
    out.sort(key=lambda c: c.word)
    return out


def _refine_alpha1_arrays(
    ifs: IFS, stop_alpha1: float, budget: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized antichain at ``alpha1 <= stop_alpha1``.

    Returns the (n, 2, 2) linear parts and (n, 2) translations of the
    antichain cylinders, in level-by-level lexicographic order.  Semantics
    match refine_cylinders with the same stop rule.
    """
    lin = ifs.linear_stack()
    tr = ifs.translation_stack()
    kappa = ifs.kappa

    mats = np.eye(2)[None, :, :]
    trans = np.zeros((1, 2))
    done_mats: list[np.ndarray] = []
    done_trans: list[np.ndarray] = []
    total = 0
    while mats.shape[0] > 0:
        a1 = alpha1_of_stack(mats)
        done = a1 <= stop_alpha1
        if np.any(done):
            done_mats.append(mats[done])
            done_trans.append(trans[done])
            total += int(done.sum())
        active_m = mats[~done]
        active_t = trans[~done]
        n_active = active_m.shape[0]
        if n_active == 0:
            break
        if total + n_active * kappa > budget:
            raise BudgetError(
                f"refinement would exceed budget {budget}; increase delta"
            )
        # children of word w are w.1, ..., w.kappa in order
        mats = np.einsum("nij,kjl->nkil", active_m, lin).reshape(-1, 2, 2)
        trans = (
            np.einsum("nij,kj->nki", active_m, tr) + active_t[:, None, :]
        ).reshape(-1, 2)
    if not done_mats:
        return np.empty((0, 2, 2)), np.empty((0, 2))
    return np.concatenate(done_mats), np.concatenate(done_trans)


def attractor_cloud(ifs: IFS, delta: float, budget: int | None = None) -> PointCloud:
    """One anchor per cylinder of the ``alpha1 <= delta`` antichain.

    Every anchor lies in the attractor, and every attractor point is within
    alpha1 * diam(E) <= delta * diam(E) of some anchor.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    limit = budget_limit(budget)
    mats, trans = _refine_alpha1_arrays(ifs, float(delta), limit)
    p0 = ifs.anchor_point()
    pts = mats @ p0 + trans
    return PointCloud(pts, float(delta))


def symbolic_point(ifs: IFS, prefix: Sequence[int], depth: int) -> np.ndarray:
    """phi_w(p0) for w = prefix extended cyclically up to ``depth``.

    The result is within alpha1(w) * diam(E) of the coding-map image of the
    periodic word prefix^infinity.  An empty prefix pads with symbol 1.
    """
    w = _check_word(ifs, prefix)
    if depth < len(w):
        raise ValueError(f"depth {depth} shorter than prefix length {len(w)}")
    padded = cyclic_prefix(w if w else (1,), depth) if depth > 0 else ()
    cyl = cylinder(ifs, padded)
    return cyl.map(ifs.anchor_point())


def cyclic_prefix(stream: Sequence[int] | Iterable[int], n: int) -> Word:
    """First ``n`` symbols of a stream; finite sequences repeat cyclically."""
    if isinstance(stream, Sequence):
        if len(stream) == 0:
            raise ValueError("empty symbol stream")
        reps = -(-n // len(stream))
        return tuple(list(stream) * reps)[:n]
    out: list[int] = []
    it = iter(stream)
    for _ in range(n):
        try:
            out.append(int(next(it)))
        except StopIteration:
            from .errors import StreamExhaustedError

            raise StreamExhaustedError(f"stream ended before {n} symbols")
    return tuple(out)
