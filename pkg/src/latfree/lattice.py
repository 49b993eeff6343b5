"""Integer points, unimodular bases and the four-point parallelogram sets.

A unimodular set is the four lattice points ``z + U e`` for
``e in {0,1}^2`` where ``U`` is an integer matrix with ``|det U| = 1``.
Its convex hull is a parallelogram containing no further lattice points,
which is what makes the flip updates and the orthant decomposition work.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

from .errors import InvalidRelabel, NotUnimodular

IVec = Tuple[int, int]


def vadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def vsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def vneg(a):
    return (-a[0], -a[1])


def vmul(k, a):
    return (k * a[0], k * a[1])


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


@dataclass(frozen=True)
class UniMatrix:
    """2x2 integer matrix stored by columns, restricted to |det| = 1."""

    u1: IVec
    u2: IVec

    def __post_init__(self):
        object.__setattr__(self, "u1", (int(self.u1[0]), int(self.u1[1])))
        object.__setattr__(self, "u2", (int(self.u2[0]), int(self.u2[1])))
        if abs(self.det()) != 1:
            raise NotUnimodular(
                f"basis {self.u1}, {self.u2} has determinant {self.det()}"
            )

    def det(self) -> int:
        return self.u1[0] * self.u2[1] - self.u2[0] * self.u1[1]

    def inverse(self) -> "UniMatrix":
        """Integer inverse; exists exactly because |det| = 1."""
        d = self.det()
        return UniMatrix((self.u2[1] * d, -self.u1[1] * d),
                         (-self.u2[0] * d, self.u1[0] * d))

    def apply(self, r) -> IVec:
        return (self.u1[0] * r[0] + self.u2[0] * r[1],
                self.u1[1] * r[0] + self.u2[1] * r[1])

    def solve(self, w) -> IVec:
        """Return the integer coordinates r with U r = w."""
        d = self.det()
        return (d * (self.u2[1] * w[0] - self.u2[0] * w[1]),
                d * (self.u1[0] * w[1] - self.u1[1] * w[0]))


IDENTITY = UniMatrix((1, 0), (0, 1))


@dataclass(frozen=True)
class UnimodularSet:
    """Anchor ``z`` plus basis ``U``: the points z, z+u1, z+u2, z+u1+u2."""

    anchor: IVec
    basis: UniMatrix

    def __post_init__(self):
        object.__setattr__(self, "anchor", (int(self.anchor[0]), int(self.anchor[1])))

    @property
    def u1(self) -> IVec:
        return self.basis.u1

    @property
    def u2(self) -> IVec:
        return self.basis.u2

    def members(self) -> Tuple[IVec, IVec, IVec, IVec]:
        """The four points in canonical order: z, z+u1, z+u2, z+u1+u2."""
        z, u1, u2 = self.anchor, self.basis.u1, self.basis.u2
        return (z, vadd(z, u1), vadd(z, u2), vadd(vadd(z, u1), u2))

    def member_set(self) -> frozenset:
        return frozenset(self.members())

    def coordinates_of(self, x) -> IVec:
        """Integer coordinates r with x = z + U r."""
        return self.basis.solve(vsub(x, self.anchor))

    def orthant_of(self, x) -> IVec:
        """The unique member whose orthant contains the lattice point x.

        In basis coordinates r = U^-1 (x - z), component r_i <= 0 selects
        the low corner and r_i >= 1 the high corner; for integer points
        exactly one of the two holds per component.
        """
        r = self.coordinates_of(x)
        members = self.members()
        index = (1 if r[0] >= 1 else 0) + (2 if r[1] >= 1 else 0)
        return members[index]

    def r_metric(self, x) -> int:
        """min over members w of ||U^-1 (x - w)||_1; zero iff x is a member."""
        r = self.coordinates_of(x)
        return sum(-ri if ri <= 0 else ri - 1 for ri in r)

    def relabel(self, anchor_index: int, negate1: bool, negate2: bool,
                swap: bool) -> "UnimodularSet":
        """Re-express the same four points with a different labeling.

        The new anchor is ``members()[anchor_index]``; the basis columns
        are optionally swapped and then sign-flipped.  Raises
        :class:`InvalidRelabel` if the result would not have the same
        member set.
        """
        v1, v2 = (self.u2, self.u1) if swap else (self.u1, self.u2)
        if negate1:
            v1 = vneg(v1)
        if negate2:
            v2 = vneg(v2)
        candidate = UnimodularSet(self.members()[anchor_index], UniMatrix(v1, v2))
        if candidate.member_set() != self.member_set():
            raise InvalidRelabel(
                f"relabel(anchor_index={anchor_index}, negate1={negate1}, "
                f"negate2={negate2}, swap={swap}) changes the member set"
            )
        return candidate

    def labelings(self) -> Iterator["UnimodularSet"]:
        """All labelings with the same member set, identity first.

        The enumeration order is fixed so that relabeling searches are
        deterministic and idempotent.
        """
        for anchor_index in range(4):
            for swap in (False, True):
                for negate1 in (False, True):
                    for negate2 in (False, True):
                        try:
                            yield self.relabel(anchor_index, negate1, negate2, swap)
                        except InvalidRelabel:
                            continue

    def to_json(self) -> dict:
        return {"z": list(self.anchor),
                "U": [list(self.basis.u1), list(self.basis.u2)]}

    @classmethod
    def from_json(cls, data: dict) -> "UnimodularSet":
        u1, u2 = data["U"]
        return cls(tuple(data["z"]), UniMatrix(tuple(u1), tuple(u2)))


def bounding_box(points: Sequence[IVec]) -> Tuple[IVec, IVec]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys)), (max(xs), max(ys))
