"""Structured subvarieties of (P^1)^n: vertical pins x_i = zeta (type A) and
polynomial links x_j = g(x_i) (type B), with membership, periodicity checks,
the precedence relation and chain decomposition.

Only this structured presentation is supported; the machinery verifies a
given presentation rather than discovering one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .constants import COMMUTE_N_MAX
from .dynsys import as_polyds, commutes_with_iterate
from .polynomials import (
    UniPoly,
    clear_denominators,
    compose_left_divide,
    compose_right_divide,
    format_poly,
    parse_poly,
)
from .projective import (
    INFINITY,
    ProjPoint,
    apply_poly,
    format_point,
    is_infinity,
    parse_point,
)


class InconsistentVarietyError(ValueError):
    """The equation list is contradictory (or an unsupported shape)."""


class UnsupportedVarietyError(RuntimeError):
    """The operation needs a shape this structured form cannot express."""


@dataclass(frozen=True)
class VertA:
    axis: int          # 1-based
    zeta: ProjPoint


@dataclass(frozen=True)
class LinkB:
    src: int           # 1-based, src != dst
    dst: int
    g: UniPoly


Equation = Union[VertA, LinkB]


class StructuredVariety:
    def __init__(self, n: int, equations: list[Equation]):
        if n < 1:
            raise ValueError("ambient dimension must be >= 1")
        self.n = n
        self.equations = tuple(equations)
        self._validate()

    def _validate(self):
        pins: dict[int, ProjPoint] = {}
        for eq in self.equations:
            if isinstance(eq, VertA):
                if not 1 <= eq.axis <= self.n:
                    raise InconsistentVarietyError(f"axis {eq.axis} out of range")
                if eq.axis in pins and pins[eq.axis] != eq.zeta:
                    raise InconsistentVarietyError(
                        f"axis {eq.axis} pinned to two different values"
                    )
                pins[eq.axis] = eq.zeta
            else:
                if not (1 <= eq.src <= self.n and 1 <= eq.dst <= self.n):
                    raise InconsistentVarietyError("link axis out of range")
                if eq.src == eq.dst:
                    raise InconsistentVarietyError("link needs two distinct axes")
                if eq.g.is_constant():
                    raise InconsistentVarietyError("link polynomial must be nonconstant")
        links: dict[tuple[int, int], UniPoly] = {}
        for eq in self.equations:
            if isinstance(eq, LinkB):
                key = (eq.src, eq.dst)
                if key in links and links[key] != eq.g:
                    raise InconsistentVarietyError(
                        f"conflicting links on axes {key}"
                    )
                links[key] = eq.g
        # propagate pins through links; a contradiction means an empty variety
        changed = True
        while changed:
            changed = False
            for eq in self.equations:
                if isinstance(eq, LinkB) and eq.src in pins:
                    val = apply_poly(eq.g, pins[eq.src])
                    if eq.dst in pins:
                        if pins[eq.dst] != val:
                            raise InconsistentVarietyError(
                                f"axis {eq.dst} pinned inconsistently via link"
                            )
                    else:
                        pins[eq.dst] = val
                        changed = True
        self._derived_pins = pins

    @property
    def pinned_axes(self) -> dict[int, ProjPoint]:
        """I_V with values: declared pins plus those forced through links."""
        return dict(self._derived_pins)

    def vert_equations(self) -> list[VertA]:
        return [eq for eq in self.equations if isinstance(eq, VertA)]

    def link_equations(self) -> list[LinkB]:
        return [eq for eq in self.equations if isinstance(eq, LinkB)]

    def __repr__(self):
        parts = []
        for eq in self.equations:
            if isinstance(eq, VertA):
                parts.append(f"x{eq.axis}={format_point(eq.zeta)}")
            else:
                parts.append(f"x{eq.dst}=g(x{eq.src})")
        return f"StructuredVariety(n={self.n}, {', '.join(parts)})"

    # --- JSON wire format -------------------------------------------------
    def to_json(self) -> dict:
        eqs = []
        for eq in self.equations:
            if isinstance(eq, VertA):
                eqs.append({"type": "A", "axis": eq.axis, "zeta": format_point(eq.zeta)})
            else:
                eqs.append(
                    {"type": "B", "from": eq.src, "to": eq.dst, "g": format_poly(eq.g)}
                )
        return {"n": self.n, "equations": eqs}

    @classmethod
    def from_json(cls, data: dict) -> "StructuredVariety":
        eqs: list[Equation] = []
        for item in data["equations"]:
            if item["type"] == "A":
                eqs.append(VertA(int(item["axis"]), parse_point(str(item["zeta"]))))
            elif item["type"] == "B":
                eqs.append(
                    LinkB(int(item["from"]), int(item["to"]), parse_poly(item["g"]))
                )
            else:
                raise ValueError(f"unknown equation type {item['type']!r}")
        return cls(int(data["n"]), eqs)


def membership(v: StructuredVariety, point: tuple[ProjPoint, ...]) -> bool:
    """Exact test that the point satisfies every equation (g(inf) = inf)."""
    if len(point) != v.n:
        raise ValueError(f"point has {len(point)} coordinates, variety needs {v.n}")
    for eq in v.equations:
        if isinstance(eq, VertA):
            if point[eq.axis - 1] != eq.zeta:
                return False
        else:
            if point[eq.dst - 1] != apply_poly(eq.g, point[eq.src - 1]):
                return False
    return True


def check_periodic(v: StructuredVariety, ds, n_max: int = COMMUTE_N_MAX) -> Optional[int]:
    """Least N <= n_max with f^N(zeta) = zeta for every pin and
    g o f^N = f^N o g for every link; sufficient for phi^N(V) = V."""
    ds = as_polyds(ds)
    for n in range(1, n_max + 1):
        fn = ds.iterate(n)
        ok = True
        for eq in v.vert_equations():
            if apply_poly(fn, eq.zeta) != eq.zeta:
                ok = False
                break
        if ok:
            for eq in v.link_equations():
                if eq.g.compose(fn) != fn.compose(eq.g):
                    ok = False
                    break
        if ok:
            return n
    return None


def check_preperiodic(
    v: StructuredVariety, ds, k_max: int = 32, n_max: int = COMMUTE_N_MAX
) -> Optional[tuple[int, int]]:
    """Least (k, N) such that replacing every pin zeta by f^k(zeta) gives a
    periodic variety.  Links must already be periodic: their pushforward is
    multivalued and unsupported."""
    ds = as_polyds(ds)
    for eq in v.link_equations():
        if commutes_with_iterate(eq.g, ds, n_max) is None:
            raise UnsupportedVarietyError(
                f"link x{eq.dst} = g(x{eq.src}) is not periodic; its pushforward "
                "is not a structured variety"
            )
    for k in range(k_max + 1):
        shifted = StructuredVariety(
            v.n,
            [
                VertA(eq.axis, apply_poly(ds.iterate(k), eq.zeta))
                if isinstance(eq, VertA)
                else eq
                for eq in v.equations
            ],
        )
        n = check_periodic(shifted, ds, n_max)
        if n is not None:
            return k, n
    return None


# --- precedence relation and chains ----------------------------------------------


def _relation_with_witnesses(
    v: StructuredVariety, ds, n_max: int
) -> tuple[set[tuple[int, int]], dict[tuple[int, int], UniPoly]]:
    ds = as_polyds(ds)
    pinned = set(v.pinned_axes)
    free = [i for i in range(1, v.n + 1) if i not in pinned]
    rel: set[tuple[int, int]] = {(i, i) for i in free}
    wit: dict[tuple[int, int], UniPoly] = {}

    def commuting(g: UniPoly) -> bool:
        return not g.is_constant() and commutes_with_iterate(g, ds, n_max) is not None

    def add(i: int, j: int, g: UniPoly) -> bool:
        if i == j or (i, j) in wit:
            return False
        rel.add((i, j))
        wit[(i, j)] = g
        return True

    for eq in v.link_equations():
        if eq.src in pinned and eq.dst in pinned:
            continue
        if eq.src in pinned or eq.dst in pinned:
            raise UnsupportedVarietyError(
                "link between a pinned and a free axis: not a product shape"
            )
        add(eq.src, eq.dst, eq.g)

    changed = True
    while changed:
        changed = False
        pairs = list(wit.items())
        # transitivity
        for (i, j), g1 in pairs:
            for (j2, k), g2 in pairs:
                if j2 == j and k != i:
                    changed |= add(i, k, g2.compose(g1))
        pairs = list(wit.items())
        # upper chain extension: i->j and i->k compare through division
        for (i, j), g1 in pairs:
            for (i2, k), g2 in pairs:
                if i2 != i or j == k:
                    continue
                if g2.degree % g1.degree == 0:
                    g3 = compose_right_divide(g2, g1)
                    if g3 is not None and commuting(g3):
                        changed |= add(j, k, g3)
                if g1.degree % g2.degree == 0:
                    g3 = compose_right_divide(g1, g2)
                    if g3 is not None and commuting(g3):
                        changed |= add(k, j, g3)
        pairs = list(wit.items())
        # lower chain extension: i->k and j->k compare through left division
        for (i, k), g1 in pairs:
            for (j, k2), g2 in pairs:
                if k2 != k or i == j:
                    continue
                if g1.degree % g2.degree == 0:
                    g3 = compose_left_divide(g1, g2)
                    if g3 is not None and commuting(g3):
                        changed |= add(i, j, g3)
                if g2.degree % g1.degree == 0:
                    g3 = compose_left_divide(g2, g1)
                    if g3 is not None and commuting(g3):
                        changed |= add(j, i, g3)
    return rel, wit


def prec_relation(v: StructuredVariety, ds, n_max: int = COMMUTE_N_MAX) -> set[tuple[int, int]]:
    """The precedence relation: reflexive on free axes, i < j for links, and
    closed under transitivity plus upper/lower chain extension."""
    rel, _ = _relation_with_witnesses(v, ds, n_max)
    return rel


@dataclass(frozen=True)
class ChainDecomposition:
    pinned: dict[int, ProjPoint]              # I_V with its values
    chains: tuple[tuple[int, ...], ...]        # ordered axis tuples
    chain_maps: tuple[tuple[tuple[int, UniPoly], ...], ...]
    # per chain: (axis, witness from the chain head); the head maps by X

    def product_membership(self, point: tuple[ProjPoint, ...]) -> bool:
        """Membership computed from the product-of-chains description."""
        for axis, zeta in self.pinned.items():
            if point[axis - 1] != zeta:
                return False
        for chain, maps in zip(self.chains, self.chain_maps):
            head = point[chain[0] - 1]
            for axis, g in maps:
                if point[axis - 1] != apply_poly(g, head):
                    return False
        return True


def chain_decompose(v: StructuredVariety, ds, n_max: int = COMMUTE_N_MAX) -> ChainDecomposition:
    """Maximal chains whose supports are the equivalence classes of
    "comparable under the precedence relation"; supports partition the free
    axes.  Within a class the order is by precedence with lexicographic
    tie-break, so the output is deterministic."""
    rel, wit = _relation_with_witnesses(v, ds, n_max)
    pinned = v.pinned_axes
    free = [i for i in range(1, v.n + 1) if i not in pinned]

    # union-find over the comparability relation
    parent = {i: i for i in free}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in free:
        for j in free:
            if i < j and ((i, j) in rel or (j, i) in rel):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in free:
        groups.setdefault(find(i), []).append(i)
    classes = list(groups.values())

    chains = []
    chain_maps = []
    for cls in classes:
        # precedence order: i before j when i < j strictly; ties by index
        def sort_key(i):
            before = sum(
                1 for j in cls if j != i and (j, i) in rel and (i, j) not in rel
            )
            return (before, i)

        ordered = tuple(sorted(cls, key=sort_key))
        head = ordered[0]
        maps = []
        for axis in ordered[1:]:
            g = wit.get((head, axis))
            if g is None:
                raise UnsupportedVarietyError(
                    f"no polynomial witness from axis {head} to axis {axis}; "
                    "the closure rules could not chain this class"
                )
            maps.append((axis, g))
        chains.append(ordered)
        chain_maps.append(tuple(maps))

    order = sorted(range(len(chains)), key=lambda idx: chains[idx][0])
    return ChainDecomposition(
        pinned=pinned,
        chains=tuple(chains[idx] for idx in order),
        chain_maps=tuple(chain_maps[idx] for idx in order),
    )


# --- bivariate curves -----------------------------------------------------------


class ContainedInV(RuntimeError):
    """F(x, g(x)) vanished identically: the curve lies inside the graph."""


@dataclass(frozen=True)
class BiPoly:
    """Dense bivariate polynomial: coeffs[i][j] is the x^i y^j coefficient."""

    coeffs: tuple[tuple[Fraction, ...], ...]

    @property
    def deg_x(self) -> int:
        return len(self.coeffs) - 1

    @property
    def deg_y(self) -> int:
        return len(self.coeffs[0]) - 1

    def bidegree(self) -> tuple[int, int]:
        dx = max((i for i, row in enumerate(self.coeffs) if any(row)), default=0)
        dy = max(
            (j for row in self.coeffs for j, c in enumerate(row) if c), default=0
        )
        return dx, dy

    @classmethod
    def from_rows(cls, rows) -> "BiPoly":
        width = max(len(r) for r in rows)
        return cls(
            tuple(
                tuple(Fraction(c) for c in row) + (Fraction(0),) * (width - len(row))
                for row in rows
            )
        )

    def substitute_y(self, g: UniPoly) -> UniPoly:
        """F(x, g(x)) as a univariate polynomial."""
        dy = self.deg_y
        acc = UniPoly()
        gpow = UniPoly([1])
        for j in range(dy + 1):
            row = UniPoly([self.coeffs[i][j] for i in range(self.deg_x + 1)])
            acc = acc + row * gpow
            if j < dy:
                gpow = gpow * g
        return acc

    def is_zero(self) -> bool:
        return all(c == 0 for row in self.coeffs for c in row)


def parse_bipoly(text: str) -> BiPoly:
    """Parse `y^2 - x^3 - 1` style text (variables x and y)."""
    from .polynomials import PolyParseError, _Tokens

    toks = _Tokens(text)
    terms: dict[tuple[int, int], Fraction] = {}
    first = True
    while True:
        ch = toks.peek()
        if ch == "":
            if first:
                raise PolyParseError("empty polynomial", toks.pos)
            break
        sign = 1
        if ch in "+-":
            toks.pos += 1
            sign = -1 if ch == "-" else 1
        elif not first:
            raise PolyParseError("expected '+' or '-'", toks.pos)
        coef = Fraction(1)
        have = False
        if toks.peek().isdigit():
            num = toks.take_int()
            den = 1
            if toks.peek() == "/":
                toks.pos += 1
                den = toks.take_int()
            coef = Fraction(num, den)
            have = True
        dx = dy = 0
        while True:
            if toks.peek() == "*":
                toks.pos += 1
            ch = toks.peek()
            if ch in ("x", "y"):
                toks.pos += 1
                power = 1
                if toks.peek() == "^":
                    toks.pos += 1
                    power = toks.take_int()
                if ch == "x":
                    dx += power
                else:
                    dy += power
                have = True
            else:
                break
        if not have:
            raise PolyParseError("expected a term", toks.pos)
        terms[(dx, dy)] = terms.get((dx, dy), Fraction(0)) + sign * coef
        first = False
    mx = max((i for i, _ in terms), default=0)
    my = max((j for _, j in terms), default=0)
    rows = [[terms.get((i, j), Fraction(0)) for j in range(my + 1)] for i in range(mx + 1)]
    return BiPoly(tuple(tuple(row) for row in rows))


def format_bipoly(F: BiPoly) -> str:
    parts = []
    for i in range(F.deg_x, -1, -1):
        for j in range(F.deg_y, -1, -1):
            c = F.coeffs[i][j]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = []
            if mag != 1 or (i == 0 and j == 0):
                body.append(
                    str(mag.numerator)
                    if mag.denominator == 1
                    else f"{mag.numerator}/{mag.denominator}"
                )
            if i:
                body.append("x" if i == 1 else f"x^{i}")
            if j:
                body.append("y" if j == 1 else f"y^{j}")
            parts.append((sign, "*".join(body)))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def intersect_with_curve(F: BiPoly, g: UniPoly) -> UniPoly:
    """Denominator-cleared R(x) = F(x, g(x)); raises ContainedInV when R = 0."""
    if F.is_zero():
        raise ValueError("F must be nonzero")
    r = F.substitute_y(g)
    if r.is_zero():
        raise ContainedInV("F(x, g(x)) vanishes identically")
    return clear_denominators(r).to_unipoly()
