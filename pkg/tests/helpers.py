"""Shared generators for randomized tests.

Random sheaves and morphisms are produced by solving the relevant linear
compatibility systems and sampling their solution spaces, so the samples
are generic while still valid; build_sheaf / build_morphism re-validate
every sample independently.
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from cellsheaf import (
    Matrix,
    MonotoneMap,
    Poset,
    PreOrder,
    QQ,
    build_poset,
    build_preorder,
    build_sheaf,
    hasse_edges,
    is_open,
    kernel_basis,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_NAMES = [chr(ord("a") + i) for i in range(20)]


def rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3), rng.choice([1, 1, 1, 2, 3]))


def random_matrix(rng: random.Random, rows: int, cols: int) -> Matrix:
    return Matrix.build(QQ, [[rational(rng) for _ in range(cols)] for _ in range(rows)],
                        cols=cols)


def random_invertible(rng: random.Random, n: int) -> Matrix:
    while True:
        m = random_matrix(rng, n, n)
        if m.is_invertible():
            return m


def random_poset(rng: random.Random, n: int) -> Poset:
    """Generators only point up the name order, so closure is a poset."""
    names = _NAMES[:n]
    pairs = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < 0.4
    ]
    return build_poset(names, pairs)


@st.composite
def posets(draw, max_n: int = 5) -> Poset:
    """Hypothesis strategy: upward generating pairs over a small carrier."""
    n = draw(st.integers(1, max_n))
    names = _NAMES[:n]
    pairs = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if draw(st.booleans())
    ]
    return build_poset(names, pairs)


def random_preorder(rng: random.Random, n: int) -> PreOrder:
    names = _NAMES[:n]
    pairs = [
        (a, b)
        for a in names
        for b in names
        if a != b and rng.random() < 0.25
    ]
    return build_preorder(names, pairs)


def random_monotone_map(rng: random.Random, source: PreOrder,
                        target: PreOrder) -> MonotoneMap:
    for _ in range(60):
        mapping = {x: rng.choice(target.elements) for x in source.elements}
        f = MonotoneMap(source, target, mapping)
        if f.is_monotone():
            return f
    value = rng.choice(target.elements)
    return MonotoneMap(source, target, {x: value for x in source.elements})


def _sample_kernel(rng: random.Random, basis) -> list[Fraction]:
    out = [QQ.zero] * basis.ambient_dim
    for row in basis.rows:
        c = Fraction(rng.randint(-2, 2))
        if c:
            out = [a + c * b for a, b in zip(out, row)]
    return out


def random_sheaf(rng: random.Random, base: Poset, max_dim: int = 3):
    """Random dims plus covering-pair maps sampled from the space of maps
    whose chain products agree, built point by point up a linear extension."""
    dims = {e: rng.choice([0, 1, 1, 2, 2, max_dim]) for e in base.elements}
    edges = hasse_edges(base)
    preds: dict[str, list[str]] = {e: [] for e in base.elements}
    for p, q in edges:
        preds[q].append(p)
    order = sorted(base.elements, key=lambda e: (len(base.down_set(e)), base.index(e)))
    full = {(e, e): Matrix.identity(QQ, dims[e]) for e in base.elements}
    edge_maps: dict[tuple[str, str], Matrix] = {}
    for q in order:
        zs = preds[q]
        if not zs:
            continue
        widths = [dims[z] for z in zs]
        offsets = [0]
        for w in widths:
            offsets.append(offsets[-1] + dims[q] * w)
        unknowns = offsets[-1]
        rows = []
        for p in order:
            if not base.lt(p, q):
                continue
            sharing = [i for i, z in enumerate(zs) if base.leq(p, z)]
            for a_pos in range(len(sharing)):
                for b_pos in range(a_pos + 1, len(sharing)):
                    i, j = sharing[a_pos], sharing[b_pos]
                    fi = full[(p, zs[i])]
                    fj = full[(p, zs[j])]
                    for r in range(dims[q]):
                        for cc in range(dims[p]):
                            row = [QQ.zero] * unknowns
                            for c in range(widths[i]):
                                row[offsets[i] + r * widths[i] + c] = fi.data[c][cc]
                            for c in range(widths[j]):
                                row[offsets[j] + r * widths[j] + c] -= fj.data[c][cc]
                            rows.append(row)
        solution = _sample_kernel(
            rng, kernel_basis(Matrix(QQ, len(rows), unknowns, rows)))
        for i, z in enumerate(zs):
            data = [
                solution[offsets[i] + r * widths[i]: offsets[i] + (r + 1) * widths[i]]
                for r in range(dims[q])
            ]
            m = Matrix(QQ, dims[q], widths[i], data)
            edge_maps[(z, q)] = m
            full[(z, q)] = m
        for p in order:
            if base.lt(p, q):
                z = next(z for z in zs if base.leq(p, z))
                full[(p, q)] = edge_maps[(z, q)] @ full[(p, z)]
    return build_sheaf(base, dims, edge_maps, QQ)


def random_natural_components(rng: random.Random, src, tgt):
    """Sample the solution space of the commutation equations."""
    base = src.base
    offsets = {}
    total = 0
    for p in base.elements:
        offsets[p] = total
        total += tgt.dim(p) * src.dim(p)

    def var(p: str, r: int, c: int) -> int:
        return offsets[p] + r * src.dim(p) + c

    rows = []
    for p, q in src.hasse:
        rho = src.restriction(p, q)
        sigma = tgt.restriction(p, q)
        for r in range(tgt.dim(q)):
            for c in range(src.dim(p)):
                row = [QQ.zero] * total
                for k in range(tgt.dim(p)):
                    row[var(p, k, c)] += sigma.data[r][k]
                for k in range(src.dim(q)):
                    row[var(q, r, k)] -= rho.data[k][c]
                rows.append(row)
    solution = _sample_kernel(rng, kernel_basis(Matrix(QQ, len(rows), total, rows)))
    components = {}
    for p in base.elements:
        data = [
            solution[var(p, r, 0): var(p, r, 0) + src.dim(p)]
            for r in range(tgt.dim(p))
        ]
        components[p] = Matrix(QQ, tgt.dim(p), src.dim(p), data)
    return components


def twisted_copy(rng: random.Random, sheaf):
    """Same sheaf conjugated by random invertible point maps, plus the
    conjugating morphism components (always an isomorphism)."""
    base = sheaf.base
    twists = {p: random_invertible(rng, sheaf.dim(p)) for p in base.elements}
    edge_maps = {
        (p, q): twists[q] @ sheaf.restriction(p, q) @ twists[p].inverse()
        for p, q in sheaf.hasse
    }
    other = build_sheaf(base, dict(sheaf.dims), edge_maps, sheaf.field)
    return other, twists


def random_morphisms(rng: random.Random, count: int):
    """A stream mixing identities, zeros, scalars, twists, and generic
    solutions of the commutation equations."""
    from fractions import Fraction as F

    from cellsheaf import build_morphism, identity_morphism, zero_morphism

    out = []
    while len(out) < count:
        base = random_poset(rng, rng.randint(1, 5))
        src = random_sheaf(rng, base)
        kind = rng.randrange(5)
        if kind == 0:
            out.append(identity_morphism(src))
        elif kind == 1:
            out.append(zero_morphism(src, src))
        elif kind == 2:
            c = F(rng.choice([-2, -1, 1, 2, 3]))
            out.append(build_morphism(src, src, {
                p: Matrix.identity(QQ, src.dim(p)).scale(c)
                for p in base.elements
            }))
        elif kind == 3:
            tgt, twists = twisted_copy(rng, src)
            out.append(build_morphism(src, tgt, twists))
        else:
            tgt = random_sheaf(rng, base)
            out.append(build_morphism(
                src, tgt, random_natural_components(rng, src, tgt)))
    return out


def brute_force_opens(space: PreOrder) -> list[frozenset]:
    """Every up-closed subset, by filtering the full power set."""
    out = []
    elements = list(space.elements)
    for mask in range(1 << len(elements)):
        members = frozenset(e for i, e in enumerate(elements) if mask >> i & 1)
        if is_open(space, members):
            out.append(members)
    return out
