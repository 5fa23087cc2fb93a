"""Cellular sheaves of vector spaces on finite posets.

A sheaf assigns a vector space dimension to every point and a matrix to
every covering pair; matrices along comparable pairs are derived by
composition and must agree across different chains. Sections over an open
set are compatible families of point values, computed exactly as the kernel
of a difference map. The stalk at a point is computed two independent ways:
as the value space at the point (with the canonical comparison map), and
literally as a quotient of the direct sum of section spaces over every
neighbourhood. Verification routines check exactness of the gluing
sequences for basic and general covers by finite enumeration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    EnumerationLimitError,
    FunctorialityError,
    GlueConflictError,
    ShapeError,
    ValidationError,
)
from .linalg import (
    Matrix,
    QQ,
    SubspaceBasis,
    block_assemble,
    is_exact_at,
    kernel_basis,
    _rref,
)
from .order import Poset, as_poset, hasse_edges
from .topology import (
    DEFAULT_MAX_ELEMENTS,
    OpenSet,
    enumerate_opens,
    open_star,
)


class CellularSheaf:
    """Point dimensions plus functorial restriction matrices on a poset.

    Instances are immutable after construction; build with build_sheaf,
    which derives the maps for all comparable pairs and rejects data whose
    chains compose inconsistently. Section spaces and restriction matrices
    are memoised per instance.
    """

    def __init__(self, base: Poset, field, dims, maps, hasse):
        self.base = base
        self.field = field
        self.dims = dict(dims)
        self._maps = dict(maps)
        self.hasse = tuple(hasse)
        self._section_cache: dict = {}
        self._restriction_cache: dict = {}

    def dim(self, p: str) -> int:
        self.base.index(p)
        return self.dims[p]

    def restriction(self, p: str, q: str) -> Matrix:
        """The derived matrix for p <= q (identity when p = q)."""
        try:
            return self._maps[(p, q)]
        except KeyError:
            raise ValidationError(f"{p} <= {q} does not hold in the base") from None

    def __eq__(self, other):
        return (
            isinstance(other, CellularSheaf)
            and other.base == self.base
            and other.field == self.field
            and other.dims == self.dims
            and other._maps == self._maps
        )

    def __repr__(self):
        dims = ", ".join(f"{e}:{self.dims[e]}" for e in self.base.elements)
        return f"CellularSheaf({dims} over {self.field.name})"


def build_sheaf(base: Poset, dims: Mapping[str, int],
                edge_maps: Mapping[tuple[str, str], Matrix],
                field=QQ) -> CellularSheaf:
    """Validate covering-pair data and derive all restriction matrices.

    `edge_maps` gives one matrix per covering pair (shape dim(q) x dim(p)
    for p covered by q); pairs touching a zero-dimensional point may be
    omitted. Construction fails if two chains between the same pair of
    points compose to different matrices, reporting the offending pair.
    """
    base = as_poset(base)
    for e in base.elements:
        if e not in dims:
            raise ShapeError(f"no dimension given for element {e!r}")
        if not isinstance(dims[e], int) or dims[e] < 0:
            raise ShapeError(f"dimension of {e!r} must be a non-negative integer")
    extra = set(dims) - set(base.elements)
    if extra:
        raise ShapeError(f"dimensions given for unknown elements {sorted(extra)}")
    edges = hasse_edges(base)
    edge_set = set(edges)
    for pair in edge_maps:
        if pair not in edge_set:
            raise ShapeError(f"{pair[0]}->{pair[1]} is not a covering pair of the base")
    maps: dict[tuple[str, str], Matrix] = {}
    for p, q in edges:
        m = edge_maps.get((p, q))
        if m is None:
            if dims[p] == 0 or dims[q] == 0:
                m = Matrix.zeros(field, dims[q], dims[p])
            else:
                raise ShapeError(f"missing matrix for covering pair {p}->{q}")
        if m.field != field:
            raise ShapeError(f"matrix for {p}->{q} uses a different field")
        if m.rows != dims[q] or m.cols != dims[p]:
            raise ShapeError(
                f"matrix for {p}->{q} is {m.rows}x{m.cols}, expected {dims[q]}x{dims[p]}"
            )
        maps[(p, q)] = m

    full: dict[tuple[str, str], Matrix] = {
        (e, e): Matrix.identity(field, dims[e]) for e in base.elements
    }
    # process points bottom-up; every chain from p to q ends in a covering
    # pair (z, q), so agreement of all such extensions at each q is
    # equivalent to agreement of all chain products
    order = sorted(base.elements, key=lambda e: (len(base.down_set(e)), base.index(e)))
    preds: dict[str, list[str]] = {e: [] for e in base.elements}
    for p, q in edges:
        preds[q].append(p)
    for q in order:
        for p in order:
            if not base.lt(p, q):
                continue
            candidates = [
                maps[(z, q)] @ full[(p, z)] for z in preds[q] if base.leq(p, z)
            ]
            first = candidates[0]
            for other in candidates[1:]:
                if other != first:
                    raise FunctorialityError(p, q, first, other)
            full[(p, q)] = first
    return CellularSheaf(base, field, dims, full, edges)


def constant_sheaf(base: Poset, dim: int, field=QQ) -> CellularSheaf:
    """Every point carries the same space, every map is the identity."""
    ident = Matrix.identity(field, dim)
    return build_sheaf(
        base, {e: dim for e in base.elements},
        {edge: ident for edge in hasse_edges(as_poset(base))}, field,
    )


class Section:
    """A compatible family of point values over an open set."""

    __slots__ = ("sheaf", "open", "components")

    def __init__(self, sheaf: CellularSheaf, open: OpenSet,
                 components: Mapping[str, Sequence]):
        if set(components) != set(open.members):
            raise ValidationError("section components must cover the open set exactly")
        coerced = {}
        for x in open.sorted_members:
            vals = tuple(sheaf.field.coerce(v) for v in components[x])
            if len(vals) != sheaf.dim(x):
                raise ShapeError(
                    f"component at {x} has length {len(vals)}, expected {sheaf.dim(x)}"
                )
            coerced[x] = vals
        for p, q in sheaf.hasse:
            if p in coerced and q in coerced:
                image = sheaf.restriction(p, q).mul_vec(coerced[p])
                if image != coerced[q]:
                    raise ValidationError(
                        f"family is not compatible along {p} <= {q}:"
                        f" {list(image)} vs {list(coerced[q])}"
                    )
        self.sheaf = sheaf
        self.open = open
        self.components = coerced

    def vector(self) -> tuple:
        out = []
        for x in self.open.sorted_members:
            out.extend(self.components[x])
        return tuple(out)

    def __eq__(self, other):
        return (
            isinstance(other, Section)
            and other.open.members == self.open.members
            and other.components == self.components
        )

    def __repr__(self):
        parts = " ".join(
            f"{x}={[self.sheaf.field.format(v) for v in self.components[x]]}"
            for x in self.open.sorted_members
        )
        return f"Section({parts})"


@dataclass
class SectionSpace:
    """Canonical basis of the sections over one open set."""

    sheaf: CellularSheaf
    open: OpenSet
    basis: SubspaceBasis

    @property
    def dim(self) -> int:
        return self.basis.dim

    def offsets(self) -> dict[str, int]:
        out = {}
        pos = 0
        for x in self.open.sorted_members:
            out[x] = pos
            pos += self.sheaf.dim(x)
        return out

    def vector_as_section(self, vec: Sequence) -> Section:
        offs = self.offsets()
        comps = {
            x: tuple(vec[offs[x]: offs[x] + self.sheaf.dim(x)])
            for x in self.open.sorted_members
        }
        return Section(self.sheaf, self.open, comps)

    def basis_sections(self) -> list[Section]:
        return [self.vector_as_section(row) for row in self.basis.rows]

    def coordinates_of(self, section: Section) -> tuple:
        return self.basis.coordinates(section.vector())


def sections_over(sheaf: CellularSheaf, U: OpenSet) -> SectionSpace:
    """Solve for all compatible families over U.

    Families live in the product of the point spaces (points in carrier
    order); one block of equations per covering pair inside U forces the
    value at the top to be the image of the value at the bottom. Covering
    pairs suffice: an open set is up-closed, so every comparable pair
    inside U is joined by a chain of covering pairs inside U.
    """
    if U.space != sheaf.base:
        raise ValidationError("open set lives on a different carrier")
    cached = sheaf._section_cache.get(U.members)
    if cached is not None:
        return cached
    pts = U.sorted_members
    offs: dict[str, int] = {}
    total = 0
    for x in pts:
        offs[x] = total
        total += sheaf.dim(x)
    zero, one = sheaf.field.zero, sheaf.field.one
    rows = []
    for p, q in sheaf.hasse:
        if p not in U.members or q not in U.members:
            continue
        R = sheaf.restriction(p, q)
        for i in range(R.rows):
            row = [zero] * total
            for j, v in enumerate(R.data[i]):
                if v:
                    row[offs[p] + j] = v
            row[offs[q] + i] = -one
            rows.append(row)
    constraint = Matrix(sheaf.field, len(rows), total, rows)
    space = SectionSpace(sheaf, U, kernel_basis(constraint))
    sheaf._section_cache[U.members] = space
    return space


def sections_over_all_pairs(sheaf: CellularSheaf, U: OpenSet) -> SubspaceBasis:
    """Same space computed from every comparable pair inside U.

    This is the literal compatible-tuple description; it is kept as an
    independent cross-check of the covering-pair assembly.
    """
    pts = U.sorted_members
    offs: dict[str, int] = {}
    total = 0
    for x in pts:
        offs[x] = total
        total += sheaf.dim(x)
    zero = sheaf.field.zero
    rows = []
    for p in pts:
        for q in pts:
            if not sheaf.base.lt(p, q):
                continue
            R = sheaf.restriction(p, q)
            for i in range(R.rows):
                row = [zero] * total
                for j, v in enumerate(R.data[i]):
                    if v:
                        row[offs[p] + j] = v
                row[offs[q] + i] = row[offs[q] + i] - sheaf.field.one
                rows.append(row)
    return kernel_basis(Matrix(sheaf.field, len(rows), total, rows))


def restrict_section(section: Section, smaller: OpenSet) -> Section:
    if not smaller.members <= section.open.members:
        raise ValidationError("restriction target is not contained in the section's open set")
    return Section(
        section.sheaf, smaller,
        {x: section.components[x] for x in smaller.members},
    )


def restriction_matrix(sheaf: CellularSheaf, U: OpenSet, V: OpenSet) -> Matrix:
    """Matrix of the restriction map between section spaces, in their bases."""
    key = (U.members, V.members)
    cached = sheaf._restriction_cache.get(key)
    if cached is not None:
        return cached
    if not V.members <= U.members:
        raise ValidationError("restriction target is not contained in the source open")
    SU = sections_over(sheaf, U)
    SV = sections_over(sheaf, V)
    offs = SU.offsets()
    columns = []
    for row in SU.basis.rows:
        restricted = []
        for x in V.sorted_members:
            restricted.extend(row[offs[x]: offs[x] + sheaf.dim(x)])
        columns.append(SV.basis.coordinates(restricted))
    data = list(zip(*columns)) if columns else [[] for _ in range(SV.dim)]
    result = Matrix(sheaf.field, SV.dim, SU.dim, data)
    sheaf._restriction_cache[key] = result
    return result


def glue(sheaf: CellularSheaf, cover: Sequence[OpenSet],
         local_sections: Sequence[Section]) -> Section:
    """The unique section on the union restricting to each local piece.

    Raises GlueConflictError with the offending point and both values if two
    pieces disagree on an overlap.
    """
    if len(cover) != len(local_sections):
        raise ValidationError("cover and sections have different lengths")
    for U, s in zip(cover, local_sections):
        if s.open.members != U.members:
            raise ValidationError("each local section must live on its cover set")
    for i in range(len(cover)):
        for j in range(i + 1, len(cover)):
            overlap = cover[i].members & cover[j].members
            for x in sorted(overlap, key=sheaf.base.index):
                a = local_sections[i].components[x]
                b = local_sections[j].components[x]
                if a != b:
                    raise GlueConflictError(x, a, b)
    union: frozenset = frozenset()
    for U in cover:
        union |= U.members
    components: dict[str, tuple] = {}
    for s in local_sections:
        components.update(s.components)
    return Section(sheaf, OpenSet(sheaf.base, union), components)


def section_from_value(sheaf: CellularSheaf, p: str, values: Sequence) -> Section:
    """Spread a value at p over its star: the family q -> map(p, q) value."""
    star = open_star(sheaf.base, p)
    vec = tuple(sheaf.field.coerce(v) for v in values)
    comps = {q: sheaf.restriction(p, q).mul_vec(vec) for q in star.members}
    return Section(sheaf, star, comps)


def _quotient_coords(relation_rows, pivots, free_columns, big) -> tuple:
    v = list(big)
    for row, piv in zip(relation_rows, pivots):
        f = v[piv]
        if f:
            v = [a - f * b for a, b in zip(v, row)]
    return tuple(v[c] for c in free_columns)


@dataclass
class DirectLimitStalk:
    """The stalk at a point, computed literally as a direct-limit quotient.

    The carrier is the direct sum of the section spaces over every open
    neighbourhood of the point, modulo the span of (section, -restriction)
    differences along neighbourhood inclusions. Quotient coordinates are
    the non-pivot coordinates after reduction by that span.
    """

    sheaf: CellularSheaf
    point: str
    neighbourhoods: tuple[OpenSet, ...]
    offsets: dict
    total: int
    relation_rows: tuple
    relation_pivots: tuple[int, ...]
    free_columns: tuple[int, ...]
    witness: Matrix

    @property
    def dim(self) -> int:
        return len(self.free_columns)

    def project(self, big: Sequence) -> tuple:
        return _quotient_coords(
            self.relation_rows, self.relation_pivots, self.free_columns, big)

    def germ(self, section: Section) -> tuple:
        """Image of a section in the quotient; its open set must contain the point."""
        if self.point not in section.open.members:
            raise ValidationError("section is not defined near the point")
        space = sections_over(self.sheaf, section.open)
        coords = space.coordinates_of(section)
        big = [self.sheaf.field.zero] * self.total
        off = self.offsets[section.open.members]
        for i, c in enumerate(coords):
            big[off + i] = c
        return self.project(big)


def stalk_direct_limit(sheaf: CellularSheaf, point: str,
                       max_elements: int = DEFAULT_MAX_ELEMENTS) -> DirectLimitStalk:
    """Brute-force stalk: quotient of the sum over all neighbourhoods.

    Difference generators are taken along covering pairs of the
    neighbourhood inclusion lattice; chains of inclusions telescope, so
    these span the same subspace as the generators for all inclusions.
    Nothing here uses the value space at the point, which is what makes the
    result an independent check of the canonical description.
    """
    base = sheaf.base
    nbhd = [U for U in enumerate_opens(base, max_elements) if point in U.members]
    spaces = {U.members: sections_over(sheaf, U) for U in nbhd}
    offsets: dict = {}
    total = 0
    for U in nbhd:
        offsets[U.members] = total
        total += spaces[U.members].dim
    member_sets = [U.members for U in nbhd]
    cover_pairs = []
    for U in nbhd:
        for V in nbhd:
            if V.members < U.members and not any(
                V.members < W < U.members for W in member_sets
            ):
                cover_pairs.append((U, V))
    zero, one = sheaf.field.zero, sheaf.field.one
    generators = []
    for U, V in cover_pairs:
        R = restriction_matrix(sheaf, U, V)
        for i in range(spaces[U.members].dim):
            row = [zero] * total
            row[offsets[U.members] + i] = one
            for j in range(R.rows):
                v = R.data[j][i]
                if v:
                    row[offsets[V.members] + j] = row[offsets[V.members] + j] - v
            generators.append(row)
    reduced, pivots = _rref(sheaf.field, generators, total)
    relation_rows = tuple(tuple(r) for r in reduced[: len(pivots)])
    pivot_set = set(pivots)
    free_columns = tuple(c for c in range(total) if c not in pivot_set)

    def project(big):
        return _quotient_coords(relation_rows, pivots, free_columns, big)

    star_space = sections_over(sheaf, open_star(base, point))
    star_offset = offsets[frozenset(base.up_set(point))]
    columns = []
    for j in range(sheaf.dim(point)):
        unit = [one if i == j else zero for i in range(sheaf.dim(point))]
        coords = star_space.coordinates_of(section_from_value(sheaf, point, unit))
        big = [zero] * total
        for i, c in enumerate(coords):
            big[star_offset + i] = c
        columns.append(project(big))
    data = list(zip(*columns)) if columns else [[] for _ in range(len(free_columns))]
    witness = Matrix(sheaf.field, len(free_columns), sheaf.dim(point), data)
    return DirectLimitStalk(
        sheaf, point, tuple(nbhd), offsets, total,
        relation_rows, tuple(pivots), free_columns, witness,
    )


@dataclass(frozen=True)
class StalkReport:
    """Comparison of the canonical stalk description with the literal limit."""

    point: str
    theorem_dim: int
    oracle_dim: int
    iso_witness: Matrix

    @property
    def passed(self) -> bool:
        return self.theorem_dim == self.oracle_dim and self.iso_witness.is_invertible()


def stalk_at(sheaf: CellularSheaf, point: str,
             max_elements: int = DEFAULT_MAX_ELEMENTS) -> StalkReport:
    """Stalk at a point: the value space, checked against the direct limit."""
    limit = stalk_direct_limit(sheaf, point, max_elements)
    return StalkReport(point, sheaf.dim(point), limit.dim, limit.witness)


@dataclass(frozen=True)
class CoverCheck:
    """Outcome of one exactness check for one cover of one open set."""

    target: tuple[str, ...]
    cover: tuple[tuple[str, ...], ...]
    injective: bool
    exact_middle: bool

    @property
    def ok(self) -> bool:
        return self.injective and self.exact_middle

    def describe(self) -> str:
        covered = "{" + " ".join(self.target) + "}"
        parts = ", ".join("{" + " ".join(c) + "}" for c in self.cover)
        status = "ok" if self.ok else (
            "gluing failed" if self.injective else "locality failed"
        )
        return f"{covered} covered by [{parts}]: {status}"


@dataclass
class AxiomReport:
    """Aggregate of cover checks; ok only when every check passed."""

    name: str
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        return (
            f"{self.name}: {len(self.checks)} covers checked,"
            f" {len(self.failures())} failures"
        )


def verify_base_sheaf_axioms(sheaf: CellularSheaf,
                             max_elements: int = DEFAULT_MAX_ELEMENTS) -> AxiomReport:
    """Exactness of the gluing sequence for every basic cover of every star.

    A cover of the star of p by stars must include the star of p itself,
    so the covers are exactly the subsets of the star containing p; the
    enumeration is finite and exhaustive. The middle product runs over all
    basic opens inside each pairwise intersection. Failure on a valid sheaf
    indicates a bug in the assembly, so callers should treat any failure as
    fatal.
    """
    base = sheaf.base
    if len(base) > max_elements:
        raise EnumerationLimitError(len(base), max_elements)
    field = sheaf.field
    checks = []
    for p in base.elements:
        star = open_star(base, p)
        others = [x for x in star.sorted_members if x != p]
        for size in range(len(others) + 1):
            for combo in combinations(others, size):
                centers = tuple(sorted((p,) + combo, key=base.index))
                phi = block_assemble(
                    field, [sheaf.dim(x) for x in centers], [sheaf.dim(p)],
                    {(i, 0): sheaf.restriction(p, x) for i, x in enumerate(centers)},
                )
                band_dims = []
                blocks = {}
                # unordered pairs suffice: swapping a pair negates its rows
                # and equal indices give zero rows, neither changes the kernel
                for i, x in enumerate(centers):
                    for j in range(i + 1, len(centers)):
                        y = centers[j]
                        overlap = sorted(
                            base.up_set(x) & base.up_set(y), key=base.index
                        )
                        for w in overlap:
                            band = len(band_dims)
                            band_dims.append(sheaf.dim(w))
                            blocks[(band, j)] = sheaf.restriction(y, w)
                            blocks[(band, i)] = -sheaf.restriction(x, w)
                psi = block_assemble(
                    field, band_dims, [sheaf.dim(x) for x in centers], blocks
                )
                checks.append(CoverCheck(
                    star.sorted_members,
                    tuple(open_star(base, x).sorted_members for x in centers),
                    phi.is_injective(),
                    is_exact_at(phi, psi),
                ))
    return AxiomReport("basic-cover-exactness", checks)


def verify_sheaf_axioms_extended(sheaf: CellularSheaf, covers_per_open: int = 50,
                                 seed: int = 0, open_budget: int | None = None,
                                 max_elements: int = DEFAULT_MAX_ELEMENTS) -> AxiomReport:
    """Exactness of the gluing sequence on general opens and sampled covers.

    Every open set gets its canonical cover by the stars of its members plus
    seeded random covers (patched with stars so they really cover); when the
    open lattice is larger than open_budget, the opens themselves are
    sampled. Deterministic for a fixed seed.
    """
    base = sheaf.base
    field = sheaf.field
    opens = enumerate_opens(base, max_elements)
    rng = random.Random(seed)
    considered = opens
    if open_budget is not None and len(opens) > open_budget:
        considered = sorted(rng.sample(opens, open_budget), key=OpenSet.sort_key)
    checks = []
    for U in considered:
        sub_opens = [V for V in opens if V.members and V.members <= U.members]
        covers: list[tuple[OpenSet, ...]] = []
        seen = set()

        def add_cover(parts: Iterable[OpenSet]):
            unique = {o.members: o for o in parts}
            cover = tuple(sorted(unique.values(), key=OpenSet.sort_key))
            key = frozenset(o.members for o in cover)
            if key not in seen:
                seen.add(key)
                covers.append(cover)

        add_cover(open_star(base, x) for x in U.sorted_members)
        for _ in range(covers_per_open):
            if not sub_opens:
                break
            count = rng.randint(1, min(4, len(sub_opens)))
            picked = list(rng.sample(sub_opens, count))
            covered: set = set()
            for o in picked:
                covered |= o.members
            picked.extend(
                open_star(base, x) for x in U.sorted_members if x not in covered
            )
            add_cover(picked)
        space_U = sections_over(sheaf, U)
        for cover in covers:
            phi = block_assemble(
                field,
                [sections_over(sheaf, Ui).dim for Ui in cover],
                [space_U.dim],
                {(i, 0): restriction_matrix(sheaf, U, Ui) for i, Ui in enumerate(cover)},
            )
            band_dims = []
            blocks = {}
            for i in range(len(cover)):
                for j in range(i + 1, len(cover)):
                    inter = cover[i].intersection(cover[j])
                    band = len(band_dims)
                    band_dims.append(sections_over(sheaf, inter).dim)
                    blocks[(band, j)] = restriction_matrix(sheaf, cover[j], inter)
                    blocks[(band, i)] = -restriction_matrix(sheaf, cover[i], inter)
            psi = block_assemble(
                field, band_dims, [sections_over(sheaf, Ui).dim for Ui in cover], blocks
            )
            checks.append(CoverCheck(
                U.sorted_members,
                tuple(o.sorted_members for o in cover),
                phi.is_injective(),
                is_exact_at(phi, psi),
            ))
    return AxiomReport("open-cover-exactness", checks)
