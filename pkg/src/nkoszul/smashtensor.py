"""Finite groups acting on V and the smash tensor algebra T(V)#Gamma.

A finite group Gamma < GL(V) with group algebra K = k[Gamma] turns the
tensor algebra over K into the smash product T(V)#Gamma, whose degree-n
component has canonical k-basis (word, g) with word in {1..dimV}^n and g a
group element; the product rule is (v (x) g)(w (x) h) = v (x) g(w) (x) gh.
This module provides that algebra's graded components, sub-bimodules in
canonical subspace form, products EF, ideal components, and the
intersections W_n that drive every homological check downstream.

Basis order is fixed once and for all: words lexicographic with slot 1 most
significant, group index innermost.  All outputs are canonical, so reports
are reproducible bit for bit.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .cyclo import get_field
from .elim import SparseEliminator
from .scalar import DimensionMismatch, MatrixS, Scalar, Subspace

Terms = dict  # {(word tuple, g index): Scalar}


class GroupData:
    """A finite matrix group: elements, Cayley table, inverses, classes.

    Element 0 is the identity.  ``matrices[i]`` is the action of element i
    on V.  ``generators`` records the indices used to build the group; the
    identity-only group has no generators.
    """

    def __init__(self, matrices, mult_table, inverses, conj_classes, generators):
        self.matrices: tuple[MatrixS, ...] = tuple(matrices)
        self.mult_table: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in mult_table)
        self.inverses: tuple[int, ...] = tuple(inverses)
        self.conj_classes: tuple[tuple[int, ...], ...] = tuple(tuple(c) for c in conj_classes)
        self.generators: tuple[int, ...] = tuple(generators)

    @property
    def order(self) -> int:
        return len(self.matrices)

    @property
    def dimV(self) -> int:
        return self.matrices[0].rows

    def mult(self, i: int, j: int) -> int:
        return self.mult_table[i][j]

    def inverse(self, i: int) -> int:
        return self.inverses[i]

    @staticmethod
    def trivial(dimV: int, conductor: int = 1) -> "GroupData":
        return GroupData([MatrixS.identity(dimV, conductor)], [[0]], [0], [(0,)], [])

    @staticmethod
    def from_generators(mats: Sequence[MatrixS], order_cap: int = 1024) -> "GroupData":
        """Enumerate the group generated by invertible matrices.

        Raises ``ValueError`` on a non-invertible generator or when the
        closure exceeds ``order_cap`` (which also catches infinite-order
        generators).
        """
        if not mats:
            raise ValueError("at least one generator (or use GroupData.trivial)")
        n = mats[0].rows
        conductor = max(m.conductor for m in mats)
        from .scalar import kernel as _kernel

        gens = []
        for m in mats:
            if m.rows != n or m.cols != n:
                raise DimensionMismatch("generators must be square of equal size")
            if m.conductor != conductor:
                m = MatrixS(n, n, m.entries, conductor)
            if _kernel(m).dim != 0:
                raise ValueError("non-invertible generator")
            gens.append(m)

        ident = MatrixS.identity(n, conductor)

        def key(mat: MatrixS):
            return mat.entries

        elements = [ident]
        index = {key(ident): 0}
        queue = [ident]
        while queue:
            cur = queue.pop(0)
            for g in gens:
                prod = cur.mul(g)
                k = key(prod)
                if k not in index:
                    if len(elements) >= order_cap:
                        raise ValueError(f"group closure exceeds order cap {order_cap}")
                    index[k] = len(elements)
                    elements.append(prod)
                    queue.append(prod)
        order = len(elements)
        table = [[0] * order for _ in range(order)]
        for i in range(order):
            for j in range(order):
                table[i][j] = index[key(elements[i].mul(elements[j]))]
        inverses = [0] * order
        for i in range(order):
            for j in range(order):
                if table[i][j] == 0:
                    inverses[i] = j
                    break
        # conjugacy classes: orbit of each element under g . x . g^-1
        seen = set()
        classes = []
        for i in range(order):
            if i in seen:
                continue
            orbit = {table[table[g][i]][inverses[g]] for g in range(order)}
            classes.append(tuple(sorted(orbit)))
            seen |= orbit
        classes.sort(key=min)
        gen_indices = []
        for g in gens:
            gi = index[key(g)]
            if gi not in gen_indices:
                gen_indices.append(gi)
        return GroupData(elements, table, inverses, classes, gen_indices)

    def is_homomorphic_action(self) -> bool:
        """Entry-exact check that rho(g) rho(h) = rho(gh)."""
        for i in range(self.order):
            for j in range(self.order):
                if self.matrices[i].mul(self.matrices[j]) != self.matrices[self.mult_table[i][j]]:
                    return False
        return True


class TensorContext:
    """V, the acting group, and the coefficient field: the ambient algebra."""

    def __init__(self, dimV: int, group: GroupData | None = None, conductor: int = 1):
        if dimV < 1:
            raise ValueError("dimV must be at least 1")
        if group is None:
            group = GroupData.trivial(dimV, conductor)
        if group.dimV != dimV:
            raise DimensionMismatch("group matrices do not act on V")
        self.dimV = dimV
        self.group = group
        self.conductor = conductor
        self.field = get_field(conductor)
        for m in group.matrices:
            if m.conductor not in (1, conductor):
                raise DimensionMismatch(
                    "group matrix entries do not lie in the declared field"
                )
        # column expansions of each rho(g): _cols[g][l] = [(i, raw), ...]
        field = self.field
        self._cols = []
        for mat in group.matrices:
            cols = []
            for l in range(dimV):
                col = []
                for i in range(dimV):
                    e = mat[i, l]
                    raw = (
                        e.raw
                        if e.conductor == conductor
                        else field.from_fraction(e.as_fraction())
                    )
                    if not field.is_zero(raw):
                        col.append((i, raw))
                cols.append(col)
            self._cols.append(cols)

    @property
    def order(self) -> int:
        return self.group.order

    def component_dim(self, n: int) -> int:
        return self.dimV**n * self.order

    def coord(self, word: tuple[int, ...], g: int) -> int:
        idx = 0
        for letter in word:
            idx = idx * self.dimV + letter
        return idx * self.order + g

    def word_of(self, coord: int, degree: int) -> tuple[tuple[int, ...], int]:
        g = coord % self.order
        idx = coord // self.order
        word = []
        for _ in range(degree):
            word.append(idx % self.dimV)
            idx //= self.dimV
        return tuple(reversed(word)), g

    # -- term-level operations ---------------------------------------

    def apply_group_to_word(self, g: int, word: tuple[int, ...]):
        """Expansion of rho(g) applied to each slot of a pure word.

        Yields (word, raw coefficient) pairs.
        """
        field = self.field
        cols = self._cols[g]
        partial = [((), field.one)]
        for letter in word:
            nxt = []
            for pw, c in partial:
                for i, raw in cols[letter]:
                    nxt.append((pw + (i,), field.mul(c, raw)))
            partial = nxt
        return partial

    def smash_mul_terms(self, a: Terms, b: Terms) -> Terms:
        """Bilinear product of term dicts: (v⊗g)(w⊗h) = v⊗g(w)⊗gh."""
        field = self.field
        out: dict = {}
        for (w1, g), ca in a.items():
            if ca.is_zero():
                continue
            for (w2, h), cb in b.items():
                if cb.is_zero():
                    continue
                coeff = ca * cb
                gh = self.group.mult(g, h)
                for tw, raw in self.apply_group_to_word(g, w2):
                    key = (w1 + tw, gh)
                    add = coeff * Scalar(field, raw)
                    cur = out.get(key)
                    tot = add if cur is None else cur + add
                    if tot.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = tot
        return out

    # -- sparse vector forms ------------------------------------------

    def terms_to_sparse(self, terms: Terms) -> dict:
        field = self.field
        out = {}
        for (word, g), c in terms.items():
            if c.is_zero():
                continue
            raw = c.raw if c.conductor == self.conductor else field.from_fraction(c.as_fraction())
            coord = self.coord(word, g)
            cur = out.get(coord)
            nv = raw if cur is None else field.add(cur, raw)
            if field.is_zero(nv):
                out.pop(coord, None)
            else:
                out[coord] = nv
        return out

    def sparse_to_terms(self, row: dict, degree: int) -> Terms:
        field = self.field
        out = {}
        for coord, raw in row.items():
            word, g = self.word_of(coord, degree)
            out[(word, g)] = Scalar(field, raw)
        return out

    def left_action_sparse(self, g: int, row: dict, degree: int) -> dict:
        """g . (word ⊗ h) = rho(g)(word) ⊗ gh on a sparse degree-n vector."""
        field = self.field
        order = self.order
        mult_row = self.group.mult_table[g]
        out: dict = {}
        for coord, raw in row.items():
            word, h = self.word_of(coord, degree)
            gh = mult_row[h]
            for tw, c in self.apply_group_to_word(g, word):
                coord2 = self.coord(tw, gh)
                term = field.mul(raw, c)
                cur = out.get(coord2)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    out.pop(coord2, None)
                else:
                    out[coord2] = nv
        return out

    def right_action_sparse(self, row: dict, g: int) -> dict:
        """(word ⊗ h) . g = word ⊗ hg; a permutation of coordinates."""
        order = self.order
        table = self.group.mult_table
        out = {}
        for coord, raw in row.items():
            h = coord % order
            out[(coord - h) + table[h][g]] = raw
        return out


# -- sub-bimodules -------------------------------------------------------


class Subbimodule:
    """A subspace of the degree-n smash component closed under both actions."""

    def __init__(self, ctx: TensorContext, degree: int, space: Subspace):
        self.ctx = ctx
        self.degree = degree
        self.space = space

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    @staticmethod
    def zero(ctx: TensorContext, degree: int) -> "Subbimodule":
        return Subbimodule(ctx, degree, Subspace.zero(ctx.component_dim(degree), ctx.conductor))

    @staticmethod
    def full(ctx: TensorContext, degree: int) -> "Subbimodule":
        return Subbimodule(ctx, degree, Subspace.full(ctx.component_dim(degree), ctx.conductor))

    @staticmethod
    def from_elements(ctx: TensorContext, degree: int, elements: Iterable[Terms], close: bool = True) -> "Subbimodule":
        rows = [ctx.terms_to_sparse(t) for t in elements]
        for t in rows:
            for coord in t:
                if coord >= ctx.component_dim(degree):
                    raise DimensionMismatch("element does not live in the stated degree")
        if close:
            rows = _bimodule_closure_rows(ctx, degree, rows)
        sub = _rows_to_subspace(ctx, rows, ctx.component_dim(degree))
        out = Subbimodule(ctx, degree, sub)
        if not close and not out.is_closed():
            raise ValueError("spanning set is not closed under the bimodule actions")
        return out

    def basis_terms(self) -> list[Terms]:
        return [
            self.ctx.sparse_to_terms(
                {j: x.raw for j, x in enumerate(row) if not x.is_zero()}, self.degree
            )
            for row in self.space.basis_rows()
        ]

    def basis_sparse(self) -> list[dict]:
        rows = []
        for i in range(self.space.dim):
            row = {}
            for j in range(self.space.ambient_dim):
                x = self.space.basis[i, j]
                if not x.is_zero():
                    row[j] = x.raw
            rows.append(row)
        return rows

    def is_closed(self) -> bool:
        """Apply every generator action to every basis row, check containment."""
        ctx = self.ctx
        elim = SparseEliminator(ctx.field)
        for r in self.basis_sparse():
            elim.add(r)
        gens = ctx.group.generators
        for row in self.basis_sparse():
            for g in gens:
                if not elim.contains(ctx.left_action_sparse(g, row, self.degree)):
                    return False
                if not elim.contains(ctx.right_action_sparse(row, g)):
                    return False
        return True

    def sum(self, other: "Subbimodule") -> "Subbimodule":
        self._check_compatible(other)
        return Subbimodule(self.ctx, self.degree, self.space.sum(other.space))

    def intersect(self, other: "Subbimodule") -> "Subbimodule":
        self._check_compatible(other)
        return Subbimodule(self.ctx, self.degree, self.space.intersect(other.space))

    def _check_compatible(self, other: "Subbimodule"):
        if other.ctx is not self.ctx and (
            other.ctx.dimV != self.ctx.dimV
            or other.ctx.conductor != self.ctx.conductor
            or other.ctx.group.mult_table != self.ctx.group.mult_table
        ):
            raise DimensionMismatch("context mismatch")
        if other.degree != self.degree:
            raise DimensionMismatch("degree mismatch")

    def __eq__(self, other):
        if not isinstance(other, Subbimodule):
            return NotImplemented
        return self.degree == other.degree and self.space == other.space

    def __hash__(self):
        return hash((self.degree, self.space))

    def __repr__(self):
        return f"Subbimodule(degree={self.degree}, dim={self.dim})"


def _rows_to_subspace(ctx: TensorContext, rows: list[dict], ambient: int) -> Subspace:
    elim = SparseEliminator(ctx.field)
    for r in rows:
        elim.add(r)
    field = ctx.field
    dense = []
    for r in elim.rows_canonical():
        vec = [Scalar(field, field.zero)] * ambient
        for j, raw in r.items():
            vec[j] = Scalar(field, raw)
        dense.append(vec)
    return Subspace.from_vectors(dense, ambient, ctx.conductor)


def _bimodule_closure_rows(ctx: TensorContext, degree: int, rows: list[dict]) -> list[dict]:
    elim = SparseEliminator(ctx.field)
    work = []
    for r in rows:
        if elim.add(r) is not None:
            work.append(r)
    gens = ctx.group.generators
    while work:
        row = work.pop()
        for g in gens:
            for img in (
                ctx.left_action_sparse(g, row, degree),
                ctx.right_action_sparse(row, g),
            ):
                red = elim.reduce(img)
                if red:
                    elim.add(red)
                    work.append(red)
    return elim.rows_canonical()


def smash_product(ctx: TensorContext, a: Terms, b: Terms) -> Terms:
    """Product of two elements given as term dicts."""
    return ctx.smash_mul_terms(a, b)


def product_EF(E: Subbimodule, F: Subbimodule) -> Subbimodule:
    """Span of the smash products of basis elements; again a sub-bimodule."""
    if E.ctx is not F.ctx and (
        E.ctx.dimV != F.ctx.dimV
        or E.ctx.conductor != F.ctx.conductor
        or E.ctx.group.mult_table != F.ctx.group.mult_table
    ):
        raise DimensionMismatch("context mismatch")
    ctx = E.ctx
    degree = E.degree + F.degree
    elim = SparseEliminator(ctx.field)
    e_terms = E.basis_terms()
    f_terms = F.basis_terms()
    for et in e_terms:
        for ft in f_terms:
            prod = ctx.smash_mul_terms(et, ft)
            elim.add(ctx.terms_to_sparse(prod))
    sub = _elim_to_subspace(ctx, elim, ctx.component_dim(degree))
    return Subbimodule(ctx, degree, sub)


def _elim_to_subspace(ctx: TensorContext, elim: SparseEliminator, ambient: int) -> Subspace:
    field = ctx.field
    dense = []
    for r in elim.rows_canonical():
        vec = [Scalar(field, field.zero)] * ambient
        for j, raw in r.items():
            vec[j] = Scalar(field, raw)
        dense.append(vec)
    return Subspace.from_vectors(dense, ambient, ctx.conductor)


def left_full_product(X: Subbimodule, power: int = 1) -> Subbimodule:
    """V^{⊗power} X for the full space on the left.

    For a bimodule X this equals the span of words prepended to basis rows,
    so no smash expansion is needed.
    """
    ctx = X.ctx
    degree = X.degree + power
    elim = SparseEliminator(ctx.field)
    rows = X.basis_sparse()
    shift = ctx.order
    top = ctx.dimV ** X.degree
    for wnum in range(ctx.dimV**power):
        base = wnum * top * shift
        for row in rows:
            elim.add({base + c: v for c, v in row.items()})
    return Subbimodule(ctx, degree, _elim_to_subspace(ctx, elim, ctx.component_dim(degree)))


def right_full_product(X: Subbimodule, power: int = 1) -> Subbimodule:
    """X V^{⊗power} for the full space on the right (single power steps)."""
    ctx = X.ctx
    out = X
    for _ in range(power):
        elim = SparseEliminator(ctx.field)
        degree = out.degree + 1
        for terms in out.basis_terms():
            for letter in range(ctx.dimV):
                prod = ctx.smash_mul_terms(terms, {((letter,), 0): Scalar.one(ctx.conductor)})
                elim.add(ctx.terms_to_sparse(prod))
        out = Subbimodule(ctx, degree, _elim_to_subspace(ctx, elim, ctx.component_dim(degree)))
    return out


def placement(R: Subbimodule, i: int, j: int) -> Subbimodule:
    """V^{⊗i} R V^{⊗j} as a sub-bimodule of degree i + N + j."""
    return left_full_product(right_full_product(R, j), i)


def ideal_component(R: Subbimodule, n: int) -> Subbimodule:
    """Degree-n component of the two-sided ideal generated by R.

    The component is the sum of all placements V^{⊗i} R V^{⊗j} with
    i + N + j = n; it vanishes for n < N.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    ctx = R.ctx
    N = R.degree
    if n < N:
        return Subbimodule.zero(ctx, n)
    out = placement(R, 0, n - N)
    for i in range(1, n - N + 1):
        out = out.sum(placement(R, i, n - N - i))
    return out


def W(R: Subbimodule, n: int) -> Subbimodule:
    """Intersection of all degree-n placements of R.

    Computed as a left fold of pairwise intersections in the fixed order
    i = 0, 1, ..., n - N.
    """
    N = R.degree
    if n < N:
        raise ValueError("W is defined for degrees >= the relation degree")
    out = placement(R, 0, n - N)
    for i in range(1, n - N + 1):
        out = out.intersect(placement(R, i, n - N - i))
    return out


def alternating_sum_terms(ctx: TensorContext, letters: tuple[int, ...]) -> Terms:
    """Antisymmetrization of the pure tensor on the given letters (group e)."""
    from itertools import permutations

    one = Scalar.one(ctx.conductor)
    out: Terms = {}
    p = len(letters)
    for perm in permutations(range(p)):
        sign = 1
        for i in range(p):
            for j in range(i + 1, p):
                if perm[i] > perm[j]:
                    sign = -sign
        word = tuple(letters[perm[i]] for i in range(p))
        out[(word, 0)] = one * sign
    return out


def antisymmetrizer_subbimodule(ctx: TensorContext, p: int) -> Subbimodule:
    """Bimodule closure of the antisymmetrized p-tensors on basis letters."""
    from itertools import combinations

    if not 2 <= p <= ctx.dimV:
        raise ValueError("p must lie between 2 and dimV")
    elems = [alternating_sum_terms(ctx, combo) for combo in combinations(range(ctx.dimV), p)]
    return Subbimodule.from_elements(ctx, p, elems, close=True)


def check_lemma22(E: Subbimodule, Ep: Subbimodule, F: Subbimodule, Fp: Subbimodule, which: str) -> bool:
    """Exact validity of the product/intersection exchange identities.

    which = "i":   (EF) ∩ (EF') = E(F ∩ F')
    which = "ii":  (EF) ∩ (E'F) = (E ∩ E')F
    which = "iii": (E'F) ∩ (EF') = E'F'   requiring E' ⊆ E and F' ⊆ F
    """
    if E.degree != Ep.degree or F.degree != Fp.degree:
        raise DimensionMismatch("E,E' and F,F' must come in equal degrees")
    if which == "i":
        lhs = product_EF(E, F).intersect(product_EF(E, Fp))
        rhs = product_EF(E, F.intersect(Fp))
    elif which == "ii":
        lhs = product_EF(E, F).intersect(product_EF(Ep, F))
        rhs = product_EF(E.intersect(Ep), F)
    elif which == "iii":
        if not E.space.contains_subspace(Ep.space):
            raise ValueError("(iii) requires E' contained in E")
        if not F.space.contains_subspace(Fp.space):
            raise ValueError("(iii) requires F' contained in F")
        lhs = product_EF(Ep, F).intersect(product_EF(E, Fp))
        rhs = product_EF(Ep, Fp)
    else:
        raise ValueError("which must be one of 'i', 'ii', 'iii'")
    return lhs == rhs


# -- filtered subspaces ---------------------------------------------------


class FilteredSubspace:
    """A subspace of F^n = (+)_{i<=n} V^{⊗i}⊗K in graded-block coordinates.

    Blocks are laid out in degrees 0, 1, ..., n in that order; within a
    block, coordinates follow the (word, g) order of the graded component.
    """

    def __init__(self, ctx: TensorContext, top_degree: int, space: Subspace):
        self.ctx = ctx
        self.top_degree = top_degree
        self.space = space

    @property
    def dim(self) -> int:
        return self.space.dim

    @staticmethod
    def ambient(ctx: TensorContext, top_degree: int) -> int:
        return sum(ctx.component_dim(i) for i in range(top_degree + 1))

    @staticmethod
    def offsets(ctx: TensorContext, top_degree: int) -> list[int]:
        offs = [0]
        for i in range(top_degree + 1):
            offs.append(offs[-1] + ctx.component_dim(i))
        return offs

    def block_offset(self, degree: int) -> int:
        return FilteredSubspace.offsets(self.ctx, self.top_degree)[degree]

    @staticmethod
    def coord(ctx: TensorContext, top_degree: int, word: tuple[int, ...], g: int) -> int:
        offs = FilteredSubspace.offsets(ctx, top_degree)
        return offs[len(word)] + ctx.coord(word, g)

    @staticmethod
    def terms_to_sparse(ctx: TensorContext, top_degree: int, terms: Terms) -> dict:
        field = ctx.field
        out: dict = {}
        for (word, g), c in terms.items():
            if len(word) > top_degree:
                raise DimensionMismatch("term exceeds the filtration level")
            if c.is_zero():
                continue
            raw = c.raw if c.conductor == ctx.conductor else field.from_fraction(c.as_fraction())
            coord = FilteredSubspace.coord(ctx, top_degree, word, g)
            cur = out.get(coord)
            nv = raw if cur is None else field.add(cur, raw)
            if field.is_zero(nv):
                out.pop(coord, None)
            else:
                out[coord] = nv
        return out

    @staticmethod
    def sparse_to_terms(ctx: TensorContext, top_degree: int, row: dict) -> Terms:
        offs = FilteredSubspace.offsets(ctx, top_degree)
        field = ctx.field
        out = {}
        for coord, raw in row.items():
            d = 0
            while offs[d + 1] <= coord:
                d += 1
            word, g = ctx.word_of(coord - offs[d], d)
            out[(word, g)] = Scalar(field, raw)
        return out

    @staticmethod
    def from_elements(ctx: TensorContext, top_degree: int, elements: Iterable[Terms], close: bool = True) -> "FilteredSubspace":
        rows = [FilteredSubspace.terms_to_sparse(ctx, top_degree, t) for t in elements]
        if close:
            rows = _filtered_closure_rows(ctx, top_degree, rows)
        elim = SparseEliminator(ctx.field)
        for r in rows:
            elim.add(r)
        ambient = FilteredSubspace.ambient(ctx, top_degree)
        sub = _elim_to_subspace(ctx, elim, ambient)
        out = FilteredSubspace(ctx, top_degree, sub)
        if not close and not out.is_closed():
            raise ValueError("spanning set is not closed under the bimodule actions")
        return out

    def basis_sparse(self) -> list[dict]:
        rows = []
        for i in range(self.space.dim):
            row = {}
            for j in range(self.space.ambient_dim):
                x = self.space.basis[i, j]
                if not x.is_zero():
                    row[j] = x.raw
            rows.append(row)
        return rows

    def basis_terms(self) -> list[Terms]:
        return [
            FilteredSubspace.sparse_to_terms(self.ctx, self.top_degree, row)
            for row in self.basis_sparse()
        ]

    def _action_sparse(self, row: dict, g: int, side: str) -> dict:
        ctx = self.ctx
        offs = FilteredSubspace.offsets(ctx, self.top_degree)
        field = ctx.field
        out: dict = {}
        by_degree: dict[int, dict] = {}
        for coord, raw in row.items():
            d = 0
            while offs[d + 1] <= coord:
                d += 1
            by_degree.setdefault(d, {})[coord - offs[d]] = raw
        for d, sub in by_degree.items():
            img = (
                ctx.left_action_sparse(g, sub, d)
                if side == "left"
                else ctx.right_action_sparse(sub, g)
            )
            for c, v in img.items():
                coord = offs[d] + c
                cur = out.get(coord)
                nv = v if cur is None else field.add(cur, v)
                if field.is_zero(nv):
                    out.pop(coord, None)
                else:
                    out[coord] = nv
        return out

    def is_closed(self) -> bool:
        elim = SparseEliminator(self.ctx.field)
        for r in self.basis_sparse():
            elim.add(r)
        for row in self.basis_sparse():
            for g in self.ctx.group.generators:
                if not elim.contains(self._action_sparse(row, g, "left")):
                    return False
                if not elim.contains(self._action_sparse(row, g, "right")):
                    return False
        return True

    def block_projection(self, degree: int) -> Subspace:
        """Image of the subspace in the degree-``degree`` graded block."""
        offs = FilteredSubspace.offsets(self.ctx, self.top_degree)
        lo, hi = offs[degree], offs[degree + 1]
        field = self.ctx.field
        vecs = []
        for row in self.basis_sparse():
            vec = [Scalar(field, field.zero)] * (hi - lo)
            nonzero = False
            for c, v in row.items():
                if lo <= c < hi:
                    vec[c - lo] = Scalar(field, v)
                    nonzero = True
            if nonzero:
                vecs.append(vec)
        return Subspace.from_vectors(vecs, hi - lo, self.ctx.conductor)

    def extend_top(self, new_top: int) -> "FilteredSubspace":
        """Re-embed into the larger filtration level F^new_top."""
        if new_top < self.top_degree:
            raise DimensionMismatch("cannot shrink the filtration level")
        if new_top == self.top_degree:
            return self
        terms = self.basis_terms()
        return FilteredSubspace.from_elements(self.ctx, new_top, terms, close=False)

    def mul_E(self, side: str) -> "FilteredSubspace":
        """P·E (side='right') or E·P (side='left'), one degree up."""
        ctx = self.ctx
        new_top = self.top_degree + 1
        one = Scalar.one(ctx.conductor)
        elements = []
        for terms in self.basis_terms():
            for letter in range(ctx.dimV):
                for g in range(ctx.order):
                    other = {((letter,), g): one}
                    prod = (
                        ctx.smash_mul_terms(terms, other)
                        if side == "right"
                        else ctx.smash_mul_terms(other, terms)
                    )
                    elements.append(prod)
        return FilteredSubspace.from_elements(ctx, new_top, elements, close=False)

    def truncate_intersection(self, level: int) -> "FilteredSubspace":
        """Intersection with F^level, returned inside F^level."""
        if level >= self.top_degree:
            return self.extend_top(level)
        cut = FilteredSubspace.offsets(self.ctx, self.top_degree)[level + 1]
        coords = Subspace.from_vectors(
            [
                [Scalar.one(self.ctx.conductor) if j == i else Scalar.zero(self.ctx.conductor) for j in range(self.space.ambient_dim)]
                for i in range(cut)
            ],
            self.space.ambient_dim,
            self.ctx.conductor,
        )
        inter = self.space.intersect(coords)
        field = self.ctx.field
        vecs = [row[:cut] for row in inter.basis_rows()]
        sub = Subspace.from_vectors(vecs, cut, self.ctx.conductor)
        return FilteredSubspace(self.ctx, level, sub)

    def contains(self, other: "FilteredSubspace") -> bool:
        o = other.extend_top(self.top_degree)
        return self.space.contains_subspace(o.space)

    def __eq__(self, other):
        if not isinstance(other, FilteredSubspace):
            return NotImplemented
        return self.top_degree == other.top_degree and self.space == other.space

    def __repr__(self):
        return f"FilteredSubspace(top={self.top_degree}, dim={self.dim})"


def _filtered_closure_rows(ctx: TensorContext, top: int, rows: list[dict]) -> list[dict]:
    elim = SparseEliminator(ctx.field)
    holder = FilteredSubspace(ctx, top, Subspace.zero(FilteredSubspace.ambient(ctx, top), ctx.conductor))
    work = []
    for r in rows:
        if elim.add(r) is not None:
            work.append(r)
    gens = ctx.group.generators
    while work:
        row = work.pop()
        for g in gens:
            for img in (
                holder._action_sparse(row, g, "left"),
                holder._action_sparse(row, g, "right"),
            ):
                red = elim.reduce(img)
                if red:
                    elim.add(red)
                    work.append(red)
    return elim.rows_canonical()
