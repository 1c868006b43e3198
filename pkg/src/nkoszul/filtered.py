"""Filtered algebras U = T(V)#Gamma / I(P) and the PBW machinery.

P is a sub-bimodule of the filtration level F^N; its top-degree projection
R defines the homogenized algebra A.  The module provides:

* the projection to R and the filtration condition dim P = dim R,
* the correction map phi with P = {x - phi(x)} and its graded components,
* the overlap condition in three independently computed forms (the direct
  intersection, the lifted-map form on W_{N+1}, and the componentwise
  equations), which must always agree,
* a PBW verdict combining those with the degree-3 Tor concentration of A,
* a brute-force oracle that builds the filtered ideal degree by degree and
  checks J^n ∩ F^{n-1} = J^{n-1} directly, reporting candidate dimensions
  for the associated graded algebra,
* builders for enveloping-algebra and down-up presentations.

The oracle works in degree-descending block coordinates so that the
reduced rows of J^n in lower blocks are exactly the rows of J^{n-1}; a new
pivot landing below the top block is precisely a witness that the
filtration equality fails at that degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .elim import SparseEliminator
from .homogeneous import (
    HomogeneousAlgebra,
    Tor3Report,
    check_tor3_concentration,
    w_rows,
)
from .scalar import DimensionMismatch, Scalar
from .smashtensor import (
    FilteredSubspace,
    GroupData,
    Subbimodule,
    TensorContext,
    antisymmetrizer_subbimodule,
)


class FilteredPresentation:
    """The data (field, Gamma, V, N, P ⊆ F^N) defining U = T(V)#Gamma / I(P)."""

    def __init__(self, ctx: TensorContext, N: int, P: FilteredSubspace):
        if N < 2:
            raise ValueError("relation degree N must be at least 2")
        if P.top_degree != N:
            raise DimensionMismatch("P must sit inside the filtration level F^N")
        self.ctx = ctx
        self.N = N
        self.P = P
        self._R: Optional[Subbimodule] = None
        self._A: Optional[HomogeneousAlgebra] = None

    def homogenization(self) -> HomogeneousAlgebra:
        if self._A is None:
            self._A = HomogeneousAlgebra(self.ctx, self.N, project_R(self))
        return self._A

    def __repr__(self):
        return (
            f"FilteredPresentation(dimV={self.ctx.dimV}, |G|={self.ctx.order}, "
            f"N={self.N}, dimP={self.P.dim})"
        )


def project_R(pres: FilteredPresentation) -> Subbimodule:
    """Image of P under the block projection onto the top degree."""
    if pres._R is None:
        top = pres.P.block_projection(pres.N)
        terms = [
            pres.ctx.sparse_to_terms(
                {j: x.raw for j, x in enumerate(row) if not x.is_zero()}, pres.N
            )
            for row in top.basis_rows()
        ]
        pres._R = Subbimodule.from_elements(pres.ctx, pres.N, terms, close=False)
    return pres._R


def check_condition_I(pres: FilteredPresentation) -> bool:
    """P ∩ F^{N-1} = 0, equivalently dim P = dim R."""
    return pres.P.dim == project_R(pres).dim


@dataclass
class PhiMap:
    """The unique correction map with P = {x - phi(x) : x in R}.

    ``rows[t]`` is phi applied to the t-th canonical basis row of R, stored
    as a sparse vector over the filtration coordinates of F^{N-1}.
    """

    pres: FilteredPresentation
    r_rows: list
    rows: list

    @property
    def N(self) -> int:
        return self.pres.N

    def component(self, j: int) -> list[dict]:
        """Degree-j graded piece of each phi value, as component-j vectors."""
        ctx = self.pres.ctx
        offs = FilteredSubspace.offsets(ctx, self.N - 1)
        lo, hi = offs[j], offs[j + 1]
        return [
            {c - lo: v for c, v in row.items() if lo <= c < hi} for row in self.rows
        ]

    def is_zero_component(self, j: int) -> bool:
        return all(not comp for comp in self.component(j))

    def apply_to_R_vector(self, coeffs: list) -> dict:
        """phi of the element with the given R-basis coefficients."""
        field = self.pres.ctx.field
        out: dict = {}
        for t, c in enumerate(coeffs):
            if field.is_zero(c):
                continue
            for col, v in self.rows[t].items():
                term = field.mul(c, v)
                cur = out.get(col)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    out.pop(col, None)
                else:
                    out[col] = nv
        return out

    def rebuild_P(self) -> FilteredSubspace:
        """Span of {x_t - phi(x_t)}; equals P whenever condition (I) holds."""
        ctx = self.pres.ctx
        N = self.N
        offs = FilteredSubspace.offsets(ctx, N)
        elements = []
        field = ctx.field
        for r_row, phi_row in zip(self.r_rows, self.rows):
            terms = {}
            for c, v in r_row.items():
                word, g = ctx.word_of(c, N)
                terms[(word, g)] = Scalar(field, v)
            low = FilteredSubspace.sparse_to_terms(ctx, N - 1, phi_row)
            for key, val in low.items():
                terms[key] = terms.get(key, Scalar.zero(ctx.conductor)) - val
            elements.append(terms)
        return FilteredSubspace.from_elements(ctx, N, elements, close=False)


def build_phi(pres: FilteredPresentation) -> PhiMap:
    """Extract phi from the graph structure of P over its top projection."""
    if not check_condition_I(pres):
        raise ValueError("phi exists only when P meets F^{N-1} trivially")
    ctx = pres.ctx
    field = ctx.field
    N = pres.N
    offs = FilteredSubspace.offsets(ctx, N)
    top_lo = offs[N]
    top_dim = ctx.component_dim(N)
    low_dim = top_lo
    # reorder coordinates: top block first, then the lower filtration
    reordered = []
    for row in pres.P.basis_sparse():
        new = {}
        for c, v in row.items():
            if c >= top_lo:
                new[c - top_lo] = v
            else:
                new[c + top_dim] = v
        reordered.append(new)
    elim = SparseEliminator(field)
    for r in reordered:
        elim.add(r)
    r_rows = []
    phi_rows = []
    for piv in sorted(elim.pivot_rows):
        row = elim.pivot_rows[piv]
        if piv >= top_dim:
            raise ValueError("phi exists only when P meets F^{N-1} trivially")
        r_rows.append({c: v for c, v in row.items() if c < top_dim})
        phi_rows.append({c - top_dim: field.neg(v) for c, v in row.items() if c >= top_dim})
    return PhiMap(pres=pres, r_rows=r_rows, rows=phi_rows)


# -- lifted applications of phi on W_{N+1} ----------------------------------


def _left_splits(pres: FilteredPresentation, w_row: dict, r_rows: list, r_pivots) -> list:
    """w = sum e_j ⊗ (R combination): triples (j, t, coeff)."""
    ctx = pres.ctx
    field = ctx.field
    lower = ctx.dimV**pres.N * ctx.order
    blocks: dict[int, dict] = {}
    for coord, raw in w_row.items():
        j, rest = divmod(coord, lower)
        blocks.setdefault(j, {})[rest] = raw
    out = []
    for j, block in sorted(blocks.items()):
        residual = dict(block)
        for t, piv in enumerate(r_pivots):
            c = residual.get(piv)
            if c is None or field.is_zero(c):
                continue
            out.append((j, t, c))
            for col, v in r_rows[t].items():
                cur = residual.get(col)
                term = field.mul(c, v)
                nv = field.sub(cur, term) if cur is not None else field.neg(term)
                if field.is_zero(nv):
                    residual.pop(col, None)
                else:
                    residual[col] = nv
        if residual:
            raise ValueError("degree N+1 overlap element does not lie in E·R")
    return out


def _right_splits(pres: FilteredPresentation, w_row: dict, r_rows: list) -> list:
    """w = sum (R combination) · (e_l ⊗ g): triples ((t, l, g), coeff)."""
    ctx = pres.ctx
    field = ctx.field
    N = pres.N
    dimR = len(r_rows)
    amb = ctx.component_dim(N + 1)
    # augmented solve: rows r_t·(e_l ⊗ g) with tag coordinates
    elim = SparseEliminator(field)
    tags = {}
    idx = 0
    one = Scalar.one(ctx.conductor)
    for t, r in enumerate(r_rows):
        r_terms = ctx.sparse_to_terms(r, N)
        for l in range(ctx.dimV):
            for g in range(ctx.order):
                prod = ctx.smash_mul_terms(r_terms, {((l,), g): one})
                row = ctx.terms_to_sparse(prod)
                row[amb + idx] = field.one
                tags[idx] = (t, l, g)
                elim.add(row)
                idx += 1
    residual = elim.reduce(dict(w_row))
    out = []
    for c, v in residual.items():
        if c < amb:
            raise ValueError("degree N+1 overlap element does not lie in R·E")
        out.append((tags[c - amb], field.neg(v)))
    return out


def _phi_lift_difference(pres: FilteredPresentation, phi: PhiMap, w_row: dict) -> dict:
    """(phi^{1,N} - phi^{2,N+1}) applied to a degree N+1 overlap element.

    Returned as a sparse vector over the filtration coordinates of F^N.
    """
    ctx = pres.ctx
    field = ctx.field
    N = pres.N
    r_pivots = [min(r) for r in phi.r_rows]
    one = Scalar.one(ctx.conductor)
    out: dict = {}

    def accumulate(terms, scale):
        row = FilteredSubspace.terms_to_sparse(ctx, N, terms)
        for c, v in row.items():
            term = field.mul(scale, v)
            cur = out.get(c)
            nv = term if cur is None else field.add(cur, term)
            if field.is_zero(nv):
                out.pop(c, None)
            else:
                out[c] = nv

    # phi^{1,N}: w = sum (r_t combination)·(e_l ⊗ g) -> phi(r_t)·(e_l ⊗ g)
    for (t, l, g), coeff in _right_splits(pres, w_row, phi.r_rows):
        phi_terms = FilteredSubspace.sparse_to_terms(ctx, N - 1, phi.rows[t])
        prod = ctx.smash_mul_terms(phi_terms, {((l,), g): one})
        accumulate(prod, coeff)
    # phi^{2,N+1}: w = sum e_j ⊗ (r_t combination) -> (e_j ⊗ 1)·phi(r_t)
    for j, t, coeff in _left_splits(pres, w_row, phi.r_rows, r_pivots):
        phi_terms = FilteredSubspace.sparse_to_terms(ctx, N - 1, phi.rows[t])
        prod = ctx.smash_mul_terms({((j,), 0): one}, phi_terms)
        accumulate(prod, field.neg(coeff))
    return out


@dataclass
class JReport:
    """Three independently computed answers to the overlap condition."""

    direct: bool
    lifted: bool
    j1: bool
    j2: dict[int, bool]
    j3: bool

    @property
    def components(self) -> bool:
        return self.j1 and self.j3 and all(self.j2.values())

    @property
    def holds(self) -> bool:
        return self.direct

    def to_json(self) -> dict:
        return {
            "direct": self.direct,
            "lifted": self.lifted,
            "J'1": self.j1,
            "J'2": {str(k): v for k, v in sorted(self.j2.items())},
            "J'3": self.j3,
            "holds": self.holds,
        }


def check_condition_J(pres: FilteredPresentation) -> JReport:
    """(PE + EP) ∩ F^N ⊆ P, computed three ways that must agree."""
    if not check_condition_I(pres):
        raise ValueError("the overlap condition presupposes condition (I)")
    ctx = pres.ctx
    field = ctx.field
    N = pres.N
    phi = build_phi(pres)

    # strategy 1: direct intersection
    pe = pres.P.mul_E("right")
    ep = pres.P.mul_E("left")
    combined = FilteredSubspace(ctx, N + 1, pe.space.sum(ep.space))
    cut = combined.truncate_intersection(N)
    direct = pres.P.contains(cut)

    # strategy 2: the lifted difference maps W_{N+1} into P
    alg = pres.homogenization()
    wn1 = w_rows(alg, N + 1, {})
    p_elim = SparseEliminator(field)
    for r in pres.P.basis_sparse():
        p_elim.add(r)
    lifted = True
    diffs = []
    for w in wn1:
        diff = _phi_lift_difference(pres, phi, w)
        diffs.append(diff)
        if p_elim.reduce(diff):
            lifted = False

    # strategy 3: componentwise equations
    offs = FilteredSubspace.offsets(ctx, N)
    top_lo = offs[N]
    r_pivots = [min(r) for r in phi.r_rows]
    j1 = True
    j2 = {j: True for j in range(1, N)}
    j3 = True
    for diff in diffs:
        top = {c - top_lo: v for c, v in diff.items() if c >= top_lo}
        residual = dict(top)
        coeffs = []
        for t, piv in enumerate(r_pivots):
            c = residual.get(piv, field.zero)
            coeffs.append(c)
            if field.is_zero(c):
                continue
            for col, v in phi.r_rows[t].items():
                cur = residual.get(col)
                term = field.mul(c, v)
                nv = field.sub(cur, term) if cur is not None else field.neg(term)
                if field.is_zero(nv):
                    residual.pop(col, None)
                else:
                    residual[col] = nv
        if residual:
            j1 = False
            continue
        phi_of_top = phi.apply_to_R_vector(coeffs)
        for j in range(1, N):
            lo, hi = offs[j], offs[j + 1]
            block_x = {c: v for c, v in diff.items() if lo <= c < hi}
            block_phi = {c: v for c, v in phi_of_top.items() if lo <= c < hi}
            # X_j + phi_j(pi X) = 0
            acc = dict(block_x)
            for c, v in block_phi.items():
                cur = acc.get(c)
                nv = field.add(cur, v) if cur is not None else v
                if field.is_zero(nv):
                    acc.pop(c, None)
                else:
                    acc[c] = nv
            if acc:
                j2[j] = False
        lo, hi = offs[0], offs[1]
        if any(lo <= c < hi for c in phi_of_top):
            j3 = False

    report = JReport(direct=direct, lifted=lifted, j1=j1, j2=j2, j3=j3)
    if not (report.direct == report.lifted == report.components):
        raise RuntimeError(
            "internal error: the three overlap-condition strategies disagree"
        )
    return report


def check_remark_310(pres: FilteredPresentation) -> bool:
    """True iff phi_0 = 0, i.e. the trivial module structure exists."""
    phi = build_phi(pres)
    return phi.is_zero_component(0)


def is_antisymmetrizer_relations(alg: HomogeneousAlgebra) -> bool:
    """Does R equal the closed span of the antisymmetrized N-tensors?"""
    if alg.N > alg.ctx.dimV:
        return False
    expected = antisymmetrizer_subbimodule(alg.ctx, alg.N)
    return alg.R.space == expected.space


# -- the brute-force filtration oracle ---------------------------------------


class OracleEngine:
    """Degreewise construction of J^n in degree-descending coordinates.

    After ``run()`` the eliminator holds the canonical reduced rows of J^D;
    pivots in the degree-d block are exactly the rows new at step d whenever
    the filtration equalities hold, which downstream consumers (the
    truncated algebra) rely on.
    """

    def __init__(self, pres: FilteredPresentation, D: int):
        if D < pres.N:
            raise ValueError("the bound must be at least the relation degree")
        self.pres = pres
        self.D = D
        ctx = pres.ctx
        self.offsets_desc = [0] * (D + 2)
        for d in range(D, -1, -1):
            self.offsets_desc[d] = self.offsets_desc[d + 1] + ctx.component_dim(d)
        # offsets_desc[d] is the end of block d; block d spans
        # [offsets_desc[d+1], offsets_desc[d]).
        self.elim = SparseEliminator(ctx.field)
        self.j_dims: dict[int, int] = {}
        self.equalities: dict[int, bool] = {}
        self.new_top: dict[int, int] = {}
        self.witnesses: dict[int, dict] = {}
        self._ran = False

    def block_of(self, coord: int) -> int:
        d = self.D
        while coord >= self.offsets_desc[d]:
            d -= 1
        return d

    def coord_desc(self, word: tuple[int, ...], g: int) -> int:
        d = len(word)
        return self.offsets_desc[d + 1] + self.pres.ctx.coord(word, g)

    def decode(self, coord: int) -> tuple[tuple[int, ...], int]:
        d = self.block_of(coord)
        return self.pres.ctx.word_of(coord - self.offsets_desc[d + 1], d)

    def _filtered_to_desc(self, row: dict, top: int) -> dict:
        ctx = self.pres.ctx
        offs = FilteredSubspace.offsets(ctx, top)
        out = {}
        for c, v in row.items():
            d = 0
            while offs[d + 1] <= c:
                d += 1
            out[self.offsets_desc[d + 1] + (c - offs[d])] = v
        return out

    def _prepend_letter(self, row: dict, letter: int) -> dict:
        ctx = self.pres.ctx
        order = ctx.order
        out = {}
        for coord, raw in row.items():
            d = self.block_of(coord)
            local = coord - self.offsets_desc[d + 1]
            g = local % order
            wnum = local // order
            wnum2 = letter * ctx.dimV**d + wnum
            out[self.offsets_desc[d + 2] + wnum2 * order + g] = raw
        return out

    def _append_letter(self, row: dict, letter: int) -> dict:
        ctx = self.pres.ctx
        field = ctx.field
        order = ctx.order
        out: dict = {}
        for coord, raw in row.items():
            d = self.block_of(coord)
            local = coord - self.offsets_desc[d + 1]
            g = local % order
            wnum = local // order
            for i, c in ctx._cols[g][letter]:
                coord2 = self.offsets_desc[d + 2] + (wnum * ctx.dimV + i) * order + g
                term = field.mul(raw, c)
                cur = out.get(coord2)
                nv = term if cur is None else field.add(cur, term)
                if field.is_zero(nv):
                    out.pop(coord2, None)
                else:
                    out[coord2] = nv
        return out

    def run(self) -> None:
        if self._ran:
            return
        self._ran = True
        pres = self.pres
        ctx = pres.ctx
        N = pres.N
        tower = pres.homogenization().tower()
        p_rows = [self._filtered_to_desc(r, N) for r in pres.P.basis_sparse()]
        pv_rows = p_rows  # P · V^{⊗m}, advanced each degree
        t_hat = []
        for n in range(N, self.D + 1):
            if n == N:
                new_rows = list(p_rows)
            else:
                new_rows = [
                    self._prepend_letter(r, letter)
                    for r in t_hat
                    for letter in range(ctx.dimV)
                ]
                pv_rows = [
                    self._append_letter(r, letter)
                    for r in pv_rows
                    for letter in range(ctx.dimV)
                ]
                new_rows.extend(pv_rows)
            t_hat = []
            top_added = 0
            low_added = 0
            top_boundary = self.offsets_desc[n]
            for row in new_rows:
                piv = self.elim.add(row)
                if piv is None:
                    continue
                t_hat.append(dict(self.elim.pivot_rows[piv]))
                if piv < top_boundary:
                    top_added += 1
                else:
                    low_added += 1
                    self.witnesses.setdefault(n, dict(self.elim.pivot_rows[piv]))
            self.j_dims[n] = self.elim.rank
            ideal_dim = ctx.component_dim(n) - tower.adim(n)
            if top_added != ideal_dim:
                raise RuntimeError(
                    "internal error: top-block rank disagrees with the graded ideal"
                )
            self.equalities[n] = low_added == 0

    def j_dim(self, n: int) -> int:
        if n < self.pres.N:
            return 0
        return self.j_dims[n]

    def candidate_gr_dim(self, n: int) -> int:
        ctx = self.pres.ctx
        f_n = sum(ctx.component_dim(i) for i in range(n + 1))
        f_prev = f_n - ctx.component_dim(n)
        if n == 0:
            return 1 * ctx.order - self.j_dim(0)
        return (f_n - self.j_dim(n)) - (f_prev - self.j_dim(n - 1))


@dataclass
class OracleReport:
    degree_bound: int
    equalities: dict[int, bool]
    candidate_gr_dims: list[int]
    a_dims: list[int]
    witness: Optional[dict] = None
    witness_degree: Optional[int] = None

    @property
    def holds(self) -> bool:
        return all(self.equalities.values())

    def to_json(self) -> dict:
        out = {
            "degree_bound": self.degree_bound,
            "equalities": {str(k): v for k, v in sorted(self.equalities.items())},
            "candidate_gr_dims": self.candidate_gr_dims,
            "a_dims": self.a_dims,
            "holds": self.holds,
        }
        if self.witness is not None:
            out["witness_degree"] = self.witness_degree
            out["witness"] = self.witness
        return out


def oracle_pbw(pres: FilteredPresentation, D: int) -> OracleReport:
    """Direct check of the filtration equalities J^n ∩ F^{n-1} = J^{n-1}."""
    engine = OracleEngine(pres, D)
    engine.run()
    tower = pres.homogenization().tower()
    cands = [engine.candidate_gr_dim(n) for n in range(D + 1)]
    a_dims = [tower.adim(n) for n in range(D + 1)]
    witness = None
    witness_degree = None
    for n in sorted(engine.witnesses):
        witness_degree = n
        row = engine.witnesses[n]
        terms = {}
        for c, v in row.items():
            word, g = engine.decode(c)
            terms[(word, g)] = Scalar(pres.ctx.field, v)
        witness = {
            "terms": [
                {
                    "coeff": str(val),
                    "word": [i + 1 for i in word],
                    "g": g,
                }
                for (word, g), val in sorted(terms.items())
            ]
        }
        break
    return OracleReport(
        degree_bound=D,
        equalities=dict(engine.equalities),
        candidate_gr_dims=cands,
        a_dims=a_dims,
        witness=witness,
        witness_degree=witness_degree,
    )


# -- combined verdict --------------------------------------------------------


@dataclass
class PBWReport:
    condition_I: bool
    condition_J: Optional[JReport]
    phi0_zero: Optional[bool]
    tor3: Optional[Tor3Report]
    oracle: OracleReport
    theorem34_verdict: str
    gr_table: list[tuple[int, int, int]]
    unconditional: bool = False

    @property
    def certified(self) -> bool:
        return self.theorem34_verdict.startswith("pbw_certified")

    def to_json(self) -> dict:
        return {
            "condition_I": self.condition_I,
            "condition_J": self.condition_J.to_json() if self.condition_J else None,
            "phi0_zero": self.phi0_zero,
            "tor3": self.tor3.to_json() if self.tor3 else None,
            "oracle": self.oracle.to_json(),
            "theorem34_verdict": self.theorem34_verdict,
            "gr_table": [
                {"n": n, "candidate_gr_dim": c, "a_dim": a} for n, c, a in self.gr_table
            ],
            "unconditional": self.unconditional,
        }


def pbw_verdict(pres: FilteredPresentation, D: int, threads: int = 1) -> PBWReport:
    """Conditions (I) and (J) plus Tor-3 concentration up to the bound.

    The verdict is ``pbw_certified_up_to_bound`` when all three hold; the
    Tor-3 premise is verified at degrees up to D only, except for the
    antisymmetrizer relation family, which is known Koszul outright, making
    the certificate unconditional there.
    """
    if D < 2 * pres.N:
        raise ValueError("the bound must reach 2N")
    cond_i = check_condition_I(pres)
    j_report = None
    phi0_zero = None
    alg = pres.homogenization()
    oracle = oracle_pbw(pres, D)
    if not cond_i:
        return PBWReport(
            condition_I=False,
            condition_J=None,
            phi0_zero=None,
            tor3=None,
            oracle=oracle,
            theorem34_verdict="failed(condition_I)",
            gr_table=[
                (n, oracle.candidate_gr_dims[n], oracle.a_dims[n]) for n in range(D + 1)
            ],
        )
    j_report = check_condition_J(pres)
    phi0_zero = check_remark_310(pres)
    tor3 = check_tor3_concentration(alg, D, threads)
    unconditional = is_antisymmetrizer_relations(alg)
    if not j_report.holds:
        failed = []
        if not j_report.j1:
            failed.append("J'1")
        failed.extend(f"J'2[{j}]" for j, ok in sorted(j_report.j2.items()) if not ok)
        if not j_report.j3:
            failed.append("J'3")
        verdict = "failed(%s)" % ", ".join(failed or ["condition_J"])
    elif not tor3.holds:
        verdict = f"failed(tor3: {tor3.verdict})"
    else:
        verdict = "pbw_certified_unconditionally" if unconditional else "pbw_certified_up_to_bound"
    return PBWReport(
        condition_I=cond_i,
        condition_J=j_report,
        phi0_zero=phi0_zero,
        tor3=tor3,
        oracle=oracle,
        theorem34_verdict=verdict,
        gr_table=[(n, oracle.candidate_gr_dims[n], oracle.a_dims[n]) for n in range(D + 1)],
        unconditional=unconditional,
    )


# -- builders ----------------------------------------------------------------


def build_lie(structure_constants, dimV: Optional[int] = None, conductor: int = 1) -> FilteredPresentation:
    """Enveloping-algebra presentation from alternating structure constants.

    ``structure_constants`` maps (i, j) with i < j (1-based) to a dict
    {k: coefficient} describing the bracket of the i-th and j-th basis
    vectors; entries may also be given as an iterable of rows
    [i, j, k, coeff].
    """
    table: dict[tuple[int, int], dict[int, Scalar]] = {}
    max_index = 0
    items = (
        structure_constants.items()
        if isinstance(structure_constants, dict)
        else [((int(r[0]), int(r[1])), {int(r[2]): r[3]}) for r in structure_constants]
    )
    merged: dict[tuple[int, int], dict[int, Scalar]] = {}
    for (i, j), val in items:
        if i == j:
            raise ValueError("structure constants must be alternating: need i != j")
        key = (i, j)
        bucket = merged.setdefault(key, {})
        for k, c in val.items():
            c = c if isinstance(c, Scalar) else Scalar.rational(Fraction(c), conductor)
            bucket[k] = bucket.get(k, Scalar.zero(conductor)) + c
        max_index = max(max_index, i, j, *val.keys())
    n = dimV if dimV is not None else max_index
    ctx = TensorContext(n, GroupData.trivial(n, conductor), conductor)
    one = Scalar.one(conductor)
    elements = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            terms = {((i - 1, j - 1), 0): one, ((j - 1, i - 1), 0): -one}
            bracket = merged.get((i, j), {})
            neg_rev = merged.get((j, i), {})
            for k, c in bracket.items():
                terms[((k - 1,), 0)] = terms.get(((k - 1,), 0), Scalar.zero(conductor)) - c
            for k, c in neg_rev.items():
                terms[((k - 1,), 0)] = terms.get(((k - 1,), 0), Scalar.zero(conductor)) + c
            elements.append(terms)
    P = FilteredSubspace.from_elements(ctx, 2, elements, close=True)
    return FilteredPresentation(ctx, 2, P)


def build_down_up(alpha, beta, gamma, conductor: int = 1) -> FilteredPresentation:
    """The two cubic down-up relations on generators d, u (beta nonzero)."""
    al = alpha if isinstance(alpha, Scalar) else Scalar.rational(Fraction(alpha), conductor)
    be = beta if isinstance(beta, Scalar) else Scalar.rational(Fraction(beta), conductor)
    ga = gamma if isinstance(gamma, Scalar) else Scalar.rational(Fraction(gamma), conductor)
    if be.is_zero():
        raise ValueError("the down-up family requires beta nonzero")
    ctx = TensorContext(2, GroupData.trivial(2, conductor), conductor)
    one = Scalar.one(conductor)
    d, u = 0, 1
    r1 = {
        ((d, d, u), 0): one,
        ((d, u, d), 0): -al,
        ((u, d, d), 0): -be,
        ((d,), 0): -ga,
    }
    r2 = {
        ((d, u, u), 0): one,
        ((u, d, u), 0): -al,
        ((u, u, d), 0): -be,
        ((u,), 0): -ga,
    }
    P = FilteredSubspace.from_elements(ctx, 3, [r1, r2], close=True)
    return FilteredPresentation(ctx, 3, P)
