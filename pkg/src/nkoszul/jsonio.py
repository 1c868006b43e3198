"""JSON input formats for contexts, presentations and psi maps.

The input file carries a context block and a presentation block:

    {
      "context": {"conductor": 1, "dimV": 2,
                  "group_generators": [["0", "1", "-1", "0"]]},
      "presentation": {"N": 2, "P": [[{"coeff": "1", "word": [1, 2], "g": 0},
                                      ...], ...]}
    }

Words use 1-based letter indices; "g" is the element index in the
enumerated group; coefficients are scalar literals like "3/2" or
"zeta^2 - 1/3" over the declared conductor.  In place of explicit
relations, builder shortcuts are accepted:

    {"builder": "down_up", "alpha": "2", "beta": "-1", "gamma": "1"}
    {"builder": "lie", "structure_constants": [[1, 2, 3, "1"], ...]}
    {"builder": "h_psi", "p": 2, "psi": {...}}
    {"builder": "h_psi", "p": 2,
     "psi_builder": {"builder": "symplectic_reflection",
                     "omega": [["0", "1"], ["-1", "0"]], "m": ["1", "1"]}}

A psi map is {"p": p, "psi": [{"g": 0, "values": {"[1,2]": "1"}}]}.
"""

from __future__ import annotations

import json
from typing import Optional

from .filtered import FilteredPresentation, build_down_up, build_lie
from .grouppres import (
    PsiMap,
    build_H_psi,
    build_psi_corollary45,
    build_psi_symplectic_reflection,
)
from .scalar import DimensionMismatch, MatrixS, Scalar, parse_scalar
from .smashtensor import FilteredSubspace, GroupData, TensorContext


class InputError(ValueError):
    """Malformed or inconsistent input data."""


def parse_context(block: dict) -> TensorContext:
    try:
        conductor = int(block.get("conductor", 1))
        dimV = int(block["dimV"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad context block: {exc}") from exc
    gens = block.get("group_generators") or []
    if not gens:
        return TensorContext(dimV, GroupData.trivial(dimV, conductor), conductor)
    mats = []
    for flat in gens:
        if len(flat) != dimV * dimV:
            raise InputError("group generator must have dimV^2 entries, row-major")
        try:
            entries = [parse_scalar(str(s), conductor) for s in flat]
        except ValueError as exc:
            raise InputError(f"bad group matrix entry: {exc}") from exc
        mats.append(MatrixS(dimV, dimV, entries, conductor))
    try:
        group = GroupData.from_generators(mats, order_cap=int(block.get("order_cap", 1024)))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return TensorContext(dimV, group, conductor)


def parse_terms(ctx: TensorContext, items: list) -> dict:
    out: dict = {}
    for item in items:
        try:
            coeff = parse_scalar(str(item["coeff"]), ctx.conductor)
            word = tuple(int(i) - 1 for i in item.get("word", []))
            g = int(item.get("g", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad term {item!r}: {exc}") from exc
        if any(not 0 <= l < ctx.dimV for l in word):
            raise InputError(f"letter out of range in {item!r}")
        if not 0 <= g < ctx.order:
            raise InputError(f"group index out of range in {item!r}")
        key = (word, g)
        out[key] = out.get(key, Scalar.zero(ctx.conductor)) + coeff
    return {k: v for k, v in out.items() if not v.is_zero()}


def terms_to_json(terms: dict) -> list:
    out = []
    for (word, g), c in sorted(terms.items()):
        out.append({"coeff": str(c), "word": [i + 1 for i in word], "g": g})
    return out


def parse_psi(block: dict, group: GroupData, conductor: int) -> PsiMap:
    if "builder" in block:
        name = block["builder"]
        factors = block.get("m")
        if name == "symplectic_reflection":
            omega_rows = block["omega"]
            n = len(omega_rows)
            entries = [
                parse_scalar(str(x), conductor) for row in omega_rows for x in row
            ]
            omega = MatrixS(n, n, entries, conductor)
            return build_psi_symplectic_reflection(group, omega, factors, conductor)
        if name == "corollary45":
            p = int(block["p"])
            phi = {}
            for key, val in block["phi"].items():
                combo = tuple(int(i) - 1 for i in json.loads(key))
                phi[combo] = parse_scalar(str(val), conductor)
            return build_psi_corollary45(group, p, phi, factors, conductor)
        raise InputError(f"unknown psi builder {name!r}")
    try:
        p = int(block["p"])
        comps: dict = {}
        for entry in block.get("psi", []):
            g = int(entry["g"])
            table = {}
            for key, val in entry.get("values", {}).items():
                combo = tuple(int(i) - 1 for i in json.loads(key))
                table[combo] = parse_scalar(str(val), conductor)
            comps[g] = table
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad psi block: {exc}") from exc
    return PsiMap(p, group.dimV, group.order, comps, conductor)


def psi_to_json(psi: PsiMap) -> dict:
    out = {"p": psi.p, "psi": []}
    for g in sorted(psi.components):
        values = {
            json.dumps([i + 1 for i in combo]): str(c)
            for combo, c in sorted(psi.components[g].items())
        }
        out["psi"].append({"g": g, "values": values})
    return out


def parse_input(data: dict):
    """Returns (presentation, psi or None, hpsi data or None)."""
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    block = data.get("presentation")
    if block is None:
        raise InputError("missing presentation block")
    ctx: Optional[TensorContext] = None
    if "context" in data:
        ctx = parse_context(data["context"])
    builder = block.get("builder") if isinstance(block, dict) else None
    if builder == "down_up":
        conductor = ctx.conductor if ctx else 1
        if ctx and ctx.order != 1:
            raise InputError("the down-up builder uses the trivial group")
        pres = build_down_up(
            parse_scalar(str(block["alpha"]), conductor),
            parse_scalar(str(block["beta"]), conductor),
            parse_scalar(str(block["gamma"]), conductor),
            conductor,
        )
        return pres, None, None
    if builder == "lie":
        conductor = ctx.conductor if ctx else 1
        if ctx and ctx.order != 1:
            raise InputError("the lie builder uses the trivial group")
        rows = block["structure_constants"]
        sc = [
            [int(r[0]), int(r[1]), int(r[2]), parse_scalar(str(r[3]), conductor)]
            for r in rows
        ]
        pres = build_lie(sc, dimV=ctx.dimV if ctx else None, conductor=conductor)
        return pres, None, None
    if builder == "h_psi":
        if ctx is None:
            raise InputError("the h_psi builder needs a context block")
        p = int(block["p"])
        psi_block = block.get("psi") or block.get("psi_builder")
        if psi_block is None:
            psi = PsiMap(p, ctx.dimV, ctx.order, {}, ctx.conductor)
        else:
            psi = parse_psi(psi_block, ctx.group, ctx.conductor)
        pres = build_H_psi(ctx.group, p, psi, ctx.conductor)
        return pres, psi, {"group": ctx.group, "p": p}
    if builder is not None:
        raise InputError(f"unknown builder {builder!r}")
    if ctx is None:
        raise InputError("explicit presentations need a context block")
    try:
        N = int(block["N"])
        raw_elements = block["P"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad presentation block: {exc}") from exc
    elements = [parse_terms(ctx, item) for item in raw_elements]
    for terms in elements:
        for (word, _g) in terms:
            if len(word) > N:
                raise InputError("relation term exceeds the stated degree")
    P = FilteredSubspace.from_elements(ctx, N, elements, close=True)
    return FilteredPresentation(ctx, N, P), None, None


def load_input(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    try:
        return parse_input(data)
    except (DimensionMismatch, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
