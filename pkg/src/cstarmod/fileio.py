"""JSON file formats for operators, vectors and submodules.

Operator::

    {"algebra": {"blocks": [n1, ...]}, "domain_rank": k, "codomain_rank": m,
     "blocks": [{"re": [[...]], "im": [[...]]}, ...]}

Vector: ``{"algebra": ..., "rank": k, "blocks": [...]}`` with blocks of shape
``n_i x (k n_i)``. Submodule: ``{"algebra": ..., "rank": k, "basis": [...]}``
with one ``d_i x (k n_i)`` row-basis matrix per block.

Floats go through ``json`` which writes the shortest decimal that round-trips
the 64-bit value, so write-then-read is bit exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .cstar import BlockAlgebra
from .errors import CStarModError, ParseError
from .hmod import ModuleSpace, ModuleVector, Submodule
from .modop import ModuleOperator


def _matrix_to_json(a: np.ndarray) -> dict:
    return {
        "re": [[float(v) for v in row] for row in a.real],
        "im": [[float(v) for v in row] for row in a.imag],
    }


def _matrix_from_json(obj, shape: tuple[int, int], where: str) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise ParseError(f"{where}: expected an object with 're' and 'im'")
    for part in ("re", "im"):
        rows = obj[part]
        if not isinstance(rows, list) or len(rows) != shape[0] or any(
            not isinstance(r, list) or len(r) != shape[1] for r in rows
        ):
            raise ParseError(f"{where}.{part}: expected shape {shape}")
    try:
        re = np.array(obj["re"], dtype=float).reshape(shape)
        im = np.array(obj["im"], dtype=float).reshape(shape)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric matrix entries ({exc})") from None
    a = re + 1j * im
    if not np.all(np.isfinite(a)):
        raise ParseError(f"{where}: non-finite entries")
    return a


def _algebra_from_json(obj, where: str) -> BlockAlgebra:
    try:
        dims = obj["algebra"]["blocks"]
    except (KeyError, TypeError):
        raise ParseError(f"{where}.algebra.blocks: missing") from None
    if not isinstance(dims, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in dims):
        raise ParseError(f"{where}.algebra.blocks: expected a list of integers")
    try:
        return BlockAlgebra(tuple(dims))
    except CStarModError as exc:
        raise ParseError(f"{where}.algebra.blocks: {exc}") from None


def _int_field(obj, name: str, where: str) -> int:
    v = obj.get(name)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"{where}.{name}: expected a positive integer")
    return v


def _blocks_field(obj, name: str, count: int, where: str) -> list:
    v = obj.get(name)
    if not isinstance(v, list) or len(v) != count:
        raise ParseError(f"{where}.{name}: expected a list of {count} matrices")
    return v


def operator_to_dict(t: ModuleOperator) -> dict:
    return {
        "algebra": {"blocks": list(t.domain.algebra.block_dims)},
        "domain_rank": t.domain.rank,
        "codomain_rank": t.codomain.rank,
        "blocks": [_matrix_to_json(b) for b in t.blocks],
    }


def operator_from_dict(obj, where: str = "operator") -> ModuleOperator:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a JSON object")
    alg = _algebra_from_json(obj, where)
    dom = ModuleSpace(alg, _int_field(obj, "domain_rank", where))
    cod = ModuleSpace(alg, _int_field(obj, "codomain_rank", where))
    raw = _blocks_field(obj, "blocks", alg.num_blocks, where)
    blocks = tuple(
        _matrix_from_json(raw[i], (dom.block_width(i), cod.block_width(i)), f"{where}.blocks[{i}]")
        for i in range(alg.num_blocks)
    )
    return ModuleOperator(dom, cod, blocks)


def vector_to_dict(x: ModuleVector) -> dict:
    return {
        "algebra": {"blocks": list(x.space.algebra.block_dims)},
        "rank": x.space.rank,
        "blocks": [_matrix_to_json(b) for b in x.blocks],
    }


def vector_from_dict(obj, where: str = "vector") -> ModuleVector:
    alg = _algebra_from_json(obj, where)
    space = ModuleSpace(alg, _int_field(obj, "rank", where))
    raw = _blocks_field(obj, "blocks", alg.num_blocks, where)
    return ModuleVector(
        space,
        tuple(
            _matrix_from_json(raw[i], (n, space.block_width(i)), f"{where}.blocks[{i}]")
            for i, n in enumerate(alg.block_dims)
        ),
    )


def submodule_to_dict(m: Submodule) -> dict:
    return {
        "algebra": {"blocks": list(m.space.algebra.block_dims)},
        "rank": m.space.rank,
        "basis": [_matrix_to_json(b) for b in m.bases],
    }


def submodule_from_dict(obj, where: str = "submodule") -> Submodule:
    alg = _algebra_from_json(obj, where)
    space = ModuleSpace(alg, _int_field(obj, "rank", where))
    raw = _blocks_field(obj, "basis", alg.num_blocks, where)
    rows = []
    for i in range(alg.num_blocks):
        r = raw[i]
        nrows = len(r["re"]) if isinstance(r, dict) and isinstance(r.get("re"), list) else 0
        rows.append(_matrix_from_json(r, (nrows, space.block_width(i)), f"{where}.basis[{i}]"))
    # stored rows need not be orthonormal; re-derive the basis
    return Submodule.from_rows(space, rows)


def _read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def write_operator(t: ModuleOperator, path) -> None:
    dump_json(operator_to_dict(t), path)


def read_operator(path) -> ModuleOperator:
    return operator_from_dict(_read_json(path), where=str(path))


def write_submodule(m: Submodule, path) -> None:
    dump_json(submodule_to_dict(m), path)


def read_submodule(path) -> Submodule:
    return submodule_from_dict(_read_json(path), where=str(path))


def write_vector(x: ModuleVector, path) -> None:
    dump_json(vector_to_dict(x), path)


def read_vector(path) -> ModuleVector:
    return vector_from_dict(_read_json(path), where=str(path))


def read_any(path):
    """Load an operator, submodule or vector file, dispatching on its keys."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    if "domain_rank" in obj:
        return operator_from_dict(obj, str(path))
    if "basis" in obj:
        return submodule_from_dict(obj, str(path))
    if "rank" in obj and "blocks" in obj:
        return vector_from_dict(obj, str(path))
    raise ParseError(f"{path}: not an operator, submodule or vector file")
