"""JSON schemas for tensors, spectra, weight-vector descriptions, and reports.

All indices are 0-based on the wire.  Floats are emitted with at most 12
significant digits; serialization is deterministic, so identical inputs give
byte-identical documents.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .hwv import HWVSpec
from .oracle import MembershipVerdict
from .scaling import ScalingReport, TargetSpectrum
from .tensors import GroupTuple, Tensor


class SchemaError(ValueError):
    """A document violates its schema; the message carries the position."""


def _require(cond: bool, where: str, message: str) -> None:
    if not cond:
        raise SchemaError(f"{where}: {message}")


# --------------------------------------------------------------------------
# Tensors
# --------------------------------------------------------------------------


def tensor_to_obj(x: Tensor) -> dict:
    """Canonical sparse form: integer entries sorted by index, zeros omitted."""
    if not x.is_gaussian_integer():
        raise ValueError("only Gaussian-integer tensors are serialized")
    entries = []
    for idx in np.ndindex(*x.shape):
        v = x.data[idx]
        if v != 0:
            entries.append({"idx": [int(i) for i in idx],
                            "re": int(v.real), "im": int(v.imag)})
    return {"dims": [int(n) for n in x.shape], "entries": entries}


def _dense_to_array(node: Any, dims: Sequence[int], where: str) -> np.ndarray:
    if not dims:
        if isinstance(node, (int, float)) and int(node) == node:
            return np.array(complex(int(node)))
        if isinstance(node, list) and len(node) == 2 \
                and all(isinstance(v, (int, float)) and int(v) == v for v in node):
            return np.array(complex(int(node[0]), int(node[1])))
        raise SchemaError(f"{where}: expected an integer or [re, im] pair")
    _require(isinstance(node, list) and len(node) == dims[0], where,
             f"expected a list of length {dims[0]}")
    return np.stack([_dense_to_array(child, dims[1:], f"{where}[{i}]")
                     for i, child in enumerate(node)])


def tensor_from_obj(obj: Any, where: str = "tensor") -> Tensor:
    _require(isinstance(obj, dict), where, "expected an object")
    _require("dims" in obj, where, "missing 'dims'")
    dims = obj["dims"]
    _require(isinstance(dims, list) and len(dims) >= 2
             and all(isinstance(n, int) and n >= 1 for n in dims),
             f"{where}.dims", "expected a list of >= 2 positive integers")
    if "dense" in obj:
        data = _dense_to_array(obj["dense"], dims, f"{where}.dense")
        return Tensor(data)
    _require("entries" in obj, where, "missing 'entries' (or 'dense')")
    entries = obj["entries"]
    _require(isinstance(entries, list), f"{where}.entries", "expected a list")
    data = np.zeros(tuple(dims), dtype=complex)
    for pos, entry in enumerate(entries):
        here = f"{where}.entries[{pos}]"
        _require(isinstance(entry, dict), here, "expected an object")
        idx = entry.get("idx")
        _require(isinstance(idx, list) and len(idx) == len(dims)
                 and all(isinstance(i, int) for i in idx),
                 f"{here}.idx", f"expected {len(dims)} integers")
        _require(all(0 <= i < n for i, n in zip(idx, dims)), f"{here}.idx",
                 f"index out of range for dims {dims}")
        re, im = entry.get("re", 0), entry.get("im", 0)
        _require(isinstance(re, int) and isinstance(im, int), here,
                 "'re' and 'im' must be integers")
        data[tuple(idx)] = complex(re, im)
    return Tensor(data)


def load_tensor(path: str) -> Tensor:
    with open(path) as fh:
        return tensor_from_obj(json.load(fh), where=path)


def save_tensor(x: Tensor, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(tensor_to_obj(x)))


# --------------------------------------------------------------------------
# Spectra
# --------------------------------------------------------------------------


def spectrum_to_obj(p: TargetSpectrum) -> dict:
    return {"parts": [[str(v) for v in vec] for vec in p.parts]}


def spectrum_from_obj(obj: Any, where: str = "spectrum") -> TargetSpectrum:
    _require(isinstance(obj, dict) and "parts" in obj, where,
             "expected an object with 'parts'")
    parts = obj["parts"]
    _require(isinstance(parts, list) and parts, f"{where}.parts",
             "expected a nonempty list")
    rows = []
    for i, vec in enumerate(parts):
        here = f"{where}.parts[{i}]"
        _require(isinstance(vec, list) and vec, here, "expected a nonempty list")
        row = []
        for j, v in enumerate(vec):
            if isinstance(v, str):
                try:
                    row.append(Fraction(v))
                except (ValueError, ZeroDivisionError) as exc:
                    raise SchemaError(f"{here}[{j}]: bad fraction {v!r}") from exc
            elif isinstance(v, (int, float)):
                row.append(v)
            else:
                raise SchemaError(f"{here}[{j}]: expected a fraction string or number")
        rows.append(row)
    try:
        if all(isinstance(v, Fraction) for row in rows for v in row):
            return TargetSpectrum(tuple(tuple(row) for row in rows))
        return TargetSpectrum.from_floats([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_spectrum(path: str) -> TargetSpectrum:
    with open(path) as fh:
        return spectrum_from_obj(json.load(fh), where=path)


def save_spectrum(p: TargetSpectrum, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(spectrum_to_obj(p)))


# --------------------------------------------------------------------------
# Weight-vector descriptions
# --------------------------------------------------------------------------


def hwv_spec_to_obj(spec: HWVSpec) -> dict:
    return {"weight": [list(lam) for lam in spec.weight],
            "indexSeq": list(spec.index_seq),
            "perms": [list(pi) for pi in spec.perms]}


def hwv_spec_from_obj(obj: Any, where: str = "hwv") -> HWVSpec:
    _require(isinstance(obj, dict), where, "expected an object")
    for key in ("weight", "indexSeq", "perms"):
        _require(key in obj, where, f"missing {key!r}")
    try:
        return HWVSpec(weight=tuple(tuple(v) for v in obj["weight"]),
                       index_seq=tuple(obj["indexSeq"]),
                       perms=tuple(tuple(pi) for pi in obj["perms"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_hwv_spec(path: str) -> HWVSpec:
    with open(path) as fh:
        return hwv_spec_from_obj(json.load(fh), where=path)


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


def group_to_obj(group: GroupTuple) -> list:
    return [[[{"re": float(v.real), "im": float(v.imag)} for v in row]
             for row in np.asarray(mat, dtype=complex)]
            for mat in group]


def report_to_obj(report: ScalingReport) -> dict:
    obj = {
        "verdict": report.verdict,
        "iterations": report.iterations,
        "budgetT": report.budget,
        "epsilon": report.epsilon,
        "trace": [{"i": rec.index - 1,
                   "eps": [float(e) for e in rec.distances],
                   "norm": float(rec.norm),
                   "capacity": float(rec.capacity)}
                  for rec in report.trace],
        "group": group_to_obj(report.group),
    }
    if report.note:
        obj["note"] = report.note
    return obj


def verdict_to_obj(verdict: MembershipVerdict) -> dict:
    return {
        "answer": verdict.answer,
        "epsilon": verdict.epsilon,
        "witness": None if verdict.witness is None
        else group_to_obj(verdict.witness),
        "evidence": report_to_obj(verdict.evidence),
    }


# --------------------------------------------------------------------------
# Deterministic dumping
# --------------------------------------------------------------------------


def _round_floats(node: Any) -> Any:
    """Round every float to 12 significant digits so the emitted document
    never shows more."""
    if isinstance(node, bool):
        return node
    if isinstance(node, float):
        return float(format(node, ".12g"))
    if isinstance(node, (int, str)) or node is None:
        return node
    if isinstance(node, dict):
        return {k: _round_floats(v) for k, v in node.items()}
    if isinstance(node, (list, tuple)):
        return [_round_floats(v) for v in node]
    if isinstance(node, (np.integer,)):
        return int(node)
    if isinstance(node, (np.floating,)):
        return float(format(float(node), ".12g"))
    raise TypeError(f"cannot serialize {type(node)!r}")


def dumps_canonical(obj: Any) -> str:
    return json.dumps(_round_floats(obj), indent=2, sort_keys=False) + "\n"
