"""Line-oriented text formats for questionnaire, set cover and knapsack instances.

Questionnaire table (``OWBQ 1``)::

    OWBQ 1
    n k
    c_1 ... c_k
    p_1 ... p_n
    <k lines of n characters in {0,1}>

Set cover (``MSC 1``)::

    MSC 1
    n m
    [weights: w_1 ... w_m]
    <m lines of element indices>

Knapsack (``KS 1``)::

    KS 1
    n capacity
    w_1 ... w_n
    [v_1 ... v_n]

Reals are written with ``repr`` so that parsing a serialized instance
restores it bit for bit.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MalformedInstanceError
from .model import ProblemTable
from .reductions import KnapsackInstance, SetCoverInstance

PROB_SUM_TOL = 1e-6


def _reals(line: str, count: int, what: str) -> list[float]:
    parts = line.split()
    if len(parts) != count:
        raise MalformedInstanceError(f"expected {count} {what}, got {len(parts)}")
    try:
        return [float(x) for x in parts]
    except ValueError as exc:
        raise MalformedInstanceError(f"bad number in {what}: {exc}") from None


def _ints(line: str, count: int, what: str) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise MalformedInstanceError(f"expected {count} {what}, got {len(parts)}")
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise MalformedInstanceError(f"bad integer in {what}") from None


def _lines(text: str, magic: str) -> list[str]:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].split() != magic.split():
        raise MalformedInstanceError(f"missing header {magic!r}")
    return lines


def _fmt(xs) -> str:
    return " ".join(repr(float(x)) for x in xs)


def dumps_table(t: ProblemTable) -> str:
    rows = ["".join(str(int(b)) for b in row) for row in t.outcomes]
    return "\n".join(["OWBQ 1", f"{t.n} {t.k}", _fmt(t.costs), _fmt(t.probs), *rows]) + "\n"


def loads_table(text: str) -> ProblemTable:
    lines = _lines(text, "OWBQ 1")
    if len(lines) < 4:
        raise MalformedInstanceError("truncated OWBQ instance")
    n, k = _ints(lines[1], 2, "dimensions")
    if n < 1 or k < 0:
        raise MalformedInstanceError("need n >= 1 and k >= 0")
    costs = _reals(lines[2], k, "costs")
    probs = _reals(lines[3], n, "probabilities")
    rows = lines[4:]
    if len(rows) != k:
        raise MalformedInstanceError(f"expected {k} question rows, got {len(rows)}")
    bits = []
    for i, row in enumerate(rows):
        row = row.strip()
        if len(row) != n or set(row) - {"0", "1"}:
            raise MalformedInstanceError(f"question row {i + 1} must be {n} characters of 0/1")
        bits.append([int(c) for c in row])
    if abs(sum(probs) - 1.0) > PROB_SUM_TOL:
        raise MalformedInstanceError(f"probabilities sum to {sum(probs)}, not 1")
    return ProblemTable(np.array(bits, dtype=np.uint8).reshape(k, n), costs, probs)


def dumps_set_cover(sc: SetCoverInstance) -> str:
    lines = ["MSC 1", f"{sc.universe_size} {sc.m}"]
    if sc.weights is not None:
        lines.append("weights: " + _fmt(sc.weights))
    lines += [" ".join(str(e) for e in sorted(s)) for s in sc.subsets]
    return "\n".join(lines) + "\n"


def loads_set_cover(text: str) -> SetCoverInstance:
    _lines(text, "MSC 1")
    raw = text.splitlines()
    if len(raw) < 2:
        raise MalformedInstanceError("truncated MSC instance")
    n, m = _ints(raw[1], 2, "dimensions")
    body = raw[2:]
    weights = None
    if body and body[0].startswith("weights:"):
        weights = _reals(body[0][len("weights:"):], m, "weights")
        body = body[1:]
    # empty subsets are blank lines, so only surplus lines must be blank
    if len(body) < m or any(line.strip() for line in body[m:]):
        raise MalformedInstanceError(f"expected {m} subset lines")
    subsets = []
    for line in body[:m]:
        try:
            subsets.append([int(x) for x in line.split()])
        except ValueError:
            raise MalformedInstanceError(f"bad element index in {line!r}") from None
    return SetCoverInstance(n, subsets, weights)


def dumps_knapsack(ks: KnapsackInstance) -> str:
    lines = ["KS 1", f"{ks.n} {ks.capacity!r}", _fmt(ks.item_weights)]
    if ks.item_values is not None:
        lines.append(_fmt(ks.item_values))
    return "\n".join(lines) + "\n"


def loads_knapsack(text: str) -> KnapsackInstance:
    lines = _lines(text, "KS 1")
    if len(lines) not in (3, 4):
        raise MalformedInstanceError("KS instance needs 3 or 4 lines")
    head = lines[1].split()
    if len(head) != 2:
        raise MalformedInstanceError("second line must be 'n capacity'")
    try:
        n, capacity = int(head[0]), float(head[1])
    except ValueError:
        raise MalformedInstanceError("bad knapsack header") from None
    weights = _reals(lines[2], n, "weights")
    values = _reals(lines[3], n, "values") if len(lines) == 4 else None
    return KnapsackInstance(weights, capacity, values)


_LOADERS = {"OWBQ": loads_table, "MSC": loads_set_cover, "KS": loads_knapsack}


def loads(text: str):
    """Parse any of the three formats, dispatching on the header."""
    head = text.lstrip().split(maxsplit=1)[:1]
    if not head or head[0] not in _LOADERS:
        raise MalformedInstanceError("unknown instance format")
    return _LOADERS[head[0]](text)


def dumps(obj) -> str:
    if isinstance(obj, ProblemTable):
        return dumps_table(obj)
    if isinstance(obj, SetCoverInstance):
        return dumps_set_cover(obj)
    if isinstance(obj, KnapsackInstance):
        return dumps_knapsack(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def read_instance(path) -> object:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_instance(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
