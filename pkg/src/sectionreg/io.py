"""JSON documents for chains, transforms and synthetic ground truth.

Chain document::

    {"format_version": "1.0", "n": 3,
     "pairs": [{"index": 1, "forward": [[x, y], ...], "backward": [[x, y], ...]}, ...],
     "metadata": {"pixel_size": ..., "description": ...}}

Transform document::

    {"format_version": "1.0", "endpoints_fixed": true,
     "transforms": [{"index": 1, "angle_rad": 0.0,
                     "rotation": [[1, 0], [0, 1]], "translation": [0, 0]}, ...]}

A truth document is a transform document (the registration that undoes the
synthetic motions) with an extra ``shared_sets`` list and ``seed``.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .chain import (
    ChainValidationError,
    CorrespondencePair,
    Registration,
    RigidTransform2,
    SectionChain,
    validate_chain,
)
from .so2 import rot
from .synthetic import GroundTruthChain

FORMAT_VERSION = "1.0"
SUPPORTED_VERSIONS = {"1.0"}
ANGLE_TOL = 1e-9


class DocumentError(ValueError):
    """A document is unreadable, malformed, or violates an invariant."""


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file so readers never see a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _dumps(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _load(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"{path}: cannot read: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: top level must be an object")
    version = doc.get("format_version")
    if version not in SUPPORTED_VERSIONS:
        raise DocumentError(
            f"{path}: format_version: unsupported version {version!r} "
            f"(expected one of {sorted(SUPPORTED_VERSIONS)})"
        )
    return doc


def _field(doc, key, where, kind=None):
    if key not in doc:
        raise DocumentError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise DocumentError(f"{where}.{key}: expected {kind.__name__}")
    return value


def _points(value, where) -> np.ndarray:
    if not isinstance(value, list):
        raise DocumentError(f"{where}: expected a list of [x, y] points")
    for j, p in enumerate(value):
        if (
            not isinstance(p, list)
            or len(p) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)
        ):
            raise DocumentError(f"{where}[{j}]: expected [x, y] numbers, got {p!r}")
    return np.array(value, dtype=float).reshape(-1, 2)


def _int(value, where) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise DocumentError(f"{where}: expected an integer, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# chains


def chain_to_dict(chain: SectionChain, metadata: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "n": chain.n,
        "pairs": [
            {"index": p.index, "forward": p.forward.tolist(), "backward": p.backward.tolist()}
            for p in chain.pairs
        ],
    }
    if metadata:
        doc["metadata"] = dict(metadata)
    return doc


def chain_from_dict(doc: dict, where: str = "chain") -> SectionChain:
    n = _int(_field(doc, "n", where), f"{where}.n")
    raw_pairs = _field(doc, "pairs", where, list)
    pairs = []
    for k, raw in enumerate(raw_pairs):
        pw = f"{where}.pairs[{k}]"
        if not isinstance(raw, dict):
            raise DocumentError(f"{pw}: expected an object")
        pairs.append(
            CorrespondencePair(
                _int(_field(raw, "index", pw), f"{pw}.index"),
                _points(_field(raw, "forward", pw), f"{pw}.forward"),
                _points(_field(raw, "backward", pw), f"{pw}.backward"),
            )
        )
    chain = SectionChain(n, tuple(pairs))
    violations = validate_chain(chain)
    if violations:
        raise DocumentError(f"{where}: " + str(ChainValidationError(violations)))
    return chain


def write_chain(chain: SectionChain, path, metadata: dict | None = None) -> None:
    violations = validate_chain(chain)
    if violations:
        raise ChainValidationError(violations)
    atomic_write_text(path, _dumps(chain_to_dict(chain, metadata)))


def read_chain(path) -> SectionChain:
    """Load and validate a chain document.

    Raises
    ------
    DocumentError
        With a message naming the offending line, field, pair, or point.
    """
    return chain_from_dict(_load(path), str(path))


# ---------------------------------------------------------------------------
# transforms


def transforms_to_dict(transforms, endpoints_fixed: bool | None = None) -> dict:
    if endpoints_fixed is None:
        endpoints_fixed = isinstance(transforms, Registration)
    return {
        "format_version": FORMAT_VERSION,
        "endpoints_fixed": bool(endpoints_fixed),
        "transforms": [
            {
                "index": i,
                "angle_rad": t.angle,
                "rotation": t.rotation.tolist(),
                "translation": t.translation.tolist(),
            }
            for i, t in enumerate(transforms, start=1)
        ],
    }


def transforms_from_dict(doc: dict, where: str = "transforms"):
    """Parse a transform list; returns a :class:`Registration` when endpoints are fixed."""
    raw = _field(doc, "transforms", where, list)
    if len(raw) < 2:
        raise DocumentError(f"{where}.transforms: need at least 2 entries, got {len(raw)}")
    out = []
    for k, entry in enumerate(raw):
        ew = f"{where}.transforms[{k}]"
        if not isinstance(entry, dict):
            raise DocumentError(f"{ew}: expected an object")
        if _int(_field(entry, "index", ew), f"{ew}.index") != k + 1:
            raise DocumentError(f"{ew}.index: expected {k + 1}, got {entry['index']}")
        angle = _field(entry, "angle_rad", ew)
        if not isinstance(angle, (int, float)) or isinstance(angle, bool) or not math.isfinite(angle):
            raise DocumentError(f"{ew}.angle_rad: expected a finite number")
        r = _field(entry, "rotation", ew, list)
        try:
            r = np.array(r, dtype=float)
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"{ew}.rotation: expected a 2x2 numeric array") from exc
        if r.shape != (2, 2):
            raise DocumentError(f"{ew}.rotation: expected a 2x2 numeric array")
        if np.max(np.abs(r - rot(angle))) > ANGLE_TOL:
            raise DocumentError(f"{ew}: rotation disagrees with angle_rad={angle}")
        t = _points([_field(entry, "translation", ew, list)], f"{ew}.translation")[0]
        try:
            out.append(RigidTransform2(r, t))
        except ValueError as exc:
            raise DocumentError(f"{ew}: {exc}") from exc
    if _field(doc, "endpoints_fixed", where, bool):
        try:
            return Registration(tuple(out))
        except ValueError as exc:
            raise DocumentError(f"{where}: {exc}") from exc
    return out


def write_transforms(transforms, path, endpoints_fixed: bool | None = None) -> None:
    atomic_write_text(path, _dumps(transforms_to_dict(transforms, endpoints_fixed)))


def read_transforms(path):
    return transforms_from_dict(_load(path), str(path))


# ---------------------------------------------------------------------------
# synthetic ground truth


def truth_to_dict(gt: GroundTruthChain) -> dict:
    doc = transforms_to_dict(gt.registration(), endpoints_fixed=True)
    doc["kind"] = "truth"
    doc["seed"] = gt.seed
    doc["motions"] = [
        {"index": i, "rotation": t.rotation.tolist(), "translation": t.translation.tolist()}
        for i, t in enumerate(gt.true_transforms, start=1)
    ]
    doc["shared_sets"] = [
        {"index": i, "points": s.tolist()} for i, s in enumerate(gt.shared_sets, start=1)
    ]
    return doc


def write_truth(gt: GroundTruthChain, path) -> None:
    atomic_write_text(path, _dumps(truth_to_dict(gt)))


def read_truth(path, chain: SectionChain) -> GroundTruthChain:
    """Load a truth document and attach it to the chain it describes."""
    where = str(path)
    doc = _load(path)
    reg = transforms_from_dict(doc, where)
    raw = _field(doc, "shared_sets", where, list)
    if len(raw) != len(chain.pairs):
        raise DocumentError(
            f"{where}.shared_sets: {len(raw)} sets for a chain with {len(chain.pairs)} pairs"
        )
    shared = []
    for k, (entry, pair) in enumerate(zip(raw, chain.pairs)):
        sw = f"{where}.shared_sets[{k}]"
        pts = _points(_field(entry, "points", sw), f"{sw}.points")
        if len(pts) != pair.count:
            raise DocumentError(f"{sw}: {len(pts)} points but pair {pair.index} has {pair.count}")
        shared.append(pts)
    motions = tuple(t.inverse() for t in reg)
    return GroundTruthChain(chain, motions, tuple(shared), int(doc.get("seed", 0)))
