"""JSON formats for matrices, masks, support tuples and factor chains."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import as_matrix, mask_from_indices, mask_to_indices
from .supports import RankOneSupportTuple

MANIFEST = "manifest.json"


def matrix_to_json(M, missing=None) -> dict:
    """Row-major JSON form; ``null`` marks entries flagged in ``missing``."""
    M = np.asarray(M, dtype=np.complex128)
    miss = np.zeros(M.shape, dtype=bool) if missing is None else np.asarray(missing, dtype=bool)
    is_complex = bool(np.any(M.imag[~miss] != 0))
    data = []
    for z, gone in zip(M.ravel(), miss.ravel()):
        if gone:
            data.append(None)
        elif is_complex:
            data.append([float(z.real), float(z.imag)])
        else:
            data.append(float(z.real))
    return {"rows": M.shape[0], "cols": M.shape[1], "complex": is_complex, "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    m, n = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != m * n:
        raise ValueError(f"expected {m * n} entries, got {len(data)}")
    vals = []
    for x in data:
        if x is None:
            vals.append(np.nan)
        elif isinstance(x, (list, tuple)):
            re, im = x
            vals.append(complex(re, im))
        else:
            vals.append(complex(x))
    return np.array(vals, dtype=np.complex128).reshape(m, n)


def mask_to_json(S) -> dict:
    S = np.asarray(S, dtype=bool)
    return {"rows": S.shape[0], "cols": S.shape[1], "ones": sorted(map(list, mask_to_indices(S)))}


def mask_from_json(obj: dict) -> np.ndarray:
    return mask_from_indices(int(obj["rows"]), int(obj["cols"]), obj["ones"])


def dump(obj, path) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(obj, indent=1) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def load(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc


def save_matrix(M, path) -> None:
    dump(matrix_to_json(M), path)


def load_matrix(path) -> np.ndarray:
    obj = load(path)
    try:
        return as_matrix(matrix_from_json(obj))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: not a matrix file ({exc})") from exc


def load_tuple(path) -> RankOneSupportTuple:
    obj = load(path)
    try:
        return RankOneSupportTuple.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: not a support tuple file ({exc})") from exc


def save_chain(factors, directory, **extra) -> Path:
    """Write ``X_L, ..., X_1`` as ``factor_<l>.json`` plus a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    L = len(factors)
    names = []
    for pos, X in enumerate(factors):
        name = f"factor_{L - pos}.json"
        save_matrix(X, directory / name)
        names.append(name)
    manifest = {"layers": L, "factors": names, **extra}
    dump(manifest, directory / MANIFEST)
    return directory / MANIFEST


def load_chain(directory) -> list[np.ndarray]:
    directory = Path(directory)
    manifest = load(directory / MANIFEST)
    return [load_matrix(directory / name) for name in manifest["factors"]]
