import json
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from os import cpu_count
from pathlib import Path
from typing import Any, Iterator

import numpy as np
from tqdm import tqdm

from lsa import settings
from lsa.errors import FormatError

logger = getLogger(__name__)


def resolve_tol(tol=None):
    """
    Return `tol`, or the package-wide tolerance if `tol` is None.
    Read at call time so that a CLI override applies everywhere.
    """
    return settings.TOLERANCE if tol is None else float(tol)


def max_norm(array) -> float:
    """
    Largest absolute entry of `array` (0.0 for an empty array).
    """
    array = np.asarray(array)
    if array.size == 0:
        return 0.0
    return float(np.max(np.abs(array)))


def worst_index(array) -> list:
    """
    Index of the largest absolute entry of `array` as a list of ints.
    """
    array = np.asarray(array)
    if array.size == 0:
        return []
    return [int(i) for i in np.unravel_index(np.argmax(np.abs(array)), array.shape)]


def residual_record(array, tol=None) -> dict:
    """
    Residual report shared by every check:
    `{"norm", "tolerance", "verified", "worst_indices"}`.
    """
    tol = resolve_tol(tol)
    norm = max_norm(array)
    return {
        "norm": norm,
        "tolerance": tol,
        "verified": bool(norm < tol),
        "worst_indices": worst_index(array),
    }


def freeze(array, dtype=complex):
    """
    Copy `array` into a read-only numpy array.
    """
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


# ------------------ complex <-> JSON ------------------


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(value, field="value") -> complex:
    """
    Decode `[re, im]` (a bare real number is accepted too).
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise FormatError(field, f"expected [re, im], got {value!r}")


def encode_array(array):
    """
    Nested lists of `[re, im]` pairs for an array of any rank.
    """
    array = np.asarray(array)
    if array.ndim == 0:
        return encode_complex(array)
    return [encode_array(a) for a in array]


def decode_matrix(value, field="matrix"):
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise FormatError(field, "expected a list of rows")
    rows = [
        [decode_complex(v, f"{field}[{i}][{j}]") for j, v in enumerate(row)]
        for i, row in enumerate(value)
    ]
    if len({len(row) for row in rows}) > 1:
        raise FormatError(field, "rows have different lengths")
    return np.array(rows, dtype=complex)


# ------------------ files ------------------


def load_json(path, allow_exception=False):
    """
    Load a json file and return its content.
    Set `allow_exception` to True if FileNotFound can be raised.
    """
    data = {}
    if not isinstance(path, Path):
        path = Path(path)

    if allow_exception:
        try:
            with open(path.__str__(), "r") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise FileNotFoundError(f"{path.name} not found")

    else:
        if path.is_file():
            with open(path.__str__(), "r") as f:
                data = json.load(f)

    return data


def dumps(data) -> str:
    """
    Deterministic JSON text: sorted keys, shortest round-trip floats.
    """
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False)


def dump_json(data, path):
    """
    Write `data` to `path` with `dumps` formatting, creating parent folders.
    """
    path = Path(path)
    create_dir(path.parent)
    path.write_text(dumps(data) + "\n")
    return path


def create_dir(path):
    """
    Create a directory under `path`.
    """
    if isinstance(path, str):
        path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def concurrent_run(
    func: Any,
    gen_or_iter: Any,
    max_workers: int = None,
    disable_progress_bar: bool = False,
):
    """
    Map `func` over `gen_or_iter` on a thread pool, yielding results in the
    order of submitted tasks.

    :param func: function to apply
    :param gen_or_iter: generator/iterator or iterable to iterate over.
    :param max_workers: int: number of threads dedicated to `func`.
    :param disable_progress_bar: if True, progress bar is not shown.
    """
    with ThreadPoolExecutor(max_workers or cpu_count()) as executor, tqdm(
        total=len(gen_or_iter) if not isinstance(gen_or_iter, Iterator) else None,
        disable=disable_progress_bar,
    ) as pbar:
        for result in executor.map(func, gen_or_iter):
            pbar.update(1)
            yield result
