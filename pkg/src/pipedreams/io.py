"""JSON file formats for words, shapes and pipe dreams, and atomic output writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import InputError
from .pipedream import PipeDream
from .shape import Shape, from_boxes
from .word import Word


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def _int_field(data: dict, key: str, path) -> int:
    v = data.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise InputError(f"{path}: field {key!r} must be an integer")
    return v


def word_from_json(data: dict, path="<word>") -> Word:
    n = _int_field(data, "n", path)
    letters = data.get("letters")
    if not isinstance(letters, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in letters):
        raise InputError(f"{path}: field 'letters' must be a list of integers")
    return Word(n, letters)


def shape_from_json(data: dict, path="<shape>") -> Shape:
    n = _int_field(data, "n", path)
    boxes = data.get("boxes")
    if not isinstance(boxes, list) or not all(
        isinstance(b, list) and len(b) == 2 and all(isinstance(c, int) and not isinstance(c, bool) for c in b)
        for b in boxes
    ):
        raise InputError(f"{path}: field 'boxes' must be a list of [x, y] integer pairs")
    return from_boxes(n, boxes)


def load_word(path) -> Word:
    return word_from_json(_read_json(path), path)


def load_shape(path) -> Shape:
    return shape_from_json(_read_json(path), path)


def load_pipedream(path) -> PipeDream:
    data = _read_json(path)
    if not isinstance(data.get("shape"), dict):
        raise InputError(f"{path}: field 'shape' must be a shape object")
    s = shape_from_json(data["shape"], path)
    cross = data.get("cross")
    if not isinstance(cross, list) or any(c not in (0, 1) for c in cross):
        raise InputError(f"{path}: field 'cross' must be a list of 0/1 values")
    if len(cross) != len(s):
        raise InputError(f"{path}: expected {len(s)} tiles, got {len(cross)}")
    return PipeDream(s, cross)


def word_to_json(w: Word) -> dict:
    return {"n": w.n, "letters": list(w.letters)}


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file, so a failure leaves no partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
