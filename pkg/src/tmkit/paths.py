"""Field-path addressing into canonical bundle documents.

Paths use dotted keys with bracketed selectors:

    task.description
    methods[0].organizer.transitions[1].dataCondition
    methods[name=IterativeInsertion].organizer.states[name=SL_Done]

Numeric selectors index arrays; `[name=X]` selects the array element whose
"name" field equals X, which stays stable while sibling elements come and
go.
"""

from __future__ import annotations

import re
from typing import Any, Union

Segment = Union[str, int, tuple[str, str]]

_SEGMENT_RE = re.compile(r"([^.\[\]]+)|\[(\d+)\]|\[name=([^\]]*)\]")


class PathError(KeyError):
    pass


def parse_path(path: str) -> list[Segment]:
    segments: list[Segment] = []
    pos = 0
    while pos < len(path):
        if path[pos] == ".":
            pos += 1
            continue
        match = _SEGMENT_RE.match(path, pos)
        if match is None:
            raise PathError(f"malformed path {path!r} at offset {pos}")
        key, index, name = match.groups()
        if key is not None:
            segments.append(key)
        elif index is not None:
            segments.append(int(index))
        else:
            segments.append(("name", name))
        pos = match.end()
    return segments


def format_path(segments: list[Segment]) -> str:
    parts: list[str] = []
    for segment in segments:
        if isinstance(segment, int):
            parts.append(f"[{segment}]")
        elif isinstance(segment, tuple):
            parts.append(f"[name={segment[1]}]")
        else:
            parts.append(f".{segment}" if parts else segment)
    return "".join(parts)


def _step(doc: Any, segment: Segment, path: str) -> Any:
    if isinstance(segment, str):
        if not isinstance(doc, dict) or segment not in doc:
            raise PathError(f"no key {segment!r} along {path!r}")
        return doc[segment]
    if isinstance(segment, int):
        if not isinstance(doc, list) or segment >= len(doc):
            raise PathError(f"no index {segment} along {path!r}")
        return doc[segment]
    if not isinstance(doc, list):
        raise PathError(f"name selector on non-array along {path!r}")
    for item in doc:
        if isinstance(item, dict) and item.get("name") == segment[1]:
            return item
    raise PathError(f"no element named {segment[1]!r} along {path!r}")


def get_at(doc: Any, path: str) -> Any:
    current = doc
    for segment in parse_path(path):
        current = _step(current, segment, path)
    return current


def _container_and_last(doc: Any, path: str) -> tuple[Any, Segment]:
    segments = parse_path(path)
    if not segments:
        raise PathError("empty path")
    current = doc
    for segment in segments[:-1]:
        current = _step(current, segment, path)
    return current, segments[-1]


def set_at(doc: Any, path: str, value: Any) -> None:
    """Sets the value at a path; dict keys may be created, array slots must exist."""
    container, last = _container_and_last(doc, path)
    if isinstance(last, str):
        if not isinstance(container, dict):
            raise PathError(f"cannot set key on non-object at {path!r}")
        container[last] = value
    elif isinstance(last, int):
        if not isinstance(container, list) or last >= len(container):
            raise PathError(f"cannot set index {last} at {path!r}")
        container[last] = value
    else:
        if not isinstance(container, list):
            raise PathError(f"cannot apply name selector at {path!r}")
        for position, item in enumerate(container):
            if isinstance(item, dict) and item.get("name") == last[1]:
                container[position] = value
                return
        raise PathError(f"no element named {last[1]!r} at {path!r}")


def remove_at(doc: Any, path: str) -> None:
    container, last = _container_and_last(doc, path)
    if isinstance(last, str):
        if not isinstance(container, dict) or last not in container:
            raise PathError(f"cannot remove key at {path!r}")
        del container[last]
    elif isinstance(last, int):
        if not isinstance(container, list) or last >= len(container):
            raise PathError(f"cannot remove index {last} at {path!r}")
        del container[last]
    else:
        if not isinstance(container, list):
            raise PathError(f"cannot apply name selector at {path!r}")
        for position, item in enumerate(container):
            if isinstance(item, dict) and item.get("name") == last[1]:
                del container[position]
                return
        raise PathError(f"no element named {last[1]!r} at {path!r}")


def insert_at(doc: Any, array_path: str, index: int, value: Any) -> None:
    """Inserts into the array at `array_path`, clamping the index to the tail."""
    target = get_at(doc, array_path) if array_path else doc
    if not isinstance(target, list):
        raise PathError(f"not an array at {array_path!r}")
    target.insert(min(index, len(target)), value)
