"""Translation of lexicon and tagger tags into one intermediate tagset."""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

log = logging.getLogger(__name__)


class TagMapError(ValueError):
    pass


@dataclass(frozen=True)
class TagMap:
    """Source tag to intermediate tag. Tags missing from the table pass through."""

    mapping: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for src, dst in self.mapping.items():
            if not dst or any(c.isspace() for c in dst):
                raise TagMapError(f"bad intermediate tag for {src!r}: {dst!r}")

    def __len__(self):
        return len(self.mapping)

    def __call__(self, tag: str) -> str:
        return self.mapping.get(tag, tag)

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping.items())

    @property
    def is_idempotent(self) -> bool:
        """True when no intermediate tag is itself remapped."""
        return all(self.mapping.get(v, v) == v for v in self.mapping.values())

    def digest(self) -> str | None:
        """SHA-256 over the sorted table, or None for an identity map."""
        if self.is_identity:
            return None
        h = hashlib.sha256()
        for src, dst in sorted(self.mapping.items()):
            h.update(f"{src}\t{dst}\n".encode("utf-8"))
        return h.hexdigest()


def load_tagmap(lines: Iterable[str]) -> TagMap:
    table: dict[str, str] = {}
    for line_no, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise TagMapError(f"line {line_no}: expected source<TAB>intermediate: {line!r}")
        src, dst = fields
        if any(c.isspace() for c in src) or any(c.isspace() for c in dst):
            raise TagMapError(f"line {line_no}: whitespace inside a tag: {line!r}")
        if src in table:
            raise TagMapError(f"line {line_no}: duplicate source tag {src!r}")
        table[src] = dst
    tm = TagMap(table)
    if not tm.is_idempotent:
        log.warning("tag map is not idempotent: some intermediate tags are also source tags")
    return tm


def read_tagmap(path) -> TagMap:
    with open(path, encoding="utf-8") as f:
        return load_tagmap(f)


def map_tag(tagmap: TagMap, tag: str, unmapped: Counter | None = None) -> str:
    """Translate ``tag``; pass-through tags are tallied in ``unmapped`` if given."""
    mapped = tagmap.mapping.get(tag)
    if mapped is None:
        if unmapped is not None:
            unmapped[tag] += 1
        return tag
    return mapped
