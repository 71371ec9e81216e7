"""Reading training lexicons.

A lexicon line is ``form<TAB>tag<TAB>lemma``. Compound words carry ``+``
between their parts in the form column (``fjall+göngu+skó``); the markers are
stripped from the stored form and kept as code-point offsets of the part
starts. The supplementary list of uninflected words and abbreviations has
only ``form<TAB>tag`` and every lemma equals its form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

log = logging.getLogger(__name__)

MARKER = "+"


class LexiconError(ValueError):
    """A lexicon or word-list line could not be parsed."""

    def __init__(self, message: str, line: str, line_no: int | None = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}: {line!r}")
        self.line = line
        self.line_no = line_no


@dataclass(frozen=True)
class LexiconEntry:
    form: str
    tag: str
    lemma: str
    part_boundaries: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.form or not self.lemma:
            raise ValueError("form and lemma must be non-empty")
        if "\t" in self.form or "\n" in self.form:
            raise ValueError(f"form contains a tab or newline: {self.form!r}")
        if not self.tag or any(c.isspace() for c in self.tag):
            raise ValueError(f"bad tag: {self.tag!r}")
        prev = 0
        for b in self.part_boundaries:
            if not prev < b < len(self.form):
                raise ValueError(f"bad part boundaries {self.part_boundaries} for {self.form!r}")
            prev = b

    @property
    def is_compound(self) -> bool:
        return bool(self.part_boundaries)

    @property
    def key(self) -> tuple[str, str]:
        return self.form, self.tag

    def marked_form(self) -> str:
        """The form with ``+`` re-inserted at every part boundary."""
        pieces = []
        start = 0
        for b in self.part_boundaries:
            pieces.append(self.form[start:b])
            start = b
        pieces.append(self.form[start:])
        return MARKER.join(pieces)


@dataclass
class Conflict:
    """A raw input line that did not become an entry."""

    line_no: int
    line: str
    reason: str


@dataclass
class TrainingSet:
    entries: list[LexiconEntry] = field(default_factory=list)
    conflicts: list[Conflict] = field(default_factory=list)
    # identical repeats of an existing entry, dropped without a conflict record
    duplicates: int = 0

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def split_marked_form(raw: str) -> tuple[str, tuple[int, ...]]:
    """Strip compound markers from ``raw``, returning the form and part starts."""
    if MARKER not in raw:
        return raw, ()
    parts = raw.split(MARKER)
    if any(not p for p in parts):
        raise ValueError("compound marker at word edge or doubled")
    bounds = []
    offset = 0
    for p in parts[:-1]:
        offset += len(p)
        bounds.append(offset)
    return "".join(parts), tuple(bounds)


def _strip_eol(line: str) -> str:
    return line.rstrip("\r\n")


def _is_skippable(line: str) -> bool:
    return not line.strip() or line.startswith("#")


def parse_entry_line(line: str, line_no: int | None = None) -> LexiconEntry:
    """Parse one ``form<TAB>tag<TAB>lemma`` line.

    >>> parse_entry_line("fjall+göngu+skó\\tt1\\tfjallgönguskór").part_boundaries
    (5, 10)
    """
    line = _strip_eol(line)
    fields = line.split("\t")
    if len(fields) != 3:
        raise LexiconError(f"expected 3 tab-separated fields, got {len(fields)}", line, line_no)
    raw_form, tag, lemma = fields
    if not raw_form or not tag or not lemma:
        raise LexiconError("empty field", line, line_no)
    if MARKER in tag or MARKER in lemma:
        raise LexiconError("compound marker outside the form column", line, line_no)
    try:
        form, bounds = split_marked_form(raw_form)
        return LexiconEntry(form, tag, lemma, bounds)
    except ValueError as exc:
        raise LexiconError(str(exc), line, line_no) from None


def parse_uninflected_line(line: str, line_no: int | None = None) -> LexiconEntry:
    line = _strip_eol(line)
    fields = line.split("\t")
    if len(fields) != 2:
        raise LexiconError(f"expected 2 tab-separated fields, got {len(fields)}", line, line_no)
    form, tag = fields
    if not form or not tag:
        raise LexiconError("empty field", line, line_no)
    if MARKER in tag:
        raise LexiconError("compound marker outside the form column", line, line_no)
    try:
        form, bounds = split_marked_form(form)
        return LexiconEntry(form, tag, form, bounds)
    except ValueError as exc:
        raise LexiconError(str(exc), line, line_no) from None


class _Builder:
    """Accumulates entries under the first-occurrence policy."""

    def __init__(self, base: TrainingSet | None = None):
        self.entries: list[LexiconEntry] = []
        self.conflicts: list[Conflict] = []
        self.duplicates = 0
        self.index: dict[tuple[str, str], LexiconEntry] = {}
        if base is not None:
            self.entries.extend(base.entries)
            self.conflicts.extend(base.conflicts)
            self.duplicates = base.duplicates
            self.index = {e.key: e for e in base.entries}

    def add(self, entry: LexiconEntry, line_no: int, line: str):
        kept = self.index.get(entry.key)
        if kept is None:
            self.index[entry.key] = entry
            self.entries.append(entry)
        elif kept.lemma == entry.lemma:
            self.duplicates += 1
        else:
            self.conflicts.append(
                Conflict(line_no, line, f"conflicting lemma, kept {kept.lemma!r}")
            )

    def consume(self, lines: Iterable[str], parse: Callable[..., LexiconEntry]):
        for line_no, raw in enumerate(lines, 1):
            line = _strip_eol(raw)
            if _is_skippable(line):
                continue
            try:
                entry = parse(line, line_no)
            except LexiconError as exc:
                log.warning("%s", exc)
                self.conflicts.append(Conflict(line_no, line, f"malformed: {exc}"))
                continue
            self.add(entry, line_no, line)

    def build(self) -> TrainingSet:
        return TrainingSet(self.entries, self.conflicts, self.duplicates)


def parse_lexicon(lines: Iterable[str]) -> TrainingSet:
    """Parse a lexicon stream; bad lines and lemma conflicts land in ``conflicts``."""
    builder = _Builder()
    builder.consume(lines, parse_entry_line)
    return builder.build()


def merge_uninflected(training_set: TrainingSet, lines: Iterable[str]) -> TrainingSet:
    """Add ``form<TAB>tag`` words with lemma = form to a copy of ``training_set``."""
    builder = _Builder(training_set)
    builder.consume(lines, parse_uninflected_line)
    return builder.build()


def map_tags(training_set: TrainingSet, translate: Callable[[str], str]) -> TrainingSet:
    """Rewrite every tag with ``translate``.

    Distinct source tags can collapse onto one intermediate tag, so the
    first-occurrence policy is re-applied; line numbers in the new conflict
    records are entry positions, not file lines.
    """
    builder = _Builder()
    builder.conflicts.extend(training_set.conflicts)
    builder.duplicates = training_set.duplicates
    for pos, e in enumerate(training_set.entries, 1):
        mapped = LexiconEntry(e.form, translate(e.tag), e.lemma, e.part_boundaries)
        builder.add(mapped, pos, f"{e.marked_form()}\t{e.tag}\t{e.lemma}")
    return builder.build()


def read_lexicon(path, uninflected=None) -> TrainingSet:
    with open(path, encoding="utf-8") as f:
        ts = parse_lexicon(f)
    if uninflected is not None:
        with open(uninflected, encoding="utf-8") as f:
            ts = merge_uninflected(ts, f)
    return ts
