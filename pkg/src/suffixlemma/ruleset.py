"""Runtime model: suffix rules, exception table, lookup and the model file."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, NamedTuple

FORMAT_VERSION = 1
HEADER = "nefnir-model"
EXCEPTIONS = "[exceptions]"
RULES = "[rules]"

EXCEPTION = "exception"
RULE = "rule"
IDENTITY = "identity-fallback"


class Transform(NamedTuple):
    """Rewrite of a trailing ``source`` into ``replacement``."""

    source: str = ""
    replacement: str = ""

    def __str__(self):
        return f"{self.source or 'ε'}→{self.replacement or 'ε'}"


class Rule(NamedTuple):
    match_suffix: str
    tag: str
    transform: Transform

    @property
    def key(self) -> tuple[str, str]:
        return self.match_suffix, self.tag

    def __str__(self):
        return f"({self.match_suffix or 'ε'}, {self.tag}, {self.transform})"


def make_rule(match_suffix: str, tag: str, source: str, replacement: str) -> Rule:
    if not match_suffix.endswith(source):
        raise ValueError(f"transform source {source!r} is not a suffix of {match_suffix!r}")
    return Rule(match_suffix, tag, Transform(source, replacement))


def minimal_transform(form: str, lemma: str) -> Transform:
    """Strip the longest common prefix of form and lemma; what is left is the rewrite."""
    n = min(len(form), len(lemma))
    i = 0
    while i < n and form[i] == lemma[i]:
        i += 1
    return Transform(form[i:], lemma[i:])


def apply_rule(rule: Rule, form: str) -> str:
    if not form.endswith(rule.match_suffix):
        raise ValueError(f"rule {rule} does not apply to {form!r}")
    src, repl = rule.transform
    return form[: len(form) - len(src)] + repl


class _Node:
    __slots__ = ("children", "rule")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.rule: Rule | None = None


class RuleSet:
    """Rules with at most one per (suffix, tag), indexed by reversed suffix.

    Each tag owns a trie over the reversed match suffixes, so the longest
    matching rule is the deepest rule-bearing node on the path spelled by the
    form read backwards.
    """

    def __init__(self, rules: Iterable[Rule] = ()):
        self._rules: dict[tuple[str, str], Rule] = {}
        self._roots: dict[str, _Node] = {}
        for r in rules:
            self.add(r)

    def add(self, rule: Rule):
        if rule.key in self._rules:
            raise ValueError(f"duplicate rule key {rule.key}")
        if not rule.match_suffix.endswith(rule.transform.source):
            raise ValueError(f"malformed rule {rule}")
        self._rules[rule.key] = rule
        node = self._roots.setdefault(rule.tag, _Node())
        for ch in reversed(rule.match_suffix):
            nxt = node.children.get(ch)
            if nxt is None:
                nxt = node.children[ch] = _Node()
            node = nxt
        node.rule = rule

    def lookup(self, form: str, tag: str) -> Rule | None:
        node = self._roots.get(tag)
        if node is None:
            return None
        best = node.rule
        for i in range(len(form) - 1, -1, -1):
            node = node.children.get(form[i])
            if node is None:
                break
            if node.rule is not None:
                best = node.rule
        return best

    def get(self, match_suffix: str, tag: str) -> Rule | None:
        return self._rules.get((match_suffix, tag))

    def __contains__(self, key):
        return key in self._rules

    def __iter__(self):
        return iter(self._rules.values())

    def __len__(self):
        return len(self._rules)

    def __eq__(self, other):
        if not isinstance(other, RuleSet):
            return NotImplemented
        return self._rules == other._rules

    def tags(self) -> set[str]:
        return set(self._roots)

    def sorted_rules(self) -> list[Rule]:
        return sorted(self, key=lambda r: (r.tag, r.match_suffix[::-1], r.match_suffix))


def lookup_rule(rs: RuleSet, form: str, tag: str) -> Rule | None:
    return rs.lookup(form, tag)


@dataclass(frozen=True)
class LemmaResult:
    lemma: str
    provenance: str
    rule: Rule | None = None
    # set when the match was made on the form with its first letter lowercased
    case_fallback: bool = False

    @property
    def specificity(self) -> int | None:
        return len(self.rule.match_suffix) if self.rule is not None else None


@dataclass
class Model:
    ruleset: RuleSet = field(default_factory=RuleSet)
    exceptions: dict[tuple[str, str], str] = field(default_factory=dict)
    tagmap_hash: str | None = None
    format_version: int = FORMAT_VERSION

    def lemmatize(self, form: str, tag: str, case_fallback: bool = False) -> LemmaResult:
        return lemmatize(self, form, tag, case_fallback)


def _lookup(model: Model, form: str, tag: str) -> LemmaResult | None:
    lemma = model.exceptions.get((form, tag))
    if lemma is not None:
        return LemmaResult(lemma, EXCEPTION)
    rule = model.ruleset.lookup(form, tag)
    if rule is not None:
        return LemmaResult(apply_rule(rule, form), RULE, rule)
    return None


def lemmatize(model: Model, form: str, tag: str, case_fallback: bool = False) -> LemmaResult:
    """Exception table first, then the longest matching rule, else the form itself."""
    res = _lookup(model, form, tag)
    if res is not None:
        return res
    if case_fallback and form:
        lowered = form[0].lower() + form[1:]
        if lowered != form:
            res = _lookup(model, lowered, tag)
            if res is not None:
                return LemmaResult(res.lemma, res.provenance, res.rule, case_fallback=True)
    return LemmaResult(form, IDENTITY)


# -- model file --------------------------------------------------------------


class ModelFormatError(ValueError):
    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        where = f"line {line_no}: " if line_no is not None else ""
        what = f": {line!r}" if line is not None else ""
        super().__init__(f"{where}{message}{what}")
        self.line_no = line_no


_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n"}


def escape_field(s: str) -> str:
    if not s:
        return "\\0"
    return "".join(_ESCAPES.get(c, c) for c in s)


def unescape_field(s: str) -> str:
    if s == "\\0":
        return ""
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\":
            if i + 1 >= len(s) or s[i + 1] not in _UNESCAPES:
                raise ValueError(f"bad escape in {s!r}")
            out.append(_UNESCAPES[s[i + 1]])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def dumps_model(model: Model) -> str:
    lines = [
        f"{HEADER} {model.format_version}",
        f"tagmap {model.tagmap_hash or '-'}",
        EXCEPTIONS,
    ]
    for (form, tag), lemma in sorted(model.exceptions.items()):
        lines.append("\t".join(map(escape_field, (form, tag, lemma))))
    lines.append(RULES)
    for r in model.ruleset.sorted_rules():
        fields = (r.match_suffix, r.tag, r.transform.source, r.transform.replacement)
        lines.append("\t".join(map(escape_field, fields)))
    return "\n".join(lines) + "\n"


def serialize_model(model: Model, sink: BinaryIO):
    sink.write(dumps_model(model).encode("utf-8"))


def loads_model(text: str) -> Model:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise ModelFormatError("missing final newline (truncated file?)")

    if not lines:
        raise ModelFormatError("empty model file")
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != HEADER:
        raise ModelFormatError("bad header", 1, lines[0])
    if head[1] != str(FORMAT_VERSION):
        raise ModelFormatError(f"unsupported format version {head[1]!r}", 1)
    if len(lines) < 2 or not lines[1].startswith("tagmap "):
        raise ModelFormatError("missing tagmap line", 2)
    digest = lines[1][len("tagmap "):]
    if not digest or " " in digest:
        raise ModelFormatError("bad tagmap line", 2, lines[1])

    try:
        exc_at = lines.index(EXCEPTIONS)
        rules_at = lines.index(RULES)
    except ValueError:
        raise ModelFormatError("missing section marker") from None
    if exc_at != 2 or rules_at < exc_at:
        raise ModelFormatError("sections out of order")

    model = Model(tagmap_hash=None if digest == "-" else digest)
    for n in range(exc_at + 1, rules_at):
        fields = _split(lines[n], 3, n + 1)
        form, tag, lemma = fields
        if not form or not tag or not lemma:
            raise ModelFormatError("empty field in exception", n + 1, lines[n])
        if (form, tag) in model.exceptions:
            raise ModelFormatError("duplicate exception key", n + 1, lines[n])
        model.exceptions[form, tag] = lemma
    for n in range(rules_at + 1, len(lines)):
        suffix, tag, src, repl = _split(lines[n], 4, n + 1)
        if not tag:
            raise ModelFormatError("empty tag in rule", n + 1, lines[n])
        if (suffix, tag) in model.ruleset:
            raise ModelFormatError("duplicate rule key", n + 1, lines[n])
        if not suffix.endswith(src):
            raise ModelFormatError("transform source is not a suffix of the match suffix", n + 1, lines[n])
        model.ruleset.add(Rule(suffix, tag, Transform(src, repl)))
    return model


def _split(line: str, n: int, line_no: int) -> list[str]:
    fields = line.split("\t")
    if len(fields) != n:
        raise ModelFormatError(f"expected {n} fields", line_no, line)
    try:
        return [unescape_field(f) for f in fields]
    except ValueError as exc:
        raise ModelFormatError(str(exc), line_no, line) from None


def load_model(source: BinaryIO) -> Model:
    data = source.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"not UTF-8: {exc}") from None
    return loads_model(text)


def save_model(model: Model, path):
    with open(path, "wb") as f:
        serialize_model(model, f)


def read_model(path) -> Model:
    with open(path, "rb") as f:
        return load_model(f)


def model_bytes(model: Model) -> bytes:
    buf = io.BytesIO()
    serialize_model(model, buf)
    return buf.getvalue()
