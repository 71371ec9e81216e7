"""Scoring predicted lemmas against a gold-standard corpus."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Iterator, Sequence, TextIO

from suffixlemma.ruleset import IDENTITY, Model, lemmatize
from suffixlemma.tagmap import TagMap, map_tag

TAG_MISMATCH = "tag-mismatch"
CAPITALIZATION = "capitalization-difference"
IDENTITY_FALLBACK = IDENTITY


class MetricError(ValueError):
    pass


def _percent(part: int, total: int) -> Decimal:
    """100 * part / total rounded half-up to two decimals, in exact integer arithmetic."""
    if total <= 0:
        raise MetricError("percentage of an empty sample is undefined")
    if not 0 <= part <= total:
        raise MetricError(f"count {part} out of range for total {total}")
    hundredths = (20000 * part + total) // (2 * total)
    return Decimal(hundredths).scaleb(-2)


def accuracy(total: int, errors: int) -> Decimal:
    """Accuracy in percent, e.g. ``accuracy(21093, 94) == Decimal("99.55")``."""
    if not 0 <= errors <= total:
        raise MetricError(f"errors={errors} out of range for total={total}")
    return _percent(total - errors, total)


def error_rate(total: int, errors: int) -> Decimal:
    return _percent(errors, total)


@dataclass(frozen=True)
class TokenRecord:
    form: str
    gold_tag: str
    gold_lemma: str
    predicted_lemma: str
    auto_tag: str | None = None
    provenance: str | None = None

    def __post_init__(self):
        if not self.form or not self.gold_tag or not self.gold_lemma:
            raise ValueError("form, gold tag and gold lemma must be non-empty")

    @property
    def correct(self) -> bool:
        return self.predicted_lemma == self.gold_lemma


def flag_record(rec: TokenRecord) -> tuple[str, ...]:
    flags = []
    if rec.auto_tag is not None and rec.auto_tag != rec.gold_tag:
        flags.append(TAG_MISMATCH)
    if rec.predicted_lemma != rec.gold_lemma and rec.predicted_lemma.casefold() == rec.gold_lemma.casefold():
        flags.append(CAPITALIZATION)
    if rec.provenance == IDENTITY:
        flags.append(IDENTITY_FALLBACK)
    return tuple(flags)


@dataclass
class EvalReport:
    total: int
    errors: int
    disagreements: list[TokenRecord] = field(default_factory=list)
    # parallel to ``disagreements``
    flags: list[tuple[str, ...]] = field(default_factory=list)
    label: str = ""

    @property
    def accuracy_percent(self) -> Decimal:
        return accuracy(self.total, self.errors)

    def flag_counts(self) -> Counter:
        return Counter(f for fl in self.flags for f in fl)

    def summary(self) -> str:
        return f"{self.label or 'lemmas'}\t{self.accuracy_percent}\t{self.errors}\t{self.total}"


def evaluate(records: Iterable[TokenRecord], label: str = "") -> EvalReport:
    total = errors = 0
    bad: list[TokenRecord] = []
    for rec in records:
        total += 1
        if not rec.correct:
            errors += 1
            bad.append(rec)
    if total == 0:
        raise MetricError("no records to evaluate")
    return EvalReport(total, errors, bad, [flag_record(r) for r in bad], label)


def tag_accuracy(records: Iterable[TokenRecord]) -> Decimal:
    total = agree = 0
    for rec in records:
        if rec.auto_tag is None:
            raise MetricError(f"record {rec.form!r} has no automatic tag")
        total += 1
        agree += rec.auto_tag == rec.gold_tag
    return _percent(agree, total)


# -- gold corpus ---------------------------------------------------------------


@dataclass(frozen=True)
class GoldToken:
    form: str
    gold_tag: str
    gold_lemma: str
    auto_tag: str | None = None


class CorpusFormatError(ValueError):
    pass


def read_gold(lines: Iterable[str]) -> Iterator[GoldToken]:
    """Tokens of a ``token<TAB>tag<TAB>lemma[<TAB>auto_tag]`` corpus; blank lines skipped."""
    for line_no, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4) or not all(fields):
            raise CorpusFormatError(f"line {line_no}: expected 3 or 4 non-empty columns: {line!r}")
        yield GoldToken(*fields)


def read_predictions(lines: Iterable[str]) -> Iterator[tuple[str, str, str]]:
    for line_no, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise CorpusFormatError(f"line {line_no}: expected token<TAB>tag<TAB>lemma: {line!r}")
        yield fields[0], fields[1], fields[2]


def lemmatize_gold(
    model: Model,
    tokens: Sequence[GoldToken],
    use_auto_tags: bool = False,
    tagmap: TagMap | None = None,
    case_fallback: bool = False,
    unmapped: Counter | None = None,
) -> list[TokenRecord]:
    """Run the model over gold tokens under their gold or automatic tags."""
    records = []
    for tok in tokens:
        tag = tok.gold_tag
        if use_auto_tags:
            if tok.auto_tag is None:
                raise CorpusFormatError(f"token {tok.form!r} has no automatic tag column")
            tag = tok.auto_tag
        if tagmap is not None:
            tag = map_tag(tagmap, tag, unmapped)
        res = lemmatize(model, tok.form, tag, case_fallback)
        records.append(
            TokenRecord(
                tok.form,
                tok.gold_tag,
                tok.gold_lemma,
                res.lemma,
                tok.auto_tag if use_auto_tags else None,
                res.provenance,
            )
        )
    return records


def score_predictions(tokens: Sequence[GoldToken], predictions: Iterable[tuple[str, str, str]]) -> list[TokenRecord]:
    """Align a predictions file with the gold tokens, line by line."""
    records = []
    preds = iter(predictions)
    for n, tok in enumerate(tokens, 1):
        try:
            form, tag, lemma = next(preds)
        except StopIteration:
            raise CorpusFormatError(f"predictions end at token {n}, gold has {len(tokens)}") from None
        if form != tok.form:
            raise CorpusFormatError(f"token {n}: prediction is for {form!r}, gold has {tok.form!r}")
        # the tag a prediction was made under stands in for the automatic tag
        records.append(TokenRecord(tok.form, tok.gold_tag, tok.gold_lemma, lemma, tag))
    if next(preds, None) is not None:
        raise CorpusFormatError("predictions file has more tokens than the gold corpus")
    return records


def write_disagreements(report: EvalReport, out: TextIO):
    for rec, flags in zip(report.disagreements, report.flags):
        out.write(
            "\t".join(
                [
                    report.label,
                    rec.form,
                    rec.gold_tag,
                    rec.auto_tag or "",
                    rec.gold_lemma,
                    rec.predicted_lemma,
                    ",".join(flags),
                ]
            )
            + "\n"
        )
