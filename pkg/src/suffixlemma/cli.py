"""Command line: ``train``, ``lemmatize`` and ``eval``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass

from suffixlemma import evaluation
from suffixlemma.lexicon import LexiconError, map_tags, read_lexicon
from suffixlemma.ruleset import Model, ModelFormatError, lemmatize, read_model, save_model
from suffixlemma.tagmap import TagMap, TagMapError, map_tag, read_tagmap
from suffixlemma.trainer import TrainConfig, Trainer, TrainingError

log = logging.getLogger("suffixlemma")


class CliError(Exception):
    """Fatal error: reported on stderr, exit status 1."""


@dataclass
class RunConfig:
    subcommand: str
    lexicon: str | None = None
    uninflected: str | None = None
    tagmap: str | None = None
    model: str | None = None
    input: str | None = None
    output: str | None = None
    gold: str | None = None
    pred: str | None = None
    report: str | None = None
    out: str | None = None
    min_support: int = 2
    case_fallback: bool = False
    verbosity: int = 0


def _open_in(path):
    if path is None or path == "-":
        return open(sys.stdin.fileno(), encoding="utf-8", closefd=False)
    return open(path, encoding="utf-8")


def _open_out(path):
    if path is None or path == "-":
        return open(sys.stdout.fileno(), "w", encoding="utf-8", newline="\n", closefd=False)
    return open(path, "w", encoding="utf-8", newline="\n")


def _load_tagmap(path) -> TagMap:
    if path is None:
        return TagMap()
    try:
        return read_tagmap(path)
    except TagMapError as exc:
        raise CliError(f"{path}: {exc}") from None


def _load_model(path, tagmap: TagMap | None) -> Model:
    try:
        model = read_model(path)
    except ModelFormatError as exc:
        raise CliError(f"{path}: {exc}") from None
    digest = tagmap.digest() if tagmap is not None else None
    if model.tagmap_hash != digest:
        log.warning(
            "tag map does not match the one used in training (model %s, given %s)",
            model.tagmap_hash or "-",
            digest or "-",
        )
    return model


def _report_unmapped(unmapped: Counter, tagmap: TagMap):
    if unmapped and not tagmap.is_identity:
        log.warning(
            "%d tag occurrences (%d distinct) not in the tag map, passed through",
            sum(unmapped.values()),
            len(unmapped),
        )


def run_train(cfg: RunConfig) -> int:
    tagmap = _load_tagmap(cfg.tagmap)
    ts = read_lexicon(cfg.lexicon, cfg.uninflected)
    if ts.conflicts:
        log.warning("%d lexicon lines skipped (malformed or conflicting lemma)", len(ts.conflicts))
    unmapped: Counter = Counter()
    ts = map_tags(ts, lambda t: map_tag(tagmap, t, unmapped))
    _report_unmapped(unmapped, tagmap)
    if not ts.entries:
        log.warning("lexicon %s has no entries; writing an empty model", cfg.lexicon)
    trainer = Trainer(ts, TrainConfig(min_support=cfg.min_support)).run()
    model = trainer.model(tagmap.digest())
    save_model(model, cfg.out)
    log.info(
        "%d entries, %d iterations, %d rules, %d exceptions -> %s",
        len(ts.entries),
        trainer.iterations,
        len(model.ruleset),
        len(model.exceptions),
        cfg.out,
    )
    return 0


def run_lemmatize(cfg: RunConfig) -> int:
    tagmap = _load_tagmap(cfg.tagmap) if cfg.tagmap else None
    model = _load_model(cfg.model, tagmap)
    unmapped: Counter = Counter()
    bad = 0
    with _open_in(cfg.input) as fin, _open_out(cfg.output) as fout:
        for line_no, raw in enumerate(fin, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                fout.write(line + "\n")
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                bad += 1
                log.warning("line %d: expected token<TAB>tag, passing through: %r", line_no, line)
                fout.write(f"{line}\t{fields[0]}\n")
                continue
            form, tag = fields
            mtag = map_tag(tagmap, tag, unmapped) if tagmap is not None else tag
            lemma = lemmatize(model, form, mtag, cfg.case_fallback).lemma
            fout.write(f"{form}\t{tag}\t{lemma}\n")
    if tagmap is not None:
        _report_unmapped(unmapped, tagmap)
    if bad:
        log.warning("%d malformed input lines given identity lemmas", bad)
    return 0


def run_eval(cfg: RunConfig) -> int:
    with _open_in(cfg.gold) as f:
        try:
            tokens = list(evaluation.read_gold(f))
        except evaluation.CorpusFormatError as exc:
            raise CliError(f"{cfg.gold}: {exc}") from None
    if not tokens:
        raise CliError(f"{cfg.gold}: no tokens")

    reports = []
    tag_acc = None
    try:
        if cfg.model:
            tagmap = _load_tagmap(cfg.tagmap) if cfg.tagmap else None
            model = _load_model(cfg.model, tagmap)
            unmapped: Counter = Counter()
            recs = evaluation.lemmatize_gold(model, tokens, False, tagmap, cfg.case_fallback, unmapped)
            reports.append(evaluation.evaluate(recs, "gold"))
            if any(t.auto_tag is not None for t in tokens):
                recs = evaluation.lemmatize_gold(model, tokens, True, tagmap, cfg.case_fallback, unmapped)
                reports.append(evaluation.evaluate(recs, "auto"))
                tag_acc = evaluation.tag_accuracy(recs)
            if tagmap is not None:
                _report_unmapped(unmapped, tagmap)
        else:
            with _open_in(cfg.pred) as f:
                recs = evaluation.score_predictions(tokens, evaluation.read_predictions(f))
            reports.append(evaluation.evaluate(recs, "pred"))
            tag_acc = evaluation.tag_accuracy(recs)
    except evaluation.CorpusFormatError as exc:
        raise CliError(str(exc)) from None

    out = sys.stdout
    out.write("tags\taccuracy\terrors\ttokens\n")
    for rep in reports:
        out.write(rep.summary() + "\n")
    if tag_acc is not None:
        out.write(f"tag accuracy\t{tag_acc}\n")
    for rep in reports:
        counts = rep.flag_counts()
        if counts:
            out.write(f"flags ({rep.label})\t" + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())) + "\n")
    if cfg.report:
        with _open_out(cfg.report) as f:
            f.write("run\ttoken\tgold_tag\tauto_tag\tgold_lemma\tpredicted_lemma\tflags\n")
            for rep in reports:
                evaluation.write_disagreements(rep, f)
    return 0


def _existing_file(path: str) -> str:
    if path != "-" and not os.path.isfile(path):
        raise argparse.ArgumentTypeError(f"no such file: {path}")
    return path


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="suffixlemma", description="Suffix-rule lemmatizer for tagged text.")
    parser.add_argument("-v", "--verbose", action="count", default=0, dest="verbosity")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="learn a model from a lexicon")
    p.add_argument("--lexicon", required=True, type=_existing_file)
    p.add_argument("--uninflected", type=_existing_file)
    p.add_argument("--tagmap", type=_existing_file)
    p.add_argument("--min-support", type=_positive, default=2)
    p.add_argument("--out", required=True)

    p = sub.add_parser("lemmatize", help="lemmatize token<TAB>tag lines")
    p.add_argument("--model", required=True, type=_existing_file)
    p.add_argument("--tagmap", type=_existing_file)
    p.add_argument("--case-fallback", action="store_true")
    p.add_argument("--input", type=_existing_file)
    p.add_argument("--output")

    p = sub.add_parser("eval", help="score lemmas against a gold corpus")
    p.add_argument("--gold", required=True, type=_existing_file)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=_existing_file)
    src.add_argument("--pred", type=_existing_file)
    p.add_argument("--tagmap", type=_existing_file)
    p.add_argument("--case-fallback", action="store_true")
    p.add_argument("--report")
    return parser


COMMANDS = {"train": run_train, "lemmatize": run_lemmatize, "eval": run_eval}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    level = logging.WARNING - 10 * min(cfg.verbosity, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except (CliError, LexiconError, TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
