import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexgen import generate
from reference import reference_train
from suffixlemma import LexiconEntry, Rule, Transform, lemmatize, parse_lexicon
from suffixlemma.ruleset import minimal_transform, model_bytes
from suffixlemma.trainer import (
    TrainConfig,
    Trainer,
    TrainerState,
    TrainingError,
    build_exception_table,
    candidate_suffixes,
    generate_candidates,
    score_candidate,
    support,
    train,
)


@pytest.mark.parametrize(
    "form, lemma, expected",
    [
        ("bækur", "bók", ("ækur", "ók")),
        ("kettlingar", "kettlingur", ("ar", "ur")),
        ("skó", "skó", ("", "")),
        ("við", "ég", ("við", "ég")),
        ("skó", "skór", ("", "r")),
    ],
)
def test_minimal_transform(form, lemma, expected):
    assert minimal_transform(form, lemma) == Transform(*expected)


@pytest.mark.parametrize(
    "line, expected",
    [
        ("skó\tnkfo\tskór", ["", "ó", "kó", "skó"]),
        ("bækur\tnvfn\tbók", ["ækur", "bækur"]),
        ("fjall+göngu+skó\tnkfo\tfjallgönguskór", ["", "ó", "kó", "skó", "gönguskó", "fjallgönguskó"]),
        # the rewrite reaches past the last part: only boundary suffixes are long enough
        ("fjall+bækur\tnvfn\tfjallbók", ["ækur", "bækur", "fjallbækur"]),
        ("a+b+c\tt\txyz", ["abc"]),
    ],
)
def test_candidate_suffixes(line, expected):
    from suffixlemma import parse_entry_line

    assert candidate_suffixes(parse_entry_line(line)) == expected


def test_no_candidates_without_errors():
    state = TrainerState.initial(parse_lexicon(["og\tc\tog", "en\tc\ten"]).entries)
    assert generate_candidates(state) == {}


def test_candidates_two_entry_set(nkfn_set):
    state = TrainerState.initial(nkfn_set.entries)
    cands = generate_candidates(state)
    ar = Rule("ar", "nkfn", Transform("ar", "ur"))
    assert cands[ar] == 2
    # every candidate shares the ar->ur rewrite; only suffixes common to both forms survive
    assert set(cands) == {Rule(s, "nkfn", Transform("ar", "ur")) for s in ["ar"]}


def test_singleton_irregular_has_no_candidate():
    state = TrainerState.initial(parse_lexicon(["við\tfp1fn\tég"]).entries)
    assert generate_candidates(state, min_support=2) == {}
    assert generate_candidates(state, min_support=1) == {Rule("við", "fp1fn", Transform("við", "ég")): 1}


def test_score_fix_three_break_one():
    ts = parse_lexicon(["aar\tt\taur", "bar\tt\tbur", "car\tt\tcur", "dar\tt\tdar"])
    state = TrainerState.initial(ts.entries)
    assert score_candidate(Rule("ar", "t", Transform("ar", "ur")), state) == 2


def test_score_zero_when_covered_by_longer_rule():
    ts = parse_lexicon(["kettlingar\tnkfn\tkettlingur", "yrðlingar\tnkfn\tyrðlingur"])
    state = TrainerState.initial(ts.entries)
    state.apply(Rule("ngar", "nkfn", Transform("ar", "ur")))
    assert state.error_count == 0
    assert score_candidate(Rule("gar", "nkfn", Transform("ar", "ur")), state) == 0
    assert score_candidate(Rule("ar", "nkfn", Transform("ar", "ir")), state) == 0


def test_score_two_entry_set(nkfn_set):
    state = TrainerState.initial(nkfn_set.entries)
    assert score_candidate(Rule("ar", "nkfn", Transform("ar", "ur")), state) == 2


def test_empty_suffix_rule_displaces_identity():
    ts = parse_lexicon(["skó\tnkfo\tskór", "kú\tnkfo\tkúr"])
    state = TrainerState.initial(ts.entries)
    assert score_candidate(Rule("", "nkfo", Transform("", "r")), state) == 2


def test_train_empty():
    m = train([])
    assert len(m.ruleset) == 0 and m.exceptions == {}


def test_train_two_entry_set(nkfn_set):
    m = train(nkfn_set)
    assert list(m.ruleset) == [Rule("ar", "nkfn", Transform("ar", "ur"))]
    assert m.exceptions == {}
    rules, exceptions, _ = reference_train([(e.marked_form(), e.tag, e.lemma) for e in nkfn_set])
    assert rules == [("ar", "nkfn", "ar", "ur")] and exceptions == {}


def test_train_singleton_irregular():
    m = train(parse_lexicon(["við\tfp1fn\tég"]))
    assert len(m.ruleset) == 0
    assert m.exceptions == {("við", "fp1fn"): "ég"}
    assert lemmatize(m, "við", "fp1fn").lemma == "ég"


def test_exception_table():
    ts = parse_lexicon(["kettlingar\tnkfn\tkettlingur", "hundar\tnkfn\thundur", "við\tfp1fn\tég"])
    t = Trainer(ts).run()
    table = build_exception_table(t.state)
    assert table == {("við", "fp1fn"): "ég"}
    assert len(table) == t.state.error_count


def test_exception_table_empty_without_errors(nkfn_set):
    assert build_exception_table(Trainer(nkfn_set).run().state) == {}


def test_min_support_validation():
    with pytest.raises(ValueError):
        TrainConfig(min_support=0)


def test_duplicate_keys_rejected():
    e = LexiconEntry("a", "t", "b")
    with pytest.raises(TrainingError):
        Trainer([e, LexiconEntry("a", "t", "c")])


def test_iteration_cap(nkfn_set):
    with pytest.raises(TrainingError, match="no convergence"):
        Trainer(nkfn_set, TrainConfig(max_iterations=0)).run()


def test_fuglgladur():
    ts = parse_lexicon([
        "glaðan\tlkeosf\tglaður",
        "hraðan\tlkeosf\thraður",
        "glaður\tlkensf\tglaður",
        "hraður\tlkensf\thraður",
        "glöðum\tlkeþsf\tglaður",
    ])
    m = train(ts)
    res = lemmatize(m, "fuglglaðan", "lkeosf")
    assert res.lemma == "fuglglaður"
    assert res.provenance == "rule"


def test_equal_gain_breaks_ties_lexically():
    ts = parse_lexicon(["mi\tt\tmo", "ni\tt\tno", "xa\tt\txu", "ya\tt\tyu"])
    t = Trainer(ts).run()
    assert [str(r) for r in t.state.accepted_rules] == ["(a, t, a→u)", "(i, t, i→o)"]
    assert t.supports == [2, 2]


def test_equal_gain_prefers_shorter_suffix():
    # (i, i->o) and (ar, ar->ir) both net +2; "ar" sorts first but "i" is shorter
    ts = parse_lexicon(["bi\tt\tbo", "ki\tt\tko", "anar\tt\tanir", "unar\tt\tunir"])
    t = Trainer(ts).run()
    assert [str(r) for r in t.state.accepted_rules] == ["(i, t, i→o)", "(ar, t, ar→ir)"]


def _as_tuples(trainer):
    return [(r.match_suffix, r.tag, *r.transform) for r in trainer.state.accepted_rules]


def _replay_check(ts, config):
    """Production trainer against the reference, plus the training-loop invariants."""
    trainer = Trainer(ts, config).run()
    rules, exceptions, history = reference_train(
        [(e.marked_form(), e.tag, e.lemma) for e in ts.entries], config.min_support
    )
    assert _as_tuples(trainer) == rules
    model = trainer.model()
    assert model.exceptions == exceptions
    assert trainer.error_history == history
    assert trainer.state.error_count == len(trainer.state.wrong())
    assert all(a > b for a, b in zip(history, history[1:]))

    state = TrainerState.initial(ts.entries)
    for rule, sup in zip(trainer.state.accepted_rules, trainer.supports):
        assert sup >= config.min_support
        assert support(rule, ts.entries) == sup
        before = list(state.specificity)
        state.apply(rule)
        assert all(b <= a for a, b in zip(state.specificity, before))
    assert state.predicted == trainer.state.predicted

    for e in ts.entries:
        assert lemmatize(model, e.form, e.tag).lemma == e.lemma


TINY = "abæ"
marked = st.lists(st.text(TINY, min_size=1, max_size=3), min_size=1, max_size=3).map("+".join)
rows = st.tuples(marked, st.sampled_from("xy"), st.integers(0, 6), st.text(TINY, max_size=2))


def _lexicon(rows_):
    lines = []
    for m, tag, cut, tail in rows_:
        form = m.replace("+", "")
        lemma = (form[: max(0, len(form) - cut)] + tail) or "a"
        lines.append(f"{m}\t{tag}\t{lemma}")
    return parse_lexicon(lines)


@settings(max_examples=200, deadline=None)
@given(st.lists(rows, max_size=40), st.sampled_from([1, 2, 3]))
def test_matches_reference_trainer(rows_, min_support):
    _replay_check(_lexicon(rows_), TrainConfig(min_support=min_support))


@pytest.mark.parametrize("seed", range(10))
def test_matches_reference_on_paradigms(seed):
    rng = random.Random(seed)
    _replay_check(parse_lexicon(generate(rng, 50)), TrainConfig())


def test_deterministic_bytes():
    lines = generate(random.Random(7), 400)
    a = model_bytes(train(parse_lexicon(lines)))
    b = model_bytes(train(parse_lexicon(lines)))
    assert a == b
