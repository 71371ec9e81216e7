"""Greedy error-driven induction of suffix substitution rules.

Every entry starts out predicted as its own lemma. Each round collects
candidate rules from the entries that are still wrong, accepts the one that
removes the most errors over the whole training set, and stops once no
candidate helps. Whatever the rules still get wrong goes into the exception
table, so the resulting model reproduces its training data exactly.

A rule takes over an entry only if its match suffix is strictly longer than
that of the rule currently producing the entry's prediction (the identity
baseline counts as length -1). This keeps training in step with inference,
where the longest matching suffix wins.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Sequence

from suffixlemma.lexicon import LexiconEntry, TrainingSet
from suffixlemma.ruleset import Model, Rule, RuleSet, Transform, apply_rule, minimal_transform

log = logging.getLogger(__name__)

TIE_BREAK = "support-then-shortest-then-lexical"


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    min_support: int = 2
    max_iterations: int | None = None
    tie_break: str = TIE_BREAK

    def __post_init__(self):
        if self.min_support < 1:
            raise ValueError("min_support must be at least 1")
        if self.tie_break != TIE_BREAK:
            raise ValueError(f"unknown tie-break policy {self.tie_break!r}")


def candidate_lengths(form_len: int, boundaries: Sequence[int], lower: int) -> list[int]:
    """Suffix lengths eligible for rules, shortest first.

    Every suffix of the last compound part (the whole word for a base word),
    then the suffixes that start at earlier part boundaries. Nothing shorter
    than ``lower`` is kept.
    """
    last = boundaries[-1] if boundaries else 0
    lens = list(range(lower, form_len - last + 1))
    if boundaries:
        for b in reversed(boundaries[:-1]):
            if form_len - b >= lower:
                lens.append(form_len - b)
        if form_len >= lower:
            lens.append(form_len)
    return lens


def candidate_suffixes(entry: LexiconEntry, transform: Transform | None = None) -> list[str]:
    if transform is None:
        transform = minimal_transform(entry.form, entry.lemma)
    n = len(entry.form)
    return [entry.form[n - k:] for k in candidate_lengths(n, entry.part_boundaries, len(transform.source))]


def tie_key(rule: Rule, gain: int, support: int) -> tuple:
    """Sort key for candidate selection; smallest wins."""
    src, repl = rule.transform
    return (-gain, -support, len(rule.match_suffix), rule.tag, rule.match_suffix, src, repl)


@dataclass
class TrainerState:
    """Per-entry predictions plus the rules accepted so far.

    ``specificity[i]`` is the match-suffix length of the rule producing entry
    ``i``'s prediction, or -1 while the identity baseline still does.
    """

    entries: list[LexiconEntry]
    predicted: list[str] = field(default_factory=list)
    specificity: list[int] = field(default_factory=list)
    accepted_rules: list[Rule] = field(default_factory=list)
    error_count: int = 0

    @classmethod
    def initial(cls, entries: Sequence[LexiconEntry]) -> TrainerState:
        entries = list(entries)
        return cls(
            entries,
            [e.form for e in entries],
            [-1] * len(entries),
            [],
            sum(e.form != e.lemma for e in entries),
        )

    def wrong(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if self.predicted[i] != e.lemma]

    def accepted_keys(self) -> set[tuple[str, str]]:
        return {r.key for r in self.accepted_rules}

    def apply(self, rule: Rule) -> int:
        """Accept ``rule`` and re-predict the entries it takes over; returns the error delta."""
        k = len(rule.match_suffix)
        delta = 0
        for i, e in enumerate(self.entries):
            if e.tag == rule.tag and self.specificity[i] < k and e.form.endswith(rule.match_suffix):
                new = apply_rule(rule, e.form)
                delta += (new != e.lemma) - (self.predicted[i] != e.lemma)
                self.predicted[i] = new
                self.specificity[i] = k
        self.accepted_rules.append(rule)
        self.error_count += delta
        return delta


def support(rule: Rule, entries: Sequence[LexiconEntry]) -> int:
    """Number of entries the rule matches and lemmatizes correctly."""
    return sum(
        1
        for e in entries
        if e.tag == rule.tag and e.form.endswith(rule.match_suffix) and apply_rule(rule, e.form) == e.lemma
    )


def generate_candidates(state: TrainerState, min_support: int = 2) -> dict[Rule, int]:
    """Candidate rules from the mispredicted entries, with their support."""
    taken = state.accepted_keys()
    out: dict[Rule, int] = {}
    seen: set[Rule] = set()
    for i in state.wrong():
        e = state.entries[i]
        t = minimal_transform(e.form, e.lemma)
        for s in candidate_suffixes(e, t):
            rule = Rule(s, e.tag, t)
            if rule in seen or rule.key in taken:
                continue
            seen.add(rule)
            sup = support(rule, state.entries)
            if sup >= min_support:
                out[rule] = sup
    return out


def score_candidate(rule: Rule, state: TrainerState) -> int:
    """Errors fixed minus errors introduced if ``rule`` were accepted now."""
    k = len(rule.match_suffix)
    gain = 0
    for i, e in enumerate(state.entries):
        if e.tag != rule.tag or state.specificity[i] >= k or not e.form.endswith(rule.match_suffix):
            continue
        was = state.predicted[i] == e.lemma
        now = apply_rule(rule, e.form) == e.lemma
        gain += now - was
    return gain


def build_exception_table(state: TrainerState) -> dict[tuple[str, str], str]:
    return {(state.entries[i].form, state.entries[i].tag): state.entries[i].lemma for i in state.wrong()}


class Trainer:
    """Incremental implementation of the training loop.

    Candidates are grouped by (tag, suffix). For a group the entries that a
    new rule would take over are those whose current specificity is below
    the suffix length; call them the open members. A candidate's gain is then

        open members whose minimal transform equals the candidate's
        - open members that are currently right

    so each group keeps the second term as one counter and the first as a
    counter per transform. Accepting a rule touches only the entries it takes
    over, and through them only the groups those entries belong to, which are
    the groups whose best candidate gets recomputed and re-pushed onto a heap
    with lazy invalidation.
    """

    def __init__(self, training_set: TrainingSet | Sequence[LexiconEntry], config: TrainConfig | None = None):
        self.config = config or TrainConfig()
        entries = list(training_set.entries if isinstance(training_set, TrainingSet) else training_set)
        keys = {(e.form, e.tag) for e in entries}
        if len(keys) != len(entries):
            raise TrainingError("training entries are not unique per (form, tag)")
        self.state = TrainerState.initial(entries)
        self.error_history: list[int] = [self.state.error_count]
        self.supports: list[int] = []
        self._index()

    @property
    def iterations(self) -> int:
        return len(self.state.accepted_rules)

    def _index(self):
        entries = self.state.entries
        self._trans: list[Transform] = []
        trans_ids: dict[Transform, int] = {}
        self._tid = tids = []
        self._right = [e.form == e.lemma for e in entries]

        self._gid: dict[tuple[str, str], int] = {}
        self._g_suffix: list[str] = []
        self._g_tag: list[str] = []
        # per group: transform id -> [open matches, support, wrong generators]
        self._g_stats: list[dict[int, list[int]]] = []
        self._g_members: list[list[int]] = []
        self._g_right: list[int] = []
        self._cand_gids: list[list[int]] = []

        for e in entries:
            t = minimal_transform(e.form, e.lemma)
            tid = trans_ids.get(t)
            if tid is None:
                tid = trans_ids[t] = len(self._trans)
                self._trans.append(t)
            tids.append(tid)
            n = len(e.form)
            wrong = e.form != e.lemma
            gids = []
            for k in candidate_lengths(n, e.part_boundaries, len(t.source)):
                key = (e.tag, e.form[n - k:])
                gid = self._gid.get(key)
                if gid is None:
                    gid = self._gid[key] = len(self._g_suffix)
                    self._g_suffix.append(key[1])
                    self._g_tag.append(key[0])
                    self._g_stats.append({})
                    self._g_members.append([])
                    self._g_right.append(0)
                st = self._g_stats[gid].get(tid)
                if st is None:
                    st = self._g_stats[gid][tid] = [0, 0, 0]
                st[2] += wrong
                gids.append(gid)
            self._cand_gids.append(gids)

        # membership of every entry in every group whose suffix it ends with
        self._member_gids: list[list[int]] = []
        for i, e in enumerate(entries):
            n = len(e.form)
            row = []
            tid = tids[i]
            right = self._right[i]
            for k in range(n + 1):
                gid = self._gid.get((e.tag, e.form[n - k:]), -1)
                row.append(gid)
                if gid < 0:
                    continue
                self._g_members[gid].append(i)
                self._g_right[gid] += right
                st = self._g_stats[gid].get(tid)
                if st is not None:
                    st[0] += 1
                    st[1] += 1
            self._member_gids.append(row)

        self._g_done = [False] * len(self._g_suffix)
        self._g_best: list[tuple | None] = [None] * len(self._g_suffix)
        self._heap: list[tuple] = []
        for gid in range(len(self._g_suffix)):
            self._refresh(gid)

    def _refresh(self, gid: int):
        min_support = self.config.min_support
        n_right = self._g_right[gid]
        best = None
        best_tid = -1
        for tid, (n_open, sup, alive) in self._g_stats[gid].items():
            if not alive or sup < min_support:
                continue
            gain = n_open - n_right
            if gain <= 0:
                continue
            t = self._trans[tid]
            k = (-gain, -sup, t.source, t.replacement)
            if best is None or k < best:
                best = k
                best_tid = tid
        if best is None:
            self._g_best[gid] = None
            return
        suffix = self._g_suffix[gid]
        item = (best[0], best[1], len(suffix), self._g_tag[gid], suffix, best[2], best[3], gid, best_tid)
        self._g_best[gid] = item
        heapq.heappush(self._heap, item)

    def _pop_best(self) -> tuple | None:
        heap = self._heap
        while heap:
            item = heapq.heappop(heap)
            gid = item[7]
            if not self._g_done[gid] and self._g_best[gid] is item:
                return item
        return None

    def _accept(self, item: tuple) -> set[int]:
        neg_gain, neg_sup, k, tag, suffix, src, repl, gid, tid = item
        rule = Rule(suffix, tag, self._trans[tid])
        st = self.state
        entries = st.entries
        dirty: set[int] = set()
        self._g_done[gid] = True
        cut = len(src)
        for i in self._g_members[gid]:
            spec0 = st.specificity[i]
            if spec0 >= k:
                continue
            e = entries[i]
            new = e.form[: len(e.form) - cut] + repl
            right0 = self._right[i]
            right1 = new == e.lemma
            st.predicted[i] = new
            st.specificity[i] = k
            self._right[i] = right1
            st.error_count += right0 - right1
            self._update_entry(i, spec0, k, right0, right1, dirty)
        st.accepted_rules.append(rule)
        self.supports.append(-neg_sup)
        self.error_history.append(st.error_count)
        return dirty

    def _update_entry(self, i: int, spec0: int, spec1: int, right0: bool, right1: bool, dirty: set[int]):
        tid = self._tid[i]
        row = self._member_gids[i]
        g_right = self._g_right
        g_stats = self._g_stats
        for k in range(spec0 + 1, len(row)):
            gid = row[k]
            if gid < 0:
                continue
            if spec1 < k:
                if right0 != right1:
                    g_right[gid] += right1 - right0
                    dirty.add(gid)
            else:
                # entry leaves the open set of this group
                if right0:
                    g_right[gid] -= 1
                st = g_stats[gid].get(tid)
                if st is not None:
                    st[0] -= 1
                dirty.add(gid)
        if right0 != right1:
            step = 1 if right0 else -1
            for gid in self._cand_gids[i]:
                g_stats[gid][tid][2] += step
                dirty.add(gid)

    def run(self) -> Trainer:
        cap = self.config.max_iterations
        if cap is None:
            cap = self.error_history[0]
        while True:
            item = self._pop_best()
            if item is None:
                break
            if self.iterations >= cap:
                raise TrainingError(
                    f"no convergence after {self.iterations} iterations "
                    f"({self.state.error_count} errors left)"
                )
            before = self.state.error_count
            dirty = self._accept(item)
            if self.state.error_count != before + item[0]:
                raise TrainingError(f"gain bookkeeping diverged at rule {self.state.accepted_rules[-1]}")
            for gid in dirty:
                if not self._g_done[gid]:
                    self._refresh(gid)
            if self.iterations % 1000 == 0:
                log.debug("%d rules, %d errors left", self.iterations, self.state.error_count)
        log.debug(
            "training done: %d rules, %d exceptions, %d entries",
            self.iterations,
            self.state.error_count,
            len(self.state.entries),
        )
        return self

    def model(self, tagmap_hash: str | None = None) -> Model:
        return Model(RuleSet(self.state.accepted_rules), build_exception_table(self.state), tagmap_hash)


def train(
    training_set: TrainingSet | Sequence[LexiconEntry],
    config: TrainConfig | None = None,
    tagmap_hash: str | None = None,
) -> Model:
    """Learn a model from entries whose tags are already in the intermediate tagset."""
    return Trainer(training_set, config).run().model(tagmap_hash)
