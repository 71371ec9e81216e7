"""Suffix-substitution lemmatizer trained on (form, tag, lemma) lexicons."""

from suffixlemma.lexicon import (
    LexiconEntry,
    LexiconError,
    TrainingSet,
    merge_uninflected,
    parse_entry_line,
    parse_lexicon,
)
from suffixlemma.ruleset import (
    LemmaResult,
    Model,
    ModelFormatError,
    Rule,
    RuleSet,
    Transform,
    apply_rule,
    lemmatize,
    load_model,
    lookup_rule,
    serialize_model,
)
from suffixlemma.tagmap import TagMap, TagMapError, load_tagmap, map_tag
from suffixlemma.trainer import TrainConfig, Trainer, TrainingError, train

__version__ = "0.1.0"

__all__ = [
    "LemmaResult",
    "LexiconEntry",
    "LexiconError",
    "Model",
    "ModelFormatError",
    "Rule",
    "RuleSet",
    "TagMap",
    "TagMapError",
    "TrainConfig",
    "Trainer",
    "TrainingError",
    "TrainingSet",
    "Transform",
    "apply_rule",
    "lemmatize",
    "load_model",
    "load_tagmap",
    "lookup_rule",
    "map_tag",
    "merge_uninflected",
    "parse_entry_line",
    "parse_lexicon",
    "serialize_model",
    "train",
]
