"""Candidate-tree search: intervals in, candidate words out.

For each observed interval the model yields the key pairs whose mean lies
within the tolerance window; pairs chain into a tree whose root-to-leaf
paths are the candidate words. Branches that cannot reach full depth are
pruned, and an English word list filters the survivors.
"""

import json
import string
from dataclasses import dataclass, field

from . import segmenter
from .audio import AudioSignal, ms_to_samples
from .errors import CandidateExplosion, NoCandidates
from .lexicon import Lexicon
from .model import TimingModel, candidates, tolerance

ALPHABET = frozenset(string.ascii_lowercase)

# Live root-to-frontier paths allowed before construction aborts.
MAX_LIVE_PATHS = 10_000_000


@dataclass
class Node:
    value: str
    children: dict = field(default_factory=dict)  # letter -> Node


@dataclass(frozen=True)
class CandidateTree:
    root: Node
    depth: int  # number of letters (k) in every surviving path


@dataclass(frozen=True)
class PredictSettings:
    frame_ms: float = 100.0
    min_gap_ms: float = 100.0
    tolerance_pct: float = 0.05
    std_coeff: float = 1.0
    lexicon: Lexicon = None

    def as_dict(self) -> dict:
        return {
            "frame_ms": self.frame_ms,
            "min_gap_ms": self.min_gap_ms,
            "tolerance_pct": self.tolerance_pct,
            "std_coeff": self.std_coeff,
            "lexicon": self.lexicon.source if self.lexicon else None,
        }


@dataclass(frozen=True)
class PredictionResult:
    words_all: tuple
    words_dict: tuple
    onsets_ms: tuple
    deltas_ms: tuple
    params: dict

    def to_json(self) -> str:
        return json.dumps({
            "words_all": list(self.words_all),
            "words_dict": list(self.words_dict),
            "onsets_ms": list(self.onsets_ms),
            "deltas_ms": list(self.deltas_ms),
            "params": self.params,
        }, indent=2)


def build_tree(model: TimingModel, deltas: segmenter.IntervalSequence,
               pct: float, std_coeff: float) -> CandidateTree:
    """Chain candidate pairs for each interval into a pruned tree.

    The first interval seeds a two-letter level under the root; every later
    interval attaches its second letters beneath frontier nodes matching
    the pair's first letter. Raises NoCandidates if any interval matches
    nothing, and CandidateExplosion past MAX_LIVE_PATHS live paths.
    """
    if len(deltas) < 1:
        raise ValueError("need at least one interval")

    root = Node("")
    allowed = ALPHABET
    frontier = []
    for i, delta_ms in enumerate(deltas.deltas, start=1):
        t_f = tolerance(model, delta_ms, pct, std_coeff)
        cands = candidates(model, delta_ms, t_f, allowed)
        if not cands:
            raise NoCandidates(step=i, delta_ms=delta_ms, t_f=t_f)
        if i == 1:
            for key_a, key_b, _ in cands:
                first = root.children.setdefault(key_a, Node(key_a))
                child = first.children.setdefault(key_b, Node(key_b))
                frontier.append(child)
        else:
            by_first = {}
            for key_a, key_b, _ in cands:
                by_first.setdefault(key_a, []).append(key_b)
            next_frontier = []
            for node in frontier:
                for key_b in by_first.get(node.value, ()):
                    child = node.children.setdefault(key_b, Node(key_b))
                    next_frontier.append(child)
            frontier = next_frontier
        if len(frontier) > MAX_LIVE_PATHS:
            raise CandidateExplosion(
                f"{len(frontier)} live paths after interval #{i}"
            )
        allowed = frozenset(key_b for _, key_b, _ in cands)

    depth = len(deltas) + 1
    _prune(root, depth, 0)
    return CandidateTree(root=root, depth=depth)


def _prune(node: Node, depth: int, level: int) -> bool:
    """Drop children that cannot reach a leaf at exactly `depth` letters."""
    if level == depth:
        return True
    for letter in list(node.children):
        if not _prune(node.children[letter], depth, level + 1):
            del node.children[letter]
    return bool(node.children)


def enumerate_words(tree: CandidateTree) -> list:
    """All root-to-leaf letter paths, lexicographically sorted."""
    words = []
    stack = [("", tree.root)]
    while stack:
        prefix, node = stack.pop()
        word = prefix + node.value
        if not node.children:
            if word:
                words.append(word)
            continue
        for letter in node.children:
            stack.append((word, node.children[letter]))
    words.sort()
    assert all(w1 != w2 for w1, w2 in zip(words, words[1:])), \
        "duplicate paths violate unique child keys"
    return words


def filter_dictionary(words, lexicon: Lexicon) -> list:
    """Stable subsequence of `words` present in the lexicon."""
    return [w for w in words if lexicon.contains(w)]


def predict(model: TimingModel, signal: AudioSignal, k: int,
            settings: PredictSettings) -> PredictionResult:
    """Full pipeline: energy, onsets, intervals, tree, dictionary filter."""
    if k < 2:
        raise ValueError(f"need k >= 2 keystrokes, got {k}")
    rate = signal.sample_rate
    frame_len = ms_to_samples(settings.frame_ms, rate)
    min_gap = ms_to_samples(settings.min_gap_ms, rate)

    energies = segmenter.energy(signal, frame_len)
    onsets = segmenter.pick_onsets(energies, k, min_gap)
    deltas = segmenter.intervals(onsets)
    tree = build_tree(model, deltas, settings.tolerance_pct, settings.std_coeff)
    words_all = enumerate_words(tree)
    if settings.lexicon is not None:
        words_dict = filter_dictionary(words_all, settings.lexicon)
    else:
        words_dict = list(words_all)

    params = settings.as_dict()
    params["k"] = k
    params["sample_rate"] = rate
    return PredictionResult(
        words_all=tuple(words_all),
        words_dict=tuple(words_dict),
        onsets_ms=onsets.onsets_ms,
        deltas_ms=deltas.deltas,
        params=params,
    )
