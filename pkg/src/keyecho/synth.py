"""Synthetic typist: keystroke logs and click audio with known ground truth.

A TypistProfile fixes per-pair interval statistics and the click shape.
Everything is seeded; the same seed and task index give byte-identical
output, so end-to-end runs are reproducible. Generated files use the same
keylog CSV and 16-bit WAV formats as real captures.
"""

from dataclasses import dataclass, field

import numpy as np

from .audio import AudioSignal, ms_to_samples
from .errors import OnsetOutOfRange, UnknownPair
from .keylog import SPACE, KeystrokeEvent, TypingSession

# Key hold time written into synthetic logs; only press times matter.
_RELEASE_MS = 60.0
# Silence inserted between words in a multi-word session.
_WORD_GAP_MS = 1000.0


@dataclass(frozen=True)
class TypistProfile:
    pair_means: dict = field(repr=False)   # (key_a, key_b) -> mean interval ms
    pair_stds: dict = field(repr=False)    # (key_a, key_b) -> std ms
    burst_ms: float = 100.0
    burst_amp: float = 0.9
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.burst_amp <= 1:
            raise ValueError(f"burst_amp must be in (0, 1], got {self.burst_amp}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        for pair, mean in self.pair_means.items():
            if mean <= self.burst_ms:
                raise ValueError(
                    f"pair {pair} mean {mean} ms must exceed burst {self.burst_ms} ms"
                )
        if any(s < 0 for s in self.pair_stds.values()):
            raise ValueError("pair stds must be nonnegative")


@dataclass(frozen=True)
class SessionSynthesis:
    session: TypingSession
    word_onsets_ms: tuple      # per word, onsets relative to the word start
    truncation_rate: float     # fraction of intervals clamped at burst_ms + 1


def profile_for_words(words, base_ms: float = 200.0, spacing_ms: float = 5.0,
                      std_ms: float = 0.0, **kwargs) -> TypistProfile:
    """Profile whose pair means sit on an evenly spaced grid.

    Every ordered pair occurring in `words` gets a distinct mean
    base_ms + i * spacing_ms (pairs in sorted order), so interval-to-pair
    matching is unambiguous whenever the tolerance stays under half the
    spacing.
    """
    pairs = sorted({(a, b) for w in words for a, b in zip(w, w[1:])})
    means = {p: base_ms + i * spacing_ms for i, p in enumerate(pairs)}
    stds = {p: std_ms for p in pairs}
    return TypistProfile(pair_means=means, pair_stds=stds, **kwargs)


def synth_session(profile: TypistProfile, words, task: int = 0) -> SessionSynthesis:
    """Generate press/release events for `words`, one seeded draw per pair.

    Intervals are gaussian per the profile, clamped below at burst_ms + 1
    so clicks never overlap; words are separated by a SPACE event and a
    fixed gap. Deterministic for a fixed (seed, task).
    """
    rng = np.random.default_rng([profile.seed, 0, task])
    events = []
    word_onsets = []
    cursor = 0.0
    clamped = 0
    intervals = 0
    for word in words:
        onsets = [0.0]
        t = cursor
        events.append(KeystrokeEvent(word[0], t, t + _RELEASE_MS))
        for key_a, key_b in zip(word, word[1:]):
            if (key_a, key_b) not in profile.pair_means:
                raise UnknownPair(f"pair ({key_a},{key_b}) not in profile")
            mean = profile.pair_means[(key_a, key_b)]
            std = profile.pair_stds.get((key_a, key_b), 0.0)
            draw = rng.normal(mean, std)
            intervals += 1
            if draw < profile.burst_ms + 1:
                draw = profile.burst_ms + 1
                clamped += 1
            t += draw
            onsets.append(t - cursor)
            events.append(KeystrokeEvent(key_b, t, t + _RELEASE_MS))
        word_onsets.append(tuple(onsets))
        t += _WORD_GAP_MS
        events.append(KeystrokeEvent(SPACE, t, t + _RELEASE_MS))
        cursor = t + _WORD_GAP_MS

    session = TypingSession(events=tuple(events),
                            session_id=f"synth-{profile.seed}-{task}")
    rate = clamped / intervals if intervals else 0.0
    return SessionSynthesis(session=session, word_onsets_ms=tuple(word_onsets),
                            truncation_rate=rate)


def synth_audio(onsets_ms, profile: TypistProfile, sample_rate: int,
                total_ms: float, task: int = 0) -> AudioSignal:
    """Clicks at the given onsets over optional gaussian background noise.

    Each click lasts burst_ms with a linear envelope from burst_amp down to
    0.1 * burst_amp, loudest at the onset.
    """
    n = ms_to_samples(total_ms, sample_rate)
    burst_len = max(1, ms_to_samples(profile.burst_ms, sample_rate))
    for onset in onsets_ms:
        if onset < 0 or onset + profile.burst_ms > total_ms:
            raise OnsetOutOfRange(
                f"onset {onset} ms + burst {profile.burst_ms} ms "
                f"outside [0, {total_ms}] ms"
            )

    if profile.noise_std > 0:
        rng = np.random.default_rng([profile.seed, 1, task])
        samples = rng.normal(0.0, profile.noise_std, n)
    else:
        samples = np.zeros(n)

    envelope = np.linspace(profile.burst_amp, 0.1 * profile.burst_amp,
                           burst_len)
    for onset in onsets_ms:
        start = ms_to_samples(onset, sample_rate)
        samples[start:start + burst_len] += envelope[:n - start]
    np.clip(samples, -1.0, 1.0, out=samples)
    return AudioSignal(samples=samples, sample_rate=sample_rate)
