import struct
from pathlib import Path

import pytest

from keyecho.lexicon import load_lexicon

REPO_ROOT = Path(__file__).resolve().parent.parent
LEXICON_PATH = REPO_ROOT / "data" / "lexicon_small.txt"

# Common-word test set with varied lengths, used across the eval tests.
STUDY_WORDS = [
    "work", "love", "life", "like", "night", "world", "table", "they",
    "have", "teacher", "book", "buy", "credit", "paper", "order", "mobile",
    "mother", "cat", "run", "house", "bill",
]


@pytest.fixture(scope="session")
def study_words():
    return list(STUDY_WORDS)


@pytest.fixture(scope="session")
def small_lexicon():
    return load_lexicon(LEXICON_PATH)


def make_wav_bytes(frames: bytes, *, channels=1, bits=16, rate=44100,
                   audio_format=1, declared_size=None) -> bytes:
    """Hand-rolled WAV container so tests control every header field."""
    byte_rate = rate * channels * bits // 8
    block_align = channels * bits // 8
    data_size = len(frames) if declared_size is None else declared_size
    return b"".join([
        b"RIFF", struct.pack("<I", 36 + len(frames)), b"WAVE",
        b"fmt ", struct.pack("<IHHIIHH", 16, audio_format, channels, rate,
                             byte_rate, block_align, bits),
        b"data", struct.pack("<I", data_size), frames,
    ])
