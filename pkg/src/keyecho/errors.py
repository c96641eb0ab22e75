"""Exception hierarchy shared across the toolkit."""


class KeyEchoError(Exception):
    """Base class for all toolkit errors."""


# --- audio ---

class MalformedContainer(KeyEchoError):
    """WAV file has a broken RIFF/fmt/data structure."""


class UnsupportedEncoding(KeyEchoError):
    """WAV file uses a codec or layout we do not accept."""


class EmptySignal(KeyEchoError):
    """WAV file contains zero data frames."""


# --- segmenter ---

class FrameTooLong(KeyEchoError):
    """Sliding-window frame exceeds the signal length."""


class NotEnoughPeaks(KeyEchoError):
    """Fewer distinguishable energy peaks than requested keystrokes."""


class TooFewOnsets(KeyEchoError):
    """Interval computation needs at least two onsets."""


# --- keylog ---

class MalformedRow(KeyEchoError):
    """Keystroke log row has the wrong shape or unparsable values."""


# --- model ---

class NonPositiveDelta(KeyEchoError):
    """Training observation with a non-positive interval."""


class SchemaMismatch(KeyEchoError):
    """Model file is missing fields or has an unknown version."""


class ConsistencyFailure(KeyEchoError):
    """Stored analysis table disagrees with its raw observations."""


# --- predictor ---

class NoCandidates(KeyEchoError):
    """Some interval matched no model pair; the word cannot be represented."""

    def __init__(self, step: int, delta_ms: float, t_f: float):
        self.step = step
        self.delta_ms = delta_ms
        self.t_f = t_f
        super().__init__(
            f"no candidate pairs for interval #{step} "
            f"({delta_ms:.3f} ms, tolerance {t_f:.3f} ms)"
        )


class CandidateExplosion(KeyEchoError):
    """Candidate tree exceeded the live-path budget."""


# --- lexicon ---

class EmptyLexicon(KeyEchoError):
    """Word list contained no usable entries."""


# --- synth ---

class UnknownPair(KeyEchoError):
    """Requested word uses a key pair absent from the typist profile."""


class OnsetOutOfRange(KeyEchoError):
    """Requested click onset does not fit inside the output signal."""
