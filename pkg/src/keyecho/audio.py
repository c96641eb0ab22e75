"""WAV loading and the in-memory audio representation.

Only uncompressed RIFF/WAVE files are accepted: PCM integers (8/16/24/32
bit) or 32-bit float, mono or stereo. Stereo is down-mixed by averaging
the channels. No resampling happens anywhere; millisecond parameters are
converted per file with ms_to_samples().
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptySignal, MalformedContainer, UnsupportedEncoding

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioSignal:
    """Mono signal with samples normalized to [-1, +1]."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size and (samples.min() < -1.0 or samples.max() > 1.0):
            raise ValueError("samples must lie in [-1, +1]")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


def ms_to_samples(t_ms: float, rate: int) -> int:
    """Round a millisecond duration to a whole number of samples."""
    if t_ms < 0:
        raise ValueError(f"duration must be nonnegative, got {t_ms}")
    if rate <= 0:
        raise ValueError(f"sample rate must be positive, got {rate}")
    return int(t_ms * rate / 1000.0 + 0.5)


def _parse_fmt(body: bytes):
    if len(body) < 16:
        raise MalformedContainer("fmt chunk shorter than 16 bytes")
    (audio_format, channels, sample_rate, _byte_rate,
     block_align, bits) = struct.unpack("<HHIIHH", body[:16])
    if audio_format == _WAVE_FORMAT_EXTENSIBLE:
        # Sub-format GUID starts with the ordinary format tag.
        if len(body) < 26:
            raise MalformedContainer("extensible fmt chunk truncated")
        audio_format = struct.unpack("<H", body[24:26])[0]
    return audio_format, channels, sample_rate, block_align, bits


def _decode(raw: bytes, audio_format: int, bits: int) -> np.ndarray:
    if audio_format == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedEncoding(f"{bits}-bit float WAV not supported")
        samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        return np.clip(samples, -1.0, 1.0)
    if audio_format != _WAVE_FORMAT_PCM:
        raise UnsupportedEncoding(f"compressed WAV (format tag 0x{audio_format:04x})")
    if bits == 8:
        # 8-bit PCM is unsigned with a 128 offset.
        return (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    if bits == 16:
        return np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        vals = (b[:, 0].astype(np.int32)
                | (b[:, 1].astype(np.int32) << 8)
                | (b[:, 2].astype(np.int32) << 16))
        vals = np.where(vals >= 1 << 23, vals - (1 << 24), vals)
        return vals.astype(np.float64) / float(1 << 23)
    if bits == 32:
        return np.frombuffer(raw, dtype="<i4").astype(np.float64) / float(1 << 31)
    raise UnsupportedEncoding(f"{bits}-bit PCM not supported")


def load_wav(path) -> AudioSignal:
    """Read a PCM or float WAV file as a normalized mono AudioSignal."""
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer(f"{path}: not a RIFF/WAVE file")

    fmt = None
    raw = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = data[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise MalformedContainer(
                f"{path}: chunk {chunk_id!r} declares {size} bytes, "
                f"{len(body)} present"
            )
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body)
        elif chunk_id == b"data":
            raw = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise MalformedContainer(f"{path}: missing fmt chunk")
    if raw is None:
        raise MalformedContainer(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, block_align, bits = fmt
    if sample_rate <= 0:
        raise MalformedContainer(f"{path}: nonsensical sample rate {sample_rate}")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"{path}: {channels} channels (want 1 or 2)")
    bytes_per_sample = bits // 8
    if bits % 8 != 0 or bytes_per_sample == 0:
        raise UnsupportedEncoding(f"{path}: {bits}-bit samples")
    frame_size = bytes_per_sample * channels
    if block_align not in (0, frame_size):
        raise MalformedContainer(
            f"{path}: block align {block_align} != frame size {frame_size}"
        )
    if len(raw) % frame_size != 0:
        raise MalformedContainer(f"{path}: data size not a multiple of frame size")
    if len(raw) == 0:
        raise EmptySignal(f"{path}: zero data frames")

    samples = _decode(raw, audio_format, bits)
    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    return AudioSignal(samples=samples, sample_rate=sample_rate)


def write_wav(path, signal: AudioSignal) -> None:
    """Write a 16-bit PCM mono WAV. Inverse of load_wav for 16-bit input."""
    clipped = np.clip(signal.samples, -1.0, 1.0)
    ints = np.clip(np.round(clipped * 32768.0), -32768, 32767).astype("<i2")
    raw = ints.tobytes()
    rate = signal.sample_rate
    header = b"".join([
        b"RIFF", struct.pack("<I", 36 + len(raw)), b"WAVE",
        b"fmt ", struct.pack("<IHHIIHH", 16, _WAVE_FORMAT_PCM, 1, rate,
                             rate * 2, 2, 16),
        b"data", struct.pack("<I", len(raw)),
    ])
    Path(path).write_bytes(header + raw)
