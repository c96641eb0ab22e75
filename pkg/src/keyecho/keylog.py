"""Keystroke log ingestion.

Logs are CSV with header ``key,press_ms,release_ms,virtual_code,scan_code,
caps,shift``; one row per keypress, timestamps in milliseconds from session
start. Capture tools that dump TimeSpan-style records can be converted by
writing the press/release TimeSpans as total milliseconds, the key name in
the ``key`` column (or just the virtual code, which is mapped here), and
caps/shift as 0/1.
"""

import csv
import string
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedRow

SPACE = "SPACE"
ENTER = "ENTER"
OTHER = "OTHER"

LETTERS = frozenset(string.ascii_lowercase)

HEADER = ["key", "press_ms", "release_ms", "virtual_code", "scan_code",
          "caps", "shift"]

_SPACE_NAMES = {"space", " "}
_ENTER_NAMES = {"enter", "return", "\n", "\r"}


@dataclass(frozen=True)
class KeystrokeEvent:
    key: str          # 'a'..'z', SPACE, ENTER, or OTHER
    press_ms: float
    release_ms: float
    shift: bool = False
    caps: bool = False

    @property
    def is_letter(self) -> bool:
        return self.key in LETTERS


@dataclass(frozen=True)
class TypingSession:
    events: tuple
    session_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))


def _canonical_key(key_field: str, virtual_code: int) -> str:
    key = key_field.strip().lower()
    if len(key) == 1 and key in LETTERS:
        return key
    if key in _SPACE_NAMES:
        return SPACE
    if key in _ENTER_NAMES:
        return ENTER
    if key == "":
        # Fall back to the Windows virtual-key code.
        if ord("A") <= virtual_code <= ord("Z"):
            return chr(virtual_code).lower()
        if virtual_code == 0x20:
            return SPACE
        if virtual_code == 0x0D:
            return ENTER
    return OTHER


def _parse_bool(text: str) -> bool:
    return text.strip().lower() in {"1", "true", "yes"}


def parse_keylog(path) -> TypingSession:
    """Read a keystroke CSV; rows come back sorted by press time."""
    path = Path(path)
    events = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty file, expected header row")
        if [h.strip().lower() for h in header] != HEADER:
            raise MalformedRow(f"{path}: bad header {header!r}, expected {HEADER}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(HEADER):
                raise MalformedRow(
                    f"{path}:{lineno}: {len(row)} columns, expected {len(HEADER)}"
                )
            try:
                press_ms = float(row[1])
                release_ms = float(row[2])
                virtual_code = int(row[3]) if row[3].strip() else 0
                if row[4].strip():
                    int(row[4])  # scan code: validated, not used
            except ValueError as exc:
                raise MalformedRow(f"{path}:{lineno}: {exc}") from None
            if press_ms < 0:
                raise MalformedRow(f"{path}:{lineno}: negative press time")
            if release_ms < press_ms:
                raise MalformedRow(
                    f"{path}:{lineno}: release {release_ms} before press {press_ms}"
                )
            events.append(KeystrokeEvent(
                key=_canonical_key(row[0], virtual_code),
                press_ms=press_ms,
                release_ms=release_ms,
                caps=_parse_bool(row[5]),
                shift=_parse_bool(row[6]),
            ))
    events.sort(key=lambda e: e.press_ms)
    return TypingSession(events=tuple(events), session_id=path.stem)


def write_keylog(path, session: TypingSession) -> None:
    """Emit the CSV format parse_keylog reads."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for ev in session.events:
            if ev.is_letter:
                vcode = ord(ev.key.upper())
            elif ev.key == SPACE:
                vcode = 0x20
            elif ev.key == ENTER:
                vcode = 0x0D
            else:
                vcode = 0
            writer.writerow([ev.key, f"{ev.press_ms:g}", f"{ev.release_ms:g}",
                             vcode, 0, int(ev.caps), int(ev.shift)])


def session_to_pairs(session: TypingSession) -> list:
    """Adjacent-letter intervals (key_a, key_b, delta_ms).

    A non-letter event (space, enter, anything else) resets adjacency, so
    pairs never span word boundaries. Zero-length intervals are dropped.
    """
    pairs = []
    prev = None
    for ev in session.events:
        if not ev.is_letter:
            prev = None
            continue
        if prev is not None:
            delta = ev.press_ms - prev.press_ms
            if delta > 0:
                pairs.append((prev.key, ev.key, delta))
        prev = ev
    return pairs
