"""BPSK codebooks and joint codeword states.

Codebook text format: one codeword per line written with ``+`` (phase 0)
and ``-`` (phase π), optionally followed by a prior. Blank lines and
``#`` comments are ignored. Priors must be given on every line or on
none; omitted priors are uniform::

    # [3,2] even-parity code
    +++  0.25
    +--  0.25
    -+-  0.25
    --+  0.25
"""

from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from .exceptions import CodebookParseError, IndexOutOfRange
from .qmath import kron_all
from .transduction import CoherentPulse, transduce_pulse

PRIOR_ATOL = 1e-12
SYMBOL_PHASE = {"+": 0.0, "-": math.pi}


@dataclass(frozen=True, eq=False)
class Codebook:
    """``M`` phase-keyed codewords of ``n`` pulses each.

    Parameters
    ----------
    phases : array_like, shape (M, n)
        Pulse phases in radians.
    priors : array_like, shape (M,), optional
        Message probabilities; uniform when omitted.
    """

    phases: np.ndarray
    priors: np.ndarray = None

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        if phases.ndim != 2 or phases.shape[0] < 2 or phases.shape[1] < 1:
            raise ValueError(f"phases must have shape (M >= 2, n >= 1), got {phases.shape}")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        phases = np.mod(phases, 2 * math.pi)
        if len({tuple(np.round(row, 12)) for row in phases}) != len(phases):
            raise ValueError("codewords must be distinct")
        m = phases.shape[0]
        if self.priors is None:
            priors = np.full(m, 1.0 / m)
        else:
            priors = np.array(self.priors, dtype=float)
        if priors.shape != (m,):
            raise ValueError(f"expected {m} priors, got shape {priors.shape}")
        if np.any(priors < 0) or abs(priors.sum() - 1.0) > PRIOR_ATOL:
            raise ValueError(f"priors must be non-negative and sum to 1, got {priors}")
        phases.setflags(write=False)
        priors.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "priors", priors)

    @property
    def num_codewords(self):
        return self.phases.shape[0]

    @property
    def length(self):
        return self.phases.shape[1]

    def permute_pulses(self, order):
        """Codebook with pulse positions reordered so slot ``i`` is old slot ``order[i]``."""
        return Codebook(self.phases[:, list(order)], self.priors)

    def to_text(self):
        lines = []
        for row, p in zip(self.phases, self.priors):
            symbols = []
            for ph in row:
                if np.isclose(ph, 0.0) or np.isclose(ph, 2 * math.pi):
                    symbols.append("+")
                elif np.isclose(ph, math.pi):
                    symbols.append("-")
                else:
                    raise ValueError("only BPSK codebooks (phases 0, π) have a text form")
            lines.append(f"{''.join(symbols)} {float(p)!r}")
        return "\n".join(lines) + "\n"


def parity_code_3_2():
    """The [3,2] even-parity code on BPSK phases, uniform priors."""
    pi = math.pi
    return Codebook([[0, 0, 0], [0, pi, pi], [pi, 0, pi], [pi, pi, 0]])


BUILTIN_CODEBOOKS = {"parity_3_2": parity_code_3_2}


def hamming_distance(codebook, i, j):
    return int(np.sum(~np.isclose(codebook.phases[i], codebook.phases[j])))


def parse_codebook(text, source=None):
    rows, priors, seen = [], [], set()
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) > 2:
            raise CodebookParseError(f"expected 'symbols [prior]', got {raw.strip()!r}", lineno, source)
        word = fields[0]
        bad = sorted(set(word) - set(SYMBOL_PHASE))
        if bad:
            raise CodebookParseError(f"invalid phase symbol(s) {bad}; use '+' or '-'", lineno, source)
        if width is None:
            width = len(word)
        elif len(word) != width:
            raise CodebookParseError(f"codeword length {len(word)} differs from {width}", lineno, source)
        if word in seen:
            raise CodebookParseError(f"duplicate codeword {word!r}", lineno, source)
        seen.add(word)
        rows.append([SYMBOL_PHASE[s] for s in word])
        if len(fields) == 2:
            try:
                prior = float(fields[1])
            except ValueError:
                raise CodebookParseError(f"prior {fields[1]!r} is not a number", lineno, source) from None
            if not math.isfinite(prior) or prior < 0:
                raise CodebookParseError(f"prior {fields[1]!r} must be finite and >= 0", lineno, source)
            priors.append(prior)
        else:
            priors.append(None)
    if len(rows) < 2:
        raise CodebookParseError("a codebook needs at least two codewords", None, source)
    given = [p is not None for p in priors]
    if any(given) and not all(given):
        raise CodebookParseError("priors must be given on every line or on none", None, source)
    try:
        return Codebook(rows, priors if all(given) else None)
    except ValueError as exc:
        raise CodebookParseError(str(exc), None, source) from None


def load_codebook(name_or_path):
    """Built-in codebook by name, or a codebook file path."""
    if name_or_path in BUILTIN_CODEBOOKS:
        return BUILTIN_CODEBOOKS[name_or_path]()
    path = Path(name_or_path)
    return parse_codebook(path.read_text(encoding="utf-8"), source=str(path))


def _pulse_states(codebook, magnitude, params):
    cache = {}
    for ph in np.unique(codebook.phases):
        cache[float(ph)] = transduce_pulse(CoherentPulse(magnitude, float(ph)), params)
    return cache


def codeword_state(codebook, index, magnitude, params):
    """Joint ``2**n``-dimensional state of codeword ``index``."""
    if not 0 <= index < codebook.num_codewords:
        raise IndexOutOfRange(f"codeword index {index} outside 0..{codebook.num_codewords - 1}")
    singles = _pulse_states(codebook, magnitude, params)
    return kron_all([singles[float(ph)] for ph in codebook.phases[index]])


def ensemble(codebook, magnitude, params):
    """List of ``(prior, state)`` pairs in codebook order."""
    singles = _pulse_states(codebook, magnitude, params)
    return [
        (float(p), kron_all([singles[float(ph)] for ph in row]))
        for row, p in zip(codebook.phases, codebook.priors)
    ]
