"""
Cyclic redundancy checks over GF(2) polynomials.

Bit order is MSB first with a zero initial register, no reflection and no
output XOR. The remainder of ``m(x) * x^r`` modulo the generator is appended
after the message.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CrcSpec",
    "CRC2",
    "CRC10",
    "CRC16",
    "BUILTIN_CRCS",
    "crc_append",
    "crc_check",
    "crc_remainder",
    "get_crc",
    "parse_polynomial",
]


@dataclass(frozen=True)
class CrcSpec:
    """Generator polynomial, coefficients listed highest degree first."""

    coefficients: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        c = tuple(int(b) for b in self.coefficients)
        if len(c) < 2 or any(b not in (0, 1) for b in c):
            raise ValueError("a CRC generator needs at least two 0/1 coefficients")
        if c[0] != 1:
            raise ValueError("leading coefficient must be 1")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    r = degree

    @property
    def poly(self) -> int:
        """Generator as an integer without its leading term."""
        value = 0
        for b in self.coefficients[1:]:
            value = (value << 1) | b
        return value

    def __str__(self):
        terms = []
        for power, b in zip(range(self.degree, -1, -1), self.coefficients):
            if b:
                terms.append("1" if power == 0 else ("x" if power == 1 else f"x^{power}"))
        return "+".join(terms)


_TERM = re.compile(r"^(?:x(?:\^(\d+))?|1)$")


def parse_polynomial(text: str, name: str = "") -> CrcSpec:
    """Parse strings such as ``"x^16+x^12+x^5+1"``."""
    powers = set()
    for raw in text.replace(" ", "").split("+"):
        m = _TERM.match(raw)
        if not m:
            raise ValueError(f"cannot parse polynomial term {raw!r} in {text!r}")
        if raw == "1":
            p = 0
        else:
            p = int(m.group(1)) if m.group(1) else 1
        if p in powers:
            raise ValueError(f"repeated term x^{p} in {text!r}")
        powers.add(p)
    deg = max(powers)
    return CrcSpec(tuple(int(p in powers) for p in range(deg, -1, -1)), name=name)


CRC2 = parse_polynomial("x^2+x+1", "CRC-2")
CRC10 = parse_polynomial("x^10+x^9+x^8+x^7+x^6+x^4+x^3+1", "CRC-10")
CRC16 = parse_polynomial("x^16+x^12+x^5+1", "CRC-16")
BUILTIN_CRCS = {c.degree: c for c in (CRC2, CRC10, CRC16)}
_BY_NAME = {c.name.upper(): c for c in (CRC2, CRC10, CRC16)}


def get_crc(spec) -> CrcSpec:
    """Resolve a CrcSpec from a name (``"CRC-16"``), polynomial string or degree."""
    if isinstance(spec, CrcSpec):
        return spec
    if isinstance(spec, (int, np.integer)) and not isinstance(spec, bool):
        try:
            return BUILTIN_CRCS[int(spec)]
        except KeyError:
            raise ValueError(f"no built-in CRC of degree {spec}; give a polynomial") from None
    if isinstance(spec, str):
        key = spec.strip().upper()
        if key in _BY_NAME:
            return _BY_NAME[key]
        return parse_polynomial(spec)
    raise TypeError(f"cannot interpret {spec!r} as a CRC")


def _bits(message) -> np.ndarray:
    arr = np.asarray(message, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise ValueError("message must contain only 0/1 values")
    return arr


def _register(bits: np.ndarray, spec: CrcSpec) -> int:
    r = spec.degree
    top = 1 << (r - 1)
    mask = (1 << r) - 1
    poly = spec.poly
    reg = 0
    for b in bits.tolist():
        feedback = ((reg & top) != 0) ^ b
        reg = (reg << 1) & mask
        if feedback:
            reg ^= poly
    return reg


def crc_remainder(message, spec: CrcSpec) -> np.ndarray:
    """Remainder of ``message * x^r`` divided by the generator, MSB first."""
    bits = _bits(message)
    if bits.size == 0:
        raise ValueError("message must be non-empty")
    reg = _register(bits, spec)
    r = spec.degree
    return np.array([(reg >> (r - 1 - k)) & 1 for k in range(r)], dtype=np.uint8)


def crc_append(message, spec: CrcSpec) -> np.ndarray:
    bits = _bits(message)
    return np.concatenate([bits, crc_remainder(bits, spec)])


def crc_check(codeword, spec: CrcSpec) -> bool:
    """True when the trailing ``r`` bits are the CRC of the leading ones."""
    bits = _bits(codeword)
    r = spec.degree
    if bits.size <= r:
        raise ValueError(f"codeword of length {bits.size} is too short for a degree-{r} CRC")
    return bool(np.array_equal(crc_remainder(bits[:-r], spec), bits[-r:]))
