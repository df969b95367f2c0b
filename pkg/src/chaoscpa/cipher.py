"""The Baker/Arnold/Logistic image block cipher.

Encryption of a square M x N plain-image ``I``:

1. couple the key to the plain-image through its pixel sum ``eta`` and
   derive the block split ``(u, v)`` from a Baker orbit,
2. permute pixels with the Arnold cat map, then swap ``(0, 0)`` and ``(u, v)``,
3. split into four sub-images at ``(u, v)`` and add a Logistic keystream to
   every pixel modulo 256.

Because the keystream never depends on pixel values (only on ``eta``), the
whole cipher collapses to ``cipher = permute(I) + P (mod 256)`` for a mask
image ``P``. :func:`encrypt` uses that form; :func:`encrypt_stepwise` follows
the original step list literally and is kept as a cross-check.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from chaoscpa import chaos
from chaoscpa.errors import KeyValidationError, NonSquareImageError, ValidationError
from chaoscpa.image_core import as_image, as_wide, mod256, pixel_sum

DEFAULT_ITERATIONS = 10_000

_KEY_FIELDS = ("a", "b", "x0", "y0", "z0", "mu", "r", "s0", "n")


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)


@dataclass(frozen=True)
class KeyMaterial:
    """Secret key. ``s0[0]`` seeds the [0, 256] Logistic map; ``s0[1]``
    and ``s0[2]`` offset the Logistic seeds of sub-images 3 and 4."""

    a: int
    b: int
    x0: float
    y0: float
    z0: float
    mu: float
    r: float
    s0: tuple[float, float, float]
    n: int = DEFAULT_ITERATIONS

    def __post_init__(self):
        for name in ("a", "b", "n"):
            if not _is_int(getattr(self, name)):
                raise KeyValidationError(f"{name} must be an integer")
        for name in ("x0", "y0", "z0", "mu", "r"):
            if not _is_real(getattr(self, name)):
                raise KeyValidationError(f"{name} must be a real number")
        if self.a < 0 or self.b < 0:
            raise KeyValidationError("a and b must be nonnegative")
        if self.n < 1:
            raise KeyValidationError("n must be >= 1")
        for name in ("x0", "y0", "z0"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise KeyValidationError(f"{name} must lie in [0, 1]")
        if not 0.0 < self.mu < 1.0:
            raise KeyValidationError("mu must lie in (0, 1)")
        if not chaos.R_MIN < self.r <= chaos.R_MAX:
            raise KeyValidationError("r must lie in (3.5699, 4]")
        s0 = tuple(self.s0) if isinstance(self.s0, (tuple, list)) else ()
        if len(s0) != 3 or not all(_is_real(s) for s in s0):
            raise KeyValidationError("s0 must be a triple of reals")
        if not 0.0 <= s0[0] < 256.0:
            raise KeyValidationError("s0[0] must lie in [0, 256)")
        if not (0.0 <= s0[1] < 1.0 and 0.0 <= s0[2] < 1.0):
            raise KeyValidationError("s0[1] and s0[2] must lie in [0, 1)")
        object.__setattr__(self, "s0", tuple(float(s) for s in s0))

    def check_size(self, n_side: int) -> None:
        if self.a >= n_side or self.b >= n_side:
            raise KeyValidationError(f"a and b must lie in [0, {n_side - 1}] for a {n_side}-wide image")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["s0"] = list(self.s0)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> KeyMaterial:
        unknown = sorted(set(d) - set(_KEY_FIELDS))
        if unknown:
            raise KeyValidationError(f"unknown key field(s): {', '.join(unknown)}")
        missing = [f for f in _KEY_FIELDS if f != "n" and f not in d]
        if missing:
            raise KeyValidationError(f"missing key field(s): {', '.join(missing)}")
        s0 = d["s0"]
        if not isinstance(s0, (list, tuple)):
            raise KeyValidationError("s0 must be an array of 3 reals")
        return cls(**{**d, "s0": tuple(s0)})


def load_key(path: str | os.PathLike) -> KeyMaterial:
    with open(path) as f:
        try:
            d = json.load(f)
        except json.JSONDecodeError as exc:
            raise KeyValidationError(f"key file is not valid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise KeyValidationError("key file must hold a JSON object")
    return KeyMaterial.from_dict(d)


def save_key(path: str | os.PathLike, key: KeyMaterial) -> None:
    with open(path, "w") as f:
        json.dump(key.to_dict(), f, indent=2)
        f.write("\n")


def random_key(rng: np.random.Generator, n_side: int, n: int = DEFAULT_ITERATIONS) -> KeyMaterial:
    return KeyMaterial(
        a=int(rng.integers(0, n_side)),
        b=int(rng.integers(0, n_side)),
        x0=float(rng.random()),
        y0=float(rng.random()),
        z0=float(rng.random()),
        mu=float(rng.uniform(0.05, 0.95)),
        r=float(rng.uniform(3.57, 4.0)),
        s0=(float(rng.uniform(0, 256)), float(rng.random()), float(rng.random())),
        n=n,
    )


@dataclass(frozen=True)
class ScheduleState:
    baker_seed: tuple[float, float]
    u: int
    v: int
    z0: tuple[float, float, float, float]
    eta: int


def _check_square(shape) -> tuple[int, int]:
    m, n = shape
    if m != n:
        raise NonSquareImageError(f"non-square image {m}x{n}; the cat map needs M == N")
    if n < 2:
        raise ValidationError("image must be at least 2x2")
    return m, n


def derive_schedule(key: KeyMaterial, eta: int, m: int, n: int) -> ScheduleState:
    _check_square((m, n))
    key.check_size(n)
    if eta < 0:
        raise ValidationError(f"pixel sum must be nonnegative, got {eta}")
    shift = (eta / (m * n)) / 256
    x, y = (key.x0 + shift) % 1.0, (key.y0 + shift) % 1.0
    xn, yn = chaos.baker_iterate(x, y, key.mu, key.n)
    # u = 0 or v = 0 would leave empty blocks and a no-op swap
    u = min(max(math.floor(m * xn), 1), m - 1)
    v = min(max(math.floor(n * yn), 1), n - 1)
    z1 = (key.z0 + shift) % 1.0
    z2 = (z1 + 0.5) % 1.0
    z3 = (z1 + key.s0[1]) % 1.0
    z4 = (z2 + key.s0[2]) % 1.0
    return ScheduleState((x, y), u, v, (z1, z2, z3, z4), eta)


def build_permutation(key: KeyMaterial, schedule: ScheduleState, m: int, n: int) -> np.ndarray:
    """Forward table ``dest[k]``: plain linear index -> permuted linear index."""
    _check_square((m, n))
    i, j = np.divmod(np.arange(m * n, dtype=np.int64), n)
    a, b = key.a, key.b
    p = (i + b * j) % n
    q = (a * i + (a * b + 1) * j) % n
    dest = p * n + q
    target = schedule.u * n + schedule.v
    swapped = dest.copy()
    swapped[dest == 0] = target
    swapped[dest == target] = 0
    return swapped


def permute(img, dest: np.ndarray) -> np.ndarray:
    """Move pixel ``k`` of ``img`` to linear position ``dest[k]``."""
    arr = np.asarray(img)
    out = np.empty(arr.size, dtype=arr.dtype)
    out[dest] = arr.ravel()
    return out.reshape(arr.shape)


def unpermute(img, dest: np.ndarray) -> np.ndarray:
    arr = np.asarray(img)
    return arr.ravel()[dest].reshape(arr.shape)


def generate_t_sequence(s01: float, length: int) -> np.ndarray:
    out = np.empty(length, dtype=np.uint8)
    s = s01
    for p in range(length):
        s = chaos.logistic_int_step(s)
        out[p] = chaos.quantize_h1(s)
    return out


def generate_m_sequence(z0k: float, r: float, length: int) -> np.ndarray:
    out = np.empty(length, dtype=np.uint8)
    z = z0k
    for p in range(length):
        z = chaos.logistic_real_step(z, r)
        out[p] = chaos.quantize_h2(z)
    return out


def mask_values(m_seq, t_seq) -> np.ndarray:
    m = np.asarray(m_seq, dtype=np.int64)
    t = np.asarray(t_seq, dtype=np.int64)
    return mod256(np.where(m == 255, m, m + 1) * t)


def sub_blocks(u: int, v: int, m: int, n: int) -> list[tuple[slice, slice]]:
    """Row/column slices of the four sub-images, in keystream-seed order."""
    return [
        (slice(0, u), slice(0, v)),
        (slice(0, u), slice(v, n)),
        (slice(u, m), slice(0, v)),
        (slice(u, m), slice(v, n)),
    ]


def build_mask(key: KeyMaterial, eta: int, m: int, n: int, schedule: ScheduleState | None = None) -> np.ndarray:
    """The additive mask ``P`` with ``cipher = permuted + P (mod 256)``."""
    if schedule is None:
        schedule = derive_schedule(key, eta, m, n)
    blocks = sub_blocks(schedule.u, schedule.v, m, n)
    longest = max((rs.stop - rs.start) * (cs.stop - cs.start) for rs, cs in blocks)
    # one global t-sequence, re-read from its start inside each block
    t_seq = generate_t_sequence(key.s0[0], longest)
    mask = np.empty((m, n), dtype=np.uint8)
    for (rs, cs), z0k in zip(blocks, schedule.z0):
        shape = (rs.stop - rs.start, cs.stop - cs.start)
        size = shape[0] * shape[1]
        m_seq = generate_m_sequence(z0k, key.r, size)
        mask[rs, cs] = mask_values(m_seq, t_seq[:size]).reshape(shape)
    return mask


def encrypt(img, key: KeyMaterial) -> tuple[np.ndarray, int]:
    """Encrypt an Image or WideImage; returns ``(cipher, eta)``.

    ``eta`` is the plain pixel sum, which the receiver needs to decrypt.
    """
    wide = as_wide(img)
    m, n = _check_square(wide.shape)
    eta = pixel_sum(wide)
    schedule = derive_schedule(key, eta, m, n)
    dest = build_permutation(key, schedule, m, n)
    mask = build_mask(key, eta, m, n, schedule)
    cipher = mod256(permute(wide, dest) + mask.astype(np.int64))
    return cipher, eta


def decrypt(cipher, key: KeyMaterial, eta: int) -> np.ndarray:
    c = as_image(cipher)
    m, n = _check_square(c.shape)
    schedule = derive_schedule(key, eta, m, n)
    dest = build_permutation(key, schedule, m, n)
    mask = build_mask(key, eta, m, n, schedule)
    permuted = mod256(c.astype(np.int64) - mask.astype(np.int64))
    return unpermute(permuted, dest)


def encrypt_stepwise(img, key: KeyMaterial) -> np.ndarray:
    """Pixel-by-pixel rendition of the original step list (slow, for tests)."""
    plain = as_wide(img)
    m, n = _check_square(plain.shape)
    key.check_size(n)
    total = sum(int(x) for x in plain.ravel())
    mean = total / (m * n)

    # Step 1: block size from the Baker map
    x = (key.x0 + mean / 256) % 1
    y = (key.y0 + mean / 256) % 1
    for _ in range(key.n):
        x, y = chaos.baker_step(x, y, key.mu)
    u = min(max(math.floor(m * x), 1), m - 1)
    v = min(max(math.floor(n * y), 1), n - 1)

    # Step 2: Arnold permutation, then swap (0, 0) with (u, v)
    e = [[0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            p, q = chaos.arnold_map(i, j, key.a, key.b, n)
            e[p][q] = int(plain[i, j])
    e[0][0], e[u][v] = e[u][v], e[0][0]

    # Step 4: integer Logistic sequence {t_p}
    s = key.s0[0]
    t = []
    for _ in range(m * n):
        s = chaos.logistic_int_step(s)
        t.append(chaos.quantize_h1(s))

    # Steps 3, 5-7: four sub-images, each with its own Logistic seed
    z01 = (key.z0 + mean / 256) % 1
    z02 = (z01 + 0.5) % 1
    seeds = [z01, z02, (z01 + key.s0[1]) % 1, (z02 + key.s0[2]) % 1]
    corners = [(0, u, 0, v), (0, u, v, n), (u, m, 0, v), (u, m, v, n)]
    out = np.zeros((m, n), dtype=np.uint8)
    for (r0, r1, c0, c1), z in zip(corners, seeds):
        width = c1 - c0
        mp = []
        for _ in range((r1 - r0) * width):
            z = chaos.logistic_real_step(z, key.r)
            mp.append(chaos.quantize_h2(z))
        for i in range(r1 - r0):
            for j in range(width):
                p = i * width + j
                if mp[p] == 255:
                    val = (e[r0 + i][c0 + j] + mp[p] * t[p]) % 256
                else:
                    val = (e[r0 + i][c0 + j] + (mp[p] + 1) * t[p]) % 256
                # Step 8: reassemble in place
                out[r0 + i, c0 + j] = val
    return out
