"""Five-chosen-plaintext attack recovering an equivalent key.

The cipher is ``C = permute(I) + P (mod 256)`` where both the permutation
and the mask ``P`` depend on the key and the plain pixel sum ``eta`` only.
Every chosen image below is built with pixel sum ``eta``, so the oracle
reuses the target's permutation and mask:

* three probes locate where plain pixel ``(0, 0)`` lands (``(u, v)``),
* the first probe's cipher is ``P`` except at ``(u, v)``,
* two base-256 index images reveal the permutation.

This module reaches the cipher only through ``oracle.encrypt_chosen``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from chaoscpa.errors import AttackFailure, ValidationError
from chaoscpa.image_core import as_image, load_pgm, mod256, save_pgm

MAX_PIXELS = 256 * 256
QUERIES = 5


class EncryptionOracle(Protocol):
    """Anything that encrypts a chosen (possibly wide) image under a fixed key."""

    def encrypt_chosen(self, img: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class RecoveredKey:
    """Equivalent key: mask ``P`` and ``l0[t]`` = plain index at permuted position ``t``."""

    mask: np.ndarray
    l0: np.ndarray
    first_pixel: tuple[int, int]
    eta: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def save(self, directory: str | os.PathLike) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        save_pgm(d / "mask.pgm", self.mask)
        save_l0(d / "l0.txt", self.l0)
        m, n = self.shape
        meta = {"u": self.first_pixel[0], "v": self.first_pixel[1], "eta": self.eta, "M": m, "N": n}
        (d / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")

    @classmethod
    def load(cls, directory: str | os.PathLike) -> RecoveredKey:
        d = Path(directory)
        meta = json.loads((d / "meta.json").read_text())
        return cls(load_pgm(d / "mask.pgm"), load_l0(d / "l0.txt"), (meta["u"], meta["v"]), meta["eta"])


def save_l0(path, l0) -> None:
    Path(path).write_text("".join(f"{int(k)}\n" for k in l0))


def load_l0(path) -> np.ndarray:
    return np.array([int(tok) for tok in Path(path).read_text().split()], dtype=np.int64)


def _check_target_shape(m: int, n: int) -> None:
    if m != n:
        raise ValidationError(f"non-square image {m}x{n}")
    if n < 3:
        raise ValidationError("the probes need at least 3 columns")
    if m * n > MAX_PIXELS:
        raise ValidationError(f"{m}x{n} needs more than two base-256 index images (max {MAX_PIXELS} pixels)")


def make_probe_images(eta: int, m: int, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Zero images with pixel sum ``eta``, differing only in row 0."""
    if eta < 1:
        raise ValidationError("eta must be >= 1: probes 2 and 3 put eta - 1 in a pixel")
    if m < 2 or n < 3:
        raise ValidationError("probe images need at least 2 rows and 3 columns")
    q1 = np.zeros((m, n), dtype=np.int64)
    q1[0, 0] = eta
    q2 = np.zeros((m, n), dtype=np.int64)
    q2[0, 0], q2[0, 1] = eta - 1, 1
    q3 = np.zeros((m, n), dtype=np.int64)
    q3[0, 0], q3[0, 2] = eta - 1, 1
    return q1, q2, q3


def difference_positions(a, b) -> set[tuple[int, int]]:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch {a.shape} vs {b.shape}")
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(a != b))}


def locate_first_pixel(c1, c2, c3) -> tuple[int, int]:
    """Permuted position of plain pixel ``(0, 0)`` from the three probe ciphers."""
    d12 = difference_positions(c1, c2)
    d13 = difference_positions(c1, c3)
    if len(d12) != 2 or len(d13) != 2:
        raise AttackFailure(
            "locate",
            f"expected two differing pixels per probe pair, got {len(d12)} and {len(d13)}; "
            "the oracle is not a fixed-key instance of the cipher",
        )
    common = d12 & d13
    if len(common) != 1:
        raise AttackFailure("locate", f"probe differences share {len(common)} positions, expected 1")
    return common.pop()


def recover_mask(c1, eta: int, first_pixel: tuple[int, int]) -> np.ndarray:
    mask = as_image(c1).copy()
    mask[first_pixel] = (int(mask[first_pixel]) - eta) % 256
    return mask


def unmask(cipher_img, mask) -> np.ndarray:
    c, p = as_image(cipher_img), as_image(mask)
    if c.shape != p.shape:
        raise ValidationError(f"shape mismatch {c.shape} vs {p.shape}")
    return mod256(c.astype(np.int64) - p.astype(np.int64))


def make_index_images(eta: int, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Low and high base-256 digits of each linear index, first pixels
    adjusted so both images sum to ``eta``."""
    if m * n > MAX_PIXELS:
        raise ValidationError(f"{m}x{n} exceeds {MAX_PIXELS} pixels; two base-256 digits do not suffice")
    k = np.arange(m * n, dtype=np.int64).reshape(m, n)
    images = []
    for digit in (k % 256, k // 256):
        img = digit.copy()
        img[0, 0] = eta - (int(digit.sum()) - int(digit[0, 0]))
        images.append(img)
    return images[0], images[1]


def recover_permutation(c0, c1, mask, first_pixel: tuple[int, int], m: int, n: int) -> np.ndarray:
    low = unmask(c0, mask).astype(np.int64)
    high = unmask(c1, mask).astype(np.int64)
    combined = 256 * high + low
    # the adjusted first pixels make this one entry wrong; it is fixed by the index sum
    others = int(combined.sum()) - int(combined[first_pixel])
    total = m * n * (m * n - 1) // 2
    combined[first_pixel] = total - others
    l0 = combined.ravel()
    seen = np.zeros(m * n, dtype=bool)
    in_range = (l0 >= 0) & (l0 < m * n)
    if not in_range.all():
        raise AttackFailure("permutation", "recovered indices fall outside the image")
    seen[l0] = True
    if not seen.all():
        raise AttackFailure("permutation", "recovered table is not a bijection")
    return l0


def recover_equivalent_key(oracle: EncryptionOracle, eta: int, m: int, n: int) -> RecoveredKey:
    """Spend exactly five oracle queries to recover ``(P, l0)`` for pixel sum ``eta``."""
    _check_target_shape(m, n)
    probes = make_probe_images(eta, m, n)
    c1, c2, c3 = (as_image(oracle.encrypt_chosen(q)) for q in probes)
    first = locate_first_pixel(c1, c2, c3)
    mask = recover_mask(c1, eta, first)
    o0, o1 = make_index_images(eta, m, n)
    c_low = as_image(oracle.encrypt_chosen(o0))
    c_high = as_image(oracle.encrypt_chosen(o1))
    l0 = recover_permutation(c_low, c_high, mask, first, m, n)
    return RecoveredKey(mask, l0, first, eta)


def decrypt_with_equivalent_key(target, key: RecoveredKey) -> np.ndarray:
    """Decrypt any cipher whose plain-image has pixel sum ``key.eta``."""
    permuted = unmask(target, key.mask)
    plain = np.empty(permuted.size, dtype=np.uint8)
    plain[key.l0] = permuted.ravel()
    return plain.reshape(permuted.shape)


def attack_decrypt(oracle: EncryptionOracle, target, eta: int, m: int, n: int) -> np.ndarray:
    target = as_image(target)
    if target.shape != (m, n):
        raise ValidationError(f"target is {target.shape}, expected {(m, n)}")
    return decrypt_with_equivalent_key(target, recover_equivalent_key(oracle, eta, m, n))

