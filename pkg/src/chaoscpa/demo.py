"""Scripted walk-through of the attack on a toy image and a 256x256 image."""

from __future__ import annotations

from dataclasses import replace
from typing import Callable

import numpy as np

from chaoscpa import attack, metrics
from chaoscpa.cipher import KeyMaterial, build_permutation, derive_schedule, encrypt
from chaoscpa.image_core import pixel_sum
from chaoscpa.oracle import CipherOracle, CountingOracle

# Published example key. mu is not given there; s0[1], s0[2] are not either.
EXAMPLE_KEY = KeyMaterial(
    a=97, b=111, x0=0.123, y0=0.456, z0=0.147, mu=0.3, r=3.999, s0=(0.789, 0.321, 0.654), n=10_000
)

TOY_IMAGE = np.array(
    [
        [30, 12, 45, 7, 21],
        [18, 26, 9, 33, 29],
        [40, 5, 22, 27, 21],
        [11, 36, 19, 24, 25],
        [28, 17, 31, 14, 25],
    ],
    dtype=np.uint8,
)

SEED = 2019


def key_for_size(n: int) -> KeyMaterial:
    """The example key with the cat-map parameters reduced mod ``n``."""
    return replace(EXAMPLE_KEY, a=EXAMPLE_KEY.a % n, b=EXAMPLE_KEY.b % n)


def synthetic_image(size: int = 256, seed: int = SEED) -> np.ndarray:
    """Smooth gradients plus texture and noise, standing in for a photograph."""
    rng = np.random.default_rng(seed)
    i, j = np.mgrid[0:size, 0:size] / size
    base = 90 * i + 60 * j + 40 * np.sin(6 * np.pi * i * j) + 30 * np.cos(9 * np.pi * (i - j) ** 2)
    img = base + rng.normal(0, 6, (size, size)) + 40
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def _matrix(name: str, arr, out: Callable[[str], None]) -> None:
    out(f"{name} =")
    for row in np.asarray(arr):
        out("  " + " ".join(f"{int(v):4d}" for v in row))


def run_toy(out: Callable[[str], None] = print) -> bool:
    key = key_for_size(TOY_IMAGE.shape[1])
    img = TOY_IMAGE
    m, n = img.shape
    eta = pixel_sum(img)
    cipher_img, _ = encrypt(img, key)
    out(f"== toy {m}x{n} image, pixel sum eta = {eta}")
    _matrix("plain", img, out)
    _matrix("cipher", cipher_img, out)

    oracle = CountingOracle(CipherOracle(key))
    q1, q2, q3 = attack.make_probe_images(eta, m, n)
    c1, c2, c3 = (oracle.encrypt_chosen(q) for q in (q1, q2, q3))
    for name, arr in (("q1", q1), ("q2", q2), ("q3", q3), ("Q1", c1), ("Q2", c2), ("Q3", c3)):
        _matrix(name, arr, out)
    d12 = attack.difference_positions(c1, c2)
    d13 = attack.difference_positions(c1, c3)
    out(f"positions where Q1 != Q2: {sorted(d12)}")
    out(f"positions where Q1 != Q3: {sorted(d13)}")
    first = attack.locate_first_pixel(c1, c2, c3)
    out(f"first pixel lands at (u, v) = {first}")

    mask = attack.recover_mask(c1, eta, first)
    _matrix("recovered mask P", mask, out)
    o0, o1 = attack.make_index_images(eta, m, n)
    _matrix("O0", o0, out)
    _matrix("O1", o1, out)
    c_low, c_high = oracle.encrypt_chosen(o0), oracle.encrypt_chosen(o1)
    l0 = attack.recover_permutation(c_low, c_high, mask, first, m, n)
    _matrix("L0 (permuted position -> plain index)", l0.reshape(m, n), out)

    rec = attack.RecoveredKey(mask, l0, first, eta)
    plain = attack.decrypt_with_equivalent_key(cipher_img, rec)
    _matrix("recovered plain", plain, out)
    out(f"oracle queries: {oracle.calls}")

    schedule = derive_schedule(key, eta, m, n)
    dest = build_permutation(key, schedule, m, n)
    ok = (
        np.array_equal(plain, img)
        and first == (schedule.u, schedule.v)
        and np.array_equal(dest[l0], np.arange(m * n))
        and oracle.calls == attack.QUERIES
    )
    out(f"toy recovery exact: {ok}")
    return ok


def run_full(size: int = 256, out: Callable[[str], None] = print) -> bool:
    key = key_for_size(size)
    img = synthetic_image(size)
    m, n = img.shape
    eta = pixel_sum(img)
    cipher_img, _ = encrypt(img, key)
    out(f"== synthetic {m}x{n} image, example key (mu = {key.mu}), eta = {eta}")

    oracle = CountingOracle(CipherOracle(key))
    rec = attack.recover_equivalent_key(oracle, eta, m, n)
    plain = attack.decrypt_with_equivalent_key(cipher_img, rec)
    errors = int(np.count_nonzero(plain != img))
    out(f"first pixel lands at (u, v) = {rec.first_pixel}")
    out(f"oracle queries: {oracle.calls}")
    out(f"pixel errors after attack: {errors}")

    rep = metrics.report(cipher_img, sources=["cipher"])
    for name in ("entropy", "hist_variance", "corr_h", "corr_v", "corr_d"):
        out(f"cipher {name}: {rep.values[name]:.6f}")
    out(metrics.CAPTION)
    return errors == 0 and oracle.calls == attack.QUERIES


def run_demo(out: Callable[[str], None] = print, size: int = 256) -> bool:
    ok_toy = run_toy(out)
    out("")
    ok_full = run_full(size, out)
    return ok_toy and ok_full
