"""Encryption oracles: the attacker's only handle on the cipher.

An oracle exposes a single method, ``encrypt_chosen(wide_image) -> image``.
The attack module talks to oracles only through that method and never
imports the cipher or the key.
"""

from __future__ import annotations

import shlex
import subprocess
from typing import Sequence

from chaoscpa import cipher
from chaoscpa.attack import EncryptionOracle
from chaoscpa.errors import AttackFailure
from chaoscpa.image_core import as_wide, read_pgm, write_wide


class CipherOracle:
    """In-process fixed-key oracle around :func:`chaoscpa.cipher.encrypt`."""

    def __init__(self, key: cipher.KeyMaterial):
        self._key = key

    def encrypt_chosen(self, img):
        return cipher.encrypt(img, self._key)[0]


class SubprocessOracle:
    """Runs ``command`` once per query.

    The chosen image goes to the child's stdin as a WideImage text document
    and the cipher comes back on stdout as a binary P5 PGM.
    """

    def __init__(self, command: str | Sequence[str], timeout: float | None = 120.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout

    def encrypt_chosen(self, img):
        doc = write_wide(as_wide(img)).encode()
        try:
            proc = subprocess.run(self.command, input=doc, capture_output=True, timeout=self.timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise AttackFailure("oracle", f"could not run oracle command: {exc}") from exc
        if proc.returncode != 0:
            err = proc.stderr.decode(errors="replace").strip()
            raise AttackFailure("oracle", f"oracle exited with status {proc.returncode}: {err}")
        return read_pgm(proc.stdout)


class CountingOracle:
    """Wraps another oracle and counts queries."""

    def __init__(self, inner: EncryptionOracle):
        self.inner = inner
        self.calls = 0

    def encrypt_chosen(self, img):
        self.calls += 1
        return self.inner.encrypt_chosen(img)
