"""Run the chosen-plaintext attack on many random keys and images.

    python scripts/attack_trials.py --sizes 16 64 128 --trials 20
"""

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from chaoscpa.attack import attack_decrypt
from chaoscpa.cipher import encrypt, random_key
from chaoscpa.oracle import CipherOracle, CountingOracle


@dataclass
class TrialConfig:
    sizes: list[int] = field(default_factory=lambda: [16, 64, 128, 256])
    trials: int = 10
    iterations: int = 10_000
    seed: int = 0


def run(cfg: TrialConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    print(f"{'N':>5} {'trials':>7} {'exact':>6} {'queries':>8} {'attack s':>9}")
    for n in cfg.sizes:
        exact, queries, seconds = 0, set(), 0.0
        for _ in range(cfg.trials):
            key = random_key(rng, n, n=cfg.iterations)
            img = rng.integers(0, 256, (n, n), dtype=np.uint8)
            img[0, 0] = max(int(img[0, 0]), 1)
            cipher_img, eta = encrypt(img, key)
            oracle = CountingOracle(CipherOracle(key))
            t0 = time.perf_counter()
            rec = attack_decrypt(oracle, cipher_img, eta, n, n)
            seconds += time.perf_counter() - t0
            exact += bool(np.array_equal(rec, img))
            queries.add(oracle.calls)
        print(f"{n:5d} {cfg.trials:7d} {exact:6d} {','.join(map(str, sorted(queries))):>8} {seconds / cfg.trials:9.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=TrialConfig().sizes)
    ap.add_argument("--trials", type=int, default=TrialConfig.trials)
    ap.add_argument("--iterations", type=int, default=TrialConfig.iterations)
    ap.add_argument("--seed", type=int, default=TrialConfig.seed)
    run(TrialConfig(**vars(ap.parse_args())))
