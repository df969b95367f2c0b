import json
import shlex
import subprocess
import sys

import numpy as np
import pytest

from chaoscpa.cipher import random_key, save_key
from chaoscpa.cli import main
from chaoscpa.demo import EXAMPLE_KEY, synthetic_image
from chaoscpa.image_core import load_pgm, read_pgm, save_pgm, write_wide


@pytest.fixture
def workdir(tmp_path):
    rng = np.random.default_rng(42)
    img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
    save_pgm(tmp_path / "plain.pgm", img)
    save_key(tmp_path / "key.json", random_key(rng, 16, n=2000))
    return tmp_path, img


def run(*argv):
    return main([str(a) for a in argv])


def test_encrypt_decrypt_files(workdir):
    d, img = workdir
    assert run("encrypt", "--key", d / "key.json", d / "plain.pgm", d / "c.pgm") == 0
    meta = json.loads((d / "c.pgm.json").read_text())
    assert meta == {"eta": int(img.sum()), "M": 16, "N": 16}
    assert run("decrypt", "--key", d / "key.json", d / "c.pgm", d / "back.pgm") == 0
    assert (d / "back.pgm").read_bytes() == (d / "plain.pgm").read_bytes()
    assert run("decrypt", "--key", d / "key.json", "--eta", meta["eta"], d / "c.pgm", d / "back2.pgm") == 0
    assert np.array_equal(load_pgm(d / "back2.pgm"), img)


def test_decrypt_wrong_eta_differs(workdir):
    d, img = workdir
    run("encrypt", "--key", d / "key.json", d / "plain.pgm", d / "c.pgm")
    eta = int(img.sum())
    assert run("decrypt", "--key", d / "key.json", "--eta", eta + 256, d / "c.pgm", d / "bad.pgm") == 0
    assert (d / "bad.pgm").read_bytes() != (d / "plain.pgm").read_bytes()


def test_decrypt_without_eta_explains(workdir, capsys):
    d, img = workdir
    run("encrypt", "--key", d / "key.json", d / "plain.pgm", d / "c.pgm")
    (d / "c.pgm.json").unlink()
    assert run("decrypt", "--key", d / "key.json", d / "c.pgm", d / "x.pgm") == 2
    assert "eta" in capsys.readouterr().err


def test_encrypt_non_square(workdir, capsys):
    d, _ = workdir
    save_pgm(d / "wide.pgm", np.zeros((4, 6), dtype=np.uint8))
    assert run("encrypt", "--key", d / "key.json", d / "wide.pgm", d / "c.pgm") == 2
    assert "non-square" in capsys.readouterr().err


def test_key_missing_mu(workdir, capsys):
    d, _ = workdir
    key = json.loads((d / "key.json").read_text())
    del key["mu"]
    (d / "bad.json").write_text(json.dumps(key))
    assert run("encrypt", "--key", d / "bad.json", d / "plain.pgm", d / "c.pgm") == 2
    assert "mu" in capsys.readouterr().err


def test_usage_errors_exit_one(workdir):
    d, _ = workdir
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1
    assert run("attack", d / "plain.pgm", d / "out.pgm") == 1


def test_attack_in_process(workdir, capsys):
    d, img = workdir
    run("encrypt", "--key", d / "key.json", d / "plain.pgm", d / "c.pgm")
    rc = run("attack", "--key", d / "key.json", d / "c.pgm", d / "rec.pgm",
             "--emit-mask", d / "p.pgm", "--emit-perm", d / "l0.txt", "--emit-meta", d / "meta.json")
    assert rc == 0
    assert "queries: 5" in capsys.readouterr().out
    assert np.array_equal(load_pgm(d / "rec.pgm"), img)
    assert load_pgm(d / "p.pgm").shape == (16, 16)
    assert sorted(int(x) for x in (d / "l0.txt").read_text().split()) == list(range(256))
    assert json.loads((d / "meta.json").read_text())["eta"] == int(img.sum())


def test_oracle_subcommand_protocol(workdir):
    d, _ = workdir
    probe = np.zeros((16, 16), dtype=np.int64)
    probe[0, 0] = 5000
    cmd = [sys.executable, "-m", "chaoscpa", "oracle", "--key", str(d / "key.json")]
    out = subprocess.run(cmd, input=write_wide(probe).encode(), capture_output=True, check=True)
    cipher_img = read_pgm(out.stdout)
    assert cipher_img.shape == (16, 16)


def test_attack_external_oracle_matches_in_process(workdir, capsys):
    d, img = workdir
    run("encrypt", "--key", d / "key.json", d / "plain.pgm", d / "c.pgm")
    assert run("attack", "--key", d / "key.json", d / "c.pgm", d / "a.pgm", "--emit-mask", d / "pa.pgm",
               "--emit-perm", d / "la.txt") == 0
    oracle_cmd = shlex.join([sys.executable, "-m", "chaoscpa", "oracle", "--key", str(d / "key.json")])
    assert run("attack", "--oracle-cmd", oracle_cmd, d / "c.pgm", d / "b.pgm", "--emit-mask", d / "pb.pgm",
               "--emit-perm", d / "lb.txt") == 0
    assert "queries: 5" in capsys.readouterr().out
    for a, b in [("a.pgm", "b.pgm"), ("pa.pgm", "pb.pgm"), ("la.txt", "lb.txt")]:
        assert (d / a).read_bytes() == (d / b).read_bytes()
    assert np.array_equal(load_pgm(d / "b.pgm"), img)


def test_attack_failure_exit_three(workdir, capsys):
    d, _ = workdir
    run("encrypt", "--key", d / "key.json", d / "plain.pgm", d / "c.pgm")
    failing = shlex.join([sys.executable, "-c", "import sys; sys.exit(4)"])
    assert run("attack", "--oracle-cmd", failing, d / "c.pgm", d / "x.pgm") == 3
    assert "oracle" in capsys.readouterr().err


def test_metrics_command(workdir, capsys):
    d, _ = workdir
    save_pgm(d / "flat.pgm", np.full((8, 8), 17, dtype=np.uint8))
    assert run("metrics", d / "flat.pgm", "--out", d / "r.json") == 0
    assert json.loads((d / "r.json").read_text())["entropy"] == 0.0
    assert run("metrics", d / "plain.pgm", "--pair", d / "plain.pgm") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["npcr"] == 0 and doc["uaci"] == 0
    assert run("metrics", d / "plain.pgm", "--pair", d / "flat.pgm") == 2


def test_metrics_on_encrypted_natural_image(tmp_path, capsys):
    save_pgm(tmp_path / "nat.pgm", synthetic_image(256))
    save_key(tmp_path / "k.json", EXAMPLE_KEY)
    run("encrypt", "--key", tmp_path / "k.json", tmp_path / "nat.pgm", tmp_path / "c.pgm")
    capsys.readouterr()
    assert run("metrics", tmp_path / "c.pgm") == 0
    assert json.loads(capsys.readouterr().out)["entropy"] > 7.9


def test_demo(capsys):
    assert run("demo") == 0
    out = capsys.readouterr().out
    assert "eta = 575" in out
    assert out.count("oracle queries: 5") == 2
    assert "pixel errors after attack: 0" in out
