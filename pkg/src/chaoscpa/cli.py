"""Command-line front end: ``python -m chaoscpa <subcommand>``.

Exit status: 0 success, 1 usage error, 2 validation error, 3 attack failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from chaoscpa import attack, metrics
from chaoscpa.cipher import decrypt, encrypt, load_key
from chaoscpa.demo import run_demo
from chaoscpa.errors import AttackFailure, ValidationError
from chaoscpa.image_core import load_pgm, read_wide, save_pgm, write_pgm
from chaoscpa.oracle import CipherOracle, CountingOracle, SubprocessOracle

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_ATTACK = 0, 1, 2, 3

ETA_MISSING = (
    "the plain-image pixel sum (eta) is required: the keystream depends on the "
    "plain-image mean, so the receiver cannot decrypt without it. "
    "Pass --eta or keep the .json sidecar written by 'encrypt' next to the cipher."
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def sidecar_path(image_path) -> Path:
    return Path(str(image_path) + ".json")


def write_sidecar(image_path, eta: int, m: int, n: int) -> None:
    sidecar_path(image_path).write_text(json.dumps({"eta": eta, "M": m, "N": n}, indent=2) + "\n")


def resolve_eta(eta: int | None, image_path) -> int:
    if eta is not None:
        return eta
    side = sidecar_path(image_path)
    if side.exists():
        meta = json.loads(side.read_text())
        if "eta" in meta:
            return int(meta["eta"])
    raise ValidationError(ETA_MISSING)


def cmd_encrypt(args) -> int:
    key = load_key(args.key)
    img = load_pgm(args.input)
    cipher_img, eta = encrypt(img, key)
    save_pgm(args.output, cipher_img)
    write_sidecar(args.output, eta, *img.shape)
    print(f"eta = {eta}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    key = load_key(args.key)
    cipher_img = load_pgm(args.input)
    eta = resolve_eta(args.eta, args.input)
    save_pgm(args.output, decrypt(cipher_img, key, eta))
    return EXIT_OK


def cmd_attack(args) -> int:
    if (args.key is None) == (args.oracle_cmd is None):
        raise UsageError("give exactly one of --key or --oracle-cmd")
    inner = CipherOracle(load_key(args.key)) if args.key else SubprocessOracle(args.oracle_cmd)
    oracle = CountingOracle(inner)
    target = load_pgm(args.target)
    eta = resolve_eta(args.eta, args.target)
    m, n = target.shape
    rec = attack.recover_equivalent_key(oracle, eta, m, n)
    plain = attack.decrypt_with_equivalent_key(target, rec)
    save_pgm(args.output, plain)
    if args.emit_mask:
        save_pgm(args.emit_mask, rec.mask)
    if args.emit_perm:
        attack.save_l0(args.emit_perm, rec.l0)
    if args.emit_meta:
        meta = {"u": rec.first_pixel[0], "v": rec.first_pixel[1], "eta": eta, "M": m, "N": n}
        Path(args.emit_meta).write_text(json.dumps(meta, indent=2) + "\n")
    print(f"first pixel at (u, v) = {rec.first_pixel}")
    print(f"queries: {oracle.calls}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    img = load_pgm(args.input)
    pair = load_pgm(args.pair) if args.pair else None
    sources = [str(args.input)] + ([str(args.pair)] if args.pair else [])
    doc = metrics.report(img, pair, sources).to_json()
    if args.out:
        Path(args.out).write_text(doc)
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def cmd_demo(args) -> int:
    return EXIT_OK if run_demo(size=args.size) else EXIT_ATTACK


def cmd_oracle(args) -> int:
    """Serve one chosen-plaintext query over stdin/stdout."""
    oracle = CipherOracle(load_key(args.key))
    img = read_wide(sys.stdin.read())
    sys.stdout.buffer.write(write_pgm(oracle.encrypt_chosen(img)))
    sys.stdout.flush()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chaoscpa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encrypt", help="encrypt a PGM; writes <out>.json with eta")
    p.add_argument("--key", required=True)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a PGM with the real key")
    p.add_argument("--key", required=True)
    p.add_argument("--eta", type=int)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("attack", help="decrypt without the key using 5 chosen plaintexts")
    p.add_argument("--key", help="in-process oracle holding this key")
    p.add_argument("--oracle-cmd", help="external oracle command, run once per query")
    p.add_argument("--eta", type=int)
    p.add_argument("--emit-mask")
    p.add_argument("--emit-perm")
    p.add_argument("--emit-meta")
    p.add_argument("target")
    p.add_argument("output")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("metrics", help="statistical metric report as JSON")
    p.add_argument("input")
    p.add_argument("--pair")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("demo", help="toy and 256x256 attack walk-through")
    p.add_argument("--size", type=int, default=256)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("oracle", help="answer one oracle query (WideImage on stdin, PGM on stdout)")
    p.add_argument("--key", required=True)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chaoscpa: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AttackFailure as exc:
        print(f"chaoscpa: attack failed at stage '{exc.stage}': {exc}", file=sys.stderr)
        return EXIT_ATTACK
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"chaoscpa: {exc}", file=sys.stderr)
        return EXIT_INVALID
