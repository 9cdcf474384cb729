"""Command-line entry point.

Subcommands: keygen, keygen-multi, keygen-compat, verify, analyze,
shor-sim, shor-compare, census.  Exit codes: 0 success, 1 I/O or file
parse failure, 2 search exhausted, 3 invalid parameters, 4 verification
failure.

Keys and reports are JSON with sorted keys and hex-encoded integers;
gamma travels as an exact "num/den" string.  Every stochastic choice is
driven by --seed, which is mandatory for key generation: there is no
ambient randomness anywhere.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

from . import analysis, census, keyfile, shor_sim, validate
from .errors import ParameterError, ProxRsaError, SearchExhaustedError
from .keygen import (
    DEFAULT_SHIFT,
    KeyGenParams,
    generate_compatible,
    generate_keypair,
    generate_multiprime,
)
from .numerics import SeedStream

EXIT_OK = 0
EXIT_IO = 1
EXIT_EXHAUSTED = 2
EXIT_BAD_PARAMS = 3
EXIT_VERIFY_FAILED = 4

INSECURE_SMALL_THRESHOLD = 2048


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on parse errors; flag problems are invalid parameters here.
    def error(self, message):
        raise ParameterError(message)


def _parse_seed(text: Optional[str]) -> bytes:
    if text is None:
        raise ParameterError("--seed is required (64 hex characters)")
    t = text[2:] if text.startswith("0x") else text
    try:
        seed = bytes.fromhex(t)
    except ValueError as exc:
        raise ParameterError(f"seed is not valid hex: {text!r}") from exc
    if len(seed) != 32:
        raise ParameterError(f"seed must be exactly 32 bytes, got {len(seed)}")
    return seed


def _parse_gamma(text: Optional[str]) -> Optional[Fraction]:
    if text is None:
        return None
    return keyfile.gamma_from_str(text)


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        keyfile.atomic_write_bytes(out_path, text.encode("utf-8"))


def _json_text(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="proxrsa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_keygen_flags(p):
        p.add_argument("--k", type=int, required=True, help="modulus bit length")
        p.add_argument("--gamma", type=str, default=None, help="proximity bound as num/den")
        p.add_argument("--beta", type=float, default=0.9, help="entropy budget factor in (0,1)")
        p.add_argument("--epsilon", type=float, default=0.1, help="exponent for the default gamma")
        p.add_argument("--ell", type=int, default=None, help="small primes in congruence modulus")
        p.add_argument("--e", type=int, default=65537, help="public exponent")
        p.add_argument("--seed", type=str, default=None, help="64 hex chars; drives all choices")
        p.add_argument("--max-candidates", type=int, default=10_000)
        p.add_argument("--max-restarts", type=int, default=64)
        p.add_argument(
            "--insecure-small",
            action="store_true",
            help=f"acknowledge generation below {INSECURE_SMALL_THRESHOLD} bits",
        )
        p.add_argument("-o", "--out", type=str, default=None, help="key file path (default stdout)")

    p = sub.add_parser("keygen", help="two-prime entropy-constrained key")
    add_keygen_flags(p)

    p = sub.add_parser("keygen-multi", help="multi-prime key")
    add_keygen_flags(p)
    p.add_argument("--m", type=int, required=True, help="prime count (>= 3)")

    p = sub.add_parser("keygen-compat", help="layered key with wide outer gap")
    add_keygen_flags(p)
    p.add_argument("--shift", type=int, default=DEFAULT_SHIFT, help="inner/outer shift width")

    p = sub.add_parser("verify", help="re-validate a key file")
    p.add_argument("keyfile", type=str)

    p = sub.add_parser("analyze", help="quantum + classical metrics for a key file")
    p.add_argument("keyfile", type=str)
    p.add_argument("--kappa", type=float, default=None, help="Fano constant, if you have one")
    p.add_argument("--eps-param", type=float, default=None, help="epsilon for the Fano bound")
    p.add_argument("--fermat-budget", type=int, default=1 << 30)
    p.add_argument("-o", "--out", type=str, default=None)

    p = sub.add_parser("shor-sim", help="exact measurement statistics for a toy modulus")
    p.add_argument("--N", type=int, required=True, dest="modulus")
    p.add_argument("--a", type=int, default=None, help="base; omit to sweep")
    p.add_argument("--Q", type=int, default=None, dest="q_size")
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--sweep", type=int, default=20, help="bases to sample when --a is omitted")
    p.add_argument("--seed", type=str, default="00" * 32, help="seed for the base sweep")
    p.add_argument("-o", "--out", type=str, default=None)

    p = sub.add_parser("shor-compare", help="close vs wide prime pairs, success statistics")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True, help="closeness threshold on delta")
    p.add_argument("--Q", type=int, default=None, dest="q_size")
    p.add_argument("--bases", type=int, default=20)
    p.add_argument("--seed", type=str, default="00" * 32)
    p.add_argument("-o", "--out", type=str, default=None, help="CSV path (summary JSON on stdout)")

    p = sub.add_parser("census", help="prime-pair density over a range")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--gamma", type=str, required=True, help="num/den")
    p.add_argument("--mod", type=int, default=None, help="congruence modulus (with --a/--b)")
    p.add_argument("--a", type=int, default=None, dest="res_a")
    p.add_argument("--b", type=int, default=None, dest="res_b")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--out", type=str, default=None)
    return parser


def _keygen_params(args) -> KeyGenParams:
    if args.k < INSECURE_SMALL_THRESHOLD and not args.insecure_small:
        raise ParameterError(
            f"k={args.k} is far below production size; pass --insecure-small to proceed"
        )
    return KeyGenParams(
        k=args.k,
        seed=_parse_seed(args.seed),
        gamma=_parse_gamma(args.gamma),
        beta=args.beta,
        epsilon=args.epsilon,
        ell=args.ell,
        e=args.e,
        max_candidates=args.max_candidates,
        max_restarts=args.max_restarts,
    )


def _write_key(kp, out_path: Optional[str]) -> None:
    data = keyfile.document_to_bytes(keyfile.keypair_to_document(kp))
    if out_path is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        keyfile.atomic_write_bytes(out_path, data)
        print(
            f"note: {out_path} contains private key material; "
            "restrict its permissions (e.g. chmod 600)",
            file=sys.stderr,
        )


def _cmd_keygen(args) -> int:
    _write_key(generate_keypair(_keygen_params(args)), args.out)
    return EXIT_OK


def _cmd_keygen_multi(args) -> int:
    _write_key(generate_multiprime(_keygen_params(args), args.m), args.out)
    return EXIT_OK


def _cmd_keygen_compat(args) -> int:
    _write_key(generate_compatible(_keygen_params(args), args.shift), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    key = keyfile.read_key_file(args.keyfile)
    failures = validate.validate_key(key)
    if failures:
        for f in failures:
            print(f"FAIL: {f}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print(f"ok: {args.keyfile} passed all checks")
    return EXIT_OK


def _closest_pair(primes: list[int]) -> list[int]:
    best = None
    for i in range(len(primes)):
        for j in range(i + 1, len(primes)):
            p, q = primes[i], primes[j]
            # compare |p-q|/sqrt(pq) without floats: (p-q)^2 * p'q' vs ...
            if best is None or (p - q) ** 2 * best[0] * best[1] < (best[0] - best[1]) ** 2 * p * q:
                best = (p, q)
    return list(best)


def _cmd_analyze(args) -> int:
    key = keyfile.read_key_file(args.keyfile)
    if key.inner_primes:
        # layered keys: the quantum structure rides on the close inner
        # pair; classical attacks see the outer modulus (classical_report)
        pair = key.inner_primes
    elif len(key.primes) == 2:
        pair = key.primes
    else:
        # multi-prime: report the closest pair, the one the proximity
        # constraint binds hardest
        pair = _closest_pair(key.primes)
    quantum = analysis.complexity_report(
        pair[0], pair[1], key.gamma, k=key.k, kappa=args.kappa, eps_param=args.eps_param
    )
    classical = analysis.classical_report(key, args.fermat_budget)
    doc = {
        "keyfile": args.keyfile,
        "variant": key.variant,
        "quantum": quantum.to_dict(),
        "classical": classical.to_dict(),
    }
    _emit(_json_text(doc), args.out)
    return EXIT_OK


def _cmd_shor_sim(args) -> int:
    refine = not args.no_refine
    n = args.modulus
    if args.a is not None:
        dist = shor_sim.shor_distribution(n, args.a, args.q_size)
        doc = {
            "N": n,
            "a": args.a,
            "r": dist.r,
            "Q": dist.q_size,
            "success_prob": dist.success_prob,
            "success_prob_refined": dist.success_prob_refined,
            "refinement_default": refine,
            "circuit_orders": shor_sim.circuit_order_estimates(n),
        }
    else:
        stream = SeedStream(_parse_seed(args.seed))
        bases = shor_sim.draw_bases(stream, n, args.sweep)
        per_base = []
        for a in bases:
            per_base.append(
                {
                    "a": a,
                    "r": shor_sim.multiplicative_order(a, n),
                    "success_prob": shor_sim.shor_success_probability(n, a, args.q_size, False),
                    "success_prob_refined": shor_sim.shor_success_probability(
                        n, a, args.q_size, True
                    ),
                }
            )
        key = "success_prob_refined" if refine else "success_prob"
        doc = {
            "N": n,
            "Q": args.q_size or shor_sim.default_q(n),
            "bases": per_base,
            "mean_success_prob": sum(b["success_prob"] for b in per_base) / len(per_base),
            "mean_success_prob_refined": sum(b["success_prob_refined"] for b in per_base)
            / len(per_base),
            "refinement_default": refine,
            "selected_mean": sum(b[key] for b in per_base) / len(per_base),
        }
    _emit(_json_text(doc), args.out)
    return EXIT_OK


COMPARE_CSV_COLUMNS = [
    "group",
    "N",
    "p",
    "q",
    "delta",
    "angular_separation_num",
    "angular_separation_den",
    "mean_success_prob",
    "mean_success_prob_refined",
]


def _cmd_shor_compare(args) -> int:
    stream = SeedStream(_parse_seed(args.seed))
    report = shor_sim.compare_moduli(
        args.bits, args.pairs, args.gamma, stream, args.q_size, args.bases
    )
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(COMPARE_CSV_COLUMNS)
    for row in report.rows:
        writer.writerow(
            [
                row.group,
                row.n,
                row.p,
                row.q,
                repr(row.delta),
                row.angular_separation_num,
                row.angular_separation_den,
                repr(row.mean_success_prob),
                repr(row.mean_success_prob_refined),
            ]
        )
    csv_text = buf.getvalue()
    summary = {
        "bit_size": report.bit_size,
        "gamma_close": report.gamma_close,
        "bases_per_modulus": report.bases_per_modulus,
        "rows": len(report.rows),
        "groups": report.group_summary(),
    }
    if args.out is None:
        sys.stdout.write(csv_text)
    else:
        keyfile.atomic_write_bytes(args.out, csv_text.encode("utf-8"))
        sys.stdout.write(_json_text(summary))
    return EXIT_OK


CENSUS_CSV_COLUMNS = [
    "range_lo",
    "range_hi",
    "gamma",
    "prime_count",
    "pair_count",
    "empirical_density",
    "reference_density",
    "ratio",
    "modulus",
    "residue_a",
    "residue_b",
    "primes_in_class_a",
    "primes_in_class_b",
]


def _cmd_census(args) -> int:
    gamma = keyfile.gamma_from_str(args.gamma)
    has_mod = args.mod is not None
    if has_mod != (args.res_a is not None) or has_mod != (args.res_b is not None):
        raise ParameterError("--mod, --a and --b must be given together")
    if has_mod:
        report = census.census_progression(args.lo, args.hi, gamma, args.mod, args.res_a, args.res_b)
    else:
        report = census.census_pairs(args.lo, args.hi, gamma)
    if args.format == "json":
        _emit(_json_text(report.to_dict()), args.out)
    else:
        doc = report.to_dict()
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CENSUS_CSV_COLUMNS)
        writer.writerow([doc[c] for c in CENSUS_CSV_COLUMNS])
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


_COMMANDS = {
    "keygen": _cmd_keygen,
    "keygen-multi": _cmd_keygen_multi,
    "keygen-compat": _cmd_keygen_compat,
    "verify": _cmd_verify,
    "analyze": _cmd_analyze,
    "shor-sim": _cmd_shor_sim,
    "shor-compare": _cmd_shor_compare,
    "census": _cmd_census,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SearchExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except ProxRsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
