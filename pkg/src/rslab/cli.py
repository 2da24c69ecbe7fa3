"""rslab command line: codes, repair-scheme search, census, tables, codec."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from .galois import GF2, GF16, GF256
from .grs import (
    CodeError,
    backblaze_code,
    cauchy_systematic,
    cauchy_to_grs,
    classical_rs,
    family_code,
    find_singular_minor,
    format_code,
    genpoly_code,
    genpoly_parity_check,
    int_points,
    is_mds,
    vand_systematic,
)
from .repair import lift, read_scheme_file, verify_scheme, write_atomic, write_scheme_file
from .search.exhaustive import SearchInterrupted

log = logging.getLogger("rslab")

CONSTRUCTIONS = ("classical", "cauchy", "backblaze", "genpoly", "vand-systematic")


class VerificationFailed(RuntimeError):
    pass


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    return int(v) if v else default


def _echo(args: argparse.Namespace) -> None:
    """Print the effective configuration so a run can be repeated."""
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("# config " + " ".join(f"{k}={v}" for k, v in cfg.items()), file=sys.stderr)


def _exp(f, x: int) -> str:
    return "0" if x == 0 else f"z^{f.int_to_exp(x)}"


def _matrix(f, rows, exp: bool = False) -> str:
    fmt = (lambda x: _exp(f, int(x))) if exp else (lambda x: str(int(x)))
    cells = [[fmt(x) for x in row] for row in rows]
    w = max(len(c) for row in cells for c in row)
    return "\n".join("  " + " ".join(c.rjust(w) for c in row) for row in cells)


# code


def cmd_code(args) -> int:
    f = GF256
    n, k = args.n, args.k
    name = args.construction
    out = []
    code = None
    if name == "classical":
        code = classical_rs(f, int_points(n), k)
        g = code.generator()
    elif name == "cauchy":
        g = cauchy_systematic(n, k)
        code = cauchy_to_grs(n, k)
    elif name == "backblaze":
        g = backblaze_code(n, k)
    elif name == "genpoly":
        code = genpoly_code(n, n - k)
        g = code.generator()
    else:
        g = vand_systematic(n, k)

    if code is not None:
        out.append(format_code(code))
    if args.action == "dump":
        out.append(f"generator {g.k}x{g.n}")
        out += [" ".join(str(int(x)) for x in row) for row in g.rows]
        print("\n".join(out))
        return 0

    out.append(f"{name} n={n} k={k} over gf256")
    out.append("generator:")
    out.append(_matrix(f, g.rows))
    if g.is_systematic():
        out.append("non-identity block (exponents):")
        out.append(_matrix(f, g.rows[:, k:], exp=True))
    if code is not None:
        out.append("A = (" + ", ".join(_exp(f, a) for a in code.A) + ")")
        out.append("lambda = (" + ", ".join(_exp(f, x) for x in code.lam) + ")")
        out.append("dual gamma = (" + ", ".join(_exp(f, x) for x in code.dual(normalize=True).lam) + ")")
    if name == "genpoly":
        out.append("parity check (rows z^(ij)):")
        out.append(_matrix(f, genpoly_parity_check(n, n - k).rows))
    if args.check_equiv:
        ref = classical_rs(f, int_points(n), k)
        if name == "cauchy":
            out.append(f"equivalent to its GRS form: {str(g.same_code(code.generator())).lower()}")
        elif name == "genpoly":
            h = genpoly_parity_check(n, n - k)
            same = g.same_code(classical_rs(f, code.A, n - k).dual().generator()) and _orthogonal(f, g, h)
            out.append(f"equivalent to the null space of Vand(1..z^{n - 1}): {str(same).lower()}")
        else:
            out.append(f"equivalent to RS([0,{n - 1}],{k}): {str(g.same_code(ref.generator())).lower()}")
    if args.mds:
        mds = is_mds(g)
        out.append(f"MDS: {str(mds).lower()}")
        if not mds and g.is_systematic():
            rows, cols = find_singular_minor(g.rows[:, k:], f)
            out.append(f"singular minor rows={list(rows)} cols={[k + c for c in cols]}")
    print("\n".join(out))
    return 0


def _orthogonal(f, g, h) -> bool:
    from .galois import mat_mul

    return not np.any(mat_mul(f, g.rows, h.rows.T))


# search


def _search_paths(args, tag: str) -> tuple[str, str | None]:
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    ckpt = args.checkpoint
    if ckpt is None and os.environ.get("RSLAB_CHECKPOINT_DIR"):
        d = os.environ["RSLAB_CHECKPOINT_DIR"]
        os.makedirs(d, exist_ok=True)
        ckpt = os.path.join(d, tag + ".ckpt")
    return os.path.join(out_dir, tag + ".schemes"), ckpt


def cmd_search(args) -> int:
    from .search.exhaustive import SearchConfig, exhaustive_search
    from .search.degree_four import degree_four_search
    from .search.tables import format_reduction

    args.workers = args.workers or _env_int("RSLAB_WORKERS", 1)
    _echo(args)
    n, k = args.n, args.k
    tag = f"{args.family}-{args.algorithm}-n{n}-k{k}"
    scheme_path, ckpt = _search_paths(args, tag)
    big = family_code(args.family, n, k, GF256)

    if args.algorithm == "exhaustive":
        small = args.family == "f16"
        code = family_code("f16", n, k, GF16) if small else big
        factor = GF256.degree_over(GF16) if small else 1
        target = None if args.target_bandwidth is None else args.target_bandwidth // factor
        cfg = SearchConfig(code, GF2, workers=args.workers, checkpoint=ckpt, resume=args.resume,
                           target_bandwidth=target, seed=args.seed)
        res = exhaustive_search(cfg)
        schemes = {j: lift(s, GF256, code=big) for j, s in res.schemes.items()} if small else res.schemes
        if small:
            print(f"gf16 profile: {res.profile}")
    else:
        cfg = SearchConfig(big, GF2, theta2=args.theta2, theta4=args.theta4, candidate_cap=args.cap,
                           seed=args.seed)
        res = degree_four_search(cfg)
        schemes = res.schemes

    for j, s in schemes.items():
        if not verify_scheme(s, 100, args.seed):
            raise VerificationFailed(f"scheme for position {j} fails verification")
    for note in res.notes:
        print(f"note: {note}")
    profile = tuple(schemes[j].bandwidth if j in schemes else None for j in range(n))
    if schemes:
        write_scheme_file(scheme_path, big, [schemes[j] for j in sorted(schemes)])
        print(f"wrote {scheme_path}")
    print(f"profile (bits): {profile}")
    missing = [j for j in range(n) if j not in schemes]
    if missing:
        print(f"uncovered positions: {missing}", file=sys.stderr)
        return 3
    worst = max(profile)
    print("n,default,bits,reduction")
    print(f"{n},{8 * k},{worst},{format_reduction(worst, k)}")
    return 0


# profiles


def cmd_profiles(args) -> int:
    from .search.census import (
        build_rank_profile_table,
        direct_profile,
        optimal_profiles,
        write_census_csv,
    )

    _echo(args)
    t0 = time.perf_counter()
    table = build_rank_profile_table()
    print(f"sets enumerated: {table.enumerated}")
    print(f"sets retained: {table.retained}")
    print(f"distinct profiles: {len(table)}")
    census = optimal_profiles(args.n, table)
    print(f"subsets: {len(census.profiles)}")
    for prof, count in sorted(census.classes.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"  ({','.join(map(str, prof))}): {count}")
    if args.out:
        write_atomic(args.out, write_census_csv(census))
        print(f"wrote {args.out}")
    if args.check:
        A = tuple(sorted(int(x) for x in args.check.split(",")))
        got = census.profiles[A]
        want = direct_profile(A)
        print(f"A={A} census={got} direct={want}")
        if got != want:
            raise VerificationFailed("census disagrees with the direct search")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0


# tables


def _estimate_sets(n: int, r: int) -> int:
    from math import comb

    monic = comb(n + r - 2, r - 1)
    return comb(monic + 3, 4) * 15**3


def cmd_tables(args) -> int:
    from .search.exhaustive import SearchConfig, exhaustive_search
    from .search.tables import REFERENCE, format_reduction, reference

    _echo(args)
    rate = 6e6  # sets per second, rough single-core figure for the budget
    budget = args.budget
    lines = ["r,n,default,bits,reduction,source"]
    for r in args.r:
        for n in sorted(REFERENCE[r]):
            if args.n_max and n > args.n_max:
                continue
            k = n - r
            computed = None
            cost = _estimate_sets(n, r) / rate
            if args.family == "f16" and cost <= budget:
                t0 = time.perf_counter()
                code = family_code("f16", n, k, GF16)
                res = exhaustive_search(SearchConfig(code, GF2, verify_trials=20, seed=args.seed))
                big = family_code("f16", n, k, GF256)
                lifted = {j: lift(s, GF256, code=big) for j, s in res.schemes.items()}
                for j, s in lifted.items():
                    if not verify_scheme(s, 20, args.seed):
                        raise VerificationFailed(f"lifted scheme fails at n={n} r={r} j={j}")
                computed = max(s.bandwidth for s in lifted.values())
                budget -= time.perf_counter() - t0
            if computed is not None:
                bits, src = computed, "computed"
            else:
                bits, src = reference(n, r, args.family), "reference"
            lines.append(f"{r},{n},{8 * k},{bits},{format_reduction(bits, k)},{src}")
    text = "\n".join(lines) + "\n"
    if args.out:
        write_atomic(args.out, text)
    print(text, end="")
    return 0


# compile / bench / verify


def cmd_compile(args) -> int:
    from .codec import compile_tables

    code, schemes = read_scheme_file(args.schemes)
    tables = compile_tables(schemes)
    write_atomic(args.output, tables.to_bytes())
    print(f"wrote {args.output}: n={code.n} k={code.k} bandwidth={[tables.bandwidth(j) for j in range(code.n)]}")
    return 0


def cmd_bench(args) -> int:
    from .codec import bench, compile_tables, read_tables

    _echo(args)
    code, schemes = read_scheme_file(args.schemes)
    if args.tables:
        with open(args.tables, "rb") as fh:
            tables = read_tables(fh.read(), code)
    else:
        tables = compile_tables(schemes)
    erasure = args.erasure if args.erasure == "random" else int(args.erasure)
    rep = bench(code, tables, args.codewords, erasure, args.seed)
    text = rep.to_csv()
    if args.out:
        write_atomic(args.out, text)
    print(text, end="")
    if args.codewords:
        saved = 1 - rep.bits["trace"] / rep.bits["naive"]
        print(f"# trace/naive time ratio {rep.ratio():.2f}, bits saved {100 * saved:.1f}%", file=sys.stderr)
    if not rep.exact:
        raise VerificationFailed("repaired symbols differ from the originals")
    return 0


def cmd_verify(args) -> int:
    code, schemes = read_scheme_file(args.schemes)
    bad = []
    for s in schemes:
        ok = verify_scheme(s, args.trials, args.seed)
        print(f"target {s.target}: bandwidth {s.bandwidth} bits, {'ok' if ok else 'FAILED'}")
        if not ok:
            bad.append(s.target)
    if args.tables:
        from .codec import compile_tables, read_tables

        with open(args.tables, "rb") as fh:
            data = fh.read()
        read_tables(data, code)
        if compile_tables(schemes).to_bytes() != data:
            bad.append("tables")
            print("tables: differ from a fresh compile")
        else:
            print("tables: byte-identical to a fresh compile")
    if bad:
        raise VerificationFailed(f"failed: {bad}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rslab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("code", parents=[common], help="describe or dump a construction")
    c.add_argument("action", choices=("describe", "dump"))
    c.add_argument("construction", choices=CONSTRUCTIONS)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--check-equiv", action="store_true")
    c.add_argument("--mds", action="store_true")
    c.set_defaults(func=cmd_code)

    s = sub.add_parser("search", parents=[common], help="search for low-bandwidth repair schemes")
    s.add_argument("algorithm", choices=("exhaustive", "deg4"))
    s.add_argument("--family", choices=("isal", "f16", "genpoly", "classical"), default="f16")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--theta2", type=int)
    s.add_argument("--theta4", type=int)
    s.add_argument("--cap", type=int, help="pairs kept per position in the degree-four search")
    s.add_argument("--workers", type=int, help="default: $RSLAB_WORKERS or 1")
    s.add_argument("--checkpoint", help="default: $RSLAB_CHECKPOINT_DIR/<run>.ckpt when set")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--target-bandwidth", type=int, help="stop once every position needs at most this many bits")
    s.add_argument("--out", help="directory for scheme files")
    s.set_defaults(func=cmd_search)

    pr = sub.add_parser("profiles", parents=[common], help="optimal profiles of every RS(n, n-2) over GF(16)")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--out", help="per-subset CSV")
    pr.add_argument("--check", help="comma-separated A to re-derive by direct search")
    pr.set_defaults(func=cmd_profiles)

    t = sub.add_parser("tables", parents=[common], help="bandwidth table rows, computed where the budget allows")
    t.add_argument("--r", type=int, nargs="+", default=[2, 3, 4], choices=(2, 3, 4))
    t.add_argument("--family", choices=("f16", "isal"), default="f16")
    t.add_argument("--budget", type=float, default=60.0, help="seconds of search to spend")
    t.add_argument("--n-max", type=int)
    t.add_argument("--out")
    t.set_defaults(func=cmd_tables)

    co = sub.add_parser("compile", parents=[common], help="compile a scheme file into lookup tables")
    co.add_argument("schemes")
    co.add_argument("-o", "--output", required=True)
    co.set_defaults(func=cmd_compile)

    b = sub.add_parser("bench", parents=[common], help="trace repair against the naive baseline")
    b.add_argument("schemes")
    b.add_argument("--tables")
    b.add_argument("--codewords", type=int, default=10**5)
    b.add_argument("--erasure", default="random", help="position index or 'random'")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", parents=[common], help="re-verify a scheme file (and optionally its tables)")
    v.add_argument("schemes")
    v.add_argument("--tables")
    v.add_argument("--trials", type=int, default=100)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (VerificationFailed, CodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SearchInterrupted as exc:
        print(f"interrupted: {exc}", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
