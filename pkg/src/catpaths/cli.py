"""Command-line entry point: ``catpaths <subcommand> ...``.

Exit codes: 0 success, 1 a check failed, 2 bad usage or bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from fractions import Fraction

from . import acceptance as AC
from . import asymptotics as A
from . import brute as B
from . import kernel as K
from . import limits as LM
from . import sampler as SM
from . import series as S
from .bijection import HPath, from_horizontal, to_horizontal
from .errors import CatPathsError
from .model import DYCK, JumpSet, parse_steps, path_statistics, validate_path

SCHEMA = "catpaths/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SLICES = ("excursions", "meanders", "E", "M", "Q", "D", "arches-cat", "H")
# options whose value may start with "-" (jump lists like "-1:1,1:1,q=1")
_DASH_VALUE_OPTS = ("--jumps",)


class UsageError(Exception):
    pass


def _fmt(x, digits: int) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.{digits}g}"
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and (math.isinf(obj) or math.isnan(obj)):
        return str(obj)
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def _emit_json(payload: dict, out):
    doc = {"schema": SCHEMA, "float_digits": 17}
    doc.update(payload)
    json.dump(_jsonable(doc), out, indent=2)
    out.write("\n")


def _emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _jumpset(args) -> JumpSet:
    try:
        return JumpSet.parse(args.jumps, args.policy)
    except (CatPathsError, ValueError) as e:
        raise UsageError(f"bad jump set {args.jumps!r}: {e}") from None


# -- subcommands ----------------------------------------------------------


def cmd_series(args, out) -> int:
    J = _jumpset(args)
    N = args.N
    if args.param:
        bs = S.parameter_series(J, N, args.param)
        if args.format == "json":
            _emit_json({"jumps": str(J), "param": args.param, "series": bs.to_json()}, out)
        else:
            width = max(len(r) for r in bs.rows)
            _emit_csv(["n"] + [f"k{k}" for k in range(width)],
                      [[n] + [str(bs.coeff(n, k)) for k in range(width)] for n in range(N + 1)], out)
        return EXIT_OK
    builders = {
        "excursions": S.f0_series,
        "meanders": S.f_series,
        "E": S.e_series,
        "M": S.m_series,
        "Q": S.q_series,
        "D": S.d_series,
        "arches-cat": lambda J, N: S.arch_series(J, N).A_cat,
        "H": lambda J, N: S.continued_fraction_H(N),
    }
    s = builders[args.slice](J, N)
    if args.format == "json":
        _emit_json({"jumps": str(J), "slice": args.slice, "series": s.to_json()}, out)
    elif args.format == "csv":
        _emit_csv(["n", "coefficient"], [[n, str(c)] for n, c in enumerate(s.coeffs)], out)
    else:
        out.write(",".join(str(c) for c in s.coeffs) + "\n")
    return EXIT_OK


def cmd_constants(args, out) -> int:
    J = _jumpset(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = K.classify_regime(J, with_eta=True)
    payload = {"jumps": str(J), "kernel": rep.to_json(), "warnings": [str(w.message) for w in caught]}
    if rep.regime is K.Regime.SUBCRITICAL:
        kp = K.kernel_point(J, rep.rho0)
        Qz = kp.Q_derivs()["Qz"]
        payload["C_e"] = kp.E() / (rep.rho0 * Qz)
        payload["C_m"] = kp.M(1.0) / (rep.rho0 * Qz)
    if J == DYCK:
        payload["dyck"] = A.dyck_constants().to_json()
    if args.format == "json":
        _emit_json(payload, out)
    else:
        flat = dict(rep.to_json())
        flat.pop("errors", None)
        flat.pop("warnings", None)
        for k in ("C_e", "C_m"):
            if k in payload:
                flat[k] = payload[k]
        if args.format == "csv":
            _emit_csv(["name", "value"], [[k, _fmt(v, args.digits)] for k, v in flat.items()], out)
        else:
            for k, v in flat.items():
                out.write(f"{k} = {_fmt(v, args.digits)}\n")
    return EXIT_OK


def cmd_asymptotics(args, out) -> int:
    J = _jumpset(args)
    est = A.asym_coeff(J, args.family, args.n, allow_periodic=args.allow_periodic)
    payload = {"jumps": str(J), "estimate": est.to_json()}
    if args.exact:
        exact = A.exact_coefficient(J, args.family, args.n)
        payload["exact"] = str(exact)
        payload["ratio_exact_over_estimate"] = est.ratio_to(exact)
    if args.format == "json":
        _emit_json(payload, out)
    else:
        rows = [[k, _fmt(v, args.digits)] for k, v in est.to_json().items()]
        if args.exact:
            rows.append(["ratio_exact_over_estimate", _fmt(payload["ratio_exact_over_estimate"], args.digits)])
        if args.format == "csv":
            _emit_csv(["name", "value"], rows, out)
        else:
            for k, v in rows:
                out.write(f"{k} = {v}\n")
    return EXIT_OK


def cmd_law(args, out) -> int:
    J = _jumpset(args)
    kw = {"allow_periodic": args.allow_periodic}
    if args.K is not None:
        kw["K_max"] = args.K
    law = LM.limit_law(J, args.param, **kw)
    if args.format == "json":
        _emit_json({"jumps": str(J), "param": args.param, "law": law.to_json()}, out)
        return EXIT_OK
    if isinstance(law, LM.DiscretePMF):
        rows = [[k, _fmt(p, args.digits)] for k, p in enumerate(law.pmf)]
        if args.format == "csv":
            _emit_csv(["k", "probability"], rows, out)
        else:
            params = ", ".join(f"{k}={_fmt(v, args.digits)}" for k, v in law.parameters().items())
            out.write(f"{law.variant} ({law.regime.value}) {params}\n")
            for k, p in rows:
                out.write(f"{k}\t{p}\n")
    else:
        rows = [[k, _fmt(v, args.digits)] for k, v in law.parameters().items()]
        if args.format == "csv":
            _emit_csv(["name", "value"], rows, out)
        else:
            out.write(f"{law.variant} ({law.regime.value})\n")
            for k, v in rows:
                out.write(f"{k} = {v}\n")
    return EXIT_OK


def _kind(text: str):
    return int(text) if text.isdigit() else text


def cmd_sample(args, out) -> int:
    J = _jumpset(args)
    t = SM.build_sampler(J, args.n, _kind(args.kind))
    paths = SM.sample_many(t, args.count, args.seed)
    lines = [str(p) for p in paths]
    sidecar = {
        "jumps": str(J),
        "n": args.n,
        "kind": args.kind,
        "count": args.count,
        "seed": args.seed,
        "rng": SM.RNG_NAME,
        "total_weight": str(t.total),
        "statistics": [path_statistics(p)._asdict() for p in paths],
    }
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
        with open(args.sidecar or args.out + ".json", "w") as fh:
            _emit_json(sidecar, fh)
    else:
        out.write("\n".join(lines) + ("\n" if lines else ""))
        if args.sidecar:
            with open(args.sidecar, "w") as fh:
                _emit_json(sidecar, fh)
    return EXIT_OK


def cmd_empirical_law(args, out) -> int:
    J = _jumpset(args)
    law = SM.empirical_law(J, args.n, args.trials, args.param, args.seed, args.threads, args.backend)
    if args.format == "json":
        _emit_json({"jumps": str(J), "empirical": law.to_json()}, out)
    else:
        tot = law.total
        _emit_csv(["k", "count", "frequency"],
                  [[k, c, _fmt(c / tot, args.digits)] for k, c in sorted(law.counts.items())], out)
    return EXIT_OK


def cmd_biject(args, out) -> int:
    J = _jumpset(args)
    src = [args.path] if args.path else [ln for ln in sys.stdin.read().splitlines() if ln.strip()]
    for line in src:
        if args.direction == "to-horizontal":
            p = validate_path(J, parse_steps(line))
            out.write(str(to_horizontal(p)) + "\n")
        else:
            out.write(str(from_horizontal(HPath.parse(line), J)) + "\n")
    return EXIT_OK


def cmd_oracle_check(args, out) -> int:
    J = _jumpset(args)
    census = B.Census(J, args.N)
    bad = AC.oracle_mismatches(J, census, args.N)
    if args.format == "json":
        _emit_json({"jumps": str(J), "N": args.N, "passed": not bad, "mismatches": bad}, out)
    else:
        out.write(f"{'PASS' if not bad else 'FAIL'}: {len(bad)} mismatching coefficients up to n={args.N}\n")
        for what, n, k in bad[:20]:
            out.write(f"  {what} n={n} k={k}\n")
    return EXIT_OK if not bad else EXIT_FAIL


def _figure_data(folder: str):
    """CSV data behind the plots: final-altitude PMFs, waiting-time PMF, one n=400 draw."""
    os.makedirs(folder, exist_ok=True)
    sets = {"dyck": DYCK, "motzkin": JumpSet.parse("-1:1,0:1,1:1,q=1"),
            "minus2_plus1": JumpSet.parse("-2:1,1:1,q=1"), "minus1_plus2": JumpSet.parse("-1:1,2:1,q=1")}
    with open(os.path.join(folder, "final_altitude_pmf.csv"), "w") as fh:
        laws = {name: LM.law_final_altitude(J, K_max=30).pmf for name, J in sets.items()}
        _emit_csv(["k"] + list(laws), [[k] + [repr(float(laws[nm][k])) for nm in laws] for k in range(31)], fh)
    with open(os.path.join(folder, "waiting_time_pmf.csv"), "w") as fh:
        pmf = LM.law_waiting_time(DYCK).pmf
        _emit_csv(["k", "parity", "probability"],
                  [[k, "even" if k % 2 == 0 else "odd", repr(float(p))] for k, p in enumerate(pmf)], fh)
    with open(os.path.join(folder, "dyck_n400_draw.csv"), "w") as fh:
        p = SM.sample(SM.build_sampler(DYCK, 400), 400)
        _emit_csv(["step", "altitude"], list(enumerate(p.altitudes)), fh)


def cmd_reproduce(args, out) -> int:
    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = AC.run_all(only)
    if args.figures:
        _figure_data(args.figures)
    if args.format == "json":
        _emit_json({"checks": [r.to_json() for r in results], "passed": all(r.passed for r in results)}, out)
    else:
        for r in results:
            out.write(r.line() + "\n")
        out.write(f"{sum(r.passed for r in results)}/{len(results)} checks passed\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catpaths", description="Lattice paths with catastrophes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, jumps=True):
        if jumps:
            p.add_argument("--jumps", default="-1:1,1:1,q=1", help='weighted jumps, e.g. "-1:1,1:1/2,q=1"')
            p.add_argument("--policy", default=None, help="default | anywhere | exclude:h1;h2")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--json", dest="format", action="store_const", const="json")
        p.add_argument("--csv", dest="format", action="store_const", const="csv")
        p.add_argument("--digits", type=int, default=15, help="significant digits for floats in text/csv")

    p = sub.add_parser("series", help="exact power series coefficients")
    common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--slice", choices=SLICES, default="excursions")
    p.add_argument("--param", choices=S.PARAMS, default=None, help="bivariate series by a path parameter")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("constants", help="structural constants, regime, rho0")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("asymptotics", help="leading-order estimate of d_n, e_n or m_n")
    common(p)
    p.add_argument("--family", choices=A.FAMILIES, default="e")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="also compute the exact coefficient")
    p.add_argument("--allow-periodic", action="store_true")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("law", help="limit law of a path parameter")
    common(p)
    p.add_argument("--param", choices=LM.LAW_PARAMS, required=True)
    p.add_argument("--K", type=int, default=None, help="truncation of discrete PMFs")
    p.add_argument("--allow-periodic", action="store_true")
    p.set_defaults(func=cmd_law)

    p = sub.add_parser("sample", help="exact weight-proportional random paths")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", default="excursion", help="excursion | meander | final altitude i")
    p.add_argument("--out", default=None, help="path file; the JSON sidecar goes next to it")
    p.add_argument("--sidecar", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("empirical-law", help="Monte-Carlo histogram of a path parameter")
    common(p)
    p.add_argument("--param", choices=SM.PARAMS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--backend", choices=("auto", "numba", "numpy"), default=None)
    p.set_defaults(func=cmd_empirical_law, format="csv")

    p = sub.add_parser("biject", help="map Dyck excursions with catastrophes to 1-horizontal paths")
    common(p)
    p.add_argument("--direction", choices=("to-horizontal", "from-horizontal"), default="to-horizontal")
    p.add_argument("--path", default=None, help="one path line; otherwise lines are read from stdin")
    p.set_defaults(func=cmd_biject)

    p = sub.add_parser("oracle-check", help="compare series with brute-force enumeration")
    common(p)
    p.add_argument("--N", type=int, default=10)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("reproduce-paper", help="run the acceptance suite")
    common(p, jumps=False)
    p.add_argument("--only", default=None, help="comma-separated check numbers")
    p.add_argument("--figures", default=None, help="folder for CSV figure data")
    p.set_defaults(func=cmd_reproduce)
    return ap


def _glue_dash_values(argv: list) -> list:
    out = []
    it = iter(argv)
    for a in it:
        if a in _DASH_VALUE_OPTS:
            val = next(it, None)
            out.append(a if val is None else f"{a}={val}")
        else:
            out.append(a)
    return out


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_dash_values(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CatPathsError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
