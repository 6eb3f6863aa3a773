"""Command-line experiment runner.

Every subcommand writes a JSON report (config echo, results, checks with
targets and tolerances, table provenance) and exits 0 when all checks pass,
2 when a tolerance check fails and 1 on errors.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import covers, fuchsian, reps, rmt, spectral
from .fuchsian import GeodesicTable, PrimitiveClass, TABLE_FORMAT_VERSION, _sort_key
from .rng import stream

PRESETS = {"octagon": fuchsian.build_genus2_octagon}


# -- table cache -------------------------------------------------------------

class TableFormatError(ValueError):
    pass


def _table_body(table: GeodesicTable) -> str:
    lines = [f"LSPEC v{table.version} preset={table.preset} genus={table.genus} "
             f"maxlen={table.cutoff!r} count={len(table)}"]
    for c in table.classes:
        lines.append(f"word={c.canonical_word} len={c.length:.17g} prim={int(c.primitive)} "
                     f"pair={c.inverse_pair} p0={int(c.p0_representative)}")
    return "\n".join(lines) + "\n"


def serialize_table(table: GeodesicTable) -> bytes:
    body = _table_body(table).encode()
    return body + b"sha256=" + hashlib.sha256(body).hexdigest().encode() + b"\n"


def write_table(table: GeodesicTable, path) -> str:
    """Write the table; returns the sha256 of the file contents."""
    data = serialize_table(table)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return hashlib.sha256(data).hexdigest()


def _kv(line: str) -> dict[str, str]:
    out = {}
    for tok in line.split():
        k, sep, v = tok.partition("=")
        if not sep:
            raise TableFormatError(f"malformed token {tok!r}")
        out[k] = v
    return out


def parse_table(data: bytes) -> GeodesicTable:
    try:
        text = data.decode()
    except UnicodeDecodeError as e:
        raise TableFormatError("table is not valid UTF-8") from e
    lines = text.split("\n")
    if len(lines) < 3 or lines[-1] != "" or not lines[-2].startswith("sha256="):
        raise TableFormatError("missing checksum trailer")
    body = "\n".join(lines[:-2]) + "\n"
    if hashlib.sha256(body.encode()).hexdigest() != lines[-2][len("sha256="):]:
        raise TableFormatError("checksum mismatch")
    head = lines[0].split(maxsplit=1)
    if head[0] != "LSPEC" or len(head) < 2:
        raise TableFormatError("not an LSPEC table")
    ver, _, rest = head[1].partition(" ")
    if ver != f"v{TABLE_FORMAT_VERSION}":
        raise TableFormatError(f"unsupported table version {ver}")
    hdr = _kv(rest)
    records = lines[1:-2]
    if int(hdr["count"]) != len(records):
        raise TableFormatError("record count mismatch")
    classes = []
    for r in records:
        kv = _kv(r)
        classes.append(PrimitiveClass(kv["word"], float(kv["len"]), kv["prim"] == "1",
                                      int(kv["pair"]), kv["p0"] == "1"))
    keys = [_sort_key(c.canonical_word, c.length) for c in classes]
    if any(keys[i] >= keys[i + 1] for i in range(len(keys) - 1)):
        raise TableFormatError("records not sorted")
    for i, c in enumerate(classes):
        j = c.inverse_pair
        if not (0 <= j < len(classes)) or j == i or classes[j].inverse_pair != i:
            raise TableFormatError(f"bad inverse pairing at record {i}")
        if c.p0_representative != (i < j):
            raise TableFormatError(f"bad p0 flag at record {i}")
    cutoff = float(hdr["maxlen"])
    if classes and classes[-1].length > cutoff:
        raise TableFormatError("record longer than the table cutoff")
    return GeodesicTable(cutoff=cutoff, classes=tuple(classes), preset=hdr["preset"],
                         genus=int(hdr["genus"]))


def read_table(path) -> GeodesicTable:
    return parse_table(Path(path).read_bytes())


def cache_dir() -> Path:
    env = os.environ.get("SPECLAB_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "speclab"


def cache_path(preset: str, T: float) -> Path:
    return cache_dir() / f"{preset}_T{T:g}.lspec"


def load_or_build(preset: str, T: float, table_path=None, workers: int = 1) -> tuple[GeodesicTable, str]:
    """Table restricted to length <= T, plus the sha256 of the file it came from."""
    if table_path:
        data = Path(table_path).read_bytes()
        table = parse_table(data)
    else:
        found = None
        if cache_dir().is_dir():
            for p in sorted(cache_dir().glob(f"{preset}_T*.lspec")):
                try:
                    t = float(p.stem.split("_T", 1)[1])
                except ValueError:
                    continue
                if t >= T - 1e-12 and (found is None or t < found[0]):
                    found = (t, p)
        if found is None:
            table = fuchsian.enumerate_primitives(PRESETS[preset](), T, workers=workers)
            p = cache_path(preset, T)
            write_table(table, p)
        else:
            p = found[1]
        data = p.read_bytes()
        table = parse_table(data)
    if table.preset != preset:
        raise ValueError(f"table preset {table.preset!r} does not match requested {preset!r}")
    if table.cutoff < T - 1e-12:
        raise ValueError(f"table cutoff {table.cutoff} below requested length {T}")
    return table.restrict(T), hashlib.sha256(data).hexdigest()


# -- reports -----------------------------------------------------------------

@dataclass
class Report:
    command: str
    config: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    table_sha256: str | None = None
    timing: dict | None = None

    def check(self, name: str, value: float, *, target=None, tol=None, low=None, high=None,
              ok: bool | None = None) -> bool:
        if ok is None:
            ok = True
            if tol is not None:
                ok = abs(value - target) <= tol
            if low is not None:
                ok = ok and value >= low
            if high is not None:
                ok = ok and value <= high
        entry = {"name": name, "value": value, "pass": bool(ok)}
        for k, v in (("target", target), ("tol", tol), ("low", low), ("high", high)):
            if v is not None:
                entry[k] = v
        self.checks.append(entry)
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> str:
        d = {"command": self.command, "config": self.config, "results": self.results,
             "checks": self.checks, "pass": self.passed, "table_sha256": self.table_sha256,
             "version": __version__}
        if self.timing is not None:
            d["timing"] = self.timing
        return json.dumps(_jsonable(d), sort_keys=True, indent=2) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(float(x.real)), "im": _jsonable(float(x.imag))}
    return x


def _floats(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


def _tol(args, name: str, default: float) -> float:
    for item in args.tol or []:
        k, _, v = item.partition("=")
        if k == name:
            return float(v)
    return default


# -- subcommands -------------------------------------------------------------

def cmd_enumerate(args, rep: Report):
    group = PRESETS[args.preset]()
    T = args.max_length
    table = fuchsian.enumerate_primitives(group, T, verify_radius=args.verify_radius,
                                          workers=args.workers)
    out = Path(args.out_table) if args.out_table else cache_path(args.preset, T)
    rep.table_sha256 = write_table(table, out)
    N0, N = fuchsian.count(table, T)
    rep.results.update(table_path=str(out), classes=len(table), N0=N0, N=N,
                       systole=group.systole,
                       prime_ratio=N0 * T / math.exp(T) if T > 0 else None)


def cmd_verify_table(args, rep: Report):
    group = PRESETS[args.preset]()
    T = args.max_length
    table, rep.table_sha256 = load_or_build(args.preset, T, args.table, args.workers)
    rep.results["classes"] = len(table)
    N0, N = fuchsian.count(table, T)
    rep.results.update(N0=N0, N=N, prime_ratio=N0 * T / math.exp(T))
    for i, c in enumerate(table.classes):
        m = fuchsian.word_matrix(group, c.canonical_word)
        if abs(fuchsian.translation_length(m) - c.length) > 1e-9:
            raise ValueError(f"stored length of record {i} disagrees with its word")
    if args.oracle:
        cmp = fuchsian.compare_with_oracle(group, table, T)
        rep.results.update(oracle_N0=cmp["oracle_N0"], oracle_N=cmp["oracle_N"],
                           split_classes=cmp["split_classes"])
        rep.check("dual_enumeration_agreement", float(cmp["agree"]), ok=cmp["agree"])
    if args.prime_window:
        lo, hi = _floats(args.prime_window)
        rep.check("prime_ratio", N0 * T / math.exp(T), low=lo, high=hi)


def cmd_homcount(args, rep: Report):
    group = PRESETS[args.preset]()
    n = args.n
    exact = covers.count_homs_exhaustive(group, n)
    formula = covers.hom_count_formula(n, group.genus)
    rep.results.update(exhaustive=exact, formula=formula)
    rep.check("exhaustive_equals_formula", float(exact), target=float(formula), tol=0.0)
    if args.samples:
        hits, trials = covers.rejection_acceptance(group, n, args.samples, stream(args.seed, 0))
        p0 = formula / math.factorial(n) ** (2 * group.genus)
        rate = hits / trials
        se = math.sqrt(p0 * (1 - p0) / trials)
        rep.results.update(accepted=hits, trials=trials, rate=rate, expected_rate=p0, rate_se=se)
        rep.check("rejection_rate", rate, target=p0, tol=3 * se)


def cmd_fixstats(args, rep: Report):
    group = PRESETS[args.preset]()
    words = args.words.split(",")
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            ci = fuchsian.cyclic_canonical(group, words[i])
            if ci in (fuchsian.cyclic_canonical(group, words[j]),
                      fuchsian.cyclic_canonical(group, fuchsian.inverse(words[j]))):
                raise ValueError(f"{words[i]} and {words[j]} are conjugate up to inversion")
    powers = _ints(args.powers)
    slack_mean = {1: _tol(args, "mean1", 0.25), 2: _tol(args, "mean2", 0.6)}
    for n in _ints(args.n_list or str(args.n)):
        fs = covers.fix_moment_experiment(group, words, powers, n, args.samples, args.seed,
                                          workers=args.workers)
        res = {"mean": fs.mean, "mean_se": fs.mean_se, "cov": fs.cov, "cov_se": fs.cov_se,
               "cycle_mean": fs.cycle_mean, "cycle_mean_se": fs.cycle_mean_se,
               "cycle_var": fs.cycle_var, "cycle_var_se": fs.cycle_var_se,
               "cycle_ds": fs.cycle_ds}
        rep.results[f"n={n}"] = res
        if n != args.n:
            continue
        for wi, w in enumerate(words):
            for ki, k in enumerate(powers):
                d = covers.divisor_count(k)
                rep.check(f"mean F({w}^{k})", float(fs.mean[wi, ki]), target=float(d),
                          tol=3 * float(fs.mean_se[wi, ki]) + slack_mean.get(k, 0.6))
            if 1 in powers:
                v, se = fs.covariance(wi, 1, wi, 1)
                rep.check(f"var F({w})", v, target=1.0, tol=3 * se + _tol(args, "var", 0.6))
            if 1 in powers and 2 in powers:
                v, se = fs.covariance(wi, 1, wi, 2)
                rep.check(f"cov F({w}),F({w}^2)", v, target=float(covers.vcov_limit(1, 2)),
                          tol=3 * se + _tol(args, "cov12", 0.8))
            for di, d in enumerate(fs.cycle_ds):
                slack = _tol(args, "cycle", 0.6)
                rep.check(f"mean C_{d}({w})", float(fs.cycle_mean[wi, di]), target=1 / d,
                          tol=3 * float(fs.cycle_mean_se[wi, di]) + slack)
                rep.check(f"var C_{d}({w})", float(fs.cycle_var[wi, di]), target=1 / d,
                          tol=3 * float(fs.cycle_var_se[wi, di]) + slack)
        if 1 in powers:
            for i in range(len(words)):
                for j in range(i + 1, len(words)):
                    v, se = fs.covariance(i, 1, j, 1)
                    rep.check(f"cov F({words[i]}),F({words[j]})", v, target=0.0,
                              tol=3 * se + _tol(args, "indep", 0.6))
    if args.n_list:
        ns = _ints(args.n_list)
        dev = [float(np.abs(np.asarray(rep.results[f"n={n}"]["mean"])
                            - [covers.divisor_count(k) for k in powers]).sum()) for n in ns]
        rep.results["mean_deviation_by_n"] = dict(zip(map(str, ns), dev))
        rep.check("deviation_shrinks_with_n", dev[-1], high=dev[0])


def cmd_connectivity(args, rep: Report):
    group = PRESETS[args.preset]()
    frac, se = covers.connectivity_fraction(group, args.n, args.samples, args.seed)
    rep.results.update(fraction=frac, se=se)
    rep.check("connected_fraction", frac, low=_tol(args, "min_fraction", 0.9))


def _char(args, group):
    return reps.parse_character(args.char, group)


def cmd_variance_limit(args, rep: Report):
    group = PRESETS[args.preset]()
    Ls = _floats(args.L)
    table, rep.table_sha256 = load_or_build(args.preset, max(Ls), args.table, args.workers)
    ch = _char(args, group)
    tf = spectral.parse_test_function(args.tf)
    symmetric = ch.orientation_symmetric if args.target == "auto" else args.target == "goe"
    sigma2 = spectral.goe_sigma2(tf) if symmetric else spectral.gue_sigma2(tf)
    kmax = None if args.kmax == "auto" else int(args.kmax)
    rows = []
    for L in Ls:
        vt = spectral.limit_variance(table, ch, spectral.Window(args.alpha, L), tf, kmax)
        rows.append({"L": L, "S": vt.S, "sigma2": sigma2, "ratio": vt.S / sigma2, "kmax": vt.kmax,
                     "S11": vt.S11, "S_NP": vt.S_NP, "np_ratio": vt.np_ratio})
    dev = [abs(r["ratio"] - 1) for r in rows]
    trend = all(dev[i + 1] <= dev[i] + 1e-12 for i in range(len(dev) - 1))
    for r in rows:
        r["trend_monotone"] = int(trend)
    rep.results.update(rows=rows, ensemble="GOE" if symmetric else "GUE", sigma2=sigma2)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            wr.writeheader()
            for r in rows:
                wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    lo, hi = _tol(args, "ratio_low", 0.5), _tol(args, "ratio_high", 1.6)
    rep.check(f"ratio at L={Ls[-1]:g}", rows[-1]["ratio"], low=lo, high=hi)
    rep.check("|ratio-1| non-increasing", dev[-1], ok=trend)
    if args.np_check:
        r0, r1 = rows[0]["np_ratio"], rows[-1]["np_ratio"]
        rep.check(f"S_NP/S11 at L={Ls[-1]:g}", r1, high=_tol(args, "np_max", 0.25))
        rep.check("S_NP/S11 decreasing", r1, high=r0, ok=r1 < r0)


def cmd_variance_mc(args, rep: Report):
    group = PRESETS[args.preset]()
    L = _floats(args.L)[0]
    table, rep.table_sha256 = load_or_build(args.preset, L, args.table, args.workers)
    ch = _char(args, group)
    tf = spectral.parse_test_function(args.tf)
    window = spectral.Window(args.alpha, L)
    S = spectral.limit_variance(table, ch, window, tf).S
    rep.results["S_limit"] = S
    gaps = {}
    for n in _ints(args.n_list or str(args.n)):
        perms = covers.sample_homs(group, n, args.samples, args.seed)
        x = spectral.geometric_sums_batch(table, ch, perms, window, tf)
        dev2 = (x - x.mean()) ** 2
        var = float(dev2.sum() / (len(x) - 1))
        se = float(dev2.std(ddof=1) / math.sqrt(len(x)))
        gaps[n] = abs(var - S)
        rep.results[f"n={n}"] = {"variance": var, "se": se, "gap": gaps[n]}
        if n == args.n:
            rep.check(f"MC variance n={n}", var, target=S,
                      tol=3 * se + _tol(args, "rel", 0.3) * S)
    if args.n_list:
        ns = _ints(args.n_list)
        rep.check("gap shrinks with n", gaps[ns[-1]], high=gaps[ns[0]])


def cmd_chebotarev(args, rep: Report):
    group = PRESETS[args.preset]()
    xs = _floats(args.x)
    table, rep.table_sha256 = load_or_build(args.preset, max(xs), args.table, args.workers)
    ch = _char(args, group)
    trivial = ch.abelian is not None and not any(ch.abelian.theta)
    rows = []
    for x in xs:
        total, li = reps.chebotarev_sum(table, ch, args.f, x)
        N0, _ = fuchsian.count(table, x)
        rows.append({"x": x, "sum": total, "li_ratio": li, "N0": N0,
                     "abs_over_N0": abs(total) / N0 if N0 else float("nan")})
    rep.results["rows"] = rows
    if args.f == "1" and trivial:
        r = rows[-1]["li_ratio"].real
        rep.check(f"sum/Li(e^x) at x={xs[-1]:g}", r, low=_tol(args, "li_low", 0.8),
                  high=_tol(args, "li_high", 1.25))
    elif args.f == "tr" and not trivial:
        a0, a1 = rows[0]["abs_over_N0"], rows[-1]["abs_over_N0"]
        rep.check(f"|sum chi|/N0 at x={xs[-1]:g}", a1, high=_tol(args, "decay_max", 0.2))
        rep.check("|sum chi|/N0 decreasing", a1, high=a0, ok=a1 < a0)


def cmd_equi1(args, rep: Report):
    group = PRESETS[args.preset]()
    Ts = _floats(args.max_length_list or str(args.max_length))
    table, rep.table_sha256 = load_or_build(args.preset, max(Ts), args.table, args.workers)
    ch = _char(args, group)
    tf = spectral.parse_test_function(args.tf)
    rows = []
    for T in Ts:
        r = spectral.equi1_check(table, ch, args.alpha, tf, T)
        rows.append({"T": T, "S_T": r.S_T, "predicted": r.predicted, "ratio": r.ratio})
    rep.results["rows"] = rows
    p0 = spectral.equi1_prediction(tf, Ts[-1], 2.0, 0.0)
    p1 = spectral.equi1_prediction(tf, Ts[-1], 2.0, 1.0)
    rep.results["prediction_alpha0_over_alpha1"] = p0 / p1
    rep.check("alpha=0 prediction doubles", p0 / p1, target=2.0, tol=1e-12)
    rep.check(f"ratio at T={Ts[-1]:g}", rows[-1]["ratio"], low=_tol(args, "low", 0.7),
              high=_tol(args, "high", 1.3))
    if len(rows) > 1:
        d0, d1 = abs(rows[0]["ratio"] - 1), abs(rows[-1]["ratio"] - 1)
        rep.check("closer to 1 at larger T", d1, high=d0)


def cmd_haar(args, rep: Report):
    kind, N = args.group.upper(), args.dim
    m = reps.haar_trace_moments(kind, N, args.samples, stream(args.seed, 0))
    rep.results.update(abs2=m.abs2, abs2_se=m.abs2_se, sq=m.sq, sq_se=m.sq_se,
                       f_mean=m.f_mean, f_se=m.f_se)
    real = kind in ("O", "SO", "SP") or (kind == "SU" and N == 2)
    rep.check("E|Tr|^2", m.abs2, target=1.0, tol=3 * m.abs2_se)
    sq_target = 1.0 if real else 0.0
    rep.check("E Re(Tr^2)", m.sq.real, target=sq_target, tol=3 * m.sq_se)
    if kind != "SU" or N >= 3:
        rep.check("E Im(Tr^2)", m.sq.imag, target=0.0, tol=3 * m.sq_se)


def cmd_rmt(args, rep: Report):
    tf = spectral.parse_test_function(args.tf)
    kinds = ["GOE", "GUE"] if args.ensemble == "both" else [args.ensemble.upper()]
    out = {}
    for k in kinds:
        cfg = rmt.EnsembleConfig(kind=k, N=args.dim, M=args.samples, W=args.W, seed=args.seed,
                                 method=args.method)
        out[k] = rmt.smoothed_count_variance(cfg, tf)
        rep.results[k] = {"variance": out[k][0], "se": out[k][1]}
    oracle = rmt.sine_kernel_variance(tf, args.W)
    s2 = spectral.gue_sigma2(tf)
    rep.results.update(sine_kernel_oracle=oracle, gue_sigma2=s2, goe_sigma2=2 * s2)
    if "GUE" in out:
        v = out["GUE"][0]
        rep.check("GUE vs sine-kernel oracle", v / oracle, target=1.0, tol=_tol(args, "oracle", 0.15))
        rep.check("GUE vs Sigma2_GUE", v / s2, target=1.0, tol=_tol(args, "sigma2", 0.25))
    if len(out) == 2:
        ratio = out["GOE"][0] / out["GUE"][0]
        rep.results["goe_gue_ratio"] = ratio
        rep.check("GOE/GUE ratio", ratio, low=_tol(args, "ratio_low", 1.7),
                  high=_tol(args, "ratio_high", 2.3))


def cmd_report_merge(args, rep: Report):
    merged = []
    for p in args.inputs:
        d = json.loads(Path(p).read_text())
        merged.append({"file": Path(p).name, "command": d["command"], "pass": d["pass"],
                       "table_sha256": d.get("table_sha256")})
        for c in d["checks"]:
            rep.checks.append({**c, "name": f"{d['command']}: {c['name']}"})
    shas = {m["table_sha256"] for m in merged if m["table_sha256"]}
    rep.results.update(reports=merged, table_hashes=sorted(shas))


COMMANDS = {
    "enumerate": cmd_enumerate, "verify-table": cmd_verify_table, "homcount": cmd_homcount,
    "fixstats": cmd_fixstats, "connectivity": cmd_connectivity,
    "variance-limit": cmd_variance_limit, "variance-mc": cmd_variance_mc,
    "chebotarev": cmd_chebotarev, "equi1": cmd_equi1, "haar": cmd_haar, "rmt": cmd_rmt,
    "report-merge": cmd_report_merge,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", default="octagon", choices=sorted(PRESETS))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="JSON report path (stdout when omitted)")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override a tolerance (repeatable)")
    table = argparse.ArgumentParser(add_help=False)
    table.add_argument("--table", help="LSPEC table file (default: cache, built on demand)")
    tfarg = argparse.ArgumentParser(add_help=False)
    tfarg.add_argument("--tf", default="bump", help="test function: bump, bump:s or zero")

    p = argparse.ArgumentParser(prog="speclab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", parents=[common])
    s.add_argument("--max-length", type=float, required=True)
    s.add_argument("--verify-radius", type=int, default=None)
    s.add_argument("--out-table")

    s = sub.add_parser("verify-table", parents=[common, table])
    s.add_argument("--max-length", type=float, required=True)
    s.add_argument("--oracle", action="store_true", help="cross-check against matrix-ball enumeration")
    s.add_argument("--prime-window", help="LOW,HIGH window for N0(T) T / e^T")

    s = sub.add_parser("homcount", parents=[common])
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--samples", type=int, default=0, help="rejection trials for the acceptance rate")

    s = sub.add_parser("fixstats", parents=[common])
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--n-list", help="comma-separated degrees for the trend check")
    s.add_argument("--samples", type=int, default=20000)
    s.add_argument("--words", default="a,ab")
    s.add_argument("--powers", default="1,2")

    s = sub.add_parser("connectivity", parents=[common])
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--samples", type=int, default=10000)

    s = sub.add_parser("variance-limit", parents=[common, table, tfarg])
    s.add_argument("--char", default="trivial")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--L", default="6,8,10")
    s.add_argument("--kmax", default="auto")
    s.add_argument("--target", default="auto", choices=["auto", "goe", "gue"])
    s.add_argument("--np-check", action="store_true")
    s.add_argument("--csv")

    s = sub.add_parser("variance-mc", parents=[common, table, tfarg])
    s.add_argument("--char", default="trivial")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--L", default="5")
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--n-list")
    s.add_argument("--samples", type=int, default=10000)

    s = sub.add_parser("chebotarev", parents=[common, table])
    s.add_argument("--char", default="abelian:0.31,0.07,0.53,0.19")
    s.add_argument("--f", default="tr", help="trace polynomial; tr gives the character sum")
    s.add_argument("--x", default="6,8,10")

    s = sub.add_parser("equi1", parents=[common, table, tfarg])
    s.add_argument("--char", default="trivial")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--max-length", type=float, default=10.0)
    s.add_argument("--max-length-list")

    s = sub.add_parser("haar", parents=[common])
    s.add_argument("--group", default="SU", choices=["U", "SU", "O", "SO", "SP", "u", "su", "o", "so", "sp"])
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--samples", type=int, default=100000)

    s = sub.add_parser("rmt", parents=[common, tfarg])
    s.add_argument("--ensemble", default="both", choices=["goe", "gue", "both"])
    s.add_argument("--dim", type=int, default=800)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--W", type=float, default=10.0)
    s.add_argument("--method", default="tridiagonal", choices=["tridiagonal", "dense"])

    s = sub.add_parser("report-merge", parents=[common])
    s.add_argument("inputs", nargs="+")
    return p


_NON_CONFIG = {"out", "timing", "workers"}


def run(argv=None) -> tuple[Report, int]:
    args = build_parser().parse_args(argv)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _NON_CONFIG}
    rep = Report(args.command, config)
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
        code = 0 if rep.passed else 2
    except (ValueError, OSError, KeyError, RuntimeError) as e:
        rep.results["error"] = f"{type(e).__name__}: {e}"
        code = 1
    if args.timing:
        rep.timing = {"seconds": time.perf_counter() - t0}
    text = rep.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if code == 1:
        print(rep.results["error"], file=sys.stderr)
    return rep, code


def main(argv=None) -> int:
    return run(argv)[1]


if __name__ == "__main__":
    sys.exit(main())
