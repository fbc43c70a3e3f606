"""Command-line front end.

Ingests JSON definition files (schema 1), orchestrates validation,
cohomology tables, Weil-tower reports and pairing comparisons, caches
expensive results, and emits human-readable (text) and machine-readable
(json, csv) reports.

Exit codes: 0 success (including "no cotraces" findings), 1 failed
checks or axiom violations, 2 parse/input errors, 3 usage errors.

Machine reports (json, csv) contain no timing and no cache status, so
repeated runs over the same input are byte-identical; the text format
appends both.  Cached entries are keyed by tool version, input content
hash and the full cap/flag set, and store exactly the machine report,
so a cache hit reproduces a recomputation byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from . import __version__
from . import weil as wl
from .complexes import IdentityFailure
from .cyclic import (Unstabilized, build_coalgebra_cocyclic, cohomology)
from .pairing import (CotraceInvalid, NotACocycle, TraceInvalid,
                      compare_pairings, cotrace_basis, s_compare)
from .structures import (ParseError, StructureBundle, load_structure,
                         validate_coalgebra, validate_hopf,
                         validate_module_actions, validate_sayd)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_USAGE = 3


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str]
    max_degree: int
    w_cap: int
    m_deg: int
    mode: Optional[str]
    fmt: str
    cache_dir: Optional[str]
    signed: bool


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def _new_report(cfg: RunConfig, input_hash: Optional[str]) -> dict:
    return {
        "tool": "hopfcyc",
        "version": __version__,
        "report_schema": 1,
        "command": cfg.command,
        "input_sha256": input_hash,
        "caps": {"max_degree": cfg.max_degree, "w_cap": cfg.w_cap,
                 "m_deg": cfg.m_deg},
        "mode": cfg.mode,
        "signed": cfg.signed,
        "checks": [],
        "tables": {},
        "scalars": {},
        "notes": [],
    }


def _check(report: dict, name: str, passed: bool,
           witness: Optional[str] = None) -> None:
    entry = {"name": name, "status": "pass" if passed else "fail"}
    if witness is not None:
        entry["witness"] = witness
    report["checks"].append(entry)


def _all_passed(report: dict) -> bool:
    return all(c["status"] == "pass" for c in report["checks"])


def _frac(x: Fraction) -> str:
    return str(x)


def _dims_row(dims: Dict[int, int]) -> Dict[str, int]:
    return {str(k): dims[k] for k in sorted(dims)}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "name", "field", "value"])
    for c in report["checks"]:
        w.writerow(["check", c["name"], "status", c["status"]])
        if "witness" in c:
            w.writerow(["check", c["name"], "witness", c["witness"]])
    for tname in sorted(report["tables"]):
        for i, row in enumerate(report["tables"][tname]):
            for col in sorted(row):
                w.writerow(["table", tname, f"{i}.{col}", row[col]])
    for sname in sorted(report["scalars"]):
        w.writerow(["scalar", sname, "value", report["scalars"][sname]])
    for note in report["notes"]:
        w.writerow(["note", "", "", note])
    return buf.getvalue()


def render_text(report: dict, elapsed: float, cache_status: str) -> str:
    lines = [f"hopfcyc {report['version']} — {report['command']}"]
    if report["input_sha256"]:
        lines.append(f"input sha256: {report['input_sha256']}")
    caps = report["caps"]
    lines.append(f"caps: max_degree={caps['max_degree']} "
                 f"w_cap={caps['w_cap']} m_deg={caps['m_deg']}")
    for c in report["checks"]:
        mark = "ok " if c["status"] == "pass" else "FAIL"
        extra = f"  [{c['witness']}]" if "witness" in c else ""
        lines.append(f"  {mark} {c['name']}{extra}")
    for tname in sorted(report["tables"]):
        lines.append(f"table {tname}:")
        for row in report["tables"][tname]:
            cells = "  ".join(f"{k}={row[k]}" for k in sorted(row))
            lines.append(f"    {cells}")
    for sname in sorted(report["scalars"]):
        lines.append(f"scalar {sname} = {report['scalars'][sname]}")
    for note in report["notes"]:
        lines.append(f"note: {note}")
    lines.append(f"cache: {cache_status}")
    lines.append(f"elapsed: {elapsed:.2f}s")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def cache_root(cfg: RunConfig) -> str:
    env = os.environ.get("HOPFCYC_CACHE")
    if env:
        return env
    if cfg.cache_dir:
        return cfg.cache_dir
    return os.path.join(os.path.expanduser("~"), ".cache", "hopfcyc")


def _cache_key(cfg: RunConfig, input_hash: Optional[str]) -> str:
    blob = json.dumps({
        "version": __version__,
        "command": cfg.command,
        "input_sha256": input_hash,
        "caps": {"max_degree": cfg.max_degree, "w_cap": cfg.w_cap,
                 "m_deg": cfg.m_deg},
        "mode": cfg.mode,
        "signed": cfg.signed,
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_load(root: str, key: str) -> Optional[dict]:
    path = os.path.join(root, key + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            entry = json.load(fh)
        return entry["report"]
    except (json.JSONDecodeError, KeyError, OSError) as exc:
        print(f"warning: evicting corrupt cache entry {path}: {exc}",
              file=sys.stderr)
        try:
            os.remove(path)
        except OSError:
            pass
        return None


def cache_store(root: str, key: str, cfg: RunConfig,
                input_hash: Optional[str], report: dict) -> None:
    os.makedirs(root, exist_ok=True)
    entry = {
        "key": {"version": __version__, "command": cfg.command,
                "input_sha256": input_hash,
                "caps": {"max_degree": cfg.max_degree, "w_cap": cfg.w_cap,
                         "m_deg": cfg.m_deg},
                "mode": cfg.mode, "signed": cfg.signed},
        "report": report,
    }
    fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, sort_keys=True)
        os.replace(tmp, os.path.join(root, key + ".json"))
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_validate(bundle: StructureBundle, cfg: RunConfig,
                 report: dict) -> None:
    rep = validate_hopf(bundle.hopf)
    _check(report, "hopf", rep.passed,
           rep.violations[0] if rep.violations else None)
    for name in sorted(bundle.coalgebras):
        c_mod = bundle.coalgebras[name]
        rep = validate_coalgebra(c_mod.coalgebra)
        _check(report, f"coalgebra:{name}", rep.passed,
               rep.violations[0] if rep.violations else None)
        rep = validate_module_actions(bundle.hopf, c_mod, None)
        _check(report, f"h-action:{name}", rep.passed,
               rep.violations[0] if rep.violations else None)
    for name in sorted(bundle.sayd_modules):
        m = bundle.sayd_modules[name]
        rep = validate_sayd(bundle.hopf, m)
        _check(report, f"sayd:{name}", rep.passed,
               rep.violations[0] if rep.violations else None)
        report["tables"].setdefault("sayd_flags", []).append(
            {"module": name, "ayd": rep.flags.get("ayd", False),
             "stable": rep.flags.get("stable", False)})
        if not rep.flags.get("stable", True):
            report["notes"].append(f"sayd:{name} stable: false")
    for aname in sorted(bundle.algebras):
        a = bundle.algebras[aname]
        paired = False
        if a.c_action is not None:
            for cname in sorted(bundle.coalgebras):
                c_mod = bundle.coalgebras[cname]
                if c_mod.coalgebra.dim == len(a.c_action):
                    rep = validate_module_actions(bundle.hopf, c_mod, a)
                    _check(report, f"actions:{cname}->{aname}", rep.passed,
                           rep.violations[0] if rep.violations else None)
                    paired = True
        if not paired:
            rep = validate_module_actions(bundle.hopf, None, a)
            _check(report, f"algebra:{aname}", rep.passed,
                   rep.violations[0] if rep.violations else None)


def cmd_cohomology(bundle: StructureBundle, cfg: RunConfig,
                   report: dict) -> None:
    mode = cfg.mode or "cyclic"
    rows: List[dict] = []
    for cname in sorted(bundle.coalgebras):
        c_mod = bundle.coalgebras[cname]
        for mname in sorted(bundle.sayd_modules):
            m_mod = bundle.sayd_modules[mname]
            row: dict = {"coalgebra": cname, "module": mname, "mode": mode}
            data = build_coalgebra_cocyclic(bundle.hopf, c_mod, m_mod,
                                            cfg.max_degree + 1)
            try:
                dims = cohomology(data, mode)
                row["status"] = "ok"
                row.update({f"H{k}": v for k, v in _dims_row(dims).items()})
            except IdentityFailure as exc:
                row["status"] = "identity-failure"
                report["notes"].append(
                    f"{cname}/{mname}: {exc} (mixed complex undefined; "
                    f"try --mode hochschild)")
            except Unstabilized as exc:
                row["status"] = "unstabilized"
                report["notes"].append(
                    f"{cname}/{mname}: {exc}; raise --max-degree")
            rows.append(row)
    report["tables"]["cohomology"] = rows


def cmd_weil(bundle: StructureBundle, cfg: RunConfig, report: dict) -> None:
    tower_rows: List[dict] = []
    tail_rows: List[dict] = []
    seq_rows: List[dict] = []
    for cname in sorted(bundle.coalgebras):
        c_mod = bundle.coalgebras[cname]
        for mname in sorted(bundle.sayd_modules):
            m_mod = bundle.sayd_modules[mname]
            flags = validate_sayd(bundle.hopf, m_mod).flags
            if not flags.get("ayd", False):
                report["notes"].append(
                    f"{cname}/{mname}: skipped (coefficients are not "
                    f"anti-Yetter-Drinfeld)")
                continue
            wb = wl.build_weil(c_mod, bundle.hopf, m_mod,
                               max_degree=cfg.max_degree)
            acyc = wl.tower_cohomology(wb, None, cfg.signed)
            _check(report, f"acyclicity:{cname}/{mname}",
                   all(v == 0 for v in acyc.values()),
                   next((f"H^{p} has dim {v}" for p, v in sorted(
                       acyc.items()) if v), None))
            try:
                data = build_coalgebra_cocyclic(bundle.hopf, c_mod, m_mod,
                                                cfg.max_degree)
                hc = cohomology(data, "cyclic")
            except IdentityFailure as exc:
                report["notes"].append(
                    f"{cname}/{mname}: cyclic comparison skipped ({exc})")
                continue
            tower_ok = True
            tail_ok = True
            for n in range(cfg.w_cap + 1):
                for p, dim in sorted(wl.tower_cohomology(
                        wb, n, cfg.signed).items()):
                    q = p - 1 - 2 * n
                    expect = hc.get(q, 0) if q >= 0 else 0
                    eq = dim == expect
                    tower_ok = tower_ok and eq
                    tower_rows.append(
                        {"coalgebra": cname, "module": mname, "n": n,
                         "p": p, "tower": dim, "cyclic": expect,
                         "verdict": "equal" if eq else "unequal"})
                for p, dim in sorted(wl.ideal_tail_cohomology(
                        wb, n + 1, cfg.signed).items()):
                    q = p - 2 - 2 * n
                    expect = hc.get(q, 0) if q >= 0 else 0
                    eq = dim == expect
                    tail_ok = tail_ok and eq
                    tail_rows.append(
                        {"coalgebra": cname, "module": mname, "n": n,
                         "p": p, "tail": dim, "cyclic": expect,
                         "verdict": "equal" if eq else "unequal"})
                for which in ("comw1", "comi1"):
                    seq = wl.sequence_check(wb, which, n if which == "comw1"
                                            else n + 1, cfg.signed)
                    for p in sorted(seq):
                        for slot in sorted(seq[p]):
                            seq_rows.append(
                                {"coalgebra": cname, "module": mname,
                                 "sequence": which, "n": n, "p": p,
                                 "slot": slot, "exact": seq[p][slot]})
            _check(report, f"tower-dims:{cname}/{mname}", tower_ok)
            _check(report, f"tail-dims:{cname}/{mname}", tail_ok)
            _check(report, f"sequences:{cname}/{mname}",
                   all(r["exact"] for r in seq_rows
                       if r["coalgebra"] == cname and r["module"] == mname))
    report["tables"]["tower"] = tower_rows
    report["tables"]["ideal_tail"] = tail_rows
    report["tables"]["sequences"] = seq_rows
    cs_rows: List[dict] = []
    cs_ok = True
    for n, idents in sorted(wl.cs_identity_check(cfg.max_degree).items()):
        for ident in sorted(idents):
            for span in sorted(idents[ident]):
                ok = idents[ident][span]
                if span != "strict":
                    cs_ok = cs_ok and ok
                cs_rows.append({"n": n, "identity": ident, "span": span,
                                "holds": ok})
    report["tables"]["cs_identities"] = cs_rows
    _check(report, "cs-identities", cs_ok)


def _pick_pair_instance(bundle: StructureBundle):
    if not bundle.coalgebras:
        raise ParseError("$.coalgebras", "pair needs at least one coalgebra")
    cname = sorted(bundle.coalgebras)[0]
    best = None
    for mname in sorted(bundle.sayd_modules):
        flags = validate_sayd(bundle.hopf, bundle.sayd_modules[mname]).flags
        if flags.get("ayd") and flags.get("stable"):
            best = mname
            break
    if best is None:
        raise ParseError("$.sayd_modules",
                         "pair needs a stable anti-Yetter-Drinfeld module")
    return cname, bundle.coalgebras[cname], best, bundle.sayd_modules[best]


def cmd_pair(bundle: StructureBundle, cfg: RunConfig, report: dict) -> int:
    cname, c_mod, mname, m_mod = _pick_pair_instance(bundle)
    report["notes"].append(f"instance: coalgebra {cname}, module {mname}")
    m_deg, n_deg = cfg.m_deg, cfg.w_cap
    if cfg.max_degree < m_deg + 2 * n_deg + 4:
        print(f"error: --max-degree must be at least m + 2n + 4 = "
              f"{m_deg + 2 * n_deg + 4} for --m-deg {m_deg} "
              f"--w-cap {n_deg}", file=sys.stderr)
        return EXIT_USAGE
    wb = wl.build_weil(c_mod.coalgebra, max_degree=cfg.max_degree)
    cot = cotrace_basis(c_mod, m_mod, m_deg, wb)
    report["tables"]["cotraces"] = [{"m_deg": m_deg, "dim": cot.dim}]
    if cot.dim == 0:
        report["notes"].append("no cotraces")
        return EXIT_OK
    data = build_coalgebra_cocyclic(bundle.hopf, c_mod, m_mod,
                                    cfg.max_degree - 1)
    if cfg.mode == "shift":
        sc = s_compare(wb, bundle.hopf, c_mod, m_mod, data, n_deg, m_deg)
        report["tables"]["shift"] = [{
            "q": sc.q,
            "tower_shift": str(sorted(sc.tower_shift.entries.items())),
            "module_shift": str(sorted(sc.module_shift.entries.items())),
        }]
        if sc.scalar is not None:
            report["scalars"]["shift_ratio"] = _frac(sc.scalar)
        _check(report, "shift-proportional", sc.scalar is not None)
        return EXIT_OK if _all_passed(report) else EXIT_CHECK_FAILED
    rows: List[dict] = []
    for j in range(cot.dim):
        xi = cot.basis.column(j)
        pc = compare_pairings(bundle.hopf, c_mod, m_mod, xi, m_deg, n_deg,
                              wb, data)
        rows.append({
            "cotrace": j,
            "factor": _frac(pc.factor),
            "match": pc.match,
            "ratio": "" if pc.ratio is None else _frac(pc.ratio),
            "tower_route": " ".join(map(_frac, pc.tower_route)),
            "direct_route": " ".join(map(_frac, pc.direct_route)),
        })
        _check(report, f"factor:{cname}/{mname}:cotrace{j}", pc.match,
               None if pc.match else f"measured ratio {pc.ratio}")
    report["tables"]["comparison"] = rows
    report["scalars"]["expected_factor"] = _frac(
        Fraction(m_deg + 1, m_deg + n_deg + 1))
    return EXIT_OK if _all_passed(report) else EXIT_CHECK_FAILED


def cmd_cache(cfg: RunConfig, report: dict) -> None:
    root = cache_root(cfg)
    entries = sorted(f for f in (os.listdir(root) if os.path.isdir(root)
                                 else []) if f.endswith(".json"))
    if cfg.mode == "clear":
        for f in entries:
            os.remove(os.path.join(root, f))
        report["notes"].append(f"cleared {len(entries)} entries")
        entries = []
    rows: List[dict] = []
    for f in entries:
        path = os.path.join(root, f)
        try:
            with open(path, encoding="utf-8") as fh:
                key = json.load(fh)["key"]
            rows.append({"entry": f[:-5][:12], "command": key["command"],
                         "version": key["version"],
                         "input": (key["input_sha256"] or "")[:12],
                         "max_degree": key["caps"]["max_degree"],
                         "w_cap": key["caps"]["w_cap"]})
        except (json.JSONDecodeError, KeyError, OSError) as exc:
            print(f"warning: evicting corrupt cache entry {path}: {exc}",
                  file=sys.stderr)
            os.remove(path)
    report["tables"]["cache"] = rows


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _parse_args(argv: Optional[List[str]]) -> RunConfig:
    p = argparse.ArgumentParser(
        prog="hopfcyc",
        description="Exact-arithmetic Hopf-cyclic cohomology toolkit")
    p.add_argument("command",
                   choices=["validate", "cohomology", "weil", "pair",
                            "cache"])
    p.add_argument("input", nargs="?",
                   help="JSON definition file (schema 1)")
    p.add_argument("--max-degree", type=int, default=6, metavar="D")
    p.add_argument("--w-cap", type=int, default=0, metavar="N")
    p.add_argument("--m-deg", type=int, default=0, metavar="M")
    p.add_argument("--mode",
                   help="cohomology: cyclic|hochschild|periodic; "
                        "pair: compare|shift; cache: list|clear")
    p.add_argument("--format", choices=["text", "csv", "json"],
                   default="text", dest="fmt")
    p.add_argument("--cache-dir", metavar="PATH")
    p.add_argument("--signed-rel", choices=["true", "false"],
                   default="true")
    a = p.parse_args(argv)
    return RunConfig(command=a.command, input_path=a.input,
                     max_degree=a.max_degree, w_cap=a.w_cap, m_deg=a.m_deg,
                     mode=a.mode, fmt=a.fmt, cache_dir=a.cache_dir,
                     signed=a.signed_rel == "true")


def main(argv: Optional[List[str]] = None) -> int:
    t0 = time.monotonic()
    cfg = _parse_args(argv)
    if cfg.max_degree <= 0 or cfg.w_cap < 0 or cfg.m_deg < 0:
        print("error: caps must be positive", file=sys.stderr)
        return EXIT_USAGE
    input_hash = None
    bundle = None
    if cfg.command != "cache":
        if not cfg.input_path:
            print(f"error: {cfg.command} needs an input file",
                  file=sys.stderr)
            return EXIT_USAGE
        try:
            with open(cfg.input_path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            print(f"error: cannot read input: {exc}", file=sys.stderr)
            return EXIT_PARSE
        input_hash = hashlib.sha256(raw).hexdigest()
        try:
            bundle = load_structure(raw.decode("utf-8"))
        except (ParseError, UnicodeDecodeError) as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_PARSE

    report = _new_report(cfg, input_hash)
    cache_status = "off"
    code = EXIT_OK
    cacheable = cfg.command in ("cohomology", "weil", "pair")
    root = cache_root(cfg)
    key = _cache_key(cfg, input_hash)
    cached = cache_load(root, key) if cacheable else None
    if cached is not None:
        report = cached
        cache_status = "hit"
        code = EXIT_OK if _all_passed(report) else EXIT_CHECK_FAILED
        if cfg.command == "pair" and any(
                n == "no cotraces" for n in report["notes"]):
            code = EXIT_OK
    else:
        try:
            if cfg.command == "validate":
                cmd_validate(bundle, cfg, report)
                code = (EXIT_OK if _all_passed(report)
                        else EXIT_CHECK_FAILED)
            elif cfg.command == "cohomology":
                cmd_cohomology(bundle, cfg, report)
            elif cfg.command == "weil":
                cmd_weil(bundle, cfg, report)
                code = (EXIT_OK if _all_passed(report)
                        else EXIT_CHECK_FAILED)
            elif cfg.command == "pair":
                code = cmd_pair(bundle, cfg, report)
            elif cfg.command == "cache":
                cmd_cache(cfg, report)
        except (CotraceInvalid, TraceInvalid, NotACocycle,
                IdentityFailure) as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_CHECK_FAILED
        if cacheable and code != EXIT_USAGE:
            cache_store(root, key, cfg, input_hash, report)
            cache_status = "miss"

    if cfg.fmt == "json":
        sys.stdout.write(render_json(report))
    elif cfg.fmt == "csv":
        sys.stdout.write(render_csv(report))
    else:
        sys.stdout.write(render_text(report, time.monotonic() - t0,
                                     cache_status))
    return code


if __name__ == "__main__":
    sys.exit(main())
